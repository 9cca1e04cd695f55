"""Abstract syntax for fuzzy answer set optimization programs.

Every node is a frozen dataclass, so programs can be compared structurally,
hashed and shared between workers.  Terms and fuzzy annotations share one
expression language: numbers, symbolic constants, variables, function terms
and the four arithmetic operators.  In annotation position the function
symbols ``min`` and ``max`` are interpreted; elsewhere a function term is an
uninterpreted constructor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

EPSILON = 1e-9

AGGREGATE_FUNCTIONS = ("sum", "times", "min", "max", "count")
OPT_KINDS = ("max_u", "min_u", "max_x", "min_x", "max_xu", "min_xu")
RELATIONS = ("=", "!=", "<", ">", "<=", ">=")
ARITH_OPS = ("+", "-", "*", "/")
ANNOTATION_FUNCTIONS = ("min", "max")


def join(a: float, b: float) -> float:
    return max(a, b)


def meet(a: float, b: float) -> float:
    return min(a, b)


def grade_leq(a: float, b: float, eps: float = EPSILON) -> bool:
    return a <= b + eps


def grade_eq(a: float, b: float, eps: float = EPSILON) -> bool:
    return abs(a - b) <= eps


def grade_lt(a: float, b: float, eps: float = EPSILON) -> bool:
    """``a < b`` where "less" means by more than ``eps``."""
    return a < b - eps


@dataclass(frozen=True)
class Grade:
    """A membership degree in the lattice ([0, 1], <=)."""

    value: float

    def __post_init__(self):
        if not (0.0 <= self.value <= 1.0):
            raise ValueError(f"grade {self.value!r} outside [0, 1]")

    def join(self, other: "Grade") -> "Grade":
        return Grade(max(self.value, other.value))

    def meet(self, other: "Grade") -> "Grade":
        return Grade(min(self.value, other.value))


# -- terms / expressions ------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float

    def __str__(self):
        return format_number(self.value)


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Func:
    name: str
    args: tuple

    def __str__(self):
        return f"{self.name}({', '.join(format_expr(a) for a in self.args)})"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"

    def __str__(self):
        return format_expr(self)


@dataclass(frozen=True)
class Neg:
    arg: "Expr"

    def __str__(self):
        return format_expr(self)


Expr = Union[Num, Const, Var, Func, BinOp, Neg]
Term = Expr

ONE = Num(1.0)


class EvaluationError(ValueError):
    """Raised when an expression cannot be reduced to a number."""


def format_number(v: float) -> str:
    if math.isfinite(v) and float(v).is_integer():
        return str(int(v))
    return repr(float(v))


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def format_expr(e, parent_prec: int = 0, right: bool = False) -> str:
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        s = f"{format_expr(e.left, p)} {e.op} {format_expr(e.right, p, True)}"
        if p < parent_prec or (right and p == parent_prec):
            return f"({s})"
        return s
    if isinstance(e, Neg):
        inner = e.arg
        if isinstance(inner, (BinOp, Neg)) or (isinstance(inner, Num) and inner.value < 0):
            return f"-({format_expr(inner)})"
        return f"-{format_expr(inner)}"
    return str(e)


def normalize_number(v: float) -> float:
    """Round arithmetic results to 12 significant digits.

    Keeps ``6*0.91 - 0.91*0.91`` and the literal ``4.6319`` the same atom
    argument.
    """
    if not math.isfinite(v):
        return v
    return float(f"{v:.12g}")


def expr_vars(e) -> Iterator[str]:
    if isinstance(e, Var):
        yield e.name
    elif isinstance(e, Func):
        for a in e.args:
            yield from expr_vars(a)
    elif isinstance(e, BinOp):
        yield from expr_vars(e.left)
        yield from expr_vars(e.right)
    elif isinstance(e, Neg):
        yield from expr_vars(e.arg)


def is_ground(e) -> bool:
    return next(expr_vars(e), None) is None


def is_arithmetic(e) -> bool:
    return isinstance(e, (BinOp, Neg))


def substitute(e, theta: dict):
    if isinstance(e, Var):
        return theta.get(e.name, e)
    if isinstance(e, Func):
        return Func(e.name, tuple(substitute(a, theta) for a in e.args))
    if isinstance(e, BinOp):
        return BinOp(e.op, substitute(e.left, theta), substitute(e.right, theta))
    if isinstance(e, Neg):
        return Neg(substitute(e.arg, theta))
    return e


def evaluate(e, env: Optional[dict] = None, annotation: bool = False) -> float:
    """Evaluate a numeric expression.

    ``env`` maps variable names to floats.  With ``annotation=True`` the
    function symbols ``min`` and ``max`` are interpreted.
    """
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        if env is not None and e.name in env:
            v = env[e.name]
            if isinstance(v, Num):
                return v.value
            if isinstance(v, (int, float)):
                return float(v)
        raise EvaluationError(f"unbound or non-numeric variable {e.name}")
    if isinstance(e, Neg):
        return -evaluate(e.arg, env, annotation)
    if isinstance(e, BinOp):
        a = evaluate(e.left, env, annotation)
        b = evaluate(e.right, env, annotation)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if b == 0:
            raise EvaluationError("division by zero")
        return a / b
    if isinstance(e, Func) and annotation and e.name in ANNOTATION_FUNCTIONS and e.args:
        vals = [evaluate(a, env, annotation) for a in e.args]
        return min(vals) if e.name == "min" else max(vals)
    raise EvaluationError(f"cannot evaluate {format_expr(e)} as a number")


def reduce_term(t):
    """Reduce ground term-level arithmetic to numeric constants."""
    if isinstance(t, (BinOp, Neg)):
        return Num(normalize_number(evaluate(t)))
    if isinstance(t, Func):
        return Func(t.name, tuple(reduce_term(a) for a in t.args))
    return t


def fold_annotation(e):
    """Evaluate a variable-free annotation to a constant grade.

    Expressions with variables, or whose value falls outside [0, 1], are
    returned unchanged so the printed ground program still parses.
    """
    if isinstance(e, Num) or not is_ground(e):
        return e
    v = normalize_number(evaluate(e, annotation=True))
    return Num(v) if 0.0 <= v <= 1.0 else e


# -- literals and aggregates --------------------------------------------------


@dataclass(frozen=True)
class Literal:
    predicate: str
    args: tuple = ()
    negated: bool = False

    @property
    def signature(self) -> tuple:
        return (self.negated, self.predicate, len(self.args))

    def complement(self) -> "Literal":
        return Literal(self.predicate, self.args, not self.negated)

    def substitute(self, theta: dict) -> "Literal":
        return Literal(self.predicate, tuple(substitute(a, theta) for a in self.args), self.negated)

    def __str__(self):
        s = ("-" if self.negated else "") + self.predicate
        if self.args:
            s += "(" + ", ".join(format_expr(a) for a in self.args) + ")"
        return s


@dataclass(frozen=True)
class AnnotatedLiteral:
    literal: Literal
    annotation: Expr = ONE
    naf: bool = False

    def __str__(self):
        return f"{'not ' if self.naf else ''}{self.literal} : {format_expr(self.annotation)}"


@dataclass(frozen=True)
class FuzzySet:
    """Symbolic fuzzy set ``{X : U | C}``."""

    head: Term
    annotation: Expr
    condition: tuple  # of AnnotatedLiteral

    def __str__(self):
        cond = ", ".join(str(c) for c in self.condition)
        return f"{format_expr(self.head)} : {format_expr(self.annotation)} | {cond}"


@dataclass(frozen=True)
class SetEntry:
    """One ground pair ``<x : u | C>``; ``u`` may mention annotation variables."""

    head: Term
    annotation: Expr
    condition: tuple

    def __str__(self):
        cond = ", ".join(str(c) for c in self.condition)
        return f"{format_expr(self.head)} : {format_expr(self.annotation)} | {cond}"


@dataclass(frozen=True)
class GroundFuzzySet:
    entries: tuple  # of SetEntry

    def __str__(self):
        return "; ".join(f"<{e}>" for e in self.entries)


@dataclass(frozen=True)
class Aggregate:
    """``f(S)``; ``function`` is None for the singleton abbreviation."""

    function: Optional[str]
    set: Union[FuzzySet, GroundFuzzySet]

    def __str__(self):
        body = str(self.set)
        if self.function is None:
            return body
        return f"#{self.function}_f{{ {body} }}" if body else f"#{self.function}_f{{}}"


@dataclass(frozen=True)
class AggregateAtom:
    aggregate: Aggregate
    relation: str
    guard: Term
    annotation: Expr = ONE
    naf: bool = False

    def __str__(self):
        return (
            f"{'not ' if self.naf else ''}{self.aggregate} {self.relation} "
            f"{format_expr(self.guard)} : {format_expr(self.annotation)}"
        )


@dataclass(frozen=True)
class OptAggregate:
    kind: str
    aggregate: Aggregate

    def __str__(self):
        inner = str(self.aggregate)
        return f"#{self.kind}{{ {inner} }}" if inner else f"#{self.kind}{{}}"


@dataclass(frozen=True)
class And:
    left: "Combination"
    right: "Combination"

    def __str__(self):
        return f"{_wrap(self.left, (Or,))} && {_wrap(self.right, (Or, And))}"


@dataclass(frozen=True)
class Or:
    left: "Combination"
    right: "Combination"

    def __str__(self):
        return f"{self.left} || {_wrap(self.right, (Or,))}"


def _wrap(c, kinds) -> str:
    return f"({c})" if isinstance(c, kinds) else str(c)


Combination = Union[AnnotatedLiteral, AggregateAtom, OptAggregate, And, Or]
Leaf = (AnnotatedLiteral, AggregateAtom, OptAggregate)


@dataclass(frozen=True)
class Comparison:
    """Arithmetic guard in a generator-rule body."""

    relation: str
    left: Term
    right: Term

    def __str__(self):
        return f"{format_expr(self.left)} {self.relation} {format_expr(self.right)}"


# -- rules and programs -------------------------------------------------------


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int
    length: int = 1

    def __str__(self):
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class GeneratorRule:
    head: tuple  # of AnnotatedLiteral (disjunction); empty = constraint
    body: tuple = ()  # AnnotatedLiteral | Comparison
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    @property
    def is_constraint(self) -> bool:
        return not self.head

    @property
    def is_disjunctive_fact(self) -> bool:
        return len(self.head) > 1 and not self.body


@dataclass(frozen=True)
class PreferenceRule:
    head: tuple  # of Combination, most preferred first
    body: tuple = ()  # AnnotatedLiteral | AggregateAtom
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Program:
    gen: tuple = ()
    pref: tuple = ()


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    span: Optional[SourceSpan] = None

    def __str__(self):
        where = f"{self.span}: " if self.span else ""
        return f"{where}{self.severity}: {self.message}"


# -- traversal helpers --------------------------------------------------------


def combination_leaves(c) -> Iterator:
    if isinstance(c, (And, Or)):
        yield from combination_leaves(c.left)
        yield from combination_leaves(c.right)
    else:
        yield c


def rule_aggregates(rule: PreferenceRule) -> Iterator[Aggregate]:
    for c in rule.head:
        for leaf in combination_leaves(c):
            if isinstance(leaf, (AggregateAtom, OptAggregate)):
                yield leaf.aggregate
    for b in rule.body:
        if isinstance(b, AggregateAtom):
            yield b.aggregate


def _set_vars(s) -> set:
    out = set()
    if isinstance(s, FuzzySet):
        out.update(expr_vars(s.head))
        out.update(expr_vars(s.annotation))
        for c in s.condition:
            out.update(_annotated_vars(c))
    return out


def _annotated_vars(al: AnnotatedLiteral) -> set:
    out = set()
    for a in al.literal.args:
        out.update(expr_vars(a))
    out.update(expr_vars(al.annotation))
    return out


def outside_aggregate_vars(rule: PreferenceRule) -> set:
    """Variables of a preference rule occurring outside its set terms."""
    out = set()

    def visit(item):
        if isinstance(item, AnnotatedLiteral):
            out.update(_annotated_vars(item))
        elif isinstance(item, AggregateAtom):
            out.update(expr_vars(item.guard))
            out.update(expr_vars(item.annotation))

    for c in rule.head:
        for leaf in combination_leaves(c):
            visit(leaf)
    for b in rule.body:
        visit(b)
    return out


def local_variables(agg: Aggregate, rule: PreferenceRule) -> set:
    """Variables occurring in ``agg``'s set term and nowhere else in ``rule``."""
    mine = _set_vars(agg.set)
    others = outside_aggregate_vars(rule)
    for other in rule_aggregates(rule):
        if other is not agg:
            others |= _set_vars(other.set)
    return mine - others


def herbrand_universe(p: Program) -> set:
    """Ground terms occurring in term positions of ``p``, with their subterms.

    Numbers inside term-level arithmetic count as constants; annotation
    expressions do not contribute.
    """
    out: set = set()

    def collect(t):
        if isinstance(t, (Num, Const)):
            out.add(t)
        elif isinstance(t, Func):
            if is_ground(t) and not any(is_arithmetic(a) for a in t.args):
                out.add(t)
            for a in t.args:
                collect(a)
        elif isinstance(t, BinOp):
            collect(t.left)
            collect(t.right)
        elif isinstance(t, Neg):
            if isinstance(t.arg, Num):
                out.add(Num(-t.arg.value))
            collect(t.arg)

    def lit(al):
        for a in al.literal.args:
            collect(a)

    def aggregate(agg):
        s = agg.set
        entries = s.entries if isinstance(s, GroundFuzzySet) else (s,)
        for e in entries:
            collect(e.head)
            for c in e.condition:
                lit(c)

    for r in p.gen:
        for h in r.head:
            lit(h)
        for b in r.body:
            if isinstance(b, Comparison):
                collect(b.left)
                collect(b.right)
            else:
                lit(b)
    for r in p.pref:
        items = [leaf for c in r.head for leaf in combination_leaves(c)] + list(r.body)
        for it in items:
            if isinstance(it, AnnotatedLiteral):
                lit(it)
            elif isinstance(it, AggregateAtom):
                collect(it.guard)
                aggregate(it.aggregate)
            elif isinstance(it, OptAggregate):
                aggregate(it.aggregate)
    return out


def _annotation_diagnostics(e, span, where: str) -> list:
    diags = []
    if isinstance(e, Num) and not (0.0 <= e.value <= 1.0):
        diags.append(Diagnostic("error", f"annotation {format_expr(e)} in {where} outside [0, 1]", span))
    for sub in _subexprs(e):
        if isinstance(sub, Func) and sub.name not in ANNOTATION_FUNCTIONS:
            diags.append(Diagnostic("error", f"unknown annotation function {sub.name!r} in {where}", span))
        elif isinstance(sub, Func) and not sub.args:
            diags.append(Diagnostic("error", f"annotation function {sub.name!r} needs arguments", span))
        elif isinstance(sub, Const):
            diags.append(Diagnostic("error", f"symbolic constant {sub.name!r} used as annotation in {where}", span))
    return diags


def _subexprs(e) -> Iterator:
    yield e
    if isinstance(e, Func):
        for a in e.args:
            yield from _subexprs(a)
    elif isinstance(e, BinOp):
        yield from _subexprs(e.left)
        yield from _subexprs(e.right)
    elif isinstance(e, Neg):
        yield from _subexprs(e.arg)


def _binding_vars(items) -> set:
    """Variables bound by positive annotated literals: args plus bare annotation variables."""
    out = set()
    for it in items:
        if isinstance(it, AnnotatedLiteral) and not it.naf:
            for a in it.literal.args:
                if not is_arithmetic(a):
                    out.update(expr_vars(a))
            if isinstance(it.annotation, Var):
                out.add(it.annotation.name)
    return out


def validate_program(p: Program) -> list:
    """Return every safety, arity and annotation problem in ``p``."""
    diags: list = []
    arities: dict = {}

    def note_literal(lit: Literal, span):
        prev = arities.setdefault(lit.predicate, len(lit.args))
        if prev != len(lit.args):
            diags.append(Diagnostic(
                "error", f"predicate {lit.predicate!r} used with arities {prev} and {len(lit.args)}", span))

    def check_set(s, span, bound_outside: set):
        if not isinstance(s, FuzzySet):
            return
        for c in s.condition:
            note_literal(c.literal, span)
            if c.naf:
                diags.append(Diagnostic("error", "negation as failure inside a fuzzy set condition", span))
            diags.extend(_annotation_diagnostics(c.annotation, span, "set condition"))
        diags.extend(_annotation_diagnostics(s.annotation, span, "set term"))
        bound = _binding_vars(s.condition) | bound_outside
        free = (set(expr_vars(s.head)) | set(expr_vars(s.annotation))) - bound
        for c in s.condition:
            free |= set(expr_vars(c.annotation)) - bound
            for a in c.literal.args:
                if is_arithmetic(a):
                    free |= set(expr_vars(a)) - bound
        for v in sorted(free):
            diags.append(Diagnostic("error", f"unsafe variable {v} in fuzzy set term", span))

    for r in p.gen:
        span = r.span
        if len(r.head) > 1 and r.body:
            diags.append(Diagnostic("error", "disjunction is only supported in facts", span))
        for h in r.head:
            note_literal(h.literal, span)
            if h.naf:
                diags.append(Diagnostic("error", "negation as failure in a rule head", span))
            diags.extend(_annotation_diagnostics(h.annotation, span, "rule head"))
        for b in r.body:
            if isinstance(b, AnnotatedLiteral):
                note_literal(b.literal, span)
                diags.extend(_annotation_diagnostics(b.annotation, span, "rule body"))
        bound = _binding_vars(r.body)
        used = set()
        for h in r.head:
            used |= _annotated_vars(h)
        for b in r.body:
            if isinstance(b, Comparison):
                used |= set(expr_vars(b.left)) | set(expr_vars(b.right))
            else:
                used |= _annotated_vars(b)
        for v in sorted(used - bound):
            diags.append(Diagnostic("error", f"unsafe variable {v}", span))

    for r in p.pref:
        span = r.span
        if not r.head:
            diags.append(Diagnostic("error", "preference rule with empty head", span))
        for b in r.body:
            if isinstance(b, AnnotatedLiteral):
                note_literal(b.literal, span)
                diags.extend(_annotation_diagnostics(b.annotation, span, "preference body"))
            elif isinstance(b, AggregateAtom):
                diags.extend(_annotation_diagnostics(b.annotation, span, "aggregate atom"))
        for c in r.head:
            for leaf in combination_leaves(c):
                if isinstance(leaf, AnnotatedLiteral):
                    note_literal(leaf.literal, span)
                    diags.extend(_annotation_diagnostics(leaf.annotation, span, "preference head"))
                elif isinstance(leaf, AggregateAtom):
                    diags.extend(_annotation_diagnostics(leaf.annotation, span, "aggregate atom"))
        bound = _binding_vars(r.body)
        for v in sorted(outside_aggregate_vars(r) - bound):
            diags.append(Diagnostic("error", f"unsafe global variable {v}", span))
        for agg in rule_aggregates(r):
            if agg.function is not None and agg.function not in AGGREGATE_FUNCTIONS:
                diags.append(Diagnostic("error", f"unknown aggregate function {agg.function!r}", span))
            check_set(agg.set, span, bound)
    return diags
