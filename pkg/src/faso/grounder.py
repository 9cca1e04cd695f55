"""Ground instantiation of programs.

Rules are instantiated bottom-up: positive body literals are joined against
the atoms some rule could derive (every disjunct of a disjunctive fact, then
the heads of rule instances whose positive body is derivable, up to a
fixpoint).  Substitutions that make a positive body literal underivable
produce instances that can never fire, so they are left out.  Symbolic fuzzy
sets are expanded the same way over their local variables.

Annotation variables (a bare ``V`` in ``p(X) : V``) are never enumerated over
[0, 1]; they stay symbolic in the ground program and are bound to the grade
of their literal when the rule or set entry is evaluated.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .parser import print_rule
from .syntax import (
    EPSILON,
    Aggregate,
    AggregateAtom,
    And,
    AnnotatedLiteral,
    Comparison,
    Const,
    EvaluationError,
    Func,
    FuzzySet,
    GeneratorRule,
    GroundFuzzySet,
    Literal,
    Num,
    OptAggregate,
    Or,
    PreferenceRule,
    SetEntry,
    Var,
    expr_vars,
    fold_annotation,
    format_expr,
    is_arithmetic,
    local_variables,
    reduce_term,
    rule_aggregates,
    substitute,
    validate_program,
)

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**7


class GroundingError(Exception):
    """The program cannot be grounded (invalid input)."""


class BudgetExceeded(GroundingError):
    """Grounding produced more instances than the configured budget."""


@dataclass(frozen=True)
class GroundProgram:
    gen: tuple = ()
    pref: tuple = ()
    warnings: tuple = field(default=(), compare=False)


def term_key(t) -> tuple:
    """Total order on ground terms: numbers, then constants, then functions."""
    if isinstance(t, Num):
        return (0, t.value)
    if isinstance(t, Const):
        return (1, t.name)
    if isinstance(t, Func):
        return (2, t.name, len(t.args), tuple(term_key(a) for a in t.args))
    return (3, format_expr(t))


def compare_terms(rel: str, a, b, eps: float = EPSILON) -> bool:
    """Evaluate ``a rel b`` for ground terms; numbers compare within ``eps``."""
    if isinstance(a, Num) and isinstance(b, Num):
        x, y = a.value, b.value
        eq = abs(x - y) <= eps
        return {
            "=": eq,
            "!=": not eq,
            "<": x < y - eps,
            ">": x > y + eps,
            "<=": x <= y + eps,
            ">=": x >= y - eps,
        }[rel]
    ka, kb = term_key(a), term_key(b)
    return {
        "=": ka == kb,
        "!=": ka != kb,
        "<": ka < kb,
        ">": ka > kb,
        "<=": ka <= kb,
        ">=": ka >= kb,
    }[rel]


# -- matching -----------------------------------------------------------------


def _match(pattern, value, theta: dict) -> Optional[dict]:
    if isinstance(pattern, Var):
        bound = theta.get(pattern.name)
        if bound is None:
            out = dict(theta)
            out[pattern.name] = value
            return out
        return theta if bound == value else None
    if is_arithmetic(pattern):
        try:
            v = reduce_term(substitute(pattern, theta))
        except EvaluationError:
            return None
        return theta if v == value else None
    if isinstance(pattern, Func):
        if not (isinstance(value, Func) and value.name == pattern.name and len(value.args) == len(pattern.args)):
            return None
        for p, v in zip(pattern.args, value.args):
            theta = _match(p, v, theta)
            if theta is None:
                return None
        return theta
    return theta if pattern == value else None


def _ready(lit: Literal, theta: dict) -> bool:
    """A literal can be matched once its arithmetic arguments are bound."""
    for a in lit.args:
        for sub in _arith_subterms(a):
            if any(v not in theta for v in expr_vars(sub)):
                return False
    return True


def _arith_subterms(t) -> Iterator:
    if is_arithmetic(t):
        yield t
    elif isinstance(t, Func):
        for a in t.args:
            yield from _arith_subterms(a)


def join(literals: list, possible: dict, theta: dict) -> Iterator[dict]:
    """Yield every extension of ``theta`` matching all ``literals`` to possible atoms."""
    if not literals:
        yield theta
        return
    for idx, lit in enumerate(literals):
        if _ready(lit, theta):
            break
    else:
        return
    rest = literals[:idx] + literals[idx + 1:]
    for cand in possible.get(lit.signature, ()):
        t = theta
        for p, v in zip(lit.args, cand.args):
            t = _match(p, v, t)
            if t is None:
                break
        if t is not None:
            yield from join(rest, possible, t)


def ground_literal(lit: Literal, theta: dict) -> Literal:
    return Literal(lit.predicate, tuple(reduce_term(substitute(a, theta)) for a in lit.args), lit.negated)


def _ground_annotated(al: AnnotatedLiteral, theta: dict) -> AnnotatedLiteral:
    return AnnotatedLiteral(
        ground_literal(al.literal, theta), fold_annotation(substitute(al.annotation, theta)), al.naf)


def annotation_variables(items: Iterable) -> set:
    """Bare annotation variables of positive annotated literals not used as terms."""
    ann, term = set(), set()
    for it in items:
        if isinstance(it, AnnotatedLiteral):
            for a in it.literal.args:
                term.update(expr_vars(a))
            if isinstance(it.annotation, Var) and not it.naf:
                ann.add(it.annotation.name)
    return ann - term


def _theta_key(theta: dict) -> tuple:
    return tuple((k, term_key(theta[k])) for k in sorted(theta))


# -- the grounder -------------------------------------------------------------


class _Grounder:
    def __init__(self, budget: int, epsilon: float):
        self.budget = budget
        self.eps = epsilon
        self.count = 0
        self.warnings: list = []
        self._warned: set = set()

    def warn(self, message: str):
        if message not in self._warned:
            self._warned.add(message)
            self.warnings.append(message)
            log.warning(message)

    def tick(self, n: int = 1):
        self.count += n
        if self.count > self.budget:
            raise BudgetExceeded(f"grounding exceeded the budget of {self.budget} instances")

    # generator rules

    def instances(self, rule: GeneratorRule, possible: dict) -> dict:
        """Ground instances of ``rule`` keyed by substitution order key."""
        if not rule.head and not rule.body:
            return {(): rule}
        positive = [b.literal for b in rule.body if isinstance(b, AnnotatedLiteral) and not b.naf]
        out = {}
        for theta in join(positive, possible, {}):
            inst = self.instantiate_rule(rule, theta)
            if inst is not None:
                out.setdefault(_theta_key(theta), inst)
        return out

    def instantiate_rule(self, rule: GeneratorRule, theta: dict) -> Optional[GeneratorRule]:
        try:
            body = []
            for b in rule.body:
                if isinstance(b, Comparison):
                    left = reduce_term(substitute(b.left, theta))
                    right = reduce_term(substitute(b.right, theta))
                    if not compare_terms(b.relation, left, right, self.eps):
                        return None
                else:
                    body.append(_ground_annotated(b, theta))
            head = tuple(_ground_annotated(h, theta) for h in rule.head)
        except EvaluationError as exc:
            self.warn(f"dropped a ground instance of rule `{_rule_text(rule)}`: {exc}")
            return None
        return GeneratorRule(head, tuple(body), span=rule.span)

    def possible_atoms(self, rules) -> dict:
        possible: dict = {}
        seen: set = set()

        def add(lit: Literal) -> bool:
            if lit in seen:
                return False
            seen.add(lit)
            possible.setdefault(lit.signature, []).append(lit)
            return True

        changed = True
        derived = {}
        while changed:
            changed = False
            for i, rule in enumerate(rules):
                if rule.is_constraint:
                    continue
                for key, inst in self.instances(rule, possible).items():
                    if (i, key) in derived:
                        continue
                    derived[(i, key)] = inst
                    self.tick()
                    for h in inst.head:
                        changed |= add(h.literal)
        return possible

    # preference rules

    def ground_pref(self, rule: PreferenceRule, possible: dict) -> list:
        positive = [b.literal for b in rule.body if isinstance(b, AnnotatedLiteral) and not b.naf]
        locals_by_agg = {id(agg): local_variables(agg, rule) for agg in _aggregates(rule)}
        out = {}
        for theta in join(positive, possible, {}):
            try:
                head = tuple(self.ground_combination(c, theta, possible, locals_by_agg) for c in rule.head)
                body = tuple(self.ground_body_item(b, theta, possible, locals_by_agg) for b in rule.body)
            except EvaluationError as exc:
                self.warn(f"dropped a ground instance of a preference rule: {exc}")
                continue
            self.tick()
            out.setdefault(_theta_key(theta), PreferenceRule(head, body, span=rule.span))
        return [out[k] for k in sorted(out)]

    def ground_body_item(self, item, theta, possible, locals_by_agg):
        if isinstance(item, AnnotatedLiteral):
            return _ground_annotated(item, theta)
        return self.ground_agg_atom(item, theta, possible, locals_by_agg)

    def ground_agg_atom(self, atom: AggregateAtom, theta, possible, locals_by_agg) -> AggregateAtom:
        return AggregateAtom(
            self.ground_aggregate(atom.aggregate, theta, possible, locals_by_agg),
            atom.relation,
            reduce_term(substitute(atom.guard, theta)),
            fold_annotation(substitute(atom.annotation, theta)),
            atom.naf,
        )

    def ground_combination(self, c, theta, possible, locals_by_agg):
        if isinstance(c, And):
            return And(self.ground_combination(c.left, theta, possible, locals_by_agg),
                       self.ground_combination(c.right, theta, possible, locals_by_agg))
        if isinstance(c, Or):
            return Or(self.ground_combination(c.left, theta, possible, locals_by_agg),
                      self.ground_combination(c.right, theta, possible, locals_by_agg))
        if isinstance(c, AnnotatedLiteral):
            return _ground_annotated(c, theta)
        if isinstance(c, AggregateAtom):
            return self.ground_agg_atom(c, theta, possible, locals_by_agg)
        return OptAggregate(c.kind, self.ground_aggregate(c.aggregate, theta, possible, locals_by_agg))

    def ground_aggregate(self, agg: Aggregate, theta, possible, locals_by_agg) -> Aggregate:
        s = agg.set
        if isinstance(s, GroundFuzzySet):
            return agg
        local = locals_by_agg.get(id(agg), set())
        outer = {k: v for k, v in theta.items() if k not in local}
        s = FuzzySet(substitute(s.head, outer), substitute(s.annotation, outer),
                     tuple(AnnotatedLiteral(c.literal.substitute(outer), substitute(c.annotation, outer), c.naf)
                           for c in s.condition))
        entries = {}
        for t in join([c.literal for c in s.condition], possible, {}):
            entry = self.make_entry(s, t)
            if entry is not None:
                self.tick()
                entries.setdefault(entry, _theta_key(t))
        ordered = sorted(entries, key=entries.get)
        return Aggregate(agg.function, GroundFuzzySet(tuple(ordered)))

    def make_entry(self, s: FuzzySet, theta: dict) -> Optional[SetEntry]:
        try:
            return SetEntry(
                reduce_term(substitute(s.head, theta)),
                fold_annotation(substitute(s.annotation, theta)),
                tuple(_ground_annotated(c, theta) for c in s.condition),
            )
        except EvaluationError as exc:
            self.warn(f"dropped a fuzzy set entry: {exc}")
            return None


def _aggregates(rule: PreferenceRule):
    return list(rule_aggregates(rule))


def _rule_text(rule) -> str:
    return print_rule(rule)


def ground_program(p, budget: int = DEFAULT_BUDGET, epsilon: float = EPSILON) -> GroundProgram:
    """Return the ground instantiation of ``p``.

    Instances whose arithmetic guard is false are removed, true guards are
    dropped from the instance, and term arithmetic is reduced to numbers.
    Raises :class:`BudgetExceeded` past ``budget`` instances and
    :class:`GroundingError` for an invalid program.
    """
    if not isinstance(p, GroundProgram):
        errors = [d for d in validate_program(p) if d.severity == "error"]
        if errors:
            raise GroundingError("; ".join(str(d) for d in errors))
    g = _Grounder(budget, epsilon)
    possible = g.possible_atoms(p.gen)
    gen = []
    for rule in p.gen:
        inst = g.instances(rule, possible)
        if rule.is_constraint:
            g.tick(len(inst))
        gen.extend(inst[k] for k in sorted(inst))
    pref = []
    for rule in p.pref:
        pref.extend(g.ground_pref(rule, possible))
    return GroundProgram(tuple(gen), tuple(pref), tuple(g.warnings))


def instantiate_symbolic_set(s: FuzzySet, universe, theta: Optional[dict] = None,
                             epsilon: float = EPSILON) -> GroundFuzzySet:
    """Expand ``s`` by substituting every term variable with every universe element.

    ``theta`` fixes global variables first.  Annotation variables stay
    symbolic.  Entries whose arithmetic cannot be evaluated are dropped.
    """
    theta = dict(theta or {})
    s = FuzzySet(substitute(s.head, theta), substitute(s.annotation, theta),
                 tuple(AnnotatedLiteral(c.literal.substitute(theta), substitute(c.annotation, theta), c.naf)
                       for c in s.condition))
    ann_vars = annotation_variables(s.condition)
    term_vars = set(expr_vars(s.head))
    for c in s.condition:
        for a in c.literal.args:
            term_vars.update(expr_vars(a))
    term_vars |= set(expr_vars(s.annotation)) - ann_vars
    for c in s.condition:
        term_vars |= set(expr_vars(c.annotation)) - ann_vars
    names = sorted(term_vars)
    values = sorted(universe, key=term_key)
    g = _Grounder(DEFAULT_BUDGET, epsilon)
    entries = {}
    for combo in itertools.product(values, repeat=len(names)):
        t = dict(zip(names, combo))
        entry = g.make_entry(s, t)
        if entry is not None and entry not in entries:
            entries[entry] = _theta_key(t)
    return GroundFuzzySet(tuple(sorted(entries, key=entries.get)))


def possible_atoms(p) -> set:
    """Ground literals that some instance of ``p``'s generator rules may derive."""
    g = _Grounder(DEFAULT_BUDGET, EPSILON)
    return {lit for lits in g.possible_atoms(p.gen).values() for lit in lits}
