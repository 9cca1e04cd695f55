"""Reader and canonical printer for the ``.faso`` program text format.

Grammar summary (statements end with ``.``, ``%`` starts a comment)::

    a(1) : 0.4 v b : 0.6.                      disjunctive fact
    h(X) : V * 0.5 :- p(X) : V, not q(X), X < 3.
    :- p(X), q(X).                             constraint
    #pref C1 >> C2 >> ... :- body.             preference rule

Inside preference rules, combinations use ``&&``, ``||``, ``not`` and
parentheses.  Aggregates are written ``#sum_f{ X : U | cond }`` (also
``#times_f``, ``#min_f``, ``#max_f``, ``#count_f``) and compared with a guard,
``#sum_f{...} >= 4 : 0.5``.  Optimization aggregates are ``#max_u``,
``#min_u``, ``#max_x``, ``#min_x``, ``#max_xu`` and ``#min_xu``, holding either
an explicit aggregate or a bare set term (the singleton abbreviation).
Ground set terms list entries as ``<x : u | cond>`` separated by ``;``.
An omitted annotation means ``: 1``; the printer always writes it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .syntax import (
    AGGREGATE_FUNCTIONS,
    ONE,
    OPT_KINDS,
    Aggregate,
    AggregateAtom,
    And,
    AnnotatedLiteral,
    BinOp,
    Comparison,
    Const,
    Diagnostic,
    Func,
    FuzzySet,
    GeneratorRule,
    GroundFuzzySet,
    Literal,
    Neg,
    Num,
    OptAggregate,
    Or,
    PreferenceRule,
    Program,
    SetEntry,
    SourceSpan,
    Var,
    format_expr,
)

KEYWORDS = {"not", "v"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>%[^\n]*)
  | (?P<num>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<hash>\#[A-Za-z_][A-Za-z0-9_]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op>:-|>>|&&|\|\||<=|>=|!=|==|[<>=:|,;.(){}+\-*/])
    """,
    re.VERBOSE,
)

_RELATIONS = {"=": "=", "==": "=", "!=": "!=", "<": "<", ">": ">", "<=": "<=", ">=": ">="}


@dataclass
class Token:
    kind: str  # num | hash | ident | op | eof
    text: str
    line: int
    column: int


class ParseError(Exception):
    """Raised by :func:`parse_program`; carries every error diagnostic found."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class _Abort(Exception):
    def __init__(self, diagnostic):
        self.diagnostic = diagnostic


def tokenize(text: str, filename: str = "<input>"):
    tokens = []
    diags = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            diags.append(Diagnostic(
                "error", f"unexpected character {text[pos]!r}",
                SourceSpan(filename, line, pos - line_start + 1, 1)))
            pos += 1
            continue
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, chunk, line, pos - line_start + 1))
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens, diags


class _Parser:
    def __init__(self, tokens, filename):
        self.toks = tokens
        self.i = 0
        self.filename = filename

    # -- token helpers ------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("op", "ident") and t.text == text

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.i += 1
        return t

    def span(self, t: Optional[Token] = None) -> SourceSpan:
        t = t or self.tok
        return SourceSpan(self.filename, t.line, t.column, max(1, len(t.text)))

    def error(self, message: str, t: Optional[Token] = None):
        raise _Abort(Diagnostic("error", message, self.span(t)))

    def expect(self, text: str) -> Token:
        if not self.at(text):
            shown = self.tok.text or "end of input"
            self.error(f"expected {text!r}, found {shown!r}")
        return self.advance()

    # -- program ------------------------------------------------------------

    def program(self):
        gen, pref, diags = [], [], []
        while self.tok.kind != "eof":
            try:
                rule = self.statement()
            except _Abort as exc:
                diags.append(exc.diagnostic)
                self.skip_statement()
                continue
            (pref if isinstance(rule, PreferenceRule) else gen).append(rule)
        return Program(tuple(gen), tuple(pref)), diags

    def skip_statement(self):
        depth = 0
        while self.tok.kind != "eof":
            t = self.advance()
            if t.kind == "op" and t.text in "({":
                depth += 1
            elif t.kind == "op" and t.text in ")}":
                depth = max(0, depth - 1)
            elif t.kind == "op" and t.text == "." and depth == 0:
                return

    def statement(self):
        first = self.tok
        span = self.span(first)
        if first.kind == "hash" and first.text == "#pref":
            self.advance()
            return self.preference_rule(span)
        if self.at(":-"):
            self.advance()
            body = self.generator_body()
            self.expect(".")
            return GeneratorRule((), tuple(body), span=span)
        head = [self.head_literal()]
        while self.at("v"):
            self.advance()
            head.append(self.head_literal())
        body = []
        if self.at(":-"):
            self.advance()
            body = self.generator_body()
        self.expect(".")
        return GeneratorRule(tuple(head), tuple(body), span=span)

    # -- generator rules ----------------------------------------------------

    def head_literal(self) -> AnnotatedLiteral:
        if self.at("not"):
            self.error("negation as failure is not allowed in rule heads")
        lit = self.literal()
        return AnnotatedLiteral(lit, self.opt_annotation())

    def literal(self) -> Literal:
        negated = False
        if self.at("-"):
            self.advance()
            negated = True
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS or not _is_constant_name(t.text):
            self.error(f"expected a predicate name, found {t.text or 'end of input'!r}")
        self.advance()
        args = ()
        if self.at("("):
            args = self.arguments()
        return Literal(t.text, args, negated)

    def arguments(self) -> tuple:
        self.expect("(")
        args = [self.expr()]
        while self.at(","):
            self.advance()
            args.append(self.expr())
        self.expect(")")
        return tuple(args)

    def opt_annotation(self):
        if self.at(":"):
            self.advance()
            t = self.tok
            ann = self.expr()
            if isinstance(ann, Num) and not (0.0 <= ann.value <= 1.0):
                self.error(f"annotation {format_expr(ann)} outside [0, 1]", t)
            return ann
        return ONE

    def generator_body(self) -> list:
        items = []
        if self.at("."):
            return items
        while True:
            items.extend(self.generator_body_item())
            if not self.at(","):
                return items
            self.advance()

    def generator_body_item(self) -> list:
        if self.tok.kind == "hash":
            self.error("aggregates are only supported in preference rules")
        if self.at("not"):
            not_tok = self.advance()
            if self.tok.kind == "hash" and self._opt_kind(self.tok.text):
                self.error("'not' cannot be applied to an optimization aggregate", not_tok)
            if self.tok.kind == "hash":
                self.error("aggregates are only supported in preference rules")
            lit = self.literal()
            return [AnnotatedLiteral(lit, self.opt_annotation(), naf=True)]
        start = self.tok
        e = self.expr()
        if self.tok.kind == "op" and self.tok.text in _RELATIONS:
            comps = []
            left = e
            while self.tok.kind == "op" and self.tok.text in _RELATIONS:
                rel = _RELATIONS[self.advance().text]
                right = self.expr()
                comps.append(Comparison(rel, left, right))
                left = right
            return comps
        lit = self.expr_to_literal(e, start)
        return [AnnotatedLiteral(lit, self.opt_annotation())]

    def expr_to_literal(self, e, t: Token) -> Literal:
        negated = False
        if isinstance(e, Neg):
            negated, e = True, e.arg
        if isinstance(e, Const):
            return Literal(e.name, (), negated)
        if isinstance(e, Func):
            return Literal(e.name, e.args, negated)
        self.error(f"expected a literal or comparison, found {format_expr(e)!r}", t)

    # -- expressions (terms and annotations) --------------------------------

    def expr(self):
        left = self.product()
        while self.tok.kind == "op" and self.tok.text in "+-" and len(self.tok.text) == 1:
            op = self.advance().text
            left = BinOp(op, left, self.product())
        return left

    def product(self):
        left = self.unary()
        while self.tok.kind == "op" and self.tok.text in ("*", "/"):
            op = self.advance().text
            left = BinOp(op, left, self.unary())
        return left

    def unary(self):
        if self.at("-"):
            self.advance()
            if self.tok.kind == "num":
                return Num(-float(self.advance().text))
            return Neg(self.unary())
        return self.primary()

    def primary(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(float(t.text))
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.advance()
            if _is_variable_name(t.text):
                return Var(t.text)
            if self.at("("):
                return Func(t.text, self.arguments())
            return Const(t.text)
        if self.at("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        self.error(f"expected a term, found {t.text or 'end of input'!r}")

    # -- preference rules ---------------------------------------------------

    def preference_rule(self, span) -> PreferenceRule:
        head = [self.combination()]
        while self.at(">>"):
            self.advance()
            head.append(self.combination())
        body = []
        if self.at(":-"):
            self.advance()
            if not self.at("."):
                body.append(self.pref_body_item())
                while self.at(","):
                    self.advance()
                    body.append(self.pref_body_item())
        self.expect(".")
        return PreferenceRule(tuple(head), tuple(body), span=span)

    def pref_body_item(self):
        naf = False
        if self.at("not"):
            self.advance()
            naf = True
        if self.tok.kind == "hash":
            return self.aggregate_atom(naf)
        lit = self.literal()
        return AnnotatedLiteral(lit, self.opt_annotation(), naf)

    def combination(self):
        left = self.conjunction()
        while self.at("||"):
            self.advance()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self):
        left = self.comb_unary()
        while self.at("&&"):
            self.advance()
            left = And(left, self.comb_unary())
        return left

    def comb_unary(self):
        if self.at("not"):
            not_tok = self.advance()
            if self.at("("):
                self.error("'not' applies only to annotated literals and aggregate atoms", not_tok)
            if self.tok.kind == "hash" and self._opt_kind(self.tok.text):
                self.error("'not' cannot be applied to an optimization aggregate", not_tok)
            if self.tok.kind == "hash":
                return self.aggregate_atom(True)
            lit = self.literal()
            return AnnotatedLiteral(lit, self.opt_annotation(), naf=True)
        if self.at("("):
            self.advance()
            c = self.combination()
            self.expect(")")
            return c
        if self.tok.kind == "hash":
            kind = self._opt_kind(self.tok.text)
            if kind:
                self.advance()
                return OptAggregate(kind, self.opt_body())
            return self.aggregate_atom(False)
        lit = self.literal()
        return AnnotatedLiteral(lit, self.opt_annotation())

    @staticmethod
    def _opt_kind(text: str) -> Optional[str]:
        kind = text[1:]
        return kind if kind in OPT_KINDS else None

    def opt_body(self) -> Aggregate:
        self.expect("{")
        if self.tok.kind == "hash":
            agg = self.aggregate()
            self.expect("}")
            return agg
        s = self.set_body()
        self.expect("}")
        return Aggregate(None, s)

    def aggregate(self) -> Aggregate:
        t = self.tok
        name = t.text[1:]
        if t.kind != "hash" or not name.endswith("_f") or name[:-2] not in AGGREGATE_FUNCTIONS:
            self.error(f"unknown aggregate {t.text!r}")
        self.advance()
        self.expect("{")
        s = self.set_body()
        self.expect("}")
        return Aggregate(name[:-2], s)

    def aggregate_atom(self, naf: bool) -> AggregateAtom:
        agg = self.aggregate()
        t = self.tok
        if not (t.kind == "op" and t.text in _RELATIONS):
            self.error("expected a comparison after the aggregate")
        rel = _RELATIONS[self.advance().text]
        guard = self.expr()
        return AggregateAtom(agg, rel, guard, self.opt_annotation(), naf)

    def set_body(self):
        if self.at("}"):
            return GroundFuzzySet(())
        if self.at("<"):
            entries = [self.ground_entry()]
            while self.at(";"):
                self.advance()
                entries.append(self.ground_entry())
            return GroundFuzzySet(tuple(entries))
        head, ann, cond = self.entry_parts("}")
        return FuzzySet(head, ann, cond)

    def ground_entry(self) -> SetEntry:
        self.expect("<")
        head, ann, cond = self.entry_parts(">")
        self.expect(">")
        return SetEntry(head, ann, cond)

    def entry_parts(self, closer: str):
        head = self.expr()
        ann = ONE
        if self.at(":"):
            ann = self.opt_annotation()
        self.expect("|")
        cond = []
        if not self.at(closer):
            cond.append(self.condition_literal())
            while self.at(","):
                self.advance()
                cond.append(self.condition_literal())
        return head, ann, tuple(cond)

    def condition_literal(self) -> AnnotatedLiteral:
        if self.at("not"):
            self.error("negation as failure is not allowed inside set conditions")
        lit = self.literal()
        return AnnotatedLiteral(lit, self.opt_annotation())


def _is_variable_name(name: str) -> bool:
    return name[0].isupper() or name[0] == "_"


def _is_constant_name(name: str) -> bool:
    return not _is_variable_name(name)


def parse_program(text: str, filename: str = "<input>") -> Program:
    """Parse ``.faso`` source text.

    Raises :class:`ParseError` holding one diagnostic per bad statement;
    parsing resumes after each statement's terminating ``.``.
    """
    tokens, diags = tokenize(text, filename)
    parser = _Parser(tokens, filename)
    program, more = parser.program()
    diags.extend(more)
    if diags:
        raise ParseError(diags)
    return program


def parse_file(path) -> Program:
    with open(path, encoding="utf-8") as fh:
        return parse_program(fh.read(), str(path))


# -- printing -----------------------------------------------------------------


def print_rule(rule) -> str:
    if isinstance(rule, PreferenceRule):
        text = "#pref " + " >> ".join(str(c) for c in rule.head)
        if rule.body:
            text += " :- " + ", ".join(str(b) for b in rule.body)
        return text + "."
    body = ", ".join(str(b) for b in rule.body)
    if not rule.head:
        return f":- {body}."
    head = " v ".join(str(h) for h in rule.head)
    return f"{head} :- {body}." if body else f"{head}."


def print_program(p) -> str:
    """Canonical text for a program; ``parse_program`` inverts it."""
    lines = [print_rule(r) for r in p.gen] + [print_rule(r) for r in p.pref]
    return "".join(line + "\n" for line in lines)
