"""Fuzzy answer sets of ground generator programs.

Supported fragment: disjunctive facts, read as an exclusive choice of one
disjunct; normal rules with stratified negation as failure; constraints.
For each combination of choices the stratified least fixpoint is computed
(re-derivations combine by join, i.e. max) and candidates violating a
constraint or assigning positive grades to a literal and its complement are
discarded.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Mapping
from typing import Iterable, Optional

from .grounder import term_key
from .syntax import (
    EPSILON,
    AnnotatedLiteral,
    EvaluationError,
    Literal,
    Var,
    evaluate,
)

log = logging.getLogger(__name__)


class NotStratified(Exception):
    """Negation as failure occurs on a dependency cycle."""


class UnsupportedFragment(Exception):
    """The generator program lies outside the enumerable fragment."""


def literal_key(lit: Literal) -> tuple:
    return (lit.predicate, lit.negated, tuple(term_key(a) for a in lit.args))


class FuzzyAnswerSet(Mapping):
    """A partial map from ground literals to grades.

    Literals absent from the map are undefined, which is distinct from a
    grade of 0.
    """

    def __init__(self, grades: dict, index: int = 0, choice: tuple = ()):
        self._grades = {k: grades[k] for k in sorted(grades, key=literal_key)}
        self.index = index
        self.choice = choice

    def __getitem__(self, lit):
        return self._grades[lit]

    def __iter__(self):
        return iter(self._grades)

    def __len__(self):
        return len(self._grades)

    def __hash__(self):
        return hash(tuple(self._grades.items()))

    def __repr__(self):
        body = ", ".join(f"{lit}: {g:.4g}" for lit, g in self._grades.items())
        return f"I{self.index}{{{body}}}"

    def with_index(self, index: int) -> "FuzzyAnswerSet":
        return FuzzyAnswerSet(self._grades, index, self.choice)

    def find(self, predicate: str) -> list:
        """All ``(literal, grade)`` pairs of ``predicate``."""
        return [(lit, g) for lit, g in self._grades.items() if lit.predicate == predicate]


def stratify(g) -> dict:
    """Assign strata to predicate signatures so negation points strictly downward.

    Raises :class:`NotStratified` when a cycle passes through ``not``.
    """
    preds = set()
    edges = []  # (head, body, strict)
    for rule in g.gen:
        for h in rule.head:
            preds.add(h.literal.signature)
        for b in rule.body:
            if isinstance(b, AnnotatedLiteral):
                preds.add(b.literal.signature)
                for h in rule.head:
                    edges.append((h.literal.signature, b.literal.signature, b.naf))
    stratum = {p: 0 for p in preds}
    limit = len(preds)
    changed = True
    while changed:
        changed = False
        for head, body, strict in edges:
            need = stratum[body] + (1 if strict else 0)
            if stratum[head] < need:
                if need > limit:
                    raise NotStratified(f"negation cycle through predicate {head[1]!r}")
                stratum[head] = need
                changed = True
    return stratum


def _clamp(value: float, warnings: Optional[list], what) -> float:
    if 0.0 <= value <= 1.0:
        return value
    if warnings is not None:
        warnings.append(f"annotation {value:.6g} of {what} clamped into [0, 1]")
    return min(1.0, max(0.0, value))


def body_holds(body: Iterable, grades: Mapping, eps: float = EPSILON) -> Optional[dict]:
    """Check a ground rule body; return the annotation-variable bindings or None."""
    env: dict = {}
    deferred = []
    for b in body:
        if not isinstance(b, AnnotatedLiteral):
            continue
        if b.naf:
            deferred.append(b)
            continue
        value = grades.get(b.literal)
        if value is None:
            return None
        if isinstance(b.annotation, Var) and b.annotation.name not in env:
            env[b.annotation.name] = value
        else:
            deferred.append(b)
    for b in deferred:
        value = grades.get(b.literal)
        try:
            mu = evaluate(b.annotation, env, annotation=True)
        except EvaluationError:
            return None
        if b.naf:
            if value is not None and mu <= value + eps:
                return None
        elif mu > value + eps:
            return None
    return env


class _Compiled:
    """Per-program indexes reused across all choice combinations."""

    def __init__(self, g, eps: float):
        self.eps = eps
        self.choices = []
        self.rules_by_stratum: dict = {}
        self.constraints = []
        strata = stratify(g)
        self.watchers: dict = {}
        self.rules = []
        for rule in g.gen:
            if rule.is_constraint:
                self.constraints.append(rule)
            elif len(rule.head) > 1:
                if rule.body:
                    raise UnsupportedFragment("disjunction is only supported in facts")
                self.choices.append(rule)
            else:
                rid = len(self.rules)
                self.rules.append(rule)
                s = strata[rule.head[0].literal.signature]
                self.rules_by_stratum.setdefault(s, []).append(rid)
                for b in rule.body:
                    if isinstance(b, AnnotatedLiteral) and not b.naf:
                        self.watchers.setdefault(b.literal, []).append(rid)
        self.rule_stratum = {rid: s for s, ids in self.rules_by_stratum.items() for rid in ids}
        self.roots = {
            s: [rid for rid in ids if not any(
                isinstance(b, AnnotatedLiteral) and not b.naf for b in self.rules[rid].body)]
            for s, ids in self.rules_by_stratum.items()
        }

    def fixpoint(self, choice: tuple, warnings: Optional[list] = None) -> dict:
        eps = self.eps
        grades: dict = {}
        for fact, pick in zip(self.choices, choice):
            head = fact.head[pick]
            value = _clamp(evaluate(head.annotation, {}, annotation=True), warnings, head.literal)
            old = grades.get(head.literal)
            grades[head.literal] = value if old is None else max(old, value)
        for s in sorted(self.rules_by_stratum):
            agenda = set(self.roots[s])
            for lit in list(grades):
                for rid in self.watchers.get(lit, ()):
                    if self.rule_stratum[rid] == s:
                        agenda.add(rid)
            while agenda:
                rid = min(agenda)
                agenda.discard(rid)
                rule = self.rules[rid]
                env = body_holds(rule.body, grades, eps)
                if env is None:
                    continue
                head = rule.head[0]
                try:
                    value = evaluate(head.annotation, env, annotation=True)
                except EvaluationError as exc:
                    if warnings is not None:
                        warnings.append(f"head annotation of {head.literal} not evaluable: {exc}")
                    continue
                value = _clamp(value, warnings, head.literal)
                old = grades.get(head.literal)
                if old is not None and value <= old + eps:
                    if value > old:
                        grades[head.literal] = value
                    continue
                grades[head.literal] = value if old is None else max(old, value)
                for w in self.watchers.get(head.literal, ()):
                    if self.rule_stratum[w] == s:
                        agenda.add(w)
        return grades

    def violates(self, grades: dict) -> bool:
        return any(body_holds(c.body, grades, self.eps) is not None for c in self.constraints)


def consistent(grades: Mapping) -> bool:
    """No literal and its classical complement are both above grade 0."""
    for lit, value in grades.items():
        if lit.negated and value > 0:
            other = grades.get(lit.complement())
            if other is not None and other > 0:
                return False
    return True


def least_fixpoint(choice, g, epsilon: float = EPSILON, warnings: Optional[list] = None) -> FuzzyAnswerSet:
    """Stratified closure of ``g`` after selecting disjunct ``choice[i]`` of the i-th disjunctive fact."""
    compiled = _Compiled(g, epsilon)
    return FuzzyAnswerSet(compiled.fixpoint(tuple(choice), warnings), choice=tuple(choice))


def check_constraints(candidate: Mapping, g, epsilon: float = EPSILON) -> bool:
    """True iff no constraint body of ``g`` holds in ``candidate``."""
    return not any(
        body_holds(r.body, candidate, epsilon) is not None for r in g.gen if r.is_constraint)


def generate_answer_sets(g, epsilon: float = EPSILON, max_models: Optional[int] = None,
                         warnings: Optional[list] = None) -> list:
    """Enumerate the fuzzy answer sets of ``g`` in lexicographic choice order.

    Identical interpretations are reported once, at their first position.
    Clamping notices for surviving answer sets are appended to ``warnings``.
    """
    compiled = _Compiled(g, epsilon)
    seen = set()
    out = []
    ranges = [range(len(f.head)) for f in compiled.choices]
    for choice in itertools.product(*ranges):
        local: list = []
        grades = compiled.fixpoint(choice, local)
        if not consistent(grades) or compiled.violates(grades):
            continue
        key = tuple(sorted(((literal_key(k), round(v, 12)) for k, v in grades.items())))
        if key in seen:
            continue
        seen.add(key)
        out.append(FuzzyAnswerSet(grades, len(out), choice))
        if warnings is not None:
            for msg in local:
                if msg not in warnings:
                    warnings.append(msg)
        for msg in local:
            log.warning(msg)
        if max_models is not None and len(out) >= max_models:
            break
    return out


__all__ = [
    "FuzzyAnswerSet",
    "NotStratified",
    "UnsupportedFragment",
    "check_constraints",
    "consistent",
    "generate_answer_sets",
    "least_fixpoint",
    "stratify",
]
