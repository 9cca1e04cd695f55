"""Satisfaction of preference rules and ranking of fuzzy answer sets.

The :class:`Ranker` evaluates everything relative to a fixed universe, the
list of answer sets produced by the generator, because optimization
aggregates (``#max_u`` and friends) compare an answer set against all the
others.  Aggregate results, optimization-aggregate satisfaction and rule
satisfaction indices are cached per (node, answer set).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .aggregates import UNDEFINED, aggregate_result, as_term, atom_holds, relation_holds
from .syntax import (
    EPSILON,
    AggregateAtom,
    And,
    AnnotatedLiteral,
    EvaluationError,
    OptAggregate,
    Or,
    PreferenceRule,
    evaluate,
)


class Outcome(enum.Enum):
    LEFT = "leftStrict"
    RIGHT = "rightStrict"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"

    def flip(self) -> "Outcome":
        return {Outcome.LEFT: Outcome.RIGHT, Outcome.RIGHT: Outcome.LEFT}.get(self, self)


STRATEGIES = ("pareto", "maximal")


@dataclass
class RankResult:
    strategy: str
    optimal: tuple
    matrix: dict = field(repr=False)  # (i, j) -> Outcome for every ordered pair

    def outcome(self, i: int, j: int) -> Outcome:
        return self.matrix[(i, j)]


class Ranker:
    """Preference semantics over a fixed universe of answer sets."""

    def __init__(self, universe: Sequence[Mapping], epsilon: float = EPSILON):
        self.universe = list(universe)
        self.eps = epsilon
        self._agg: dict = {}
        self._opt: dict = {}
        self._index: dict = {}
        self._keep: list = []  # keeps interpretations alive while their id() is a cache key

    # -- aggregates ---------------------------------------------------------

    def result(self, agg, I):
        key = (id(agg), id(I))
        if key not in self._agg:
            self._keep.append(I)
            self._agg[key] = aggregate_result(agg, I, self.eps)
        return self._agg[key]

    def _dominates(self, kind: str, mine, other) -> bool:
        """``mine`` is at least as good as ``other`` for optimization ``kind``."""
        eps = self.eps
        x_ok = u_ok = True
        if kind.endswith("x") or kind.endswith("xu"):
            if kind.startswith("max"):
                x_ok = relation_holds("<=", other.value, as_term(mine.value), eps)
            else:
                x_ok = relation_holds("<=", mine.value, as_term(other.value), eps)
        if kind.endswith("u"):
            if kind.startswith("max"):
                u_ok = other.grade <= mine.grade + eps
            else:
                u_ok = mine.grade <= other.grade + eps
        return x_ok and u_ok

    def satisfies_opt(self, I, c: OptAggregate) -> bool:
        key = (id(c), id(I))
        if key not in self._opt:
            self._keep.append(I)
            mine = self.result(c.aggregate, I)
            ok = mine is not UNDEFINED
            if ok:
                for other_I in self.universe:
                    other = self.result(c.aggregate, other_I)
                    if other is not UNDEFINED and not self._dominates(c.kind, mine, other):
                        ok = False
                        break
            self._opt[key] = ok
        return self._opt[key]

    # -- satisfaction -------------------------------------------------------

    def _mu(self, item) -> Optional[float]:
        try:
            return evaluate(item.annotation, {}, annotation=True)
        except EvaluationError:
            return None

    def satisfies_literal(self, I, al: AnnotatedLiteral) -> bool:
        value = I.get(al.literal)
        mu = self._mu(al)
        if al.naf:
            return value is None or mu is None or mu > value + self.eps
        return value is not None and mu is not None and mu <= value + self.eps

    def satisfies(self, I, c) -> bool:
        if isinstance(c, AnnotatedLiteral):
            return self.satisfies_literal(I, c)
        if isinstance(c, AggregateAtom):
            return atom_holds(c, self.result(c.aggregate, I), self.eps)
        if isinstance(c, OptAggregate):
            return self.satisfies_opt(I, c)
        if isinstance(c, And):
            return self.satisfies(I, c.left) and self.satisfies(I, c.right)
        if isinstance(c, Or):
            return self.satisfies(I, c.left) or self.satisfies(I, c.right)
        raise TypeError(f"not a boolean combination: {c!r}")

    def satisfies_body(self, I, body) -> bool:
        return all(self.satisfies(I, b) for b in body)

    def sat_index(self, I, r: PreferenceRule) -> Optional[int]:
        """1-based index of the first satisfied head combination, or None if irrelevant."""
        key = (id(r), id(I))
        if key not in self._index:
            self._keep.append(I)
            found = None
            if self.satisfies_body(I, r.body):
                for i, c in enumerate(r.head, start=1):
                    if self.satisfies(I, c):
                        found = i
                        break
            self._index[key] = found
        return self._index[key]

    # -- comparison w.r.t. one combination -----------------------------------

    def strict(self, I1, I2, c) -> bool:
        s1, s2 = self.satisfies(I1, c), self.satisfies(I2, c)
        if s1 and not s2:
            return True
        if not (s1 and s2):
            return False
        eps = self.eps
        if isinstance(c, AnnotatedLiteral):
            g1, g2 = I1.get(c.literal), I2.get(c.literal)
            if c.naf:
                if g1 is None:
                    return g2 is not None
                return g2 is not None and g1 < g2 - eps
            return g1 > g2 + eps
        if isinstance(c, AggregateAtom):
            r1, r2 = self.result(c.aggregate, I1), self.result(c.aggregate, I2)
            if c.naf:
                if r1 is UNDEFINED:
                    return r2 is not UNDEFINED
                return r2 is not UNDEFINED and r1.grade < r2.grade - eps
            return r1 is not UNDEFINED and r2 is not UNDEFINED and r2.grade < r1.grade - eps
        if isinstance(c, OptAggregate):
            return False
        return self._strict_pair(I1, I2, (c.left, c.right))

    def _strict_pair(self, I1, I2, parts) -> bool:
        for t, part in enumerate(parts):
            if self.strict(I1, I2, part) and all(
                    self.at_least(I1, I2, other) for k, other in enumerate(parts) if k != t):
                return True
        return False

    def equal(self, I1, I2, c) -> bool:
        s1, s2 = self.satisfies(I1, c), self.satisfies(I2, c)
        if not s1 and not s2:
            return True
        if not (s1 and s2):
            return False
        eps = self.eps
        if isinstance(c, AnnotatedLiteral):
            g1, g2 = I1.get(c.literal), I2.get(c.literal)
            if g1 is None or g2 is None:
                return c.naf and g1 is None and g2 is None
            return abs(g1 - g2) <= eps
        if isinstance(c, AggregateAtom):
            r1, r2 = self.result(c.aggregate, I1), self.result(c.aggregate, I2)
            if r1 is UNDEFINED or r2 is UNDEFINED:
                return c.naf and r1 is UNDEFINED and r2 is UNDEFINED
            return abs(r1.grade - r2.grade) <= eps
        if isinstance(c, OptAggregate):
            return True
        parts = (c.left, c.right)
        if isinstance(c, And):
            return all(self.equal(I1, I2, p) for p in parts)
        forward = sum(1 for p in parts if self.at_least(I1, I2, p))
        backward = sum(1 for p in parts if self.at_least(I2, I1, p))
        return forward == backward

    def at_least(self, I1, I2, c) -> bool:
        return self.strict(I1, I2, c) or self.equal(I1, I2, c)

    # -- comparison w.r.t. rules ----------------------------------------------

    def rule_strict(self, I1, I2, r) -> bool:
        i, j = self.sat_index(I1, r), self.sat_index(I2, r)
        if i is None:
            return False
        if j is None or i < j:
            return True
        return i == j and self.strict(I1, I2, r.head[i - 1])

    def rule_equal(self, I1, I2, r) -> bool:
        i, j = self.sat_index(I1, r), self.sat_index(I2, r)
        if i is None or j is None:
            return i is None and j is None
        return i == j and self.equal(I1, I2, r.head[i - 1])

    def compare_rule(self, I1, I2, r) -> Outcome:
        left, right = self.rule_strict(I1, I2, r), self.rule_strict(I2, I1, r)
        if left and not right:
            return Outcome.LEFT
        if right and not left:
            return Outcome.RIGHT
        if self.rule_equal(I1, I2, r):
            return Outcome.EQUAL
        return Outcome.INCOMPARABLE

    def pareto_compare(self, I1, I2, rules) -> Outcome:
        outcomes = [self.compare_rule(I1, I2, r) for r in rules]
        if all(o is Outcome.EQUAL for o in outcomes):
            return Outcome.EQUAL
        if all(o in (Outcome.LEFT, Outcome.EQUAL) for o in outcomes):
            return Outcome.LEFT
        if all(o in (Outcome.RIGHT, Outcome.EQUAL) for o in outcomes):
            return Outcome.RIGHT
        return Outcome.INCOMPARABLE

    def maximal_compare(self, I1, I2, rules) -> Outcome:
        outcomes = [self.compare_rule(I1, I2, r) for r in rules]
        forward = sum(1 for o in outcomes if o in (Outcome.LEFT, Outcome.EQUAL))
        backward = sum(1 for o in outcomes if o in (Outcome.RIGHT, Outcome.EQUAL))
        if forward > backward:
            return Outcome.LEFT
        if backward > forward:
            return Outcome.RIGHT
        return Outcome.EQUAL

    def compare(self, I1, I2, rules, strategy: str = "pareto") -> Outcome:
        if strategy == "pareto":
            return self.pareto_compare(I1, I2, rules)
        if strategy == "maximal":
            return self.maximal_compare(I1, I2, rules)
        raise ValueError(f"unknown strategy {strategy!r}")

    def rank(self, rules, strategy: str = "pareto") -> RankResult:
        n = len(self.universe)
        matrix = {}
        for a in range(n):
            matrix[(a, a)] = self.compare(self.universe[a], self.universe[a], rules, strategy)
            for b in range(a + 1, n):
                o = self.compare(self.universe[a], self.universe[b], rules, strategy)
                matrix[(a, b)] = o
                matrix[(b, a)] = o.flip()
        optimal = tuple(
            b for b in range(n)
            if not any(matrix[(a, b)] is Outcome.LEFT for a in range(n) if a != b))
        return RankResult(strategy, optimal, matrix)


# Function-style API, one fresh Ranker per call.

def satisfies_combination(I, c, universe, epsilon: float = EPSILON) -> bool:
    return Ranker(universe, epsilon).satisfies(I, c)


def satisfies_body(I, body, epsilon: float = EPSILON) -> bool:
    return Ranker([], epsilon).satisfies_body(I, body)


def rule_sat_index(I, r, universe, epsilon: float = EPSILON) -> Optional[int]:
    return Ranker(universe, epsilon).sat_index(I, r)


def strict_pref_combination(I1, I2, c, universe, epsilon: float = EPSILON) -> bool:
    return Ranker(universe, epsilon).strict(I1, I2, c)


def equal_pref_combination(I1, I2, c, universe, epsilon: float = EPSILON) -> bool:
    return Ranker(universe, epsilon).equal(I1, I2, c)


def compare_rule(I1, I2, r, universe, epsilon: float = EPSILON) -> Outcome:
    return Ranker(universe, epsilon).compare_rule(I1, I2, r)


def pareto_compare(I1, I2, rules, universe, epsilon: float = EPSILON) -> Outcome:
    return Ranker(universe, epsilon).pareto_compare(I1, I2, rules)


def maximal_compare(I1, I2, rules, universe, epsilon: float = EPSILON) -> Outcome:
    return Ranker(universe, epsilon).maximal_compare(I1, I2, rules)


def rank(universe, rules, strategy: str = "pareto", epsilon: float = EPSILON) -> RankResult:
    return Ranker(universe, epsilon).rank(rules, strategy)
