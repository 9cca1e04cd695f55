"""Evaluation of fuzzy aggregates against a fuzzy answer set.

A ground set term ``S`` and an interpretation ``I`` give the graded multiset
``S_I`` of pairs ``(x, u)`` from entries whose condition holds in ``I``.
Each aggregate maps ``S_I`` to ``(value, grade)`` where the grade is the
minimum of the member grades, or to :data:`UNDEFINED` outside its domain.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Optional, Union

from .grounder import compare_terms
from .syntax import (
    EPSILON,
    AggregateAtom,
    EvaluationError,
    GroundFuzzySet,
    Num,
    Var,
    evaluate,
)

log = logging.getLogger(__name__)


class _Undefined:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNDEFINED"

    def __bool__(self):
        return False


UNDEFINED = _Undefined()


class AggregateValue(NamedTuple):
    value: object  # float for numeric aggregates, int for count, any term for the abbreviation
    grade: float


Result = Union[AggregateValue, _Undefined]


@dataclass(frozen=True)
class Member:
    """One ``(x, u)`` element of a graded multiset."""

    x: object
    u: float


def condition_env(condition, I: Mapping, eps: float = EPSILON) -> Optional[dict]:
    """Bindings of annotation variables if every ``l : mu`` in ``condition`` holds in ``I``."""
    env: dict = {}
    deferred = []
    for c in condition:
        value = I.get(c.literal)
        if value is None:
            return None
        if isinstance(c.annotation, Var) and c.annotation.name not in env:
            env[c.annotation.name] = value
        else:
            deferred.append((c, value))
    for c, value in deferred:
        try:
            mu = evaluate(c.annotation, env, annotation=True)
        except EvaluationError:
            return None
        if mu > value + eps:
            return None
    return env


def build_multiset(s: GroundFuzzySet, I: Mapping, eps: float = EPSILON) -> list:
    """``S_I`` as a list of :class:`Member` (duplicates kept)."""
    out = []
    for entry in s.entries:
        env = condition_env(entry.condition, I, eps)
        if env is None:
            continue
        try:
            u = evaluate(entry.annotation, env, annotation=True)
        except EvaluationError:
            continue
        out.append(Member(entry.head, min(1.0, max(0.0, u))))
    return out


def _numeric(m: list) -> Optional[list]:
    xs = []
    for member in m:
        x = member.x
        if isinstance(x, Num):
            xs.append(x.value)
        elif isinstance(x, (int, float)) and not isinstance(x, bool):
            xs.append(float(x))
        else:
            return None
    return xs


def eval_aggregate(function: Optional[str], m) -> Result:
    """Apply ``sum``/``times``/``min``/``max``/``count`` (or the singleton abbreviation, None) to ``m``."""
    m = [mm if isinstance(mm, Member) else Member(*mm) for mm in m]
    if function is None:
        if len(m) == 1:
            return AggregateValue(m[0].x, m[0].u)
        return UNDEFINED
    if not m:
        return {
            "sum": AggregateValue(0.0, 1.0),
            "times": AggregateValue(1.0, 1.0),
            "count": AggregateValue(0, 1.0),
        }.get(function, UNDEFINED)
    grade = min(member.u for member in m)
    if function == "count":
        return AggregateValue(len(m), grade)
    xs = _numeric(m)
    if xs is None:
        return UNDEFINED
    if function == "sum":
        value = math.fsum(xs)
    elif function == "times":
        value = math.prod(xs)
        if not math.isfinite(value):
            log.warning("times_f overflowed; treating the aggregate as undefined")
            return UNDEFINED
    elif function == "min":
        value = min(xs)
    elif function == "max":
        value = max(xs)
    else:
        raise ValueError(f"unknown aggregate function {function!r}")
    return AggregateValue(value, grade)


def as_term(value):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return Num(float(value))
    return value


def relation_holds(relation: str, x, guard, eps: float = EPSILON) -> bool:
    return compare_terms(relation, as_term(x), guard, eps)


def atom_holds(atom: AggregateAtom, result: Result, eps: float = EPSILON) -> bool:
    """Truth of ``atom`` given its aggregate's value ``result``."""
    try:
        mu = evaluate(atom.annotation, {}, annotation=True)
    except EvaluationError:
        return atom.naf
    if result is UNDEFINED:
        positive = False
    else:
        positive = relation_holds(atom.relation, result.value, atom.guard, eps) and mu <= result.grade + eps
    return not positive if atom.naf else positive


def eval_aggregate_atom(I: Mapping, atom: AggregateAtom, eps: float = EPSILON) -> bool:
    """Truth of a ground (possibly negated) aggregate atom in ``I``."""
    return atom_holds(atom, aggregate_result(atom.aggregate, I, eps), eps)


def aggregate_result(agg, I: Mapping, eps: float = EPSILON) -> Result:
    return eval_aggregate(agg.function, build_multiset(agg.set, I, eps))


def prune_set_entries(s: GroundFuzzySet, interpretations, eps: float = EPSILON) -> GroundFuzzySet:
    """Drop entries whose condition holds in none of ``interpretations``."""
    keep = tuple(e for e in s.entries
                 if any(condition_env(e.condition, I, eps) is not None for I in interpretations))
    return GroundFuzzySet(keep)
