"""End-to-end pipeline: parse, validate, ground, generate, rank."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Optional

from .aggregates import prune_set_entries
from .generator import generate_answer_sets
from .grounder import DEFAULT_BUDGET, GroundProgram, ground_program
from .parser import parse_program
from .preference import RankResult, Ranker
from .syntax import (
    EPSILON,
    Aggregate,
    AggregateAtom,
    And,
    GroundFuzzySet,
    OptAggregate,
    Or,
    PreferenceRule,
    Program,
    validate_program,
)


class InvalidProgram(Exception):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


@dataclass
class Solution:
    program: Program
    ground: GroundProgram
    models: list
    ranking: RankResult
    warnings: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def optimal(self) -> list:
        return [self.models[i] for i in self.ranking.optimal]


def _prune_aggregate(agg: Aggregate, models, eps) -> Aggregate:
    if isinstance(agg.set, GroundFuzzySet):
        return Aggregate(agg.function, prune_set_entries(agg.set, models, eps))
    return agg


def _prune_combination(c, models, eps):
    if isinstance(c, (And, Or)):
        return type(c)(_prune_combination(c.left, models, eps), _prune_combination(c.right, models, eps))
    if isinstance(c, OptAggregate):
        return OptAggregate(c.kind, _prune_aggregate(c.aggregate, models, eps))
    if isinstance(c, AggregateAtom):
        return replace(c, aggregate=_prune_aggregate(c.aggregate, models, eps))
    return c


def prune_ground_preferences(g: GroundProgram, models, epsilon: float = EPSILON) -> GroundProgram:
    """Drop set entries that no answer set can make true; ranking is unaffected."""
    pref = tuple(
        PreferenceRule(
            tuple(_prune_combination(c, models, epsilon) for c in r.head),
            tuple(_prune_combination(b, models, epsilon) for b in r.body),
            span=r.span,
        )
        for r in g.pref
    )
    return GroundProgram(g.gen, pref, g.warnings)


def solve(source, strategy: str = "pareto", epsilon: float = EPSILON,
          max_models: Optional[int] = None, budget: int = DEFAULT_BUDGET) -> Solution:
    """Run the whole pipeline on program text or a parsed :class:`Program`."""
    timings = {}
    t0 = time.perf_counter()
    program = parse_program(source) if isinstance(source, str) else source
    diagnostics = validate_program(program)
    errors = [d for d in diagnostics if d.severity == "error"]
    if errors:
        raise InvalidProgram(errors)
    t1 = time.perf_counter()
    timings["parse"] = t1 - t0
    ground = ground_program(program, budget=budget, epsilon=epsilon)
    t2 = time.perf_counter()
    timings["ground"] = t2 - t1
    warnings = [str(d) for d in diagnostics if d.severity != "error"] + list(ground.warnings)
    models = generate_answer_sets(ground, epsilon=epsilon, max_models=max_models, warnings=warnings)
    t3 = time.perf_counter()
    timings["generate"] = t3 - t2
    ground = prune_ground_preferences(ground, models, epsilon)
    ranking = Ranker(models, epsilon).rank(ground.pref, strategy)
    timings["rank"] = time.perf_counter() - t3
    return Solution(program, ground, models, ranking, warnings, timings)


@dataclass
class Benefits:
    x: tuple
    total: Optional[float]
    objective_degree: float
    constraint_degree: Optional[float]


def report_benefits(model, objective: str = "objective", constraint: str = "constr",
                    benefit_prefix: str = "firm_") -> Optional[Benefits]:
    """Decode allocation, total benefit and the two degrees from a water-style model.

    Returns None when the model has no ``objective`` literal.  The total is
    the sum of the benefit arguments of the ``firm_*`` literals.
    """
    found = model.find(objective)
    if not found:
        return None
    lit, d_g = found[0]
    x = tuple(a.value for a in lit.args if hasattr(a, "value"))
    d_c = None
    for other, grade in model.find(constraint):
        if other.args == lit.args:
            d_c = grade
    benefits = [l.args[1].value for l in model
                if l.predicate.startswith(benefit_prefix) and len(l.args) == 2 and hasattr(l.args[1], "value")]
    total = sum(benefits) if benefits else None
    return Benefits(x, total, d_g, d_c)
