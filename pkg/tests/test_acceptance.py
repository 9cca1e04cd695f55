"""Acceptance suite: one check per criterion, each reported as a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or directly with ``python tests/test_acceptance.py``.
"""

import pathlib
import random
import sys
import time

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))

import oracles  # noqa: E402
from conftest import FIXTURES, WATER, find_model  # noqa: E402
from faso.aggregates import UNDEFINED, Member, eval_aggregate  # noqa: E402
from faso.generator import NotStratified, generate_answer_sets  # noqa: E402
from faso.grounder import ground_program  # noqa: E402
from faso.parser import parse_file, parse_program, print_program  # noqa: E402
from faso.preference import Outcome, Ranker  # noqa: E402
from faso.solve import report_benefits, solve  # noqa: E402

RESULTS: dict = {}

# Example 3 listing: (x1, x2, x3) -> (objective grade, constraint grade)
PUBLISHED = {
    1: ((4, 0.94, 1), 0.42, 0.53),
    2: ((3, 0.94, 2), 0.57, 0.53),
    3: ((2, 0.94, 3), 0.67, 0.53),
    4: ((1, 0.94, 4), 0.70, 0.53),
    5: ((0.91, 0.94, 4), 0.69, 0.58),
    6: ((1, 0.94, 3.81), 0.68, 0.63),
    7: ((0.91, 0.94, 3.81), 0.67, 0.67),
    8: ((0.91, 1, 3.81), 0.68, 0.64),
    9: ((1, 1, 3.81), 0.69, 0.60),
    10: ((0.91, 1, 4), 0.69, 0.55),
    11: ((0.91, 2, 3), 0.65, 0.55),
    12: ((0.91, 3, 2), 0.53, 0.55),
    13: ((0.91, 4, 1), 0.33, 0.55),
}

_OUT = {Outcome.LEFT: "left", Outcome.RIGHT: "right", Outcome.EQUAL: "equal", Outcome.INCOMPARABLE: "incomparable"}


def _grade(model, predicate):
    ((_, g),) = model.find(predicate)
    return g


def criterion_1():
    t0 = time.perf_counter()
    sol = solve(WATER.read_text())
    elapsed = time.perf_counter() - t0
    assert len(sol.models) == 38, f"{len(sol.models)} answer sets"
    assert elapsed < 5.0, f"{elapsed:.2f}s"
    return f"38 answer sets in {elapsed:.2f}s"


def criterion_2():
    text = WATER.read_text()
    parts = []
    for strategy in ("pareto", "maximal"):
        sol = solve(text, strategy=strategy)
        assert len(sol.optimal) == 1, f"{strategy}: {len(sol.optimal)} optimal"
        b = report_benefits(sol.optimal[0])
        assert b.x == (0.91, 0.94, 3.81), b.x
        assert abs(b.objective_degree - 0.67) <= 0.01, b.objective_degree
        assert abs(b.constraint_degree - 0.67) <= 0.01, b.constraint_degree
        assert abs(b.total - 33.1) <= 0.1, b.total
        parts.append(f"{strategy}: x={b.x} D_g={b.objective_degree:.3f} "
                     f"D_c={b.constraint_degree:.3f} T={b.total:.3f}")
    return "; ".join(parts)


def criterion_3():
    models = solve(WATER.read_text()).models
    worst = 0.0
    for k, (x, obj, con) in PUBLISHED.items():
        m = find_model(models, x)
        d = max(abs(_grade(m, "objective") - obj), abs(_grade(m, "constr") - con))
        assert d <= 0.01, f"I_{k} off by {d:.4f}"
        worst = max(worst, d)
    return f"13 models, 26 grades, max deviation {worst:.4f}"


def criterion_4():
    assert eval_aggregate("sum", []) == (0, 1)
    assert eval_aggregate("times", []) == (1, 1)
    assert eval_aggregate("count", []) == (0, 1)
    assert eval_aggregate("min", []) is UNDEFINED
    assert eval_aggregate("max", []) is UNDEFINED
    return "sum (0,1), times (1,1), count (0,1), min and max undefined"


def criterion_5():
    rng = random.Random(5)
    n = 0
    for _ in range(1000):
        x, u = rng.uniform(-1e6, 1e6), rng.random()
        for f in ("sum", "times", "min", "max"):
            got = eval_aggregate(f, [Member(x, u)])
            assert got == (x, u), (f, x, u, got)
            n += 1
    return f"{n} singleton evaluations exact"


def _program_bounds(p):
    atoms = {a for ch in p.choices for a, _ in ch} | {r.head for r in p.rules}
    return len(p.choices) <= 4 and len(atoms) <= 12 and len(p.prefs) <= 3


def criterion_6(n_programs=200):
    mismatches = comparisons = nontrivial = 0
    rng = random.Random(6)
    for _ in range(n_programs):
        p = oracles.random_classical_program(rng)
        assert _program_bounds(p)
        g = ground_program(parse_program(oracles.render(p)))
        models = generate_answer_sets(g)
        classical = oracles.classical_answer_sets(p)
        as_sets = [frozenset(str(lit) for lit in m) for m in models]
        assert all(v == 1.0 for m in models for v in m.values())
        if sorted(as_sets, key=sorted) != sorted(classical, key=sorted):
            mismatches += 1
            continue
        nontrivial += len(models) > 1
        R = Ranker(models)
        for strategy in ("pareto", "maximal"):
            for i, a in enumerate(models):
                for j, b in enumerate(models):
                    got = _OUT[R.compare(a, b, g.pref, strategy)]
                    want = oracles.classical_compare(as_sets[i], as_sets[j], p, classical, strategy)
                    comparisons += 1
                    mismatches += got != want
    assert mismatches == 0, f"{mismatches} mismatches"
    assert nontrivial >= n_programs // 2, f"only {nontrivial} programs with several answer sets"
    return f"{n_programs} programs, {comparisons} ordered comparisons, 0 mismatches"


def criterion_7(n_samples=500):
    rng = random.Random(7)
    samples = violations = 0
    while samples < n_samples:
        p = oracles.random_fuzzy_program(rng)
        g = ground_program(parse_program(oracles.render(p)))
        try:
            models = generate_answer_sets(g)
        except NotStratified:
            continue
        if not models or not g.pref:
            continue
        R = Ranker(models)
        for _ in range(5):
            a, b = rng.choice(models), rng.choice(models)
            for r in g.pref:
                violations += R.rule_strict(a, b, r) and R.rule_strict(b, a, r)
                violations += R.compare_rule(a, a, r) is not Outcome.EQUAL
            par, mx = R.pareto_compare(a, b, g.pref), R.maximal_compare(a, b, g.pref)
            violations += par is Outcome.LEFT and mx is not Outcome.LEFT
            violations += mx is Outcome.INCOMPARABLE
            samples += 1
    assert violations == 0, f"{violations} violations"
    return f"{samples} (program, pair) samples, 0 violations"


def criterion_8(n_programs=100):
    rng = random.Random(8)
    compared = 0
    while compared < n_programs:
        p = oracles.random_fuzzy_program(rng, with_prefs=False)
        want = oracles.naive_answer_sets(p)
        g = ground_program(parse_program(oracles.render(p)))
        if want is None:
            with pytest.raises(NotStratified):
                generate_answer_sets(g)
            continue
        got = {frozenset((str(l), round(v, 9)) for l, v in m.items()) for m in generate_answer_sets(g)}
        assert got == want, oracles.render(p)
        compared += 1
    return f"{compared} programs, identical answer set collections"


def criterion_9():
    for path in FIXTURES:
        p = parse_file(path)
        assert parse_program(print_program(p)) == p, path.name
    return f"{len(FIXTURES)}/{len(FIXTURES)} fixtures"


NAMES = {
    1: "water end-to-end (38 answer sets, < 5 s)",
    2: "unique optimum under Pareto and Maximal",
    3: "published grades of I_1..I_13 within 0.01",
    4: "empty-multiset aggregate identities",
    5: "singleton law on 1000 random pairs",
    6: "classical subsumption vs brute-force oracle",
    7: "preference relation property suite",
    8: "generator vs naive interpreter",
    9: "parse/print round-trip on fixtures",
}
CHECKS = {n: globals()[f"criterion_{n}"] for n in NAMES}


def line(n) -> str:
    ok, detail = RESULTS[n]
    return f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {NAMES[n]} ({detail})"


def _run(n):
    try:
        detail = CHECKS[n]()
    except AssertionError as exc:
        RESULTS[n] = (False, str(exc) or "assertion failed")
        print(line(n))
        raise
    RESULTS[n] = (True, detail)
    print(line(n))


@pytest.mark.parametrize("n", list(NAMES))
def test_criterion(n):
    _run(n)


if __name__ == "__main__":
    failed = 0
    for n in NAMES:
        try:
            _run(n)
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
