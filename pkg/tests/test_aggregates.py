import math

import pytest
from hypothesis import given, strategies as st

from conftest import find_model
from faso.aggregates import (
    UNDEFINED,
    AggregateValue,
    Member,
    build_multiset,
    eval_aggregate,
    eval_aggregate_atom,
    prune_set_entries,
)
from faso.grounder import ground_program
from faso.parser import parse_program
from faso.syntax import Const, Literal, Num

FUNCTIONS = ["sum", "times", "min", "max", "count"]


def _set(text):
    """The ground set of the first aggregate in a one-rule preference program."""
    g = ground_program(parse_program(text))
    c = g.pref[0].head[0]
    return c.aggregate.set, c


def test_empty_multiset_identities():
    assert eval_aggregate("sum", []) == (0, 1)
    assert eval_aggregate("times", []) == (1, 1)
    assert eval_aggregate("count", []) == (0, 1)
    assert eval_aggregate("min", []) is UNDEFINED
    assert eval_aggregate("max", []) is UNDEFINED


def test_sum_takes_min_grade():
    assert eval_aggregate("sum", [(2, 0.5), (3, 0.9)]) == (5, 0.5)


def test_count_keeps_duplicates():
    assert eval_aggregate("count", [(Const("a"), 0.7), (Const("a"), 0.7)]) == (2, 0.7)


def test_non_numeric_is_outside_domain():
    for f in ["sum", "times", "min", "max"]:
        assert eval_aggregate(f, [(Const("a"), 0.5)]) is UNDEFINED
    assert eval_aggregate("count", [(Const("a"), 0.5)]) == (1, 0.5)


def test_singleton_abbreviation():
    assert eval_aggregate(None, [(Const("y"), 0.67)]) == (Const("y"), 0.67)
    assert eval_aggregate(None, []) is UNDEFINED
    assert eval_aggregate(None, [(1, 0.2), (2, 0.3)]) is UNDEFINED


def test_times_overflow_is_undefined():
    assert eval_aggregate("times", [(1e200, 1.0), (1e200, 1.0)]) is UNDEFINED


def test_water_multiset_for_optimum(water):
    (rule,) = water.ground.pref
    s = rule.head[0].aggregate.set
    m = build_multiset(s, find_model(water.models, (0.91, 0.94, 3.81)))
    assert len(m) == 1
    assert m[0].x == Const("y") and m[0].u == pytest.approx(0.67, abs=0.01)


def test_no_condition_holds_gives_empty():
    s, _ = _set("#pref #sum_f{ X : U | p(X) : U } > 0.")
    assert build_multiset(s, {}) == []


def test_symbolic_set_against_interpretation():
    s, _ = _set("p(a) : 0.4 v p(b) : 0.9. #pref #count_f{ X : U | p(X) : U } > 0.")
    I = {Literal("p", (Const("a"),)): 0.4, Literal("p", (Const("b"),)): 0.9}
    got = sorted((str(m.x), m.u) for m in build_multiset(s, I))
    assert got == [("a", 0.4), ("b", 0.9)]


def test_aggregate_atoms():
    p = "x : 0.5 v y. #pref #sum_f{ <2 : 0.5 | x : 0.5>; <3 : 0.9 | x> } >= 4 : 0.5."
    _, atom = _set(p)
    x = Literal("x", ())
    assert eval_aggregate_atom({x: 1.0}, atom)  # (5, 0.5)
    assert not eval_aggregate_atom({x: 0.4}, atom)  # (0, 1)

    _, atom = _set("x. #pref #max_f{ <1 | x : 0.5> } > 0.")
    assert not eval_aggregate_atom({}, atom)
    _, atom = _set("x. #pref not #max_f{ <1 | x : 0.5> } > 0.")
    assert eval_aggregate_atom({}, atom)


def test_atom_grade_threshold():
    _, atom = _set("x. #pref #count_f{ <1 : 0.3 | x> } = 1 : 0.5.")
    assert not eval_aggregate_atom({Literal("x", ()): 1.0}, atom)  # grade 0.3 < 0.5


def test_pruning_keeps_only_reachable_entries():
    s, _ = _set("#pref #sum_f{ <1 | a>; <2 | b>; <3 | c> } > 0.")
    kept = prune_set_entries(s, [{Literal("a", ()): 1.0}, {Literal("c", ()): 1.0}, {Literal("b", ()): 0.2}])
    assert [e.head for e in kept.entries] == [Num(1.0), Num(3.0)]


# -- properties ---------------------------------------------------------------

_grade = st.floats(min_value=0.0, max_value=1.0)
_x = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)
_pairs = st.lists(st.tuples(st.integers(-20, 20).map(float), _grade), max_size=8)


def _naive(f, pairs):
    if f == "count":
        return (len(pairs), min((u for _, u in pairs), default=1.0))
    if not pairs:
        return {"sum": (0.0, 1.0), "times": (1.0, 1.0)}.get(f, UNDEFINED)
    xs = [x for x, _ in pairs]
    value = {"sum": math.fsum, "times": math.prod, "min": min, "max": max}[f](xs)
    return (value, min(u for _, u in pairs))


@given(st.sampled_from(FUNCTIONS), _pairs)
def test_matches_naive_fold(f, pairs):
    got = eval_aggregate(f, pairs)
    want = _naive(f, pairs)
    if want is UNDEFINED:
        assert got is UNDEFINED
    else:
        assert got == AggregateValue(*want)


@given(st.sampled_from(FUNCTIONS), _pairs.filter(bool))
def test_grade_is_min_of_members(f, pairs):
    assert eval_aggregate(f, pairs).grade == min(u for _, u in pairs)


@given(st.sampled_from(FUNCTIONS), _pairs, st.randoms())
def test_permutation_invariant(f, pairs, rnd):
    shuffled = list(pairs)
    rnd.shuffle(shuffled)
    a, b = eval_aggregate(f, pairs), eval_aggregate(f, shuffled)
    if a is UNDEFINED:
        assert b is UNDEFINED
    else:
        assert a.grade == b.grade and math.isclose(a.value, b.value, rel_tol=1e-12, abs_tol=1e-9)


@given(st.sampled_from(["sum", "times", "min", "max", None]), _x, _grade)
def test_singleton_law(f, x, u):
    assert eval_aggregate(f, [Member(x, u)]) == (x, u)


_levels = st.dictionaries(st.sampled_from(["a", "b", "c", "d"]), _grade, max_size=4)


@given(_levels, st.data())
def test_multiset_grows_with_interpretation(base, data):
    s, _ = _set("#pref #count_f{ <1 : 0.5 | a : 0.3>; <2 | b : 0.6, c>; <3 : U | d : U>; <4 | a, d : 0.2> } > 0.")
    bigger = {k: data.draw(st.floats(min_value=v, max_value=1.0)) for k, v in base.items()}
    for extra in data.draw(st.lists(st.sampled_from(["a", "b", "c", "d"]), max_size=2)):
        bigger.setdefault(extra, data.draw(_grade))
    small_I = {Literal(k, ()): v for k, v in base.items()}
    big_I = {Literal(k, ()): v for k, v in bigger.items()}
    small = {m.x for m in build_multiset(s, small_I)}
    big = {m.x for m in build_multiset(s, big_I)}
    assert small <= big
