import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cirgame.beliefs import schedule_ect, stationary_ect
from cirgame.drunk import (
    best_stationary,
    check_inequality20,
    dct_bracket,
    lemma51_lower,
    m_trace,
    schedule_then_stay_ect,
    solve_drunk,
    val_drunk_truncated,
)
from cirgame.graphs import build_family


def test_p4_optimal_schedule():
    # start at 1, step to 2, return to 1: E(T) = 1/2 + 2 * 1/4 = 1
    res = val_drunk_truncated(build_family("path", n=4), 1, 5)
    assert res.value == 1
    assert res.schedule == [(1,), (2,), (1,)]
    assert res.certified


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_star_bracket_closes(N):
    br = solve_drunk(build_family("star", N=N))
    assert br.closed and br.lower == Fraction(N, N + 1)


def test_symmetry_reduction_is_value_preserving():
    for g in (build_family("cycle", n=5), build_family("grid", N=3), build_family("tree", d=2, L=2)):
        K = 2 if g.family != "tree" else 1
        a = val_drunk_truncated(g, K, 3)
        b = val_drunk_truncated(g, K, 3, symmetry=False)
        assert a.value == b.value
        assert a.states <= b.states


def test_truncated_values_nondecreasing():
    g = build_family("path", n=5)
    vals = [val_drunk_truncated(g, 1, m).value for m in range(7)]
    assert vals == sorted(vals)
    assert vals[0] == 0


def test_cap_falls_back_uncertified():
    res = val_drunk_truncated(build_family("grid", N=3), 2, 8, cap=50)
    assert not res.certified
    assert res.horizon_reached < 8


def test_bracket_with_named_upper():
    g = build_family("tree", d=2, L=2)
    br = dct_bracket(g, 1, 4, upper_strategy={0})
    assert br.upper == Fraction(34, 7)
    assert br.lower <= br.upper


def test_schedule_then_stay_matches_stationary():
    g = build_family("path", n=5)
    assert schedule_then_stay_ect(g, [2]) == stationary_ect(g, [2])


def test_best_stationary_on_path():
    value, where = best_stationary(build_family("path", n=4), 1)
    assert value == 2 and where in ((1,), (2,))


def test_lemma51_frozen():
    lb = lemma51_lower(build_family("path", n=50), 1)
    assert lb.applicable
    assert lb.value == pytest.approx(49 / (14 * math.e), abs=1e-5)
    assert not lemma51_lower(build_family("path", n=10), 1).applicable
    assert lemma51_lower(build_family("grid", N=20), 2).value == pytest.approx(5.22914, abs=1e-5)


def test_m_trace_frozen():
    tr = m_trace(build_family("path", n=50), 1, 3)
    assert tr.M[:4] == [Fraction(2, 49), Fraction(2, 45), Fraction(2, 41), Fraction(2, 37)]
    assert tr.condition_ok
    assert tr.reciprocal_step_ok(1)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_inequality20_on_random_schedules(seed):
    g = build_family("path", n=50)
    rng = random.Random(seed)
    pos = [rng.randrange(g.n)]
    for _ in range(15):
        pos.append(rng.choice(g.moves(pos[-1])))
    assert check_inequality20(g, pos) == []


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 7))
def test_stationary_dominates_truncated(n):
    # the truncated optimum never exceeds any full-game strategy's value
    g = build_family("path", n=n)
    value, _ = best_stationary(g, 1)
    assert val_drunk_truncated(g, 1, n).value <= value
