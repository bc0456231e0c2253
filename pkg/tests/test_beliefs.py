from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cirgame.beliefs import (
    InfeasibleSchedule,
    init_beliefs,
    schedule_ect,
    stationary_ect,
    step_robber,
    walk,
)
from cirgame.graphs import build_family


def test_p4_sweep_distribution():
    # hand-derived: caught at placement 1/4, then 3/8 on each of turns 1 and 2
    dist = schedule_ect(build_family("path", n=4), [0, 1, 2, 3])
    assert dist.masses == {0: Fraction(1, 4), 1: Fraction(3, 8), 2: Fraction(3, 8)}
    assert dist.residual == 0
    assert dist.expected == Fraction(9, 8)


def test_other_frozen_sweeps():
    assert schedule_ect(build_family("path", n=3), [0, 1, 2]).expected == Fraction(2, 3)
    assert schedule_ect(build_family("path", n=4), [1, 2, 3]).expected == Fraction(5, 4)


def test_stationary_frozen():
    assert stationary_ect(build_family("star", N=3), [0]) == Fraction(3, 4)
    assert stationary_ect(build_family("tree", d=2, L=2), [0]) == Fraction(34, 7)


def test_schedule_must_be_walkable():
    with pytest.raises(InfeasibleSchedule):
        schedule_ect(build_family("path", n=4), [0, 2])


def test_multi_cop_schedule_accepts_any_matching():
    g = build_family("cycle", n=5)
    schedule_ect(g, [(0, 1), (2, 4)])  # 0 -> 4 and 1 -> 2


def test_init_beliefs_removes_cop_vertices():
    g = build_family("star", N=3)
    ib = init_beliefs(g, [0], exact=True)
    assert ib.capture_prob == Fraction(1, 4)
    assert ib.end.probs[0] == 0
    assert sum(ib.end.probs) == 1  # conditioned on survival


def test_robber_speed_two_is_absorbed_by_cop():
    g = build_family("path", n=3)
    ib = init_beliefs(g, [1], exact=True)
    _, captured, _ = step_robber(g, ib.end, [1], speed=2)
    # every walk from a leaf enters the cop's vertex on its first step
    assert captured == 1


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 9), st.data())
def test_walk_preserves_mass(n, data):
    g = build_family("cycle", n=n) if n >= 3 else build_family("path", n=n)
    raw = data.draw(st.lists(st.integers(0, 5), min_size=g.n, max_size=g.n).filter(any))
    probs = [Fraction(v, sum(raw)) for v in raw]
    assert sum(walk(g, probs)) == 1


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 8), st.lists(st.integers(-1, 1), min_size=1, max_size=8))
def test_distribution_sums_to_one(n, steps):
    g = build_family("path", n=n)
    pos = [n // 2]
    for d in steps:
        pos.append(min(max(pos[-1] + d, 0), n - 1))
    dist = schedule_ect(g, pos, exact=True)
    assert sum(dist.masses.values()) + dist.residual == 1
