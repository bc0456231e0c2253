import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cirgame.graphs import build_family
from cirgame.simulation import feasible_transition, simulate
from cirgame.strategies import (
    COP_STRATEGIES,
    ROBBER_STRATEGIES,
    CycleDoubleSweepCop,
    DrunkRobber,
    GreedyEvaderRobber,
    InvalidStrategy,
    PathSweepCop,
    RandomWalkCop,
    ScheduleCop,
    StationaryCop,
    TreeRoundCop,
    parse_cop_strategy,
    parse_robber_strategy,
    robber_options,
)


def test_registries_parse():
    for name in ROBBER_STRATEGIES:
        parse_robber_strategy(name)
    assert isinstance(parse_cop_strategy("stationary:0,3"), StationaryCop)
    assert isinstance(parse_cop_strategy("schedule:0,1,2"), ScheduleCop)
    with pytest.raises(InvalidStrategy):
        parse_cop_strategy("teleport")
    assert {"star-sweep", "tree-round", "broom-cop", "lemma52"} <= set(COP_STRATEGIES)


def test_family_checks():
    with pytest.raises(InvalidStrategy):
        TreeRoundCop().check(build_family("star", N=3))
    with pytest.raises(InvalidStrategy):
        ScheduleCop([0, 2]).check(build_family("path", n=4))


def test_path_sweep_bounces():
    assert [PathSweepCop.position(4, t) for t in range(8)] == [0, 1, 2, 3, 2, 1, 0, 1]


def test_robber_options_blocked_by_cops():
    g = build_family("path", n=5)
    assert set(robber_options(g, 0, (2,), speed=3)) == {0, 1}
    assert set(robber_options(g, 4, (0,), speed=2)) == {2, 3, 4}


def test_cycle_double_sweep_traps():
    g = build_family("cycle", n=7)
    res = simulate(g, CycleDoubleSweepCop(), GreedyEvaderRobber(), trials=200, seed=0)
    assert res.max_T <= 3


def test_random_walk_cop_eventually_captures():
    res = simulate(build_family("cycle", n=6), RandomWalkCop(1), DrunkRobber(), trials=200, seed=1)
    assert res.censored == 0


def test_simulation_is_reproducible_and_worker_independent():
    g = build_family("grid", N=4)
    cop = parse_cop_strategy("grid-stationary", g)
    a = simulate(g, cop, None, 1, 400, 7)
    b = simulate(g, cop, None, 1, 400, 7, workers=2)
    assert np.array_equal(a.times, b.times)
    c = simulate(g, cop, None, 1, 400, 8)
    assert not np.array_equal(a.times, c.times)


def test_simulation_matches_exact_sweep():
    res = simulate(build_family("path", n=4), ScheduleCop([0, 1, 2, 3]), DrunkRobber(), 1, 20_000, 11)
    assert res.contains(9 / 8)


def test_max_turns_censors():
    res = simulate(build_family("path", n=6), StationaryCop([0]), DrunkRobber(), 1, 50, 0, max_turns=2)
    assert res.censored > 0
    assert res.max_T <= 2


def test_feasible_transition_permutes():
    g = build_family("cycle", n=5)
    assert feasible_transition(g, (0, 1), (2, 4))
    assert not feasible_transition(g, (0, 1), (3, 3))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3))
def test_drunk_moves_stay_on_graph(seed, speed):
    g = build_family("tree", d=2, L=3)
    rng = random.Random(seed)
    runner = DrunkRobber().start(g, rng, speed)
    y = runner.place((0,))
    for _ in range(10):
        if y == 0:
            break
        nxt = runner.move((0,))
        assert g.distances(y)[nxt] <= speed
        y = nxt
