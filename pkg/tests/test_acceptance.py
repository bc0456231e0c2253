"""Acceptance criteria 1-13. A PASS/FAIL line per criterion is printed in the
terminal summary (see conftest.py)."""

import math
import random
import time
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import binomtest

from cirgame.adversarial import build_game, evaluate_pair, solve_exact, truncated_values
from cirgame.beliefs import schedule_ect, stationary_ect
from cirgame.bounds import family_values, lemma52_upper
from cirgame.cli import broom_scan
from cirgame.closed_forms import broom_f, tree_bounds, tree_e_recursion_holds
from cirgame.drunk import check_inequality20, lemma51_lower, solve_drunk, val_drunk_truncated
from cirgame.graphs import build_family, metrics, visible_solve
from cirgame.simulation import simulate
from cirgame.strategies import (
    DrunkRobber,
    GridStationaryCops,
    Lemma52RoundCop,
    PathSweepCop,
    ScheduleCop,
    StarInfSpeedCop,
    StationaryCop,
    TreeDistance2Robber,
    TreeRoundCop,
    UniformLeafRobber,
    broom_drunk_cop,
)

Z99 = 2.326  # one-sided 99% normal quantile


# 1 -------------------------------------------------------------------------


@pytest.mark.criterion(1)
@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_star_exactness(N):
    g = build_family("star", N=N)
    t0 = time.perf_counter()
    dct = solve_drunk(g, 1)
    ct = solve_exact(build_game(g, 1, 2 * N))
    elapsed = time.perf_counter() - t0
    assert dct.closed and dct.lower == Fraction(N, N + 1)
    assert ct.value_exact == N
    assert ct.value_exact / dct.lower == N + 1
    assert elapsed < 10


# 2 -------------------------------------------------------------------------


@pytest.mark.criterion(2)
@pytest.mark.parametrize("n", [3, 4])
def test_path_values(n):
    rep = solve_exact(build_game(build_family("path", n=n), 1, 2 * n))
    assert rep.value_exact == n - 1


@pytest.mark.criterion(2)
def test_cycle_c4_parity_record():
    # recorded for the parity question: two cops on C_4 always capture by turn 1
    vals = truncated_values(build_family("cycle", n=4), 2, 4)
    print(f"C_4, K=2: val(Gamma_m) for m=0..4 = {[str(v) for v in vals]}")
    assert vals == [0, 1, 1, 1, 1]


@pytest.mark.criterion(2)
def test_cycle_c5_value():
    t0 = time.perf_counter()
    rep = solve_exact(build_game(build_family("cycle", n=5), 2, 5))
    assert time.perf_counter() - t0 < 120
    print(f"C_5, K=2, m=5: value {rep.value_exact} (expected (n-1)/2 = 2)")
    assert abs(rep.value - 2) <= 1e-6


# 3 -------------------------------------------------------------------------


@pytest.mark.criterion(3)
def test_drunk_sweep_oracle():
    g = build_family("path", n=4)
    assert schedule_ect(g, [0, 1, 2, 3]).expected == Fraction(9, 8)
    res = simulate(g, ScheduleCop([0, 1, 2, 3]), DrunkRobber(), 1, 100_000, 3)
    assert res.contains(9 / 8)


# 4 -------------------------------------------------------------------------


@pytest.mark.criterion(4)
def test_tree_recursion_and_stationary():
    assert all(tree_e_recursion_holds(d, L) for d in range(2, 5) for L in range(1, 6))
    g = build_family("tree", d=2, L=2)
    exact = stationary_ect(g, [0])
    assert exact == Fraction(34, 7)
    res = simulate(g, StationaryCop([0]), DrunkRobber(), 1, 100_000, 4)
    assert abs(res.mean - 34 / 7) <= 0.02 * 34 / 7


# 5 -------------------------------------------------------------------------


@pytest.mark.criterion(5)
def test_tree_round_strategy():
    d, L = 2, 3
    g = build_family("tree", d=d, L=L)
    bound = tree_bounds(d, L)[0]
    assert bound == 28
    res = simulate(g, TreeRoundCop(), TreeDistance2Robber(), 1, 10_000, 5)
    # one-sided: the mean must not significantly exceed the bound
    assert res.mean - Z99 * res.stderr <= bound
    # per-round capture frequency must not be significantly below 1/d^(L-1)
    rounds = int(sum(res.rounds))
    test = binomtest(res.trials - res.censored, rounds, 1 / d ** (L - 1), alternative="less")
    assert test.pvalue >= 0.01
    leaves = set(range(g.n - d ** L, g.n))
    assert set(res.vertices) <= leaves


# 6 -------------------------------------------------------------------------


@pytest.mark.criterion(6)
@settings(max_examples=10_000, deadline=None)
@given(st.fractions(0, 1).filter(bool), st.fractions(0, 1), st.fractions(0, 1))
def test_broom_algebra(c, bfrac, p):
    b = bfrac * c
    _, a2, a1, a0 = broom_f(c, b, p, 0)
    assert a2 + a1 + a0 == 1
    assert a2 <= 0
    assert min(broom_f(c, b, p, 0)[0], broom_f(c, b, p, 1)[0]) >= 1


@pytest.mark.criterion(6)
def test_broom_scan():
    row = broom_scan(0.5, 200, trials=2000, seed=6)
    assert row["x"] == 1
    assert abs(row["mc_ratio"] - 1) <= 0.10


# 7 -------------------------------------------------------------------------


@pytest.mark.criterion(7)
def test_broom_drunk():
    c, n = 0.5, 400
    g = build_family("broom", c=c, n=n)
    res = simulate(g, broom_drunk_cop(g), DrunkRobber(), 1, 20_000, 7)
    ratio = res.mean / (c * c * n / 2)
    assert 0.85 <= ratio <= 1.15


# 8 -------------------------------------------------------------------------


@pytest.mark.criterion(8)
def test_degree_spread_bound_on_p50():
    g = build_family("path", n=50)
    lb = lemma51_lower(g, 1)
    assert lb.applicable and lb.value == pytest.approx(49 / (14 * math.e), abs=1e-5)
    sweep = simulate(g, PathSweepCop(), DrunkRobber(), 1, 4000, 8)
    center = simulate(g, StationaryCop([24]), DrunkRobber(), 1, 4000, 8)
    assert lb.value <= min(sweep.mean, center.mean)


@pytest.mark.criterion(8)
def test_inequality20_random_schedules():
    graphs = [build_family("path", n=50), build_family("path", n=60), build_family("path", n=80)]
    for g in graphs:
        assert lemma51_lower(g, 1).applicable
    rng = random.Random(20)
    for i in range(100):
        g = graphs[i % len(graphs)]
        pos = [rng.randrange(g.n)]
        for _ in range(rng.randint(1, 25)):
            pos.append(rng.choice(g.moves(pos[-1])))
        assert check_inequality20(g, pos) == [], pos


# 9 -------------------------------------------------------------------------


@pytest.mark.criterion(9)
@pytest.mark.parametrize("spec", [("path", {"n": 3}), ("star", {"N": 2})])
def test_guessing_round_cop(spec):
    g = build_family(spec[0], **spec[1])
    bound = lemma52_upper(g, 1)
    assert bound == 27
    res = simulate(g, Lemma52RoundCop(), None, 1, 5000, 9)
    assert res.censored == 0
    assert res.mean - Z99 * res.stderr <= bound
    t_hat = int(visible_solve(g, 1).T_hat)
    p0 = 1 / (g.n * (metrics(g).max_degree + 1) ** t_hat)
    test = binomtest(res.trials, int(sum(res.rounds)), p0, alternative="less")
    assert test.pvalue >= 0.01


# 10 ------------------------------------------------------------------------

PLATEAUS = {
    ("star", 2): (Fraction(2), Fraction(2, 3)),
    ("star", 3): (Fraction(3), Fraction(3, 4)),
    ("path", 3): (Fraction(2), Fraction(2, 3)),
    ("path", 4): (Fraction(3), Fraction(1)),
}


@pytest.mark.criterion(10)
@pytest.mark.parametrize("key", list(PLATEAUS))
def test_monotone_convergence(key):
    fam, size = key
    g = build_family(fam, **({"N": size} if fam == "star" else {"n": size}))
    m_max = 2 * g.n - 2
    adv = truncated_values(g, 1, m_max)
    drunk = [val_drunk_truncated(g, 1, m).value for m in range(m_max + 1)]
    assert all(a <= b for a, b in zip(adv, adv[1:]))
    assert all(a <= b for a, b in zip(drunk, drunk[1:]))
    assert (adv[-1], drunk[-1]) == PLATEAUS[key]
    assert adv[-2] == adv[-1]


# 11 ------------------------------------------------------------------------


@pytest.mark.criterion(11)
def test_infinite_speed():
    g = build_family("star", N=3)
    assert evaluate_pair(g, 1, StarInfSpeedCop(), UniformLeafRobber(), speed=4) == 5
    res = simulate(g, StarInfSpeedCop(), UniformLeafRobber(), 4, 100_000, 11)
    assert res.contains(5)
    p10 = build_family("path", n=10)
    res = simulate(p10, StationaryCop([4]), DrunkRobber(), 50 * p10.n, 4000, 11)
    assert abs(res.mean - 9 / 10) <= 0.05


# 12 ------------------------------------------------------------------------


@pytest.mark.criterion(12)
def test_grid_exact_matches_mc():
    g = build_family("grid", N=3)
    exact = stationary_ect(g, (2, 6))
    assert exact == Fraction(38, 9)
    res = simulate(g, GridStationaryCops(), DrunkRobber(), 1, 20_000, 12)
    assert res.contains(float(exact))


@pytest.mark.criterion(12)
def test_grid_linearity():
    t0 = time.perf_counter()
    ratios = []
    for N in (5, 10, 15):
        g = build_family("grid", N=N)
        res = simulate(g, GridStationaryCops(), DrunkRobber(), 1, 2000, 12)
        ratios.append(res.mean / g.n)
    print(f"grid mean/n for N=5,10,15: {[round(r, 3) for r in ratios]}")
    assert time.perf_counter() - t0 < 300
    assert max(ratios) <= 2 * min(ratios)


# 13 ------------------------------------------------------------------------


@pytest.mark.criterion(13)
def test_not_reproducible_items_are_flagged():
    """Leading constants, the grid ct_i value and untruncated values for
    arbitrary graphs are outside desk scale; the catalog must mark them as
    asymptotic or omit them rather than report them as exact."""
    print("criterion 13: asymptotic constants, grid ct_i and untruncated values "
          "for arbitrary graphs are not reproduced; brackets are reported instead")
    for fam, params in [("broom", {"c": 0.5, "n": 40}), ("path", {"n": 8}), ("tree", {"d": 2, "L": 3})]:
        recs = family_values(fam, params)
        assert any(r.asymptotic for r in recs)
        assert all(r.kind == "asymptotic" for r in recs if r.asymptotic)
    grid = family_values("grid", {"N": 5})
    assert not [r for r in grid if r.quantity == "ct_i" and r.kind == "exact"]
