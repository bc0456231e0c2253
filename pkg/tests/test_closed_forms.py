from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from cirgame.beliefs import stationary_ect
from cirgame.bounds import (
    check_records,
    family_values,
    grid_lemma52_expression,
    grid_round_constant,
    lemma52_upper,
    q_lower,
    records_to_csv,
)
from cirgame.closed_forms import (
    broom_f,
    infspeed_limits,
    star_infspeed_ect,
    tree_bounds,
    tree_e,
    tree_e_closed,
    tree_e_recursion_holds,
    tree_stationary_mean,
)
from cirgame.graphs import build_family


def test_tree_e_frozen():
    assert tree_e(2, 2) == [0, 5, 6]
    assert tree_e_closed(2, 2) == 6


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("L", [1, 2, 3, 4, 5])
def test_tree_e_closed_form(d, L):
    assert tree_e(d, L)[-1] == tree_e_closed(d, L)


def test_tree_stationary_mean_matches_linear_solve():
    for d, L in [(2, 2), (2, 3), (3, 2)]:
        g = build_family("tree", d=d, L=L)
        assert tree_stationary_mean(d, L) == stationary_ect(g, [0])


def test_tree_bounds_frozen():
    assert tree_bounds(2, 2) == (9, 2)
    assert tree_bounds(2, 3) == (28, 9)


def test_broom_table_sum_is_the_quadratic():
    # the weighted sum of capture distances over the five cases
    b, p, c, x = sp.symbols("b p c x")
    cases = [
        (b * p, b),
        ((1 - b) * p, b + c + (1 - c)),
        (b * (1 - p), (c - b) + 2 * x * (1 - c) + c),
        ((1 - b) * (1 - p) * x, (c - b) + x * (1 - c)),
        ((1 - b) * (1 - p) * (1 - x), (c - b) + 2 * x * (1 - c) + 2 * c + (1 - c)),
    ]
    total = sp.expand(sum(w * d for w, d in cases))
    a2 = -(1 - p) * (1 - b) * (1 - c)
    a1 = (1 - p) * (1 - 3 * c + b * c + b)
    a0 = 2 * (1 - p) * (c - b) + 1
    assert sp.expand(total - (a2 * x**2 + a1 * x + a0)) == 0
    for cv, bv, pv, xv in [(Fraction(1, 2), Fraction(1, 4), Fraction(1, 3), Fraction(2, 5)),
                           (Fraction(3, 4), 0, 0, 1)]:
        expected = total.subs({c: cv, b: bv, p: pv, x: xv})
        assert broom_f(cv, bv, pv, xv)[0] == Fraction(str(expected))


def test_broom_frozen():
    assert broom_f(0.5, 0.25, 0, 1) == (1, Fraction(-3, 8), Fraction(-1, 8), Fraction(3, 2))


@settings(max_examples=300, deadline=None)
@given(st.fractions(0, 1), st.fractions(0, 1), st.fractions(0, 1))
def test_broom_minimum_at_x1(c, bfrac, p):
    b = bfrac * c
    f1, a2, a1, a0 = broom_f(c, b, p, 1)
    assert f1 == 1 and a2 <= 0 and a0 >= 1


def test_infinite_speed():
    assert star_infspeed_ect(3) == 5
    dct, F = infspeed_limits(build_family("star", N=3), 1)
    assert dct == Fraction(3, 4) and F == Fraction(20, 3)
    assert infspeed_limits(build_family("grid", N=5), 2)[0] == Fraction(23, 25)


def test_lemma52_frozen():
    assert lemma52_upper(build_family("path", n=3), 1) == 27
    assert lemma52_upper(build_family("star", N=2), 1) == 27
    assert lemma52_upper(build_family("grid", N=5), 2) == grid_lemma52_expression(5) == 218750


def test_vacuous_flags():
    assert q_lower(2, 2304) == (0.5, False)
    assert q_lower(2, 100)[1]
    assert grid_round_constant(2304) == (0.25, False)
    assert grid_round_constant(100)[1]


@pytest.mark.parametrize("family,params", [
    ("star", {"N": 3}), ("path", {"n": 6}), ("tree", {"d": 2, "L": 3}),
    ("grid", {"N": 4}), ("broom", {"c": 0.5, "n": 40}),
])
def test_catalog_is_consistent(family, params):
    recs = family_values(family, params)
    assert recs
    assert check_records(recs) == []
    assert records_to_csv(recs).startswith("family,params,quantity,kind,value,source,asymptotic")
