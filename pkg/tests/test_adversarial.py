from fractions import Fraction

import pytest

from cirgame.adversarial import (
    best_response_value,
    build_game,
    cop_best_response,
    evaluate_pair,
    solve_exact,
    solve_iterative,
    truncated_values,
)
from cirgame.graphs import StateSpaceTooLarge, build_family
from cirgame.strategies import (
    DrunkRobber,
    PathSweepCop,
    ScheduleCop,
    StarInfSpeedCop,
    StarSweepCop,
    UniformLeafRobber,
)


def test_s2_sequence_frozen():
    # m = 2: a center cop guesses one of two leaves, so E = 1/2 * 1 + 1/2 * 2
    vals = truncated_values(build_family("star", N=2), 1, 4)
    assert vals == [0, 1, Fraction(3, 2), 2, 2]


def test_p4_sequence_frozen():
    vals = truncated_values(build_family("path", n=4), 1, 6)
    assert vals == [0, 1, 2, Fraction(7, 3), Fraction(14, 5), 3, 3]


def test_c5_two_cops_frozen():
    # certified equilibrium value, checked by exact best responses on both sides
    rep = solve_exact(build_game(build_family("cycle", n=5), 2, 4))
    assert rep.value_exact == Fraction(7, 5)
    assert rep.exploitability == 0


def test_c5_forced_moves():
    rep = solve_exact(build_game(build_family("cycle", n=5), 2, 4, stay=False))
    assert rep.value_exact == 1


def test_cop_strategy_from_solution_is_unexploitable():
    g = build_family("star", N=3)
    rep = solve_exact(build_game(g, 1, 6))
    value, _ = best_response_value(g, 1, rep.cop(), 6)
    assert value == rep.value_exact == 3


def test_star_sweep_best_response():
    value, _ = best_response_value(build_family("star", N=3), 1, StarSweepCop(), 6)
    assert value == 3


def test_path_sweep_best_response():
    value, _ = best_response_value(build_family("path", n=4), 1, PathSweepCop(), 5)
    assert value == 3


def test_cop_best_response_to_drunk_matches_solver():
    g = build_family("path", n=4)
    value, _ = cop_best_response(g, 1, DrunkRobber(), 5)
    assert value == 1


def test_evaluate_pair_exact():
    g = build_family("path", n=4)
    sweep = ScheduleCop([0, 1, 2, 3])
    assert evaluate_pair(g, 1, sweep, DrunkRobber()) == Fraction(9, 8)
    assert evaluate_pair(g, 1, sweep, DrunkRobber(), speed=2) == 1
    s3 = build_family("star", N=3)
    assert evaluate_pair(s3, 1, StarSweepCop(), UniformLeafRobber()) == 3
    assert evaluate_pair(s3, 1, StarInfSpeedCop(), UniformLeafRobber(), speed=4) == 5


def test_evaluate_pair_montecarlo_brackets_exact():
    g = build_family("path", n=4)
    mean, lo, hi = evaluate_pair(g, 1, ScheduleCop([0, 1, 2, 3]), DrunkRobber(), mode="montecarlo",
                                 trials=20_000, seed=3)
    assert lo <= 9 / 8 <= hi


def test_iterative_solver_reaches_target():
    rep = solve_iterative(build_game(build_family("star", N=2), 1, 4), iters=3000,
                          target_exploitability=0.02)
    assert rep.exploitability <= 0.02
    assert abs(rep.value - 2) <= 0.02
    assert rep.iterations < 3000


def test_node_cap():
    with pytest.raises(StateSpaceTooLarge):
        build_game(build_family("grid", N=3), 2, 8, cap=1000)


def test_dump_lists_nodes(tmp_path):
    game = build_game(build_family("path", n=2), 1, 2)
    path = tmp_path / "tree.txt"
    with open(path, "w") as fh:
        game.dump(fh)
    assert len(path.read_text().splitlines()) >= game.size
