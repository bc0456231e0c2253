import pytest
from hypothesis import given, settings, strategies as st

from cirgame.graphs import (
    Graph,
    InvalidGraph,
    build_family,
    broom_sizes,
    cop_configs,
    cop_moves,
    cop_number,
    load_graph,
    metrics,
    visible_solve,
)


@pytest.mark.parametrize(
    "family,params,n,edges",
    [
        ("star", {"N": 3}, 4, 3),
        ("path", {"n": 5}, 5, 4),
        ("cycle", {"n": 6}, 6, 6),
        ("grid", {"N": 3}, 9, 12),
        ("tree", {"d": 2, "L": 3}, 15, 14),
        ("complete", {"n": 4}, 4, 6),
    ],
)
def test_family_sizes(family, params, n, edges):
    g = build_family(family, **params)
    assert g.n == n
    assert len(g.edges()) == edges


def test_family_layouts():
    star = build_family("star", N=4)
    assert star.degree(0) == 4
    tree = build_family("tree", d=3, L=2)
    assert tree.neighbors(0) == (1, 2, 3)
    assert set(tree.neighbors(1)) == {0, 4, 5, 6}
    grid = build_family("grid", N=3)
    assert set(grid.neighbors(4)) == {1, 3, 5, 7}


def test_broom_layout():
    g = build_family("broom", c=0.5, n=10)
    path, leaves = broom_sizes(0.5, 10)
    assert (path, leaves) == (5, 5)
    center = path - 1
    assert g.degree(center) == leaves + 1
    assert g.degree(0) == 1


def test_load_graph_specs(tmp_path):
    assert load_graph("star:3").n == 4
    f = tmp_path / "g.txt"
    f.write_text("# triangle\n3\n0 1\n1 2\n2 0\n")
    g = load_graph(str(f))
    assert g.n == 3 and len(g.edges()) == 3


def test_invalid_graphs():
    with pytest.raises(InvalidGraph):
        Graph.from_edges(3, [(0, 1)])  # disconnected
    with pytest.raises((InvalidGraph, ValueError)):
        build_family("star", N=0)
    with pytest.raises((InvalidGraph, ValueError)):
        load_graph("nosuch:4")


def test_metrics_and_moves():
    g = build_family("path", n=4)
    m = metrics(g)
    assert (m.n, m.max_degree, m.min_degree, m.diameter) == (4, 2, 1, 3)
    assert g.moves(0) == (0, 1)
    assert g.moves(0, stay=False) == (1,)
    assert len(cop_configs(4, 2)) == 10
    assert (0, 2) in cop_moves(g, (1, 1))


def test_cop_numbers():
    assert cop_number(build_family("path", n=5)) == 1
    assert cop_number(build_family("star", N=3)) == 1
    assert cop_number(build_family("cycle", n=5)) == 2
    assert cop_number(build_family("grid", N=3)) == 2


def test_visible_capture_time():
    # on a path the visible robber is caught after the cop covers the longer side
    res = visible_solve(build_family("path", n=5), 1)
    assert res.guaranteed and res.T_hat == 2
    assert visible_solve(build_family("star", N=4), 1).T_hat == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 12))
def test_trees_have_cop_number_one(n):
    g = build_family("path", n=n)
    assert cop_number(g) == 1
    assert metrics(g).diameter == n - 1
