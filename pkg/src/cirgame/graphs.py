"""Graphs, family generators, metrics and the visible-robber solver.

Vertex numbering for the generated families is canonical so that golden
values are reproducible:

* star ``S_N``: center is 0, leaves are ``1..N``
* path ``P_n``: ``0 - 1 - ... - n-1``
* cycle ``C_n``: ``i ~ i+1 (mod n)``
* complete d-ary tree ``T_{d,L}``: BFS order, children of ``v`` are
  ``d*v+1 .. d*v+d``
* grid ``P_N x P_N``: row-major, vertex ``r*N + c``
* broom ``B(c, n)``: path ``0 .. P-1`` with ``0`` the end and ``P-1`` the
  center, leaves ``P .. n-1`` hang off the center
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Graph",
    "GraphMetrics",
    "VisibleSolveResult",
    "InvalidGraph",
    "StateSpaceTooLarge",
    "build_family",
    "parse_family",
    "load_graph",
    "read_edgelist",
    "metrics",
    "visible_solve",
    "cop_number",
    "cop_configs",
    "cop_moves",
]

VISIBLE_STATE_CAP = 2_000_000


class InvalidGraph(ValueError):
    pass


class StateSpaceTooLarge(RuntimeError):
    """Raised when an exact solver would exceed its configured state cap."""

    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what}: state space {size} exceeds cap {cap}")
        self.size = size
        self.cap = cap


@dataclass(frozen=True)
class Graph:
    n: int
    adjacency: tuple[tuple[int, ...], ...]
    family: str = "custom"
    params: tuple[tuple[str, object], ...] = ()
    _adjsets: tuple[frozenset, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise InvalidGraph("graph needs at least one vertex")
        if len(self.adjacency) != self.n:
            raise InvalidGraph("adjacency length does not match n")
        sets = []
        for v, nbrs in enumerate(self.adjacency):
            if list(nbrs) != sorted(set(nbrs)):
                raise InvalidGraph(f"neighbors of {v} must be sorted and unique")
            for u in nbrs:
                if not 0 <= u < self.n:
                    raise InvalidGraph(f"neighbor {u} of {v} out of range")
                if u == v:
                    raise InvalidGraph(f"self-loop at {v}")
            sets.append(frozenset(nbrs))
        for v, nbrs in enumerate(sets):
            for u in nbrs:
                if v not in sets[u]:
                    raise InvalidGraph(f"edge ({v},{u}) is not symmetric")
        object.__setattr__(self, "_adjsets", tuple(sets))
        if _bfs(self.adjacency, 0).count(-1):
            raise InvalidGraph("graph is not connected")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], family: str = "custom",
                   params: dict | None = None) -> "Graph":
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise InvalidGraph(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidGraph(f"edge ({u},{v}) out of range for n={n}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        adj = tuple(tuple(sorted(s)) for s in nbrs)
        return cls(n, adj, family, tuple(sorted((params or {}).items())))

    @property
    def param_dict(self) -> dict:
        return dict(self.params)

    @property
    def label(self) -> str:
        if self.family == "custom":
            return f"custom:n={self.n}"
        p = self.param_dict
        if set(p) == {"N"}:
            return f"{self.family}:{p['N']}"
        if self.family in ("path", "cycle"):
            return f"{self.family}:{p['n']}"
        return f"{self.family}:" + ",".join(f"{k}={v}" for k, v in self.params)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def adjacent(self, u: int, v: int) -> bool:
        return v in self._adjsets[u]

    def moves(self, v: int, stay: bool = True) -> tuple[int, ...]:
        """Vertices reachable from ``v`` in one move."""
        if stay or self.n == 1:
            return tuple(sorted((v,) + self.adjacency[v]))
        return self.adjacency[v]

    def can_move(self, u: int, v: int, stay: bool = True) -> bool:
        return (stay and u == v) or v in self._adjsets[u] or (self.n == 1 and u == v)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    def distances(self, source: int) -> list[int]:
        return _bfs(self.adjacency, source)

    def distance_matrix(self) -> np.ndarray:
        return np.array([_bfs(self.adjacency, s) for s in range(self.n)], dtype=np.int64)


def _bfs(adj: Sequence[Sequence[int]], source: int) -> list[int]:
    dist = [-1] * len(adj)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


# ---------------------------------------------------------------------------
# family generators


def broom_sizes(c, n: int) -> tuple[int, int]:
    """Return ``(path_vertices, leaves)`` for ``B(c, n)``; the center is on the path."""
    path_len = math.floor(Fraction(str(c)) * n)
    return path_len, n - path_len


def build_family(family: str, **params) -> Graph:
    """Build a member of a named graph family.

    Parameters
    ----------
    family : str
        One of ``star`` (N), ``path`` (n), ``cycle`` (n), ``tree`` (d, L),
        ``grid`` (N), ``broom`` (c, n), ``complete`` (n).

    Raises
    ------
    InvalidGraph
        For unknown families or invalid parameter combinations.
    """
    f = family.lower()
    if f == "star":
        N = _int_param(params, "N", minimum=1)
        return Graph.from_edges(N + 1, [(0, i) for i in range(1, N + 1)], "star", {"N": N})
    if f == "path":
        n = _int_param(params, "n", minimum=1)
        return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)], "path", {"n": n})
    if f == "cycle":
        n = _int_param(params, "n", minimum=3)
        return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)], "cycle", {"n": n})
    if f == "complete":
        n = _int_param(params, "n", minimum=1)
        return Graph.from_edges(n, itertools.combinations(range(n), 2), "complete", {"n": n})
    if f == "tree":
        d = _int_param(params, "d", minimum=2)
        L = _int_param(params, "L", minimum=1)
        n = (d ** (L + 1) - 1) // (d - 1)
        edges = [(v, d * v + j) for v in range(n) for j in range(1, d + 1) if d * v + j < n]
        return Graph.from_edges(n, edges, "tree", {"d": d, "L": L})
    if f == "grid":
        N = _int_param(params, "N", minimum=2)
        edges = []
        for r in range(N):
            for c in range(N):
                v = r * N + c
                if c + 1 < N:
                    edges.append((v, v + 1))
                if r + 1 < N:
                    edges.append((v, v + N))
        return Graph.from_edges(N * N, edges, "grid", {"N": N})
    if f == "broom":
        if "c" not in params or "n" not in params:
            raise InvalidGraph("broom needs c and n")
        c = params["c"]
        n = _int_param(params, "n", minimum=1)
        if not 0 < float(c) <= 1:
            raise InvalidGraph(f"broom needs 0 < c <= 1, got c={c}")
        path_len, leaves = broom_sizes(c, n)
        if path_len < 1:
            raise InvalidGraph(f"broom c={c}, n={n} has no path vertex")
        center = path_len - 1
        edges = [(i, i + 1) for i in range(path_len - 1)]
        edges += [(center, path_len + j) for j in range(leaves)]
        return Graph.from_edges(n, edges, "broom", {"c": c, "n": n})
    raise InvalidGraph(f"unknown family {family!r}")


def _int_param(params: dict, key: str, minimum: int) -> int:
    if key not in params:
        raise InvalidGraph(f"missing parameter {key}")
    value = params[key]
    if isinstance(value, float) and not value.is_integer():
        raise InvalidGraph(f"{key} must be an integer, got {value}")
    value = int(value)
    if value < minimum:
        raise InvalidGraph(f"{key} must be >= {minimum}, got {value}")
    return value


_POSITIONAL = {"star": "N", "path": "n", "cycle": "n", "grid": "N", "complete": "n"}


def _parse_number(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise InvalidGraph(f"cannot parse number {text!r}") from None


def parse_family(spec: str) -> Graph:
    """Parse descriptors such as ``star:3``, ``tree:d=2,L=3``, ``broom:c=0.5,n=40``."""
    if ":" not in spec:
        raise InvalidGraph(f"family descriptor {spec!r} needs the form name:params")
    name, _, rest = spec.partition(":")
    name = name.strip().lower()
    params: dict = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        if "=" in item:
            k, _, v = item.partition("=")
            params[k.strip()] = _parse_number(v.strip())
        elif name in _POSITIONAL:
            params[_POSITIONAL[name]] = _parse_number(item)
        else:
            raise InvalidGraph(f"{name} parameters must be key=value, got {item!r}")
    return build_family(name, **params)


def read_edgelist(path: str | Path) -> Graph:
    """Read the plain-text format: first line ``n``, then one ``u v`` pair per line."""
    lines = [ln.split("#", 1)[0].strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise InvalidGraph(f"{path}: empty file")
    n = int(lines[0])
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise InvalidGraph(f"{path}: bad edge line {ln!r}")
        edges.append((int(parts[0]), int(parts[1])))
    return Graph.from_edges(n, edges)


def load_graph(spec: str) -> Graph:
    """A family descriptor, or a path to an edge-list file."""
    if Path(spec).is_file():
        return read_edgelist(spec)
    return parse_family(spec)


# ---------------------------------------------------------------------------
# metrics


@dataclass(frozen=True)
class GraphMetrics:
    n: int
    max_degree: int
    min_degree: int
    diameter: int


def metrics(g: Graph) -> GraphMetrics:
    degs = [g.degree(v) for v in range(g.n)]
    diameter = int(g.distance_matrix().max()) if g.n > 1 else 0
    return GraphMetrics(g.n, max(degs), min(degs), diameter)


# ---------------------------------------------------------------------------
# cop configurations


def cop_configs(n: int, K: int) -> list[tuple[int, ...]]:
    """All cop placements, as sorted tuples (cops are interchangeable)."""
    return list(itertools.combinations_with_replacement(range(n), K))


def cop_moves(g: Graph, config: tuple[int, ...], stay: bool = True) -> list[tuple[int, ...]]:
    """Distinct sorted configurations reachable in one cop turn."""
    options = [g.moves(v, stay) for v in config]
    return sorted({tuple(sorted(c)) for c in itertools.product(*options)})


# ---------------------------------------------------------------------------
# visible game


@dataclass
class VisibleSolveResult:
    """Outcome of the visible-robber game with ``K`` cops.

    ``T_hat`` counts turns: a robber placed on a cop is caught at turn 0 and
    a capture during turn ``t`` (either half-move) counts as ``t``.
    """

    K: int
    guaranteed: bool
    T_hat: float
    optimal_start: tuple[int, ...] | None
    configs: list[tuple[int, ...]] = field(repr=False, default_factory=list)
    cop_turn_value: np.ndarray | None = field(repr=False, default=None)
    successors: list[list[int]] = field(repr=False, default_factory=list)
    occupied: np.ndarray | None = field(repr=False, default=None)
    robber_moves: list = field(repr=False, default_factory=list)
    _index: dict = field(repr=False, default_factory=dict)

    def value(self, cops: tuple[int, ...], robber: int) -> float:
        """Turns until capture with cops to move (0 if the robber sits on a cop)."""
        ci = self._index[tuple(sorted(cops))]
        if self.occupied[ci, robber]:
            return 0
        v = int(self.cop_turn_value[ci, robber])
        return math.inf if v >= _INF else v

    def cop_move(self, cops: tuple[int, ...], robber: int) -> tuple[int, ...]:
        """Optimal cop reply against a robber at ``robber`` (lowest-index tie-break)."""
        ci = self._index[tuple(sorted(cops))]
        best, best_val = None, None
        for cj in self.successors[ci]:
            val = 0 if self.occupied[cj, robber] else self._robber_value(cj, robber)
            if best_val is None or val < best_val:
                best, best_val = cj, val
        return self.configs[best]

    def _robber_value(self, cj: int, robber: int) -> int:
        worst = 0
        for y in self.robber_moves[robber]:
            val = 0 if self.occupied[cj, y] else int(self.cop_turn_value[cj, y])
            worst = max(worst, val)
        return worst


_INF = 10**9


def visible_solve(g: Graph, K: int, forced_move: bool = False,
                  cap: int = VISIBLE_STATE_CAP) -> VisibleSolveResult:
    """Solve the visible Cops-and-Robber game by backward induction.

    States are ``(cop configuration, robber vertex, mover)``. Cops minimise
    and the robber maximises the capture turn. Both sides may stand still
    unless ``forced_move`` is set.

    Raises
    ------
    StateSpaceTooLarge
        If the number of states exceeds ``cap``.
    """
    if not 1 <= K <= g.n:
        raise ValueError(f"need 1 <= K <= n, got K={K}, n={g.n}")
    n_configs = math.comb(g.n + K - 1, K)
    size = 2 * n_configs * g.n
    if size > cap:
        raise StateSpaceTooLarge("visible_solve", size, cap)

    stay = not forced_move
    configs = cop_configs(g.n, K)
    index = {c: i for i, c in enumerate(configs)}
    C = len(configs)
    occ = np.zeros((C, g.n), dtype=bool)
    for i, c in enumerate(configs):
        occ[i, list(c)] = True
    succ = [[index[c2] for c2 in cop_moves(g, c, stay)] for c in configs]
    width = max(len(s) for s in succ)
    succ_mat = np.array([s + [s[0]] * (width - len(s)) for s in succ], dtype=np.int64)
    robber_moves = [g.moves(y, stay) for y in range(g.n)]

    vc = np.full((C, g.n), _INF, dtype=np.int64)
    while True:
        masked = np.where(occ, 0, vc)
        # robber to move after the cops moved to configuration ci
        vr = np.zeros((C, g.n), dtype=np.int64)
        for y in range(g.n):
            vr[:, y] = masked[:, list(robber_moves[y])].max(axis=1)
        reply = np.where(occ, 0, vr)
        new = np.minimum(1 + reply[succ_mat].min(axis=1), _INF)
        new[occ] = 0
        if np.array_equal(new, vc):
            break
        vc = new

    worst = np.where(occ, 0, vc).max(axis=1)
    best = int(np.argmin(worst))
    t_hat = int(worst[best])
    guaranteed = t_hat < _INF
    result = VisibleSolveResult(
        K=K,
        guaranteed=guaranteed,
        T_hat=t_hat if guaranteed else math.inf,
        optimal_start=configs[best] if guaranteed else None,
        configs=configs,
        cop_turn_value=vc,
        successors=succ,
        occupied=occ,
        robber_moves=robber_moves,
        _index=index,
    )
    return result


_KNOWN_COP_NUMBERS = {
    "tree": lambda p: 1,
    "path": lambda p: 1,
    "star": lambda p: 1,
    "broom": lambda p: 1,
    "complete": lambda p: 1,
    "grid": lambda p: 2,
    "cycle": lambda p: 1 if p["n"] <= 3 else 2,
}


def cop_number(g: Graph, forced_move: bool = False, cap: int = VISIBLE_STATE_CAP) -> int:
    """Smallest ``K`` for which the cops can force capture of a visible robber."""
    if not forced_move and g.family in _KNOWN_COP_NUMBERS:
        return _KNOWN_COP_NUMBERS[g.family](g.param_dict)
    for K in range(1, g.n + 1):
        if visible_solve(g, K, forced_move, cap).guaranteed:
            return K
    raise AssertionError("n cops always suffice")
