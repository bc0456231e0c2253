"""The adversarial invisible-robber game truncated at ``m`` turns.

Cops see only their own past configurations; the robber sees everything.
Because the cops never learn anything before capture, a cop information set
is exactly a cop history ``H = (X_0, ..., X_t)``. The robber's continuation
problem depends only on ``H`` and the robber's current vertex, so robber
decision nodes are keyed by ``(H, y)``; this loses nothing for a player with
perfect information and keeps the tree size linear in the number of cop
histories.

Payoff is ``min(T, m)``: turns ``0..m-1`` are played and a robber still free
after turn ``m-1`` pays ``m``.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TextIO

import numpy as np

from .graphs import Graph, StateSpaceTooLarge, cop_configs, cop_moves, cop_number
from .simulation import feasible_transition, simulate
from .strategies import (
    CopStrategy,
    InfeasibleMove,
    RobberStrategy,
    TableCopStrategy,
    TableRobberStrategy,
    robber_options,
)

__all__ = [
    "NODE_CAP",
    "ITERATIVE_VISIT_CAP",
    "ExtensiveGame",
    "SolveReport",
    "build_game",
    "solve_exact",
    "solve_iterative",
    "best_response_value",
    "cop_best_response",
    "evaluate_pair",
    "exploitability",
    "truncated_values",
]

NODE_CAP = 1_000_000
ITERATIVE_VISIT_CAP = 100_000_000


def robber_actions(g: Graph, x: tuple, yprev: int | None, speed: int = 1,
                   stay: bool = True) -> list[int]:
    """Robber choices after the cops moved to ``x``.

    Vertices holding a cop are offered only when nothing else is available
    (they mean immediate capture).
    """
    occupied = set(x)
    if yprev is None:
        free = [v for v in range(g.n) if v not in occupied]
        return free or sorted(occupied)
    safe = [v for v in robber_options(g, yprev, x, speed, stay) if v not in occupied]
    if safe:
        return safe
    return sorted(v for v in g.adjacency[yprev] if v in occupied) or [yprev]


# ---------------------------------------------------------------------------
# game tree


@dataclass
class ExtensiveGame:
    """Cop-history tree plus the robber decision nodes hanging off it.

    Cop history ``h`` has configuration ``config[h]`` at turn ``turn[h]``;
    ``children[h]`` are the histories one cop move later. ``robber_nodes``
    maps ``(h, yprev)`` to the robber's action list, with ``yprev = None`` at
    placement.
    """

    graph: Graph
    K: int
    m: int
    speed: int
    stay: bool
    config: list = field(default_factory=list)
    turn: list = field(default_factory=list)
    parent: list = field(default_factory=list)
    children: list = field(default_factory=list)
    roots: list = field(default_factory=list)
    robber_nodes: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.config) + len(self.robber_nodes)

    def history(self, h: int) -> tuple:
        out = []
        while h >= 0:
            out.append(self.config[h])
            h = self.parent[h]
        return tuple(out[::-1])

    def action_value_terms(self, h: int, y: int):
        """How robber action ``y`` at a node of history ``h`` pays off.

        Returns ``("now", t)``, ``("end", m)`` or ``("next", [(h', caught), ...])``.
        """
        t = self.turn[h]
        if y in self.config[h]:
            return "now", t
        if t + 1 == self.m:
            return "end", self.m
        return "next", [(c, y in self.config[c]) for c in self.children[h]]

    def dump(self, out: TextIO) -> None:
        """One line per node: ``id player infoset children payoff``."""
        ids = {}
        for h in range(len(self.config)):
            ids[("C", h)] = len(ids)
        for key in self.robber_nodes:
            ids[("R",) + key] = len(ids)
        for h in range(len(self.config)):
            kids = []
            for y in ([None] if self.turn[h] == 0 else sorted({k[1] for k in self.robber_nodes
                                                                if k[0] == h})):
                if ("R", h, y) in ids:
                    kids.append(str(ids[("R", h, y)]))
            out.write(f"{ids[('C', h)]} cop {_hist_id(self.history(h))} "
                      f"[{','.join(kids)}] -\n")
        for (h, yprev), actions in self.robber_nodes.items():
            kids = []
            for y in actions:
                kind, val = self.action_value_terms(h, y)
                if kind == "next":
                    kids.append(f"{y}->" + "|".join(
                        f"T{self.turn[h] + 1}" if caught else str(ids.get(("R", c, y), "?"))
                        for c, caught in val))
                else:
                    kids.append(f"{y}->T{val}")
            out.write(f"{ids[('R', h, yprev)]} robber {_hist_id(self.history(h))}@{yprev} "
                      f"[{','.join(kids)}] -\n")


def _hist_id(hist) -> str:
    return "|".join(",".join(map(str, x)) for x in hist) or "root"


def build_game(g: Graph, K: int | None = None, m: int = 1, speed: int = 1,
               stay: bool = True, cap: int = NODE_CAP) -> ExtensiveGame:
    """Enumerate cop histories up to turn ``m-1`` and the reachable robber nodes."""
    K = cop_number(g) if K is None else K
    if m < 0 or K < 1 or speed < 1:
        raise ValueError("need m >= 0, K >= 1, speed >= 1")
    game = ExtensiveGame(g, K, m, speed, stay)
    if m == 0:
        return game
    moves_cache: dict = {}

    def add(config, t, parent):
        game.config.append(config)
        game.turn.append(t)
        game.parent.append(parent)
        game.children.append([])
        return len(game.config) - 1

    frontier = [add(x, 0, -1) for x in cop_configs(g.n, K)]
    game.roots = list(frontier)
    for t in range(1, m):
        nxt = []
        for h in frontier:
            x = game.config[h]
            if x not in moves_cache:
                moves_cache[x] = cop_moves(g, x, stay)
            for x2 in moves_cache[x]:
                c = add(x2, t, h)
                game.children[h].append(c)
                nxt.append(c)
            if len(game.config) * max(1, g.n - K) > cap:
                raise StateSpaceTooLarge("game tree nodes (estimate)",
                                         len(game.config) * max(1, g.n - K), cap)
        frontier = nxt

    stack = [(h, None) for h in game.roots]
    seen = set(stack)
    while stack:
        h, yprev = stack.pop()
        actions = robber_actions(g, game.config[h], yprev, speed, stay)
        game.robber_nodes[(h, yprev)] = actions
        if game.size > cap:
            raise StateSpaceTooLarge("game tree nodes", game.size, cap)
        if game.turn[h] + 1 == m:
            continue
        for y in actions:
            if y in game.config[h]:
                continue
            for c in game.children[h]:
                if y not in game.config[c] and (c, y) not in seen:
                    seen.add((c, y))
                    stack.append((c, y))
    return game


# ---------------------------------------------------------------------------
# reports


@dataclass
class SolveReport:
    value: float
    cop_strategy: dict
    robber_strategy: dict
    exploitability: float
    method: str
    lower: float
    upper: float
    graph: str = ""
    K: int = 1
    m: int = 0
    speed: int = 1
    value_exact: Fraction | None = None
    iterations: int = 0
    history: list = field(default_factory=list)

    def cop(self) -> TableCopStrategy:
        return TableCopStrategy(self.cop_strategy, self.K)

    def robber(self) -> TableRobberStrategy:
        return TableRobberStrategy(self.robber_strategy)

    def to_dict(self, tables: bool = True) -> dict:
        out = {
            "graph": self.graph, "K": self.K, "m": self.m, "speed": self.speed,
            "value": self.value,
            "value_exact": None if self.value_exact is None else str(self.value_exact),
            "exploitability": self.exploitability, "lower": self.lower, "upper": self.upper,
            "method": self.method, "iterations": self.iterations,
        }
        if tables:
            out["cop_strategy"] = {
                "C:" + _hist_id(h): {",".join(map(str, x)): float(p) for x, p in d.items()}
                for h, d in self.cop_strategy.items()}
            out["robber_strategy"] = {
                f"R:{_hist_id(h)}@{y}": {str(v): float(p) for v, p in d.items()}
                for (h, y), d in self.robber_strategy.items()}
        return out

    def to_json(self, tables: bool = True) -> str:
        return json.dumps(self.to_dict(tables))


# ---------------------------------------------------------------------------
# best responses and pair evaluation on strategy objects


def _check_cop_dist(g, K, prev, dist, stay):
    for x in dist:
        if len(x) != K or any(not 0 <= v < g.n for v in x):
            raise InfeasibleMove(f"invalid cop configuration {x}")
        if prev is not None and not feasible_transition(g, prev, x, stay):
            raise InfeasibleMove(f"cops cannot move {prev} -> {x}")


def best_response_value(g: Graph, K: int | None, cop: CopStrategy, horizon: int,
                        speed: int = 1, stay: bool = True):
    """Exact robber best response to ``cop`` in the ``horizon``-turn game.

    Returns ``(value, robber)`` where ``robber`` is a table strategy that
    achieves it (ties broken towards the lowest vertex).
    """
    K = cop.cops(g) if K is None else K
    cop.check(g)
    if horizon == 0:
        return 0, TableRobberStrategy({})
    memo: dict = {}
    dists: dict = {}
    choice: dict = {}

    def cop_dist(H):
        if H not in dists:
            d = cop.dist(g, H)
            _check_cop_dist(g, K, H[-1] if H else None, d, stay)
            dists[H] = d
        return dists[H]

    def node(H, yprev):
        key = (H, yprev)
        if key in memo:
            return memo[key]
        t = len(H) - 1
        x = H[-1]
        best, arg = None, None
        for y in robber_actions(g, x, yprev, speed, stay):
            if y in x:
                val = t
            elif t + 1 == horizon:
                val = horizon
            else:
                val = 0
                for x2, p in cop_dist(H).items():
                    val += p * ((t + 1) if y in x2 else node(H + (x2,), y))
            if best is None or val > best:
                best, arg = val, y
        memo[key] = best
        choice[key] = {arg: Fraction(1)}
        return best

    value = sum(p * node((x0,), None) for x0, p in cop_dist(()).items())
    return value, TableRobberStrategy(choice)


def cop_best_response(g: Graph, K: int, robber: RobberStrategy, horizon: int,
                      speed: int = 1, stay: bool = True, cap: int = NODE_CAP):
    """Exact cop best response to ``robber`` by search over cop trajectories.

    The robber's position distribution is carried along keyed by
    ``robber.state_key``. Returns ``(value, cop)``.
    """
    if horizon == 0:
        return 0, TableCopStrategy({}, K)
    robber.check(g)
    plan: dict = {}
    visits = [0]
    moves_cache: dict = {}

    def rec(H, states):
        visits[0] += 1
        if visits[0] > cap:
            raise StateSpaceTooLarge("cop best-response nodes", visits[0], cap)
        t = len(H) - 1
        total = sum(states.values())
        if t + 1 == horizon:
            return horizon * total
        x = H[-1]
        if x not in moves_cache:
            moves_cache[x] = cop_moves(g, x, stay)
        best, arg = None, None
        for x2 in moves_cache[x]:
            H2 = H + (x2,)
            val = 0
            nxt: dict = defaultdict(int)
            for key, mass in states.items():
                y = key[-1]
                if y in x2:
                    val += (t + 1) * mass
                    continue
                for y2, p in robber.dist(g, H2, key, speed).items():
                    if y2 in x2:
                        val += (t + 1) * mass * p
                    else:
                        nxt[robber.state_key(key + (y2,))] += mass * p
            if nxt:
                val += rec(H2, nxt)
            if best is None or val < best:
                best, arg = val, x2
        plan[H] = {arg: Fraction(1)}
        return best

    best, arg = None, None
    for x0 in cop_configs(g.n, K):
        states: dict = defaultdict(int)
        for y, p in robber.dist(g, (x0,), (), speed).items():
            if y not in x0:
                states[robber.state_key((y,))] += p
        val = rec((x0,), states) if states else 0
        if best is None or val < best:
            best, arg = val, x0
    plan[()] = {arg: Fraction(1)}
    return best, TableCopStrategy(plan, K)


def _markov_ect(g, K, cop, robber, speed, stay, cap=20_000):
    """Exact untruncated E(T) for a memoryless strategy pair via an absorbing chain."""
    from .beliefs import _solve_fraction

    init: dict = defaultdict(Fraction)
    for x0, p in cop.dist(g, ()).items():
        _check_cop_dist(g, K, None, {x0: p}, stay)
        for y, q in robber.dist(g, (x0,), (), speed).items():
            if y not in x0:
                init[(x0, robber.state_key((y,)))] += Fraction(p) * Fraction(q)
    index: dict = {}
    trans: list = []
    order = list(init)
    for s in order:
        index[s] = len(index)
    i = 0
    while i < len(order):
        x, key = order[i]
        row = defaultdict(Fraction)
        dist = cop.dist(g, (x,))
        _check_cop_dist(g, K, x, dist, stay)
        for x2, p in dist.items():
            if key[-1] in x2:
                continue
            for y2, q in robber.dist(g, (x2,), key, speed).items():
                if y2 not in x2:
                    s2 = (x2, robber.state_key(key + (y2,)))
                    if s2 not in index:
                        index[s2] = len(index)
                        order.append(s2)
                        if len(order) > cap:
                            raise StateSpaceTooLarge("chain states", len(order), cap)
                    row[index[s2]] += Fraction(p) * Fraction(q)
        trans.append(row)
        i += 1
    size = len(order)
    a = [[Fraction(int(r == c)) for c in range(size)] for r in range(size)]
    for r, row in enumerate(trans):
        for c, p in row.items():
            a[r][c] -= p
    h = _solve_fraction(a, [Fraction(1)] * size)
    return sum(p * h[index[s]] for s, p in init.items())


def evaluate_pair(g: Graph, K: int | None, cop: CopStrategy, robber: RobberStrategy,
                  horizon: int | None = None, mode: str = "exact", speed: int = 1,
                  trials: int = 10_000, seed=0, stay: bool = True, cap: int = NODE_CAP):
    """``E(min(T, horizon))``, or ``E(T)`` when ``horizon`` is ``None``.

    Exact mode enumerates the outcome tree. Without a horizon it needs
    either a pair of memoryless strategies (solved as an absorbing chain) or
    certain capture within the node budget. Monte Carlo mode returns a
    ``SimResult``-derived ``(mean, ci_low, ci_high)`` tuple.
    """
    K = cop.cops(g) if K is None else K
    cop.check(g)
    robber.check(g)
    if mode == "montecarlo":
        max_turns = horizon - 1 if horizon else 1_000_000
        if horizon == 0:
            return 0.0, 0.0, 0.0
        res = simulate(g, cop, robber, speed, trials, seed, max_turns=max_turns)
        if horizon:
            times = res.times.copy()
            times[np.array([v is None for v in res.vertices])] = horizon
            res.times = times
        return (res.mean,) + res.ci95
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    if horizon is None and getattr(cop, "markov", False) and getattr(robber, "markov", False):
        return _markov_ect(g, K, cop, robber, speed, stay)
    if horizon == 0:
        return 0
    visits = [0]

    def rec(H, states):
        visits[0] += 1
        if visits[0] > cap:
            raise StateSpaceTooLarge("outcome tree nodes (is capture certain?)", visits[0], cap)
        t = len(H) - 1
        total = sum(states.values())
        if horizon is not None and t + 1 == horizon:
            return horizon * total
        dist = cop.dist(g, H)
        _check_cop_dist(g, K, H[-1], dist, stay)
        val = 0
        for x2, p in dist.items():
            H2 = H + (x2,)
            nxt: dict = defaultdict(int)
            for key, mass in states.items():
                y = key[-1]
                if y in x2:
                    val += p * (t + 1) * mass
                    continue
                for y2, q in robber.dist(g, H2, key, speed).items():
                    if y2 not in x2 and y2 not in robber_options(g, y, x2, speed, stay):
                        raise InfeasibleMove(f"robber cannot move {y} -> {y2}")
                    if y2 in x2:
                        val += p * (t + 1) * mass * q
                    else:
                        nxt[robber.state_key(key + (y2,))] += mass * q
            if nxt:
                val += p * rec(H2, nxt)
        return val

    total = 0
    dist0 = cop.dist(g, ())
    _check_cop_dist(g, K, None, dist0, stay)
    for x0, p in dist0.items():
        states: dict = defaultdict(int)
        for y, q in robber.dist(g, (x0,), (), speed).items():
            if y not in x0:
                states[robber.state_key((y,))] += q
        if states:
            total += p * rec((x0,), states)
    return total


# ---------------------------------------------------------------------------
# game-tree best responses (used to certify solver output)


def _tree_robber_br(game: ExtensiveGame, sigma_c: dict):
    """Robber best-response value against behavioural cop strategy ``sigma_c[h] -> probs``."""
    memo: dict = {}
    m = game.m

    def node(h, yprev):
        key = (h, yprev)
        if key in memo:
            return memo[key]
        best = None
        t = game.turn[h]
        for y in game.robber_nodes[key]:
            if y in game.config[h]:
                val = t
            elif t + 1 == m:
                val = m
            else:
                val = 0
                for c, p in zip(game.children[h], sigma_c[h]):
                    if p:
                        val += p * ((t + 1) if y in game.config[c] else node(c, y))
            if best is None or val > best:
                best = val
        memo[key] = best
        return best

    return sum(p * node(h, None) for h, p in zip(game.roots, sigma_c[-1]) if p)


def _tree_cop_br(game: ExtensiveGame, sigma_r: dict):
    """Cop best-response value against ``sigma_r[(h, yprev)] -> probs over actions``."""
    m = game.m

    def rec(h, mu):
        t = game.turn[h]
        if t + 1 == m:
            return m * sum(mu.values())
        best = None
        for c in game.children[h]:
            x2 = game.config[c]
            val = 0
            nxt: dict = defaultdict(float)
            for y, mass in mu.items():
                if y in x2:
                    val += (t + 1) * mass
                    continue
                for y2, q in zip(game.robber_nodes[(c, y)], sigma_r[(c, y)]):
                    if not q:
                        continue
                    if y2 in x2:
                        val += (t + 1) * mass * q
                    else:
                        nxt[y2] += mass * q
            if nxt:
                val += rec(c, nxt)
            if best is None or val < best:
                best = val
        return best

    best = None
    for h in game.roots:
        mu: dict = defaultdict(float)
        for y, q in zip(game.robber_nodes[(h, None)], sigma_r[(h, None)]):
            if q and y not in game.config[h]:
                mu[y] += q
        val = rec(h, mu) if mu else 0
        if best is None or val < best:
            best = val
    return best


def _tables(game: ExtensiveGame, sigma_c: dict, sigma_r: dict):
    cop_table, rob_table = {}, {}
    hist = {}
    for h in range(len(game.config)):
        hist[h] = game.history(h)
    cop_table[()] = {game.config[h]: p for h, p in zip(game.roots, sigma_c[-1]) if p}
    for h, probs in sigma_c.items():
        if h >= 0 and game.children[h]:
            cop_table[hist[h]] = {game.config[c]: p for c, p in zip(game.children[h], probs) if p}
    for (h, y), probs in sigma_r.items():
        rob_table[(hist[h], y)] = {a: p for a, p in zip(game.robber_nodes[(h, y)], probs) if p}
    return cop_table, rob_table


def exploitability(game: ExtensiveGame, sigma_c: dict, sigma_r: dict):
    """``(robber BR value, cop BR value)``; the game value lies between them."""
    return _tree_robber_br(game, sigma_c), _tree_cop_br(game, sigma_r)


def _rationalize(probs, denom=10_000):
    fr = [Fraction(max(0.0, float(p))).limit_denominator(denom) for p in probs]
    total = sum(fr)
    if total == 0:
        return [Fraction(int(i == 0)) for i in range(len(fr))]
    return [p / total for p in fr]


def _trivial_report(game: ExtensiveGame, method: str) -> SolveReport:
    return SolveReport(0.0, {}, {}, 0.0, method, 0.0, 0.0, game.graph.label, game.K, game.m,
                       game.speed, Fraction(0))


# ---------------------------------------------------------------------------
# exact solver: sequence-form linear program


def solve_exact(game: ExtensiveGame, certify: bool = True) -> SolveReport:
    """Solve ``min_r max`` over the cop realization plan ``r`` with an LP.

    Variables are ``r[h]`` for every cop history and a value ``V[h, yprev]``
    per robber node; each robber action gives one inequality
    ``V[h, yprev] >= payoff(action)``. The robber's equilibrium strategy is
    read from the inequality duals. With ``certify`` both strategies are
    rounded to rationals and checked with exact best responses; when the two
    bounds meet, ``value_exact`` is that common rational.
    """
    from scipy.optimize import linprog
    from scipy.sparse import coo_matrix

    if game.m == 0:
        return _trivial_report(game, "exact")
    n_h = len(game.config)
    nodes = list(game.robber_nodes)
    vidx = {key: n_h + i for i, key in enumerate(nodes)}
    n_var = n_h + len(nodes)

    rows, cols, vals = [], [], []
    row = 0
    row_of = []
    for key in nodes:
        h, _ = key
        for y in game.robber_nodes[key]:
            kind, val = game.action_value_terms(h, y)
            if kind == "now":
                if val:
                    rows.append(row); cols.append(h); vals.append(val)
            elif kind == "end":
                rows.append(row); cols.append(h); vals.append(val)
            else:
                t1 = game.turn[h] + 1
                for c, caught in val:
                    if caught:
                        rows.append(row); cols.append(c); vals.append(t1)
                    else:
                        rows.append(row); cols.append(vidx[(c, y)]); vals.append(1.0)
            rows.append(row); cols.append(vidx[key]); vals.append(-1.0)
            row_of.append((key, y))
            row += 1
    a_ub = coo_matrix((vals, (rows, cols)), shape=(row, n_var)).tocsr()
    b_ub = np.zeros(row)

    erows, ecols, evals = [], [], []
    for h in game.roots:
        erows.append(0); ecols.append(h); evals.append(1.0)
    e = 1
    for h in range(n_h):
        if game.children[h]:
            erows.append(e); ecols.append(h); evals.append(-1.0)
            for c in game.children[h]:
                erows.append(e); ecols.append(c); evals.append(1.0)
            e += 1
    a_eq = coo_matrix((evals, (erows, ecols)), shape=(e, n_var)).tocsr()
    b_eq = np.zeros(e)
    b_eq[0] = 1.0

    cost = np.zeros(n_var)
    for h in game.roots:
        cost[vidx[(h, None)]] = 1.0
    bounds = [(0, None)] * n_h + [(None, None)] * len(nodes)
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds,
                  method="highs")
    if res.status != 0:
        raise RuntimeError(f"LP failed: {res.message}")
    r = res.x[:n_h]

    sigma_c = {-1: _normalize([r[h] for h in game.roots])}
    for h in range(n_h):
        if game.children[h]:
            sigma_c[h] = _normalize([r[c] for c in game.children[h]])
    flow = -res.ineqlin.marginals
    per_node: dict = defaultdict(list)
    for (key, y), f in zip(row_of, flow):
        per_node[key].append(max(0.0, f))
    sigma_r = {key: _normalize(fs) for key, fs in per_node.items()}

    value = float(res.fun)
    return _finish(game, sigma_c, sigma_r, value, "exact", certify)


def _normalize(ws):
    total = float(sum(ws))
    if total <= 1e-12:
        return [1.0] + [0.0] * (len(ws) - 1)
    return [max(0.0, float(w)) / total for w in ws]


def _finish(game, sigma_c, sigma_r, value, method, certify, iterations=0, history=None):
    upper, lower = exploitability(game, sigma_c, sigma_r)
    value_exact = None
    if certify:
        qc = {h: _rationalize(p) for h, p in sigma_c.items()}
        qr = {k: _rationalize(p) for k, p in sigma_r.items()}
        up, low = _tree_robber_br(game, qc), _tree_cop_br_exact(game, qr)
        if up == low:
            value_exact = Fraction(up)
            sigma_c, sigma_r = qc, qr
            upper = lower = float(up)
            value = float(up)
    cop_table, rob_table = _tables(game, sigma_c, sigma_r)
    return SolveReport(value, cop_table, rob_table, max(0.0, float(upper) - value, value - float(lower)),
                       method, float(lower), float(upper), game.graph.label, game.K, game.m,
                       game.speed, value_exact, iterations, history or [])


def _tree_cop_br_exact(game, sigma_r):
    # same recursion as _tree_cop_br but with rational accumulators
    m = game.m

    def rec(h, mu):
        t = game.turn[h]
        if t + 1 == m:
            return m * sum(mu.values())
        best = None
        for c in game.children[h]:
            x2 = game.config[c]
            val = Fraction(0)
            nxt: dict = defaultdict(Fraction)
            for y, mass in mu.items():
                if y in x2:
                    val += (t + 1) * mass
                    continue
                for y2, q in zip(game.robber_nodes[(c, y)], sigma_r[(c, y)]):
                    if q:
                        if y2 in x2:
                            val += (t + 1) * mass * q
                        else:
                            nxt[y2] += mass * q
            if nxt:
                val += rec(c, nxt)
            if best is None or val < best:
                best = val
        return best

    best = None
    for h in game.roots:
        mu: dict = defaultdict(Fraction)
        for y, q in zip(game.robber_nodes[(h, None)], sigma_r[(h, None)]):
            if q and y not in game.config[h]:
                mu[y] += q
        val = rec(h, mu) if mu else Fraction(0)
        if best is None or val < best:
            best = val
    return best


# ---------------------------------------------------------------------------
# iterative solver: CFR+


def solve_iterative(game: ExtensiveGame, iters: int = 1000, target_exploitability: float = 0.0,
                    check_every: int = 50, visit_cap: int = ITERATIVE_VISIT_CAP) -> SolveReport:
    """Self-play CFR+ with linearly weighted averages.

    Stops after ``iters`` iterations or once the exploitability of the
    average strategies drops to ``target_exploitability``. The reported
    value evaluates the average pair; exploitability comes from exact best
    responses against each average strategy.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    if game.m == 0:
        return _trivial_report(game, "iterative")
    m = game.m
    cfg, turn, children = game.config, game.turn, game.children
    rnodes = game.robber_nodes
    reg_c = {h: np.zeros(len(children[h])) for h in range(len(cfg)) if children[h]}
    reg_c[-1] = np.zeros(len(game.roots))
    avg_c = {h: np.zeros(len(v)) for h, v in reg_c.items()}
    reg_r = {k: np.zeros(len(a)) for k, a in rnodes.items()}
    avg_r = {k: np.zeros(len(a)) for k, a in rnodes.items()}
    visits = 0

    def current(reg):
        pos = np.maximum(reg, 0.0)
        s = pos.sum()
        return pos / s if s > 0 else np.full(len(reg), 1.0 / len(reg))

    def traverse(h, mu, rc, weight):
        """``mu``: robber reach per current vertex after turn ``turn[h]``; returns U[y]."""
        nonlocal visits
        visits += 1
        t = turn[h]
        if t + 1 == m:
            return {y: float(m) for y in mu}
        kids = children[h]
        sig = current(reg_c[h])
        avg_c[h] += weight * rc * sig
        U = {y: 0.0 for y in mu}
        action_vals = np.zeros(len(kids))
        for i, c in enumerate(kids):
            x2 = cfg[c]
            p = sig[i]
            strat = {}
            mu2: dict = {}
            for y, w in mu.items():
                if y in x2:
                    continue
                s = current(reg_r[(c, y)])
                strat[y] = s
                avg_r[(c, y)] += weight * w * s
                for a, q in zip(rnodes[(c, y)], s):
                    if a not in x2:
                        mu2[a] = mu2.get(a, 0.0) + w * q
            U2 = traverse(c, mu2, rc * p, weight) if mu2 and t + 2 <= m - 1 else None
            total = 0.0
            for y, w in mu.items():
                if y in x2:
                    v = float(t + 1)
                else:
                    acts = rnodes[(c, y)]
                    av = np.array([float(t + 1) if a in x2 else (float(m) if U2 is None else U2[a])
                                   for a in acts])
                    s = strat[y]
                    v = float(av @ s)
                    reg_r[(c, y)] = np.maximum(reg_r[(c, y)] + rc * p * (av - v), 0.0)
                U[y] += p * v
                total += w * v
            action_vals[i] = total
        node_val = float(action_vals @ sig)
        reg_c[h] = np.maximum(reg_c[h] + (node_val - action_vals), 0.0)
        return U

    history = []
    best_sig = None
    it = 0
    for it in range(1, iters + 1):
        weight = float(it)
        sig0 = current(reg_c[-1])
        avg_c[-1] += weight * sig0
        root_vals = np.zeros(len(game.roots))
        for i, h in enumerate(game.roots):
            x0 = cfg[h]
            acts = rnodes[(h, None)]
            s = current(reg_r[(h, None)])
            avg_r[(h, None)] += weight * s
            mu = {}
            for a, q in zip(acts, s):
                if a not in x0:
                    mu[a] = mu.get(a, 0.0) + q
            U = traverse(h, mu, sig0[i], weight) if mu and m >= 2 else None
            av = np.array([0.0 if a in x0 else (float(m) if U is None else U[a]) for a in acts])
            v = float(av @ s)
            reg_r[(h, None)] = np.maximum(reg_r[(h, None)] + sig0[i] * (av - v), 0.0)
            root_vals[i] = v
        node_val = float(root_vals @ sig0)
        reg_c[-1] = np.maximum(reg_c[-1] + (node_val - root_vals), 0.0)
        if visits > visit_cap:
            break
        if it % check_every == 0 or it == iters:
            sc = {h: _normalize(a) for h, a in avg_c.items()}
            sr = {k: _normalize(a) for k, a in avg_r.items()}
            up, low = exploitability(game, sc, sr)
            v = _pair_value(game, sc, sr)
            history.append((it, float(up), float(low)))
            best_sig = (sc, sr)
            if max(up - v, v - low) <= target_exploitability:
                break
    sc, sr = best_sig if best_sig else ({h: _normalize(a) for h, a in avg_c.items()},
                                        {k: _normalize(a) for k, a in avg_r.items()})
    value = _pair_value(game, sc, sr)
    return _finish(game, sc, sr, value, "iterative", False, it, history)


def _pair_value(game: ExtensiveGame, sigma_c, sigma_r) -> float:
    m = game.m

    def rec(h, mu):
        t = game.turn[h]
        if t + 1 == m:
            return m * sum(mu.values())
        val = 0.0
        for c, p in zip(game.children[h], sigma_c[h]):
            if not p:
                continue
            x2 = game.config[c]
            nxt: dict = defaultdict(float)
            for y, mass in mu.items():
                if y in x2:
                    val += p * (t + 1) * mass
                    continue
                for a, q in zip(game.robber_nodes[(c, y)], sigma_r[(c, y)]):
                    if q:
                        if a in x2:
                            val += p * (t + 1) * mass * q
                        else:
                            nxt[a] += mass * q
            if nxt:
                val += p * rec(c, nxt)
        return val

    total = 0.0
    for h, p in zip(game.roots, sigma_c[-1]):
        if not p:
            continue
        mu: dict = defaultdict(float)
        for a, q in zip(game.robber_nodes[(h, None)], sigma_r[(h, None)]):
            if q and a not in game.config[h]:
                mu[a] += q
        if mu:
            total += p * rec(h, mu)
    return total


def truncated_values(g: Graph, K: int | None, m_max: int, speed: int = 1,
                     stay: bool = True) -> list:
    """``val(Gamma_m)`` for ``m = 0..m_max`` (exact rationals where certified)."""
    out = []
    for m in range(m_max + 1):
        rep = solve_exact(build_game(g, K, m, speed, stay))
        out.append(rep.value_exact if rep.value_exact is not None else rep.value)
    return out
