"""Optimal values for the drunk-robber game and certified brackets.

Against the drunk robber the cops learn nothing until capture, so the
robber's end-of-turn belief is a deterministic function of the cop
trajectory and an optimal strategy is an open-loop schedule. The truncated
value (payoff ``min(T, m)``) is computed by exhaustive search over
trajectories with memoisation on ``(cops, belief, turns left)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .beliefs import (
    Belief,
    CaptureDistribution,
    check_schedule,
    init_beliefs,
    normalize_schedule,
    schedule_ect,
    stationary_ect,
    stationary_hitting_times,
    step_cop,
    step_robber,
    use_exact,
)
from .graphs import Graph, StateSpaceTooLarge, broom_sizes, cop_configs, cop_moves, cop_number, metrics

__all__ = [
    "DEFAULT_STATE_CAP",
    "DrunkValue",
    "ValueBracket",
    "Lemma51Bound",
    "MTrace",
    "val_drunk_truncated",
    "dct_bracket",
    "solve_drunk",
    "schedule_then_stay_ect",
    "best_stationary",
    "lemma51_lower",
    "m_trace",
    "check_inequality20",
    "canonicalizer",
]

DEFAULT_STATE_CAP = 500_000


# ---------------------------------------------------------------------------
# symmetry reduction


def _rooted_tree_key(g: Graph, root: int) -> Callable:
    order, parent = [root], {root: None}
    for v in order:
        for u in g.adjacency[v]:
            if u not in parent:
                parent[u] = v
                order.append(u)
    children = {v: [u for u in g.adjacency[v] if parent.get(u) == v] for v in order}
    post = order[::-1]

    def key(labels):
        sub = {}
        for v in post:
            sub[v] = (labels[v], tuple(sorted(sub[c] for c in children[v])))
        return sub[root]

    return key


def _permutation_key(perms: list[list[int]]) -> Callable:
    def key(labels):
        return min(tuple(labels[p[i]] for i in range(len(p))) for p in perms)

    return key


def canonicalizer(g: Graph) -> Callable:
    """Map per-vertex labels to a key shared by every automorphic image.

    Only families whose automorphism group is known are reduced; everything
    else keys on the labels themselves.
    """
    n, fam = g.n, g.family
    if fam in ("tree", "star"):
        return _rooted_tree_key(g, 0)
    if fam == "broom":
        path_len, _ = broom_sizes(g.param_dict["c"], n)
        return _rooted_tree_key(g, path_len - 1)
    if fam == "path":
        return _permutation_key([list(range(n)), list(range(n - 1, -1, -1))])
    if fam == "cycle":
        perms = []
        for r in range(n):
            perms.append([(r + i) % n for i in range(n)])
            perms.append([(r - i) % n for i in range(n)])
        return _permutation_key(perms)
    if fam == "grid":
        N = g.param_dict["N"]
        maps = [
            lambda r, c: (r, c), lambda r, c: (c, N - 1 - r),
            lambda r, c: (N - 1 - r, N - 1 - c), lambda r, c: (N - 1 - c, r),
            lambda r, c: (r, N - 1 - c), lambda r, c: (N - 1 - r, c),
            lambda r, c: (c, r), lambda r, c: (N - 1 - c, N - 1 - r),
        ]
        perms = []
        for f in maps:
            perms.append([f(v // N, v % N)[0] * N + f(v // N, v % N)[1] for v in range(n)])
        return _permutation_key(perms)
    if fam == "complete":
        return lambda labels: tuple(sorted(labels))
    return tuple


# ---------------------------------------------------------------------------
# truncated value


@dataclass
class DrunkValue:
    """Optimal truncated value and an optimal open-loop cop schedule.

    ``certified`` is false when the state cap stopped the search early; then
    ``value`` is the exact value at the shorter horizon ``horizon_reached``,
    which is still a lower bound for horizon ``m``.
    """

    value: object
    m: int
    K: int
    schedule: list
    states: int
    certified: bool = True
    horizon_reached: int | None = None

    @property
    def first_moves(self) -> list:
        return self.schedule[:2]


def val_drunk_truncated(g: Graph, K: int | None = None, m: int = 0, speed: int = 1,
                        cap: int = DEFAULT_STATE_CAP, exact: bool | None = None,
                        stay: bool = True, symmetry: bool = True) -> DrunkValue:
    """Optimal ``E[min(T, m)]`` over all cop strategies against the drunk robber.

    The value is ``sum_{t<m} P(T > t)``, built as
    ``W(X, p, r) = min_{X'} q(X', p) * (1 + W(X', p', r - 1))`` where ``q`` is the
    probability of surviving the coming turn.
    """
    K = cop_number(g) if K is None else K
    if m < 0:
        raise ValueError("horizon must be >= 0")
    exact = use_exact(g.n, m) if exact is None else exact
    zero = Fraction(0) if exact else 0.0
    if m == 0:
        return DrunkValue(zero, 0, K, [], 0)

    key_of = canonicalizer(g) if symmetry else tuple
    memo: dict = {}

    def state_key(x, probs):
        counts = [0] * g.n
        for v in x:
            counts[v] += 1
        if exact:
            labels = [(c, p) for c, p in zip(counts, probs)]
        else:
            labels = [(c, round(p, 12)) for c, p in zip(counts, probs)]
        return key_of(labels)

    def solve(x, belief: Belief, left: int):
        """Expected number of further survived turns among the next ``left``."""
        if left == 0:
            return zero, None
        k = (state_key(x, belief.probs), left)
        if k in memo:
            return memo[k]
        if len(memo) >= cap:
            raise StateSpaceTooLarge("drunk belief states", len(memo), cap)
        best, best_move = None, None
        for nx in cop_moves(g, x, stay):
            p_bar, c1 = step_cop(belief, nx)
            if p_bar is None:
                val = zero
            else:
                _, c2, p_end = step_robber(g, p_bar, nx, speed)
                q = (1 - c1) * (1 - c2)
                val = zero if p_end is None else q * (1 + solve(nx, p_end, left - 1)[0])
            if best is None or val < best:
                best, best_move = val, nx
        memo[k] = (best, best_move)
        return best, best_move

    def top(horizon):
        best, start = None, None
        for x0 in cop_configs(g.n, K):
            init = init_beliefs(g, x0, exact)
            if init.end is None:
                val = zero
            else:
                val = (1 - init.capture_prob) * (1 + solve(x0, init.end, horizon - 1)[0])
            if best is None or val < best:
                best, start = val, x0
        return best, start

    horizon = m
    while True:
        try:
            value, start = top(horizon)
            break
        except StateSpaceTooLarge:
            horizon -= 1
            memo = {k: v for k, v in memo.items() if k[1] < horizon}
            if horizon == 0:
                return DrunkValue(zero, m, K, [], cap, False, 0)

    schedule = [start]
    init = init_beliefs(g, start, exact)
    belief = init.end
    for left in range(horizon - 1, 0, -1):
        if belief is None:
            break
        _, nx = solve(schedule[-1], belief, left)
        # the memo is keyed on a canonical form; re-derive the move concretely
        nx = _concrete_best(g, schedule[-1], belief, left, speed, stay, solve, zero)
        schedule.append(nx)
        p_bar, _ = step_cop(belief, nx)
        belief = None if p_bar is None else step_robber(g, p_bar, nx, speed)[2]
    certified = horizon == m
    return DrunkValue(value, m, K, schedule, len(memo), certified, horizon)


def _concrete_best(g, x, belief, left, speed, stay, solve, zero):
    best, best_move = None, None
    for nx in cop_moves(g, x, stay):
        p_bar, c1 = step_cop(belief, nx)
        if p_bar is None:
            val = zero
        else:
            _, c2, p_end = step_robber(g, p_bar, nx, speed)
            val = zero if p_end is None else (1 - c1) * (1 - c2) * (1 + solve(nx, p_end, left - 1)[0])
        if best is None or val < best:
            best, best_move = val, nx
    return best_move


# ---------------------------------------------------------------------------
# upper bounds from concrete strategies


def schedule_then_stay_ect(g: Graph, schedule: Sequence, speed: int = 1,
                           exact: bool | None = None):
    """Expected capture time when the cops follow ``schedule`` and then never move."""
    sched = normalize_schedule(schedule)
    dist = schedule_ect(g, sched, speed, exact)
    if dist.exact:
        return dist.expected
    exact = use_exact(g.n, len(sched)) if exact is None else exact
    # replay to recover the end-of-schedule belief
    init = init_beliefs(g, sched[0], exact)
    belief = init.end
    for z in sched[1:]:
        p_bar, _ = step_cop(belief, z)
        belief = step_robber(g, p_bar, z, speed)[2]
    h = stationary_hitting_times(g, sched[-1], speed, exact)
    tail = sum(p * hv for p, hv in zip(belief.probs, h))
    return sum(t * mass for t, mass in dist.masses.items()) + dist.residual * (len(sched) - 1 + tail)


def best_stationary(g: Graph, K: int, speed: int = 1, exact: bool | None = None,
                    limit: int = 20_000):
    """Best cop placement that never moves, by exhaustive search."""
    configs = cop_configs(g.n, K)
    if len(configs) > limit:
        raise StateSpaceTooLarge("stationary placements", len(configs), limit)
    best, arg = None, None
    for x in configs:
        val = stationary_ect(g, x, speed, exact)
        if best is None or val < best:
            best, arg = val, x
    return best, arg


@dataclass
class ValueBracket:
    graph: str
    K: int
    m: int
    lower: object
    upper: object
    method: str
    exact: bool
    upper_strategy: str = ""
    certified: bool = True

    @property
    def closed(self) -> bool:
        return self.upper is not None and self.lower == self.upper

    def to_dict(self) -> dict:
        def num(x):
            if isinstance(x, Fraction):
                return str(x) if x.denominator != 1 else x.numerator
            return x

        return {"graph": self.graph, "K": self.K, "m": self.m, "lower": num(self.lower),
                "upper": num(self.upper), "method": self.method, "exact": self.exact}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def dct_bracket(g: Graph, K: int | None = None, m: int = 4, upper_strategy=None,
                speed: int = 1, cap: int = DEFAULT_STATE_CAP) -> ValueBracket:
    """Lower bound from the truncated game, upper bound from a concrete cop strategy.

    ``upper_strategy`` is a vertex set (cops never move), a list of
    configurations (a schedule, after which the cops stay), or ``None`` for
    the better of the truncated-optimal schedule and the best stationary
    placement.
    """
    K = cop_number(g) if K is None else K
    lower = val_drunk_truncated(g, K, m, speed, cap)
    exact = use_exact(g.n, m)
    if upper_strategy is None:
        candidates = []
        if lower.schedule:
            candidates.append((schedule_then_stay_ect(g, lower.schedule, speed, exact),
                               "truncated-optimal-schedule"))
        try:
            val, x = best_stationary(g, K, speed, exact)
            candidates.append((val, f"stationary:{','.join(map(str, x))}"))
        except StateSpaceTooLarge:
            pass
        upper, name = min(candidates, key=lambda c: c[0])
    elif isinstance(upper_strategy, (set, frozenset)):
        upper = stationary_ect(g, upper_strategy, speed, exact)
        name = f"stationary:{','.join(map(str, sorted(upper_strategy)))}"
    else:
        upper = schedule_then_stay_ect(g, upper_strategy, speed, exact)
        name = "schedule"
    return ValueBracket(g.label, K, m, lower.value, upper,
                        "exact" if lower.value == upper else "bracket", isinstance(upper, Fraction),
                        name, lower.certified)


def solve_drunk(g: Graph, K: int | None = None, m: int | None = None, speed: int = 1,
                cap: int = DEFAULT_STATE_CAP) -> ValueBracket:
    """Bracket ``dct_i`` with a default horizon of ``n + 1`` turns."""
    return dct_bracket(g, K, g.n + 1 if m is None else m, None, speed, cap)


# ---------------------------------------------------------------------------
# analytic lower bound


@dataclass(frozen=True)
class Lemma51Bound:
    applicable: bool
    value: float | None
    ratio: Fraction
    reason: str = ""

    def __str__(self):
        return f"{self.value:.6g}" if self.applicable else f"inapplicable ({self.reason})"


def lemma51_lower(g: Graph, K: int | None = None) -> Lemma51Bound:
    """``delta (n-K) / (7 e Delta K)``, valid when ``Delta K / (delta (n-K)) <= 1/24``."""
    K = cop_number(g) if K is None else K
    if g.n <= K:
        raise ValueError("need n > K")
    gm = metrics(g)
    ratio = Fraction(gm.max_degree * K, gm.min_degree * (g.n - K))
    if ratio > Fraction(1, 24):
        return Lemma51Bound(False, None, ratio, f"Delta*K/(delta*(n-K)) = {ratio} > 1/24")
    value = gm.min_degree * (g.n - K) / (7 * math.e * gm.max_degree * K)
    return Lemma51Bound(True, value, ratio)


@dataclass
class MTrace:
    M: list = field(default_factory=list)
    tau: Fraction = Fraction(0)
    condition_ok: bool = False

    def reciprocal_step_ok(self, K: int) -> bool:
        return all(1 / b == 1 / a - 2 * K for a, b in zip(self.M, self.M[1:]))


def m_trace(g: Graph, K: int | None = None, t_max: int = 0) -> MTrace:
    """Exact sequence ``M_0 = (Delta/delta)/(n-K)``, ``M_t = M_{t-1}/(1 - 2K M_{t-1})``.

    Stops early once ``2K M_{t-1} >= 1`` (the recursion is no longer a bound).
    """
    K = cop_number(g) if K is None else K
    if g.n <= K:
        raise ValueError("need n > K")
    gm = metrics(g)
    M = [Fraction(gm.max_degree, gm.min_degree * (g.n - K))]
    for _ in range(t_max):
        if 2 * K * M[-1] >= 1:
            break
        M.append(M[-1] / (1 - 2 * K * M[-1]))
    ratio = Fraction(gm.max_degree * K, gm.min_degree * (g.n - K))
    tau = Fraction(gm.min_degree * (g.n - K), 7 * gm.max_degree * K)
    return MTrace(M, tau, ratio <= Fraction(1, 24))


def check_inequality20(g: Graph, schedule: Sequence) -> list[tuple[int, int, str]]:
    """Steps where a belief exceeds ``M_t deg(v) / Delta``; empty means the bound held.

    Only turns with a defined ``M_t`` (while ``2K M_{t-1} < 1``) are checked.
    """
    sched = normalize_schedule(schedule)
    check_schedule(g, sched)
    K = len(sched[0])
    trace = m_trace(g, K, len(sched))
    delta_max = metrics(g).max_degree
    init = init_beliefs(g, sched[0], exact=True)
    violations = []

    def check(probs, t, phase):
        bound = trace.M[t]
        for v, p in enumerate(probs):
            if p > bound * Fraction(g.degree(v), delta_max):
                violations.append((t, v, phase))

    if init.end is None:
        return violations
    check(init.end.probs, 0, "end")
    belief = init.end
    for t in range(1, min(len(sched), len(trace.M))):
        p_bar, _ = step_cop(belief, sched[t])
        if p_bar is None:
            break
        check(p_bar.probs, t, "post_cop")
        pre, _, belief = step_robber(g, p_bar, sched[t])
        check(pre.probs, t, "pre_capture")
        if belief is None:
            break
        check(belief.probs, t, "end")
    return violations
