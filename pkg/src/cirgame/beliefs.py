"""Exact evolution of the drunk robber's position distribution.

Each turn has three phases. After the cops move, the robber's conditional
distribution is the *post-cop* belief; after his random-walk step but before
captures are effected it is the *pre-capture* belief; conditioning on survival
gives the *end-of-turn* belief. Arithmetic is exact (``Fraction``) on small
instances and floating point otherwise.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .graphs import Graph

__all__ = [
    "POST_COP",
    "PRE_CAPTURE",
    "END",
    "Belief",
    "InitialBeliefs",
    "CaptureDistribution",
    "InfeasibleSchedule",
    "use_exact",
    "init_beliefs",
    "step_cop",
    "step_robber",
    "walk",
    "schedule_ect",
    "stationary_ect",
    "normalize_schedule",
]

POST_COP = "post_cop"
PRE_CAPTURE = "pre_capture"
END = "end"

EXACT_MAX_N = 64
EXACT_MAX_HORIZON = 128


def use_exact(n: int, horizon: int = 0) -> bool:
    return n <= EXACT_MAX_N and horizon <= EXACT_MAX_HORIZON


class InfeasibleSchedule(ValueError):
    pass


@dataclass(frozen=True)
class Belief:
    probs: tuple
    phase: str
    t: int

    def total(self):
        return sum(self.probs)

    def as_floats(self) -> list[float]:
        return [float(p) for p in self.probs]


@dataclass(frozen=True)
class InitialBeliefs:
    post_cop: Belief
    pre_capture: Belief
    end: Belief | None
    capture_prob: object


def _unit(exact: bool):
    return Fraction(1) if exact else 1.0


def init_beliefs(g: Graph, cops: Iterable[int], exact: bool | None = None) -> InitialBeliefs:
    """Turn-0 beliefs: uniform placement, then conditioning on not landing on a cop.

    ``end`` is ``None`` when the cops cover every vertex (certain capture).
    """
    exact = use_exact(g.n) if exact is None else exact
    one = _unit(exact)
    occupied = set(cops)
    zero = one * 0
    post = Belief(tuple([zero] * g.n), POST_COP, 0)
    pre = Belief(tuple([one / g.n] * g.n), PRE_CAPTURE, 0)
    capture = one * len(occupied) / g.n
    if len(occupied) == g.n:
        return InitialBeliefs(post, pre, None, capture)
    free = g.n - len(occupied)
    end = Belief(tuple(zero if v in occupied else one / free for v in range(g.n)), END, 0)
    return InitialBeliefs(post, pre, end, capture)


def step_cop(p_prev: Belief, cops: Iterable[int]) -> tuple[Belief | None, object]:
    """Cops move onto ``cops``; returns the post-cop belief and the capture probability.

    The belief is ``None`` when capture is certain.
    """
    occupied = set(cops)
    probs = p_prev.probs
    capture = sum(probs[v] for v in occupied)
    if capture == 1:
        return None, capture
    survive = 1 - capture
    zero = probs[0] * 0
    out = tuple(zero if v in occupied else probs[v] / survive for v in range(len(probs)))
    return Belief(out, POST_COP, p_prev.t + 1), capture


def walk(g: Graph, probs: Sequence) -> list:
    """Push a (sub)distribution through one step of the simple random walk."""
    zero = probs[0] * 0
    out = [zero] * g.n
    for u, mass in enumerate(probs):
        if mass:
            share = mass / g.degree(u)
            for v in g.adjacency[u]:
                out[v] += share
    return out


def step_robber(g: Graph, p_bar: Belief, cops: Iterable[int], speed: int = 1
                ) -> tuple[Belief, object, Belief | None]:
    """The drunk robber walks; returns ``(pre_capture, capture_prob, end_of_turn)``.

    With ``speed > 1`` the robber takes ``speed`` walk steps and is absorbed
    at the first cop vertex he enters. The pre-capture belief then places
    mass absorbed at an earlier substep on the cop vertex where it stopped,
    so it still sums to one and its mass on cop vertices is the capture
    probability.
    """
    occupied = sorted(set(cops))
    absorbed = [p_bar.probs[0] * 0] * g.n
    q = list(p_bar.probs)
    for step in range(speed):
        q = walk(g, q)
        if step < speed - 1:
            for v in occupied:
                absorbed[v] += q[v]
                q[v] = q[v] * 0
    pre = tuple(a + b for a, b in zip(q, absorbed))
    capture = sum(pre[v] for v in occupied)
    t = p_bar.t
    pre_belief = Belief(pre, PRE_CAPTURE, t)
    if capture == 1:
        return pre_belief, capture, None
    survive = 1 - capture
    zero = pre[0] * 0
    occ = set(occupied)
    end = tuple(zero if v in occ else pre[v] / survive for v in range(g.n))
    return pre_belief, capture, Belief(end, END, t)


@dataclass
class CaptureDistribution:
    """Unconditional capture-time distribution of a finite cop schedule.

    ``expected`` is exact when ``residual`` is zero; otherwise it is the
    lower bound obtained by charging the uncaptured mass one turn past the
    schedule.
    """

    masses: dict = field(default_factory=dict)
    residual: object = 0
    expected: object = 0

    @property
    def exact(self) -> bool:
        return self.residual == 0

    def total(self):
        return sum(self.masses.values()) + self.residual

    def to_dict(self) -> dict:
        return {
            "masses": [[t, _json_number(p)] for t, p in sorted(self.masses.items())],
            "residual": _json_number(self.residual),
            "expected": _json_number(self.expected),
            "exact": self.exact,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _json_number(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else float(x)
    return x


def normalize_schedule(schedule: Sequence) -> list[tuple[int, ...]]:
    """Accept vertices (one cop) or tuples (one entry per cop)."""
    out = []
    for z in schedule:
        out.append((int(z),) if isinstance(z, (int, np.integer)) else tuple(int(v) for v in z))
    if out and any(len(z) != len(out[0]) for z in out):
        raise InfeasibleSchedule("cop count changes along the schedule")
    return out


def _movable(g: Graph, before, after, stay: bool) -> bool:
    # configurations are multisets, so any matching of cops to targets will do
    return any(all(g.can_move(u, v, stay) for u, v in zip(before, perm))
               for perm in itertools.permutations(after))


def check_schedule(g: Graph, schedule: Sequence[tuple[int, ...]], stay: bool = True) -> None:
    for z in schedule:
        for v in z:
            if not 0 <= v < g.n:
                raise InfeasibleSchedule(f"vertex {v} out of range")
    for t in range(1, len(schedule)):
        before, after = schedule[t - 1], schedule[t]
        if not _movable(g, before, after, stay):
            raise InfeasibleSchedule(f"cops cannot move {before} -> {after} at turn {t}")


def schedule_ect(g: Graph, schedule: Sequence, speed: int = 1, exact: bool | None = None,
                 stay: bool = True) -> CaptureDistribution:
    """Capture-time distribution of the drunk robber against a fixed cop trajectory.

    Parameters
    ----------
    schedule : sequence
        ``Z_0, Z_1, ...``; vertices for a single cop, tuples otherwise.
    speed : int
        Random-walk substeps per robber turn.

    Raises
    ------
    InfeasibleSchedule
        If consecutive positions are not reachable in one move.
    """
    sched = normalize_schedule(schedule)
    if not sched:
        raise InfeasibleSchedule("empty schedule")
    check_schedule(g, sched, stay)
    exact = use_exact(g.n, len(sched)) if exact is None else exact

    init = init_beliefs(g, sched[0], exact)
    masses = {0: init.capture_prob}
    survive = 1 - init.capture_prob
    belief = init.end
    for t in range(1, len(sched)):
        if belief is None:
            break
        p_bar, c1 = step_cop(belief, sched[t])
        mass = survive * c1
        survive = survive * (1 - c1)
        belief = None
        if p_bar is not None:
            _, c2, belief = step_robber(g, p_bar, sched[t], speed)
            mass += survive * c2
            survive = survive * (1 - c2)
        if mass:
            masses[t] = mass
    if belief is None:
        survive = survive * 0
    expected = sum(t * m for t, m in masses.items()) + len(sched) * survive
    return CaptureDistribution(masses, survive, expected)


# ---------------------------------------------------------------------------
# stationary cops


def _solve_fraction(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Gauss-Jordan elimination over the rationals."""
    m = len(b)
    rows = [row[:] + [b[i]] for i, row in enumerate(a)]
    for col in range(m):
        pivot = next(r for r in range(col, m) if rows[r][col] != 0)
        rows[col], rows[pivot] = rows[pivot], rows[col]
        pv = rows[col][col]
        rows[col] = [x / pv for x in rows[col]]
        for r in range(m):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    return [rows[i][m] for i in range(m)]


def _matmul_fraction(a, b):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col) if x and y) for col in bt] for row in a]


def _matpow_fraction(a, k):
    m = len(a)
    result = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    base = a
    while k:
        if k & 1:
            result = _matmul_fraction(result, base)
        k >>= 1
        if k:
            base = _matmul_fraction(base, base)
    return result


def stationary_hitting_times(g: Graph, cop_set: Iterable[int], speed: int = 1,
                             exact: bool | None = None) -> list:
    """Expected capture turn for each robber start, cops never moving.

    ``h(v) = 0`` on the cop set and ``h(v) = 1 + sum_u Q_s(v, u) h(u)``
    elsewhere, where ``Q_s`` is the ``speed``-step walk killed on the cop set.
    """
    cops = sorted(set(cop_set))
    if not cops:
        raise ValueError("cop_set must be nonempty")
    exact = use_exact(g.n, speed) if exact is None else exact
    free = [v for v in range(g.n) if v not in set(cops)]
    if not free:
        return [Fraction(0) if exact else 0.0] * g.n
    pos = {v: i for i, v in enumerate(free)}
    m = len(free)
    if exact:
        q = [[Fraction(0)] * m for _ in range(m)]
        for v in free:
            for u in g.adjacency[v]:
                if u in pos:
                    q[pos[v]][pos[u]] += Fraction(1, g.degree(v))
        qs = _matpow_fraction(q, speed) if speed > 1 else q
        a = [[Fraction(int(i == j)) - qs[i][j] for j in range(m)] for i in range(m)]
        h = _solve_fraction(a, [Fraction(1)] * m)
        zero = Fraction(0)
    else:
        q = np.zeros((m, m))
        for v in free:
            for u in g.adjacency[v]:
                if u in pos:
                    q[pos[v], pos[u]] += 1.0 / g.degree(v)
        qs = np.linalg.matrix_power(q, speed) if speed > 1 else q
        h = list(np.linalg.solve(np.eye(m) - qs, np.ones(m)))
        zero = 0.0
    out = [zero] * g.n
    for v, i in pos.items():
        out[v] = h[i]
    return out


def stationary_ect(g: Graph, cop_set: Iterable[int], speed: int = 1, exact: bool | None = None):
    """Expected capture time of the drunk robber against cops that never move."""
    h = stationary_hitting_times(g, cop_set, speed, exact)
    return sum(h) / g.n
