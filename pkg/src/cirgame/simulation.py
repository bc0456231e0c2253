"""Seeded Monte Carlo rollouts of cop strategies against a robber."""

from __future__ import annotations

import itertools
import math
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .graphs import Graph
from .strategies import (
    CopStrategy,
    DrunkRobber,
    InfeasibleMove,
    RobberStrategy,
    robber_options,
)

__all__ = ["SimResult", "TrialOutcome", "simulate", "run_trial", "feasible_transition"]


@dataclass(frozen=True)
class TrialOutcome:
    T: int
    vertex: int | None
    rounds: int
    censored: bool


@dataclass
class SimResult:
    trials: int
    seed: object
    times: np.ndarray
    vertices: list
    rounds: np.ndarray
    censored: int
    histogram: dict = field(default_factory=dict)

    @property
    def mean(self) -> float:
        return float(self.times.mean())

    @property
    def std(self) -> float:
        return float(self.times.std(ddof=1)) if self.trials > 1 else 0.0

    @property
    def stderr(self) -> float:
        return self.std / math.sqrt(self.trials)

    @property
    def ci95(self) -> tuple[float, float]:
        half = 1.959963984540054 * self.stderr
        return self.mean - half, self.mean + half

    @property
    def max_T(self) -> int:
        return int(self.times.max())

    def contains(self, value: float) -> bool:
        lo, hi = self.ci95
        return lo <= value <= hi

    def to_dict(self) -> dict:
        lo, hi = self.ci95
        return {
            "trials": self.trials,
            "seed": self.seed,
            "mean": self.mean,
            "ci_low": lo,
            "ci_high": hi,
            "max_T": self.max_T,
            "censored": self.censored,
            "histogram": {int(k): int(v) for k, v in sorted(self.histogram.items())},
        }


def feasible_transition(g: Graph, before, after, stay: bool = True) -> bool:
    """Whether the cop multiset ``before`` can move to ``after`` in one turn."""
    if len(before) != len(after):
        return False
    if all(g.can_move(u, v, stay) for u, v in zip(before, after)):
        return True
    return any(all(g.can_move(u, v, stay) for u, v in zip(before, perm))
               for perm in itertools.permutations(after))


def _check_config(g: Graph, cops, K: int):
    if len(cops) != K or any(not 0 <= v < g.n for v in cops):
        raise InfeasibleMove(f"invalid cop configuration {cops}")


def run_trial(g: Graph, cop: CopStrategy, robber: RobberStrategy, speed: int,
              rng: random.Random, max_turns: int) -> TrialOutcome:
    K = cop.cops(g)
    cr = cop.start(g, rng)
    rr = robber.start(g, rng, speed)
    x = tuple(cr.first())
    _check_config(g, x, K)
    y = rr.place(x)
    if not 0 <= y < g.n:
        raise InfeasibleMove(f"robber placed at {y}")
    if y in x:
        return TrialOutcome(0, y, cr.rounds, False)
    check_robber = not robber.drunk
    for t in range(1, max_turns + 1):
        nx = tuple(cr.next())
        _check_config(g, nx, K)
        if not feasible_transition(g, x, nx):
            raise InfeasibleMove(f"cops cannot move {x} -> {nx} at turn {t}")
        x = nx
        if y in x:
            return TrialOutcome(t, y, cr.rounds, False)
        ny = rr.move(x)
        if check_robber and ny not in x and ny not in robber_options(g, y, x, speed):
            raise InfeasibleMove(f"robber cannot move {y} -> {ny} at turn {t}")
        y = ny
        if y in x:
            return TrialOutcome(t, y, cr.rounds, False)
    return TrialOutcome(max_turns, None, cr.rounds, True)


def _run_chunk(args):
    g, cop, robber, speed, seed, indices, max_turns = args
    return [run_trial(g, cop, robber, speed, random.Random(f"{seed}:{i}"), max_turns)
            for i in indices]


def simulate(g: Graph, cop: CopStrategy, robber: RobberStrategy | None = None, speed: int = 1,
             trials: int = 1000, seed=0, max_turns: int = 1_000_000,
             workers: int = 1) -> SimResult:
    """Play ``trials`` independent games; trial ``i`` draws from ``Random(f"{seed}:{i}")``.

    Results do not depend on ``workers``. Games still running after
    ``max_turns`` are censored at ``max_turns`` and counted.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if speed < 1:
        raise ValueError("speed must be >= 1")
    robber = robber or DrunkRobber()
    cop.check(g)
    robber.check(g)
    if workers > 1 and trials > 1:
        size = math.ceil(trials / workers)
        chunks = [range(i, min(i + size, trials)) for i in range(0, trials, size)]
        with ProcessPoolExecutor(workers) as pool:
            parts = pool.map(_run_chunk, [(g, cop, robber, speed, seed, c, max_turns)
                                          for c in chunks])
            outcomes = [o for part in parts for o in part]
    else:
        outcomes = _run_chunk((g, cop, robber, speed, seed, range(trials), max_turns))
    times = np.array([o.T for o in outcomes], dtype=float)
    return SimResult(
        trials=trials,
        seed=seed,
        times=times,
        vertices=[o.vertex for o in outcomes],
        rounds=np.array([o.rounds for o in outcomes]),
        censored=sum(o.censored for o in outcomes),
        histogram=dict(Counter(o.T for o in outcomes)),
    )
