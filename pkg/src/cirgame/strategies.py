"""Executable cop and robber strategies.

A strategy is an immutable policy object. ``start`` hands out a per-game
runner that owns the mutable state and draws from the supplied
``random.Random``. Strategies whose behavioural form is cheap to write down
also implement ``dist``, which maps a history to a distribution over the next
move; the exact evaluators use it.

Cop configurations are tuples of vertices, one entry per cop. Robber
histories are tuples of vertices.
"""

from __future__ import annotations

import math
import random
from collections import deque
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .graphs import Graph, broom_sizes, cop_moves, cop_number, visible_solve

__all__ = [
    "InvalidStrategy",
    "InfeasibleMove",
    "CopStrategy",
    "RobberStrategy",
    "StationaryCop",
    "ScheduleCop",
    "StarSweepCop",
    "StarInfSpeedCop",
    "PathSweepCop",
    "CycleDoubleSweepCop",
    "TreeRoundCop",
    "GridStationaryCops",
    "BroomCop",
    "RandomWalkCop",
    "Lemma52RoundCop",
    "TableCopStrategy",
    "UniformLeafRobber",
    "BroomRobber",
    "TreeDistance2Robber",
    "GreedyEvaderRobber",
    "RandomEvaderRobber",
    "DrunkRobber",
    "TableRobberStrategy",
    "broom_drunk_cop",
    "robber_options",
    "parse_cop_strategy",
    "parse_robber_strategy",
    "COP_STRATEGIES",
    "ROBBER_STRATEGIES",
]


class InvalidStrategy(ValueError):
    """The strategy does not apply to the graph or its parameters are out of range."""


class InfeasibleMove(RuntimeError):
    pass


@lru_cache(maxsize=32)
def distance_table(g: Graph) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(g.distances(v)) for v in range(g.n))


def robber_options(g: Graph, y: int, cops: Sequence[int], speed: int = 1,
                   stay: bool = True) -> list[int]:
    """Vertices the robber can reach this turn without passing through a cop."""
    blocked = set(cops)
    seen = {y: 0}
    queue = deque([y])
    while queue:
        u = queue.popleft()
        if seen[u] == speed:
            continue
        for v in g.adjacency[u]:
            if v not in seen and v not in blocked:
                seen[v] = seen[u] + 1
                queue.append(v)
    options = sorted(seen)
    if not stay and speed == 1:
        options = [v for v in options if v != y]
    return options


def _sample(rng: random.Random, dist: dict):
    keys = list(dist)
    if len(keys) == 1:
        return keys[0]
    return rng.choices(keys, weights=[float(dist[k]) for k in keys])[0]


def _uniform(items) -> dict:
    items = list(items)
    p = Fraction(1, len(items))
    return {x: p for x in items}


def _require_family(g: Graph, *families: str) -> None:
    if g.family not in families:
        raise InvalidStrategy(f"strategy needs a {'/'.join(families)} graph, got {g.family}")


# ---------------------------------------------------------------------------
# cop side


class CopRunner:
    rounds = 0

    def first(self) -> tuple[int, ...]:
        raise NotImplementedError

    def next(self) -> tuple[int, ...]:
        raise NotImplementedError


class _DistRunner(CopRunner):
    def __init__(self, strategy: "CopStrategy", g: Graph, rng: random.Random):
        self.strategy, self.g, self.rng = strategy, g, rng
        self.history: list[tuple[int, ...]] = []

    def _draw(self):
        x = _sample(self.rng, self.strategy.dist(self.g, tuple(self.history)))
        self.history.append(x)
        return x

    first = next = _draw


class CopStrategy:
    name = "cop"
    # memoryless: ``dist`` depends on the history only through its last entry
    markov = False

    def cops(self, g: Graph) -> int:
        return 1

    def check(self, g: Graph) -> None:
        pass

    def dist(self, g: Graph, history: tuple) -> dict:
        raise NotImplementedError(f"{self.name} has no closed behavioural form")

    def start(self, g: Graph, rng: random.Random) -> CopRunner:
        self.check(g)
        return _DistRunner(self, g, rng)

    def __repr__(self):
        return self.name


class StationaryCop(CopStrategy):
    name = "stationary"
    markov = True

    def __init__(self, vertices: Sequence[int]):
        if not vertices:
            raise InvalidStrategy("stationary cops need at least one vertex")
        self.vertices = tuple(int(v) for v in vertices)

    def cops(self, g):
        return len(self.vertices)

    def check(self, g):
        if any(not 0 <= v < g.n for v in self.vertices):
            raise InvalidStrategy(f"stationary vertices {self.vertices} out of range")

    def dist(self, g, history):
        return {self.vertices: Fraction(1)}

    def __repr__(self):
        return f"stationary:{','.join(map(str, self.vertices))}"


class ScheduleCop(CopStrategy):
    """Deterministic trajectory; the cops stay put once it runs out."""

    name = "schedule"

    def __init__(self, schedule: Sequence, label: str | None = None):
        from .beliefs import normalize_schedule

        self.schedule = normalize_schedule(schedule)
        if not self.schedule:
            raise InvalidStrategy("empty schedule")
        if label:
            self.name = label

    def cops(self, g):
        return len(self.schedule[0])

    def check(self, g):
        from .beliefs import InfeasibleSchedule, check_schedule

        try:
            check_schedule(g, self.schedule)
        except InfeasibleSchedule as exc:
            raise InvalidStrategy(str(exc)) from None

    def dist(self, g, history):
        t = min(len(history), len(self.schedule) - 1)
        return {self.schedule[t]: Fraction(1)}


class StarSweepCop(CopStrategy):
    """Start at a random leaf, then alternate center / unvisited random leaf."""

    name = "star-sweep"

    def check(self, g):
        _require_family(g, "star")

    def dist(self, g, history):
        leaves = range(1, g.n)
        if not history:
            return _uniform((v,) for v in leaves)
        if history[-1][0] != 0:
            return {(0,): Fraction(1)}
        visited: set[int] = set()
        for (x,) in history:
            if x != 0:
                visited.add(x)
                if len(visited) == g.n - 1:
                    visited = set()
        return _uniform((v,) for v in leaves if v not in visited)


class StarInfSpeedCop(CopStrategy):
    """Center at even turns, a uniformly random leaf (with repetition) at odd turns."""

    name = "star-infspeed"
    markov = True

    def check(self, g):
        _require_family(g, "star")

    def dist(self, g, history):
        if not history or history[-1][0] != 0:
            return {(0,): Fraction(1)}
        return _uniform((v,) for v in range(1, g.n))


class PathSweepCop(CopStrategy):
    """Walk from vertex 0 to the far end and back, forever."""

    name = "path-sweep"

    def check(self, g):
        _require_family(g, "path")

    @staticmethod
    def position(n: int, t: int) -> int:
        if n == 1:
            return 0
        period = 2 * (n - 1)
        r = t % period
        return r if r < n else period - r

    def dist(self, g, history):
        return {(self.position(g.n, len(history)),): Fraction(1)}


class CycleDoubleSweepCop(CopStrategy):
    """Two cops leave a common vertex in opposite directions.

    Reconstructed strategy: the robber is trapped by turn ``ceil((n-1)/2)``.
    """

    name = "cycle-double-sweep"

    def cops(self, g):
        return 2

    def check(self, g):
        _require_family(g, "cycle")

    def dist(self, g, history):
        t = len(history)
        return {(t % g.n, (-t) % g.n): Fraction(1)}


class GridStationaryCops(CopStrategy):
    """Two cops parked at the top-right and bottom-left corners."""

    name = "grid-stationary"

    def __init__(self, K: int = 2):
        if K != 2:
            raise InvalidStrategy(f"grid-stationary uses exactly 2 cops, got {K}")

    def cops(self, g):
        return 2

    def check(self, g):
        _require_family(g, "grid")

    def dist(self, g, history):
        N = g.param_dict["N"]
        return {(N - 1, N * (N - 1)): Fraction(1)}


class RandomWalkCop(CopStrategy):
    """Each cop starts at a uniform vertex and steps to a uniform neighbour."""

    name = "random-walk"
    markov = True

    def __init__(self, K: int = 1):
        if K < 1:
            raise InvalidStrategy("need at least one cop")
        self.K = K

    def cops(self, g):
        return self.K

    def dist(self, g, history):
        out: dict = {}
        if not history:
            options = [[(v, Fraction(1, g.n)) for v in range(g.n)]] * self.K
        else:
            options = [[(u, Fraction(1, g.degree(v))) for u in g.adjacency[v]] if g.n > 1
                       else [(v, Fraction(1))] for v in history[-1]]
        combos = [((), Fraction(1))]
        for opts in options:
            combos = [(c + (u,), p * q) for c, p in combos for u, q in opts]
        for c, p in combos:
            out[c] = out.get(c, 0) + p
        return out

    def start(self, g, rng):
        return _RandomWalkRunner(self.K, g, rng)


class _RandomWalkRunner(CopRunner):
    def __init__(self, K, g, rng):
        self.K, self.g, self.rng = K, g, rng

    def first(self):
        self.x = tuple(self.rng.randrange(self.g.n) for _ in range(self.K))
        return self.x

    def next(self):
        if self.g.n > 1:
            self.x = tuple(self.rng.choice(self.g.adjacency[v]) for v in self.x)
        return self.x


class TableCopStrategy(CopStrategy):
    """Behavioural strategy read from a table keyed by cop history."""

    name = "table"

    def __init__(self, table: dict, K: int):
        self.table = table
        self.K = K

    def cops(self, g):
        return self.K

    def dist(self, g, history):
        key = tuple(history)
        if key in self.table:
            return self.table[key]
        last = history[-1] if history else tuple([0] * self.K)
        return {last: Fraction(1)}


def broom_drunk_cop(g: Graph) -> ScheduleCop:
    """Wait one turn at the broom's center, then walk to the end."""
    _require_family(g, "broom")
    path_len, _ = broom_sizes(g.param_dict["c"], g.n)
    center = path_len - 1
    return ScheduleCop([center, center] + list(range(center - 1, -1, -1)), "broom-drunk")


class TreeRoundCop(CopStrategy):
    """Rounds: root, random preleaf, its leaves in random order, back to root."""

    name = "tree-round"

    def check(self, g):
        _require_family(g, "tree")

    @staticmethod
    def round_length(d: int, L: int) -> int:
        return 2 * L + 2 * (d - 1)

    def start(self, g, rng):
        self.check(g)
        return _TreeRoundRunner(g, rng)


class _TreeRoundRunner(CopRunner):
    def __init__(self, g, rng):
        p = g.param_dict
        self.d, self.L, self.rng = p["d"], p["L"], rng
        self.plan: deque = deque()

    def first(self):
        self.rounds = 1
        self._plan_round()
        return (0,)

    def _plan_round(self):
        d, rng = self.d, self.rng
        path = [0]
        for _ in range(self.L - 1):
            path.append(d * path[-1] + 1 + rng.randrange(d))
        preleaf = path[-1]
        leaves = [d * preleaf + j for j in range(1, d + 1)]
        rng.shuffle(leaves)
        moves = path[1:]
        for leaf in leaves:
            moves += [leaf, preleaf]
        moves += path[-2::-1]
        self.plan.extend(moves)

    def next(self):
        if not self.plan:
            self.rounds += 1
            self._plan_round()
        return (self.plan.popleft(),)


class BroomCop(CopStrategy):
    """Cop family on ``B(c, n)`` parametrised by start ``b``, branch ``p``, sweep fraction ``x``.

    Starting at coordinate ``b*n`` (0 is the end, ``c*n`` the center): with
    probability ``p`` walk to the end, back to the center, then sweep all
    leaves; otherwise walk to the center, sweep ``floor(x * leaves)``
    random leaves, walk to the end and back, then sweep all leaves. Leaf
    sweeps are in uniformly random order without repetition.
    """

    name = "broom-cop"

    def __init__(self, b: float = 0.0, p: float = 0.0, x: float = 1.0):
        for key, val in (("b", b), ("p", p), ("x", x)):
            if not 0 <= val <= 1:
                raise InvalidStrategy(f"broom-cop needs {key} in [0, 1], got {val}")
        self.b, self.p, self.x = b, p, x

    def check(self, g):
        _require_family(g, "broom")
        if self.b > float(g.param_dict["c"]):
            raise InvalidStrategy(f"broom-cop needs b <= c, got b={self.b}")

    def start(self, g, rng):
        self.check(g)
        path_len, n_leaves = broom_sizes(g.param_dict["c"], g.n)
        center = path_len - 1
        leaves = list(range(path_len, g.n))
        start = min(int(round(self.b * g.n)), center)

        def walk(a, b):
            step = 1 if b > a else -1
            return list(range(a + step, b + step, step))

        def sweep(chosen):
            moves = []
            for leaf in chosen:
                moves += [leaf, center]
            return moves

        def full_sweep():
            order = leaves[:]
            rng.shuffle(order)
            return sweep(order)

        plan = [start]
        if rng.random() < self.p:
            plan += walk(start, 0) + walk(0, center) + full_sweep()
        else:
            plan += walk(start, center)
            order = leaves[:]
            rng.shuffle(order)
            plan += sweep(order[: math.floor(self.x * n_leaves)])
            plan += walk(center, 0) + walk(0, center) + full_sweep()

        def refill():
            return walk(center, 0) + walk(0, center) + full_sweep()

        return _PlanRunner(plan, refill)

    def __repr__(self):
        return f"broom-cop:b={self.b},p={self.p},x={self.x}"


class _PlanRunner(CopRunner):
    def __init__(self, plan, refill):
        self.plan = deque(plan)
        self.refill = refill

    def first(self):
        self.last = self.plan.popleft()
        return (self.last,)

    def next(self):
        if not self.plan:
            self.plan.extend(self.refill() or [self.last])
        self.last = self.plan.popleft()
        return (self.last,)


class Lemma52RoundCop(CopStrategy):
    """Rounds of guessed visible-game play.

    Each round the cops walk back to the optimal start of the visible game,
    guess the robber's vertex, then for ``T_hat`` turns play the optimal
    visible reply to a guessed robber that moves uniformly within its closed
    neighbourhood. A round ends early when the guessed robber is caught.
    """

    name = "lemma52"

    def __init__(self, K: int | None = None, forced_move: bool = False):
        self.K = K
        self.forced_move = forced_move
        self._solved: dict = {}

    def cops(self, g):
        return self.K or cop_number(g)

    def solved(self, g: Graph):
        if g not in self._solved:
            res = visible_solve(g, self.cops(g), self.forced_move)
            if not res.guaranteed:
                raise InvalidStrategy(f"{self.cops(g)} cops cannot catch a visible robber")
            self._solved[g] = res
        return self._solved[g]

    def check(self, g):
        self.solved(g)

    def start(self, g, rng):
        return _Lemma52Runner(g, self.solved(g), rng, not self.forced_move)


class _Lemma52Runner(CopRunner):
    def __init__(self, g, vis, rng, stay):
        self.g, self.vis, self.rng, self.stay = g, vis, rng, stay
        self.dist = distance_table(g)
        self.start_pos = tuple(vis.optimal_start)

    def first(self):
        self.rounds = 1
        self.x = self.start_pos
        self._begin_guessing()
        return self.x

    def _begin_guessing(self):
        self.guess = None
        self.left = self.vis.T_hat
        self.phase = "guess"

    def _step_home(self):
        nxt = []
        for v, target in zip(self.x, self.start_pos):
            if v == target:
                nxt.append(v)
            else:
                d = self.dist[target]
                nxt.append(next(u for u in self.g.adjacency[v] if d[u] == d[v] - 1))
        return tuple(nxt)

    def next(self):
        if self.phase == "return":
            if self.x != self.start_pos:
                self.x = self._step_home()
                if self.x == self.start_pos:
                    self._begin_guessing()
                return self.x
            self._begin_guessing()
        if self.guess is None:
            # the guessed robber cannot sit on a cop, so guess among free vertices
            free = [v for v in range(self.g.n) if v not in self.x]
            self.guess = self.rng.choice(free)
        reply = self.vis.cop_move(self.x, self.guess)
        self.x = _match_order(self.g, self.x, reply)
        self.left -= 1
        if self.guess in self.x or self.left <= 0:
            self.phase = "return"
            self.rounds += 1
        else:
            self.guess = self.rng.choice(self.g.moves(self.guess, self.stay))
            if self.guess in self.x:
                self.phase = "return"
                self.rounds += 1
        return self.x


def _match_order(g: Graph, current: tuple, target: tuple) -> tuple:
    """Order ``target`` so that cop ``k`` moves from ``current[k]`` legally."""
    import itertools

    for perm in itertools.permutations(target):
        if all(g.can_move(u, v) for u, v in zip(current, perm)):
            return perm
    raise InfeasibleMove(f"no legal matching {current} -> {target}")


# ---------------------------------------------------------------------------
# robber side


class RobberRunner:
    def place(self, cops: tuple[int, ...]) -> int:
        raise NotImplementedError

    def move(self, cops: tuple[int, ...]) -> int:
        raise NotImplementedError


class _RobberDistRunner(RobberRunner):
    def __init__(self, strategy, g, rng, speed):
        self.s, self.g, self.rng, self.speed = strategy, g, rng, speed
        self.cop_hist: list = []
        self.rob_hist: list = []

    def _draw(self, cops):
        self.cop_hist.append(tuple(cops))
        y = _sample(self.rng, self.s.dist(self.g, tuple(self.cop_hist), tuple(self.rob_hist),
                                          self.speed))
        self.rob_hist.append(y)
        return y

    place = move = _draw


class RobberStrategy:
    name = "robber"
    drunk = False
    # memoryless: ``dist`` depends only on the current cops and robber vertex
    markov = False

    def check(self, g: Graph) -> None:
        pass

    def dist(self, g: Graph, cop_hist: tuple, rob_hist: tuple, speed: int = 1) -> dict:
        raise NotImplementedError(f"{self.name} has no closed behavioural form")

    def state_key(self, rob_hist: tuple):
        """Part of the robber history the strategy actually depends on."""
        return rob_hist

    def start(self, g: Graph, rng: random.Random, speed: int = 1) -> RobberRunner:
        self.check(g)
        return _RobberDistRunner(self, g, rng, speed)

    def __repr__(self):
        return self.name


class DrunkRobber(RobberStrategy):
    """Uniform start, then a simple random walk oblivious to the cops."""

    name = "drunk"
    drunk = True
    markov = True

    def dist(self, g, cop_hist, rob_hist, speed=1):
        """End vertex of the turn; walks that hit a cop stop there."""
        if not rob_hist:
            return _uniform(range(g.n))
        occupied = set(cop_hist[-1])
        out: dict = {}
        frontier = {rob_hist[-1]: Fraction(1)}
        for _ in range(speed):
            step: dict = {}
            for u, p in frontier.items():
                share = p / g.degree(u)
                for v in g.adjacency[u]:
                    target = out if v in occupied else step
                    target[v] = target.get(v, 0) + share
            frontier = step
        for v, p in frontier.items():
            out[v] = out.get(v, 0) + p
        return out

    def state_key(self, rob_hist):
        return rob_hist[-1:]

    def start(self, g, rng, speed=1):
        return _DrunkRunner(g, rng, speed)


class _DrunkRunner(RobberRunner):
    def __init__(self, g, rng, speed):
        self.g, self.rng, self.speed = g, rng, speed

    def place(self, cops):
        self.y = self.rng.randrange(self.g.n)
        return self.y

    def move(self, cops):
        occupied = set(cops)
        adj = self.g.adjacency
        y = self.y
        for _ in range(self.speed):
            y = self.rng.choice(adj[y])
            if y in occupied:
                break
        self.y = y
        return y


class UniformLeafRobber(RobberStrategy):
    """Hide on a uniformly chosen leaf not holding a cop, then never move."""

    name = "uniform-leaf"
    markov = True

    def dist(self, g, cop_hist, rob_hist, speed=1):
        if rob_hist:
            return {rob_hist[-1]: Fraction(1)}
        occupied = set(cop_hist[0])
        leaves = [v for v in range(g.n) if g.degree(v) == 1 and v not in occupied]
        if not leaves:
            leaves = [v for v in range(g.n) if v not in occupied] or [0]
        return _uniform(leaves)

    def state_key(self, rob_hist):
        return rob_hist[-1:]


class BroomRobber(RobberStrategy):
    """Go to the broom's end with probability ``q``, else a random leaf; then stay."""

    name = "broom-robber"
    markov = True

    def __init__(self, q: float = 0.0):
        if not 0 <= q <= 1:
            raise InvalidStrategy(f"broom-robber needs q in [0, 1], got {q}")
        self.q = q

    def check(self, g):
        _require_family(g, "broom")

    def dist(self, g, cop_hist, rob_hist, speed=1):
        if rob_hist:
            return {rob_hist[-1]: Fraction(1)}
        occupied = set(cop_hist[0])
        path_len, _ = broom_sizes(g.param_dict["c"], g.n)
        leaves = [v for v in range(path_len, g.n) if v not in occupied]
        if not leaves:
            leaves = [v for v in range(g.n) if v not in occupied]
        q = Fraction(str(self.q))
        out = {v: (1 - q) / len(leaves) for v in leaves}
        if 0 in occupied:
            return _uniform(leaves)
        out[0] = out.get(0, 0) + q
        return {k: v for k, v in out.items() if v}

    def state_key(self, rob_hist):
        return rob_hist[-1:]

    def __repr__(self):
        return f"broom-robber:q={self.q}"


class GreedyEvaderRobber(RobberStrategy):
    """Maximise the distance to the nearest cop; ties go to the lowest vertex."""

    name = "greedy-evader"
    markov = True

    def dist(self, g, cop_hist, rob_hist, speed=1):
        cops = cop_hist[-1]
        dist = distance_table(g)
        if rob_hist:
            options = robber_options(g, rob_hist[-1], cops, speed)
        else:
            options = [v for v in range(g.n) if v not in cops] or [0]
        best = max(options, key=lambda v: (min(dist[c][v] for c in cops), -v))
        return {best: Fraction(1)}

    def state_key(self, rob_hist):
        return rob_hist[-1:]


class RandomEvaderRobber(RobberStrategy):
    """Uniform over free vertices at placement, then uniform over safe moves."""

    name = "random-evader"
    markov = True

    def dist(self, g, cop_hist, rob_hist, speed=1):
        cops = cop_hist[-1]
        if rob_hist:
            return _uniform(robber_options(g, rob_hist[-1], cops, speed))
        return _uniform([v for v in range(g.n) if v not in cops] or [0])

    def state_key(self, rob_hist):
        return rob_hist[-1:]


class TableRobberStrategy(RobberStrategy):
    """Behavioural robber strategy keyed by ``(cop history, last robber vertex)``."""

    name = "table"

    def __init__(self, table: dict):
        self.table = table

    def dist(self, g, cop_hist, rob_hist, speed=1):
        key = (tuple(cop_hist), rob_hist[-1] if rob_hist else None)
        if key in self.table:
            return self.table[key]
        if rob_hist:
            return {rob_hist[-1]: Fraction(1)}
        return _uniform([v for v in range(g.n) if v not in cop_hist[-1]] or [0])

    def state_key(self, rob_hist):
        return rob_hist[-1:]


class TreeDistance2Robber(RobberStrategy):
    """Keep distance 2 from the single cop, preferring layers nearer the root."""

    name = "tree-distance2"
    markov = True

    def check(self, g):
        _require_family(g, "tree")

    def dist(self, g, cop_hist, rob_hist, speed=1):
        d = g.param_dict["d"]
        x = cop_hist[-1][0]
        dist = distance_table(g)
        if not rob_hist:
            layer = _tree_depth(x, d)
            if layer >= 2:
                return {(((x - 1) // d) - 1) // d: Fraction(1)}
            if layer == 1:
                return _uniform(v for v in range(1, d + 1) if v != x)
            return _uniform(range(d + 1, d + 1 + d * d)) if g.n > d + 1 else _uniform(range(1, d + 1))
        y = rob_hist[-1]
        gap = dist[x][y]
        if gap == 0:
            raise InfeasibleMove("robber already captured")
        if gap == 2:
            return {y: Fraction(1)}
        if gap == 1:
            cands = [u for u in g.adjacency[y] if dist[x][u] == 2]
            if not cands:
                return {y: Fraction(1)}
            top = min(_tree_depth(u, d) for u in cands)
            return _uniform(u for u in cands if _tree_depth(u, d) == top)
        if gap == 3:
            cands = [u for u in g.adjacency[y] if dist[x][u] == 2]
            if len(cands) != 1:
                raise RuntimeError(f"distance-3 case expected one move, found {cands}")
            return {cands[0]: Fraction(1)}
        raise RuntimeError(f"tree-distance2 robber at distance {gap} from the cop")

    def state_key(self, rob_hist):
        return rob_hist[-1:]


def _tree_depth(v: int, d: int) -> int:
    depth = 0
    while v:
        v = (v - 1) // d
        depth += 1
    return depth


# ---------------------------------------------------------------------------
# string registry


def _kv(text: str) -> tuple[list[str], dict]:
    positional, kwargs = [], {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        if "=" in item:
            k, _, v = item.partition("=")
            kwargs[k.strip()] = float(v) if "." in v or "e" in v.lower() else int(v)
        else:
            positional.append(item)
    return positional, kwargs


COP_STRATEGIES = {
    "stationary": lambda pos, kw: StationaryCop([int(v) for v in pos]),
    "schedule": lambda pos, kw: ScheduleCop([int(v) for v in pos]),
    "star-sweep": lambda pos, kw: StarSweepCop(),
    "star-infspeed": lambda pos, kw: StarInfSpeedCop(),
    "path-sweep": lambda pos, kw: PathSweepCop(),
    "cycle-double-sweep": lambda pos, kw: CycleDoubleSweepCop(),
    "tree-round": lambda pos, kw: TreeRoundCop(),
    "grid-stationary": lambda pos, kw: GridStationaryCops(int(kw.get("K", 2))),
    "broom-cop": lambda pos, kw: BroomCop(float(kw.get("b", 0)), float(kw.get("p", 0)),
                                          float(kw.get("x", 1))),
    "random-walk": lambda pos, kw: RandomWalkCop(int(kw.get("K", 1))),
    "lemma52": lambda pos, kw: Lemma52RoundCop(int(kw["K"]) if "K" in kw else None),
}

ROBBER_STRATEGIES = {
    "drunk": lambda pos, kw: DrunkRobber(),
    "uniform-leaf": lambda pos, kw: UniformLeafRobber(),
    "adversarial-uniform-leaf": lambda pos, kw: UniformLeafRobber(),
    "broom-robber": lambda pos, kw: BroomRobber(float(kw.get("q", 0))),
    "tree-distance2": lambda pos, kw: TreeDistance2Robber(),
    "greedy-evader": lambda pos, kw: GreedyEvaderRobber(),
    "random-evader": lambda pos, kw: RandomEvaderRobber(),
}


def parse_cop_strategy(spec: str, g: Graph | None = None) -> CopStrategy:
    """``tree-round``, ``broom-cop:b=0.25,p=0,x=1``, ``stationary:0,8``, ..."""
    name, _, rest = spec.partition(":")
    if name == "broom-drunk":
        if g is None:
            raise InvalidStrategy("broom-drunk needs the graph")
        return broom_drunk_cop(g)
    if name not in COP_STRATEGIES:
        raise InvalidStrategy(f"unknown cop strategy {name!r}; known: {sorted(COP_STRATEGIES)}")
    pos, kw = _kv(rest)
    return COP_STRATEGIES[name](pos, kw)


def parse_robber_strategy(spec: str) -> RobberStrategy:
    name, _, rest = spec.partition(":")
    if name not in ROBBER_STRATEGIES:
        raise InvalidStrategy(f"unknown robber strategy {name!r}; known: {sorted(ROBBER_STRATEGIES)}")
    pos, kw = _kv(rest)
    return ROBBER_STRATEGIES[name](pos, kw)
