"""Exact closed-form expected capture times of the named strategies."""

from __future__ import annotations

from fractions import Fraction

from .graphs import Graph

__all__ = [
    "tree_e",
    "tree_e_closed",
    "tree_e_recursion_holds",
    "tree_stationary_mean",
    "tree_bounds",
    "broom_f",
    "star_infspeed_ect",
    "infspeed_limits",
]


def tree_e(d: int, L: int) -> list[Fraction]:
    """Expected drunk capture time from each level of ``T_{d,L}`` with a cop parked at the root.

    Returns ``[e_0, ..., e_L]`` via ``e_j = 2 sum_{k=0}^{L-j} d^k - 1 + e_{j-1}``.
    """
    if d < 2 or L < 1:
        raise ValueError("need d >= 2 and L >= 1")
    e = [Fraction(0)]
    for j in range(1, L + 1):
        e.append(2 * sum(Fraction(d) ** k for k in range(L - j + 1)) - 1 + e[-1])
    return e


def tree_e_closed(d: int, L: int) -> Fraction:
    """``e_L`` in closed form."""
    d_, L_ = Fraction(d), Fraction(L)
    return (2 * d_ ** (L + 1) - 2) / (d_ - 1) ** 2 - (2 * d_ + 2 * L_) / (d_ - 1) - L_ + 2


def tree_e_recursion_holds(d: int, L: int) -> bool:
    """Check the first-step equations ``e_j = 1 + e_{j-1}/(d+1) + d e_{j+1}/(d+1)``."""
    e = tree_e(d, L)
    if e[L] != 1 + e[L - 1]:
        return False
    return all(e[j] == 1 + Fraction(1, d + 1) * e[j - 1] + Fraction(d, d + 1) * e[j + 1]
               for j in range(1, L))


def tree_stationary_mean(d: int, L: int) -> Fraction:
    """Uniform-start average of ``e_j`` (level ``j`` has ``d^j`` vertices)."""
    e = tree_e(d, L)
    n = (d ** (L + 1) - 1) // (d - 1)
    return sum(d ** j * e[j] for j in range(L + 1)) / n


def tree_bounds(d: int, L: int) -> tuple[int, int]:
    """Upper bound from the round strategy and lower bound from the distance-2 robber."""
    upper = d ** (L - 1) * (2 * L + 2 * (d - 1)) - L - (d - 1)
    lower = Fraction(2 * L * (d - 1) * d ** L, d ** 2) - L
    return upper, lower


def broom_f(c, b, p, x) -> tuple:
    """Leading-order ``E(T)/n`` on ``B(c, n)`` for the cop family ``(b, p, x)``.

    Returns ``(f, a_2, a_1, a_0)`` with ``f = a_2 x^2 + a_1 x + a_0``.
    """
    c, b, p, x = (Fraction(str(v)) if isinstance(v, float) else Fraction(v) for v in (c, b, p, x))
    a2 = -(1 - p) * (1 - b) * (1 - c)
    a1 = (1 - p) * (1 - 3 * c + b * c + b)
    a0 = 2 * (1 - p) * (c - b) + 1
    return a2 * x * x + a1 * x + a0, a2, a1, a0


def star_infspeed_ect(N: int) -> int:
    """Capture time of the center/random-leaf cop against a fast robber on ``S_N``.

    The cop searches a leaf at every odd turn and succeeds with probability
    ``1/N``, so ``E(T) = sum_k (2k - 1) (1/N) (1 - 1/N)^{k-1} = 2N - 1``.
    """
    if N < 1:
        raise ValueError("N >= 1")
    return 2 * N - 1


def infspeed_limits(g: Graph, K: int) -> tuple[Fraction, Fraction | None]:
    """Limits as the robber speed grows: ``((n-K)/n, F-ratio or None)``.

    The ratio needs the infinite-speed adversarial value, known for stars
    (``2N - 1``) and paths (``n - 1``).
    """
    n = g.n
    dct = Fraction(n - K, n)
    ct = None
    if g.family == "star" and K == 1:
        ct = star_infspeed_ect(g.param_dict["N"])
    elif g.family == "path" and K == 1:
        ct = n - 1
    return dct, (None if ct is None or n == K else Fraction(n, n - K) * ct)
