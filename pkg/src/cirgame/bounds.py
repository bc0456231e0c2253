"""Catalog of exact values, certified bounds and asymptotic estimates per graph family."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .beliefs import stationary_ect, use_exact
from .closed_forms import broom_f, infspeed_limits, star_infspeed_ect, tree_bounds, tree_stationary_mean
from .drunk import lemma51_lower
from .graphs import Graph, StateSpaceTooLarge, build_family, cop_number, metrics, visible_solve

__all__ = [
    "BoundRecord",
    "CSV_FIELDS",
    "family_values",
    "graph_bounds",
    "lemma52_upper",
    "grid_lemma52_expression",
    "grid_round_constant",
    "q_lower",
    "infspeed_report",
    "check_records",
    "records_to_csv",
    "records_to_json",
]

CSV_FIELDS = ["family", "params", "quantity", "kind", "value", "source", "asymptotic"]


@dataclass(frozen=True)
class BoundRecord:
    family: str
    params: str
    quantity: str  # ct_i | dct_i | F_i
    kind: str  # lower | upper | exact | asymptotic
    value: object
    source: str
    asymptotic: bool = False

    def as_float(self) -> float:
        return float(self.value)

    def row(self) -> dict:
        d = asdict(self)
        d["value"] = _fmt(self.value)
        d["asymptotic"] = str(self.asymptotic).lower()
        return d


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _params_str(params: dict) -> str:
    return ";".join(f"{k}={v}" for k, v in params.items())


def lemma52_upper(g: Graph, K: int | None = None) -> int:
    """``(T_hat + D) (Delta + 1)^T_hat n`` with ``T_hat`` from the visible game."""
    K = cop_number(g) if K is None else K
    if g.n == 1:
        return 0
    gm = metrics(g)
    if g.family == "grid" and K == 2:
        # known visible value N - 1; the grid bound is stated with D = 2N
        N = g.param_dict["N"]
        t_hat, diameter = N - 1, 2 * N
    else:
        res = visible_solve(g, K)
        if not res.guaranteed:
            raise ValueError(f"{K} cops cannot guarantee capture of a visible robber")
        t_hat, diameter = int(res.T_hat), gm.diameter
    return (t_hat + diameter) * (gm.max_degree + 1) ** t_hat * g.n


def grid_lemma52_expression(N: int) -> int:
    """The grid specialisation ``(3N - 1) n 5^(N-1)`` with ``n = N^2``."""
    return (3 * N - 1) * N * N * 5 ** (N - 1)


def q_lower(k: float, r: float) -> tuple[float, bool]:
    """``1 - 12k / sqrt(r)`` floored at 0; the flag marks a vacuous bound."""
    if r <= 0:
        raise ValueError("r must be positive")
    val = 1 - 12 * k / math.sqrt(r)
    return (0.0, True) if val <= 0 else (val, False)


def grid_round_constant(c_mult: float) -> tuple[float, bool]:
    """``c' = (1 - 24/sqrt(c)) / 2`` without its ``(1 + o(1))`` factor; flag if vacuous."""
    if c_mult <= 0:
        raise ValueError("c_mult must be positive")
    val = 0.5 * (1 - 24 / math.sqrt(c_mult))
    return (0.0, True) if val <= 0 else (val, False)


def infspeed_report(g: Graph, K: int | None = None) -> dict:
    K = cop_number(g) if K is None else K
    dct, F = infspeed_limits(g, K)
    out = {"graph": g.label, "K": K, "dct_limit": dct, "F_limit": F}
    if g.family == "star":
        out["ct_infspeed"] = star_infspeed_ect(g.param_dict["N"])
    return out


def graph_bounds(g: Graph, K: int | None = None, lemma52_limit: int = 200_000) -> list[BoundRecord]:
    """Bounds that apply to any graph: the degree-based drunk lower bound and the round upper bound."""
    K = cop_number(g) if K is None else K
    fam, params = g.family, _params_str(g.param_dict)
    out = []
    if g.n > K:
        lb = lemma51_lower(g, K)
        if lb.applicable:
            out.append(BoundRecord(fam, params, "dct_i", "lower", lb.value, "degree-spread-lower"))
    try:
        if g.family == "grid" or len(g.adjacency) ** K <= lemma52_limit:
            out.append(BoundRecord(fam, params, "ct_i", "upper", lemma52_upper(g, K), "guessing-rounds-upper"))
    except (ValueError, StateSpaceTooLarge):
        pass
    return out


def family_values(family: str, params: dict) -> list[BoundRecord]:
    """Every catalogued value for a family instance; unknown families give ``[]``."""
    fam = family.lower()
    p = _params_str(params)
    R = lambda q, k, v, s, a=False: BoundRecord(fam, p, q, k, v, s, a)  # noqa: E731
    out: list[BoundRecord] = []
    if fam == "star":
        N = int(params["N"])
        out += [R("ct_i", "exact", Fraction(N), "star-sweep-equilibrium"),
                R("dct_i", "exact", Fraction(N, N + 1), "star-center-stationary"),
                R("F_i", "exact", Fraction(N + 1), "star-ratio")]
    elif fam == "path":
        n = int(params["n"])
        out += [R("ct_i", "exact", Fraction(n - 1), "path-value")]
        if n >= 2:
            out += [R("dct_i", "upper", Fraction(n - 1, 2), "path-drunk-upper"),
                    R("dct_i", "asymptotic", Fraction(n, 2), "path-drunk-leading-order", True),
                    R("F_i", "asymptotic", Fraction(2), "path-ratio-limit", True)]
    elif fam == "cycle":
        n = int(params["n"])
        out += [R("ct_i", "exact", Fraction(n - 1, 2), "cycle-value-as-stated"),
                R("dct_i", "upper", Fraction(n - 1, 4), "cycle-drunk-upper"),
                R("dct_i", "asymptotic", Fraction(n, 4), "cycle-drunk-leading-order", True),
                R("F_i", "asymptotic", Fraction(2), "cycle-ratio-limit", True)]
    elif fam == "tree":
        d, L = int(params["d"]), int(params["L"])
        upper, lower = tree_bounds(d, L)
        dct_up = tree_stationary_mean(d, L)
        out += [R("ct_i", "upper", Fraction(upper), "tree-round-cop")]
        if L >= 2:
            out += [R("ct_i", "lower", lower, "tree-distance2-robber")]
        out += [R("ct_i", "asymptotic", Fraction(2 * L * d ** L * (d - 1), d * d), "tree-leading-order", True),
                R("dct_i", "upper", dct_up, "tree-root-stationary")]
        if L >= 2 and lower > dct_up:
            out += [R("F_i", "lower", lower / dct_up, "tree-ratio-from-bounds")]
    elif fam == "grid":
        N = int(params["N"])
        n = N * N
        if n <= 400:
            g = build_family("grid", N=N)
            val = stationary_ect(g, (N - 1, N * (N - 1)), exact=use_exact(n))
            out += [R("dct_i", "upper", val, "grid-corner-stationary")]
    elif fam == "broom":
        c, n = params["c"], int(params["n"])
        cf = Fraction(str(c))
        out += [R("ct_i", "asymptotic", Fraction(n), "broom-value-leading-order", True),
                R("dct_i", "asymptotic", cf * cf * n / 2, "broom-drunk-leading-order", True),
                R("F_i", "asymptotic", 2 / (cf * cf), "broom-ratio-leading-order", True),
                R("ct_i", "asymptotic", broom_f(cf, 0, 0, 1)[0] * n, "broom-cop-family-minimum", True)]
    else:
        return []
    try:
        g = build_family(fam, **params)
    except Exception:
        return out
    for rec in graph_bounds(g):
        out.append(BoundRecord(fam, p, rec.quantity, rec.kind, rec.value, rec.source))
    if fam in ("star", "path"):
        dct, F = infspeed_limits(g, 1)
        out.append(R("dct_i", "exact", dct, "infinite-speed-limit"))
        if F is not None:
            out.append(R("F_i", "exact", F, "infinite-speed-limit"))
    return out


def check_records(records: list[BoundRecord]) -> list[str]:
    """Consistency problems among non-asymptotic records (lower <= exact <= upper, F >= 1)."""
    problems = []
    by_q: dict = {}
    for r in records:
        if r.asymptotic or r.source == "infinite-speed-limit":
            continue
        by_q.setdefault(r.quantity, []).append(r)
    for q, recs in by_q.items():
        lows = [r for r in recs if r.kind in ("lower", "exact")]
        ups = [r for r in recs if r.kind in ("upper", "exact")]
        for lo in lows:
            for up in ups:
                if lo is not up and lo.as_float() > up.as_float() + 1e-9:
                    problems.append(f"{q}: {lo.source}={_fmt(lo.value)} > {up.source}={_fmt(up.value)}")
        if q == "F_i":
            for r in recs:
                if r.kind in ("exact", "upper") and r.as_float() < 1:
                    problems.append(f"F_i below 1 from {r.source}")
    return problems


def records_to_csv(records: list[BoundRecord]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def records_to_json(records: list[BoundRecord]) -> str:
    return json.dumps([r.row() for r in records], indent=1)
