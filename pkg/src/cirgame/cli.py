"""Command-line experiments: ``cirgame <command> [tokens] [options]``.

Positional ``key=value`` tokens (``trials=20000 seed=1``) are accepted
alongside the usual ``--options``. Every command writes CSV (default) or
JSON to stdout; every row carries ``schema=1`` and a ``method`` tag per
number (exact, bracket, mc or formula).
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import os
import sys
from fractions import Fraction

from .adversarial import build_game, solve_exact, solve_iterative
from .bounds import (
    CSV_FIELDS,
    check_records,
    family_values,
    graph_bounds,
    infspeed_report,
)
from .closed_forms import broom_f
from .drunk import dct_bracket, val_drunk_truncated
from .graphs import (
    Graph,
    InvalidGraph,
    StateSpaceTooLarge,
    build_family,
    cop_number,
    load_graph,
)
from .simulation import simulate
from .strategies import (
    BroomCop,
    BroomRobber,
    InvalidStrategy,
    ScheduleCop,
    StarSweepCop,
    StationaryCop,
    TreeDistance2Robber,
    TreeRoundCop,
    UniformLeafRobber,
    GridStationaryCops,
    broom_drunk_cop,
    parse_cop_strategy,
    parse_robber_strategy,
)

SCHEMA = 1
FAMILY_PARAMS = {
    "star": ("N",), "path": ("n",), "cycle": ("n",), "grid": ("N",),
    "complete": ("n",), "tree": ("d", "L"), "broom": ("c", "n"),
}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# token parsing and output


def _number(text: str):
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def split_tokens(tokens: list[str]) -> tuple[list[str], dict]:
    positional, kv = [], {}
    for tok in tokens:
        key, sep, val = tok.partition("=")
        if sep and key.isidentifier() and ":" not in key:
            kv[key] = val
        else:
            positional.append(tok)
    return positional, kv


def expand_values(text: str) -> list:
    """``"1..5"`` -> 1..5, ``"0.25,0.5,1"`` -> three values, ranges may be mixed."""
    out = []
    for part in filter(None, text.split(",")):
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(_number(part))
    return out


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, float) or type(x).__name__.startswith("float"):
        return repr(round(float(x), 12))
    return str(x)


def emit(rows: list[dict], fields: list[str], fmt_name: str, out) -> None:
    fields = ["schema"] + [f for f in fields if f != "schema"]
    rows = [{"schema": SCHEMA, **r} for r in rows]
    if fmt_name == "json":
        out.write(json.dumps([{k: _jsonable(r.get(k)) for k in fields} for r in rows], indent=1))
        out.write("\n")
        return
    w = csv.DictWriter(out, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: fmt(r.get(k)) for k in fields})


def _jsonable(x):
    if isinstance(x, Fraction):
        return fmt(x)
    if hasattr(x, "item"):
        return x.item()
    return x


def _seed(args, kv):
    if "seed" in kv:
        return _number(kv["seed"])
    if args.seed is not None:
        return args.seed
    return _number(os.environ.get("CIR_SEED", "0"))


def _int(kv, key, default):
    return int(kv[key]) if key in kv else default


def _graph(spec: str) -> Graph:
    try:
        return load_graph(spec)
    except (InvalidGraph, FileNotFoundError, ValueError) as exc:
        raise UsageError(f"bad graph {spec!r}: {exc}") from None


def _cops(args, kv, g: Graph) -> int:
    if "K" in kv:
        return int(kv["K"])
    if args.cops is not None:
        return args.cops
    return cop_number(g)


# ---------------------------------------------------------------------------
# table


TABLE_FIELDS = [
    "family", "params", "n", "K",
    "ct_lower", "ct_upper", "ct_method",
    "dct_lower", "dct_upper", "dct_method",
    "F_lower", "F_upper", "F_method",
    "dct_mc", "dct_mc_ci_low", "dct_mc_ci_high", "ct_mc", "F_mc", "mc_method", "mc_trials",
    "seed", "error",
]


def _table_instances(family: str, positional: list[str], kv: dict) -> list[dict]:
    keys = FAMILY_PARAMS.get(family)
    if keys is None:
        raise UsageError(f"unknown family {family!r}")
    values = {}
    for i, tok in enumerate(positional):
        if i >= len(keys):
            raise UsageError(f"too many ranges for {family}")
        values[keys[i]] = expand_values(tok)
    for k in keys:
        if k in kv:
            values[k] = expand_values(kv[k])
    missing = [k for k in keys if k not in values]
    if missing:
        raise UsageError(f"{family} needs {', '.join(missing)}")
    return [dict(zip(keys, combo)) for combo in itertools.product(*(values[k] for k in keys))]


def _mc_pair(g: Graph):
    """Drunk-side and adversarial-side strategies used for the table's MC columns."""
    fam, p = g.family, g.param_dict
    drunk = adv = None
    if fam == "star":
        drunk, adv = StationaryCop([0]), (StarSweepCop(), UniformLeafRobber())
    elif fam == "tree":
        drunk, adv = StationaryCop([0]), (TreeRoundCop(), TreeDistance2Robber())
    elif fam == "grid":
        drunk = GridStationaryCops()
    elif fam == "broom":
        drunk, adv = broom_drunk_cop(g), (BroomCop(0, 0, 1), BroomRobber(0))
    elif fam == "path":
        drunk = StationaryCop([(g.n - 1) // 2])
    elif fam == "cycle":
        drunk = StationaryCop([0, g.n // 2])
    return drunk, adv


def _table_row(family: str, params: dict, kv: dict, seed, trials: int, solve_limit: int) -> dict:
    g = build_family(family, **params)
    K = cop_number(g)
    row = {"family": family, "params": ";".join(f"{k}={v}" for k, v in params.items()),
           "n": g.n, "K": K, "seed": seed}
    records = [r for r in family_values(family, params) if r.source != "infinite-speed-limit"]
    q: dict = {}
    for quantity in ("ct_i", "dct_i", "F_i"):
        recs = [r for r in records if r.quantity == quantity and not r.asymptotic]
        exact = [r for r in recs if r.kind == "exact"]
        if exact:
            q[quantity] = [exact[0].value, exact[0].value, "formula"]
        else:
            lows = [r.value for r in recs if r.kind == "lower"]
            ups = [r.value for r in recs if r.kind == "upper"]
            q[quantity] = [max(lows) if lows else None, min(ups) if ups else None, "formula"]

    drunk_override = None
    if g.n <= solve_limit:
        m = _int(kv, "m", g.n + 1)
        try:
            br = dct_bracket(g, K, m)
            lo, up, _ = q["dct_i"]
            if br.upper_strategy == "truncated-optimal-schedule":
                drunk_override = ScheduleCop(val_drunk_truncated(g, K, m).schedule, "optimal-schedule")
            if q["dct_i"][2] == "formula" and lo is not None and lo == up:
                q["dct_i"][2] = "exact" if br.closed and br.lower == lo else "formula"
            else:
                new_lo = br.lower if lo is None else max(lo, br.lower)
                new_up = br.upper if up is None else min(up, br.upper)
                q["dct_i"] = [new_lo, new_up, "exact" if new_lo == new_up else "bracket"]
        except StateSpaceTooLarge:
            pass
        try:
            rep = solve_exact(build_game(g, K, m, cap=200_000))
            val = rep.value_exact if rep.value_exact is not None else Fraction(rep.value)
            lo, up, method = q["ct_i"]
            if not (lo is not None and lo == up):
                new_lo = val if lo is None else max(lo, val)
                q["ct_i"] = [new_lo, up, "exact" if new_lo == up else "bracket"]
        except StateSpaceTooLarge:
            pass

    if q["F_i"][0] is None or q["F_i"][0] != q["F_i"][1]:
        ct_lo, ct_up, _ = q["ct_i"]
        d_lo, d_up, _ = q["dct_i"]
        f_lo = ct_lo / d_up if ct_lo is not None and d_up else None
        f_up = ct_up / d_lo if ct_up is not None and d_lo else None
        q["F_i"] = [max(f_lo, 1) if f_lo is not None else 1, f_up, "bracket"]
    for name, key in (("ct_i", "ct"), ("dct_i", "dct"), ("F_i", "F")):
        row[f"{key}_lower"], row[f"{key}_upper"], row[f"{key}_method"] = q[name]

    if trials > 0:
        drunk, adv = _mc_pair(g)
        drunk = drunk_override or drunk
        if drunk is not None:
            res = simulate(g, drunk, None, 1, trials, seed)
            row.update(dct_mc=res.mean, dct_mc_ci_low=res.ci95[0], dct_mc_ci_high=res.ci95[1],
                       mc_method="mc", mc_trials=trials)
        if adv is not None:
            res = simulate(g, adv[0], adv[1], 1, trials, seed)
            row["ct_mc"] = res.mean
            if row.get("dct_mc"):
                row["F_mc"] = res.mean / row["dct_mc"]
    return row


def cmd_table(args, out) -> int:
    positional, kv = split_tokens(args.tokens)
    if not positional:
        raise UsageError("table needs a family, e.g. `table star 1..5`")
    family, ranges = positional[0].lower(), positional[1:]
    option_keys = {"trials", "seed", "m", "solve_n"}
    params_kv = {k: v for k, v in kv.items() if k not in option_keys}
    instances = _table_instances(family, ranges, params_kv)
    seed = _seed(args, kv)
    trials = _int(kv, "trials", 1000)
    rows = []
    for params in instances:
        try:
            rows.append(_table_row(family, params, kv, seed, trials, _int(kv, "solve_n", 6)))
        except Exception as exc:  # recorded per row, the run continues
            rows.append({"family": family, "params": ";".join(f"{k}={v}" for k, v in params.items()),
                         "seed": seed, "error": f"{type(exc).__name__}: {exc}"})
    emit(rows, TABLE_FIELDS, args.format, out)
    return 0


# ---------------------------------------------------------------------------
# solvers


def cmd_solve_drunk(args, out) -> int:
    positional, kv = split_tokens(args.tokens)
    if not positional:
        raise UsageError("solve-drunk needs a graph")
    g = _graph(positional[0])
    K = _cops(args, kv, g)
    m = _int(kv, "m", g.n + 1)
    speed = _int(kv, "s", 1)
    upper = None
    if "upper" in kv:
        name, _, rest = kv["upper"].partition(":")
        verts = [int(v) for v in rest.split(",") if v]
        upper = set(verts) if name == "stationary" else verts
    br = dct_bracket(g, K, m, upper, speed)
    row = br.to_dict()
    row.update(upper_strategy=br.upper_strategy, certified=br.certified, lower=br.lower, upper=br.upper)
    emit([row], ["graph", "K", "m", "lower", "upper", "method", "exact", "upper_strategy", "certified"],
         args.format, out)
    return 0


SOLVE_FIELDS = ["graph", "K", "m", "speed", "value", "value_exact", "exploitability", "lower", "upper",
                "method", "iterations"]


def cmd_solve_adversarial(args, out) -> int:
    positional, kv = split_tokens(args.tokens)
    if not positional:
        raise UsageError("solve-adversarial needs a graph")
    g = _graph(positional[0])
    K = _cops(args, kv, g)
    m = _int(kv, "m", 2 * g.n)
    speed = _int(kv, "s", 1)
    game = build_game(g, K, m, speed, stay=not args.forced_move)
    if args.dump:
        with open(args.dump, "w") as fh:
            game.dump(fh)
    method = kv.get("method", "exact")
    if method == "exact":
        rep = solve_exact(game)
    elif method == "iterative":
        rep = solve_iterative(game, _int(kv, "iters", 1000), float(kv.get("target", 0.0)))
    else:
        raise UsageError(f"unknown method {method!r}")
    if args.format == "json" and args.tables:
        out.write(rep.to_json(tables=True) + "\n")
        return 0
    d = rep.to_dict(tables=False)
    d["value_exact"] = rep.value_exact
    emit([d], SOLVE_FIELDS, args.format, out)
    return 0


def cmd_convergence(args, out) -> int:
    positional, kv = split_tokens(args.tokens)
    if not positional:
        raise UsageError("convergence needs a graph")
    g = _graph(positional[0])
    K = _cops(args, kv, g)
    mode = kv.get("mode", "adversarial")
    m_max = _int(kv, "m_max", 6)
    speed = _int(kv, "s", 1)
    values = []
    for m in range(m_max + 1):
        if mode == "adversarial":
            rep = solve_exact(build_game(g, K, m, speed, stay=not args.forced_move))
            values.append((rep.value_exact if rep.value_exact is not None else rep.value, "exact"))
        elif mode == "drunk":
            res = val_drunk_truncated(g, K, m, speed)
            values.append((res.value, "exact" if res.certified else "bracket"))
        else:
            raise UsageError(f"unknown mode {mode!r}")
    plateau = m_max
    while plateau > 0 and values[plateau - 1][0] == values[m_max][0]:
        plateau -= 1
    rows = [{"graph": g.label, "K": K, "mode": mode, "m": m, "value": v, "value_float": float(v),
             "method": meth, "plateau_from": plateau} for m, (v, meth) in enumerate(values)]
    emit(rows, ["graph", "K", "mode", "m", "value", "value_float", "method", "plateau_from"],
         args.format, out)
    return 0


# ---------------------------------------------------------------------------
# simulation


def cmd_simulate(args, out) -> int:
    positional, kv = split_tokens(args.tokens)
    if len(positional) < 2:
        raise UsageError("simulate needs a graph and a cop strategy")
    g = _graph(positional[0])
    trials = _int(kv, "trials", 1000)
    if trials < 1:
        raise UsageError("trials must be >= 1")
    seed = _seed(args, kv)
    speed = _int(kv, "s", 1)
    try:
        cop = parse_cop_strategy(positional[1], g)
        robber = parse_robber_strategy(positional[2] if len(positional) > 2 else "drunk")
        cop.check(g)
        robber.check(g)
    except InvalidStrategy as exc:
        raise UsageError(str(exc)) from None
    res = simulate(g, cop, robber, speed, trials, seed, _int(kv, "max_turns", 1_000_000),
                   workers=_int(kv, "workers", args.workers))
    if args.histogram:
        rows = [{"T": t, "count": c, "method": "mc"} for t, c in sorted(res.histogram.items())]
        emit(rows, ["T", "count", "method"], args.format, out)
        return 0
    lo, hi = res.ci95
    row = {"graph": g.label, "cop": repr(cop), "robber": repr(robber), "speed": speed,
           "trials": trials, "seed": seed, "mean": res.mean, "ci_low": lo, "ci_high": hi,
           "max_T": res.max_T, "censored": res.censored, "method": "mc",
           "histogram": " ".join(f"{t}:{c}" for t, c in sorted(res.histogram.items()))}
    emit([row], ["graph", "cop", "robber", "speed", "trials", "seed", "mean", "ci_low", "ci_high",
                 "max_T", "censored", "method", "histogram"], args.format, out)
    return 0


# ---------------------------------------------------------------------------
# bounds, broom scan, conjecture


def cmd_bounds(args, out) -> int:
    positional, kv = split_tokens(args.tokens)
    if not positional:
        raise UsageError("bounds needs at least one graph")
    rows = []
    for spec in positional:
        g = _graph(spec)
        recs = family_values(g.family, g.param_dict) if g.family != "custom" else graph_bounds(g)
        rows.extend({**r.row(), "method": "formula"} for r in recs)
        for problem in check_records(recs):
            rows.append({"family": g.family, "params": g.label, "quantity": "check",
                         "kind": "violation", "value": problem, "source": "consistency",
                         "method": "formula"})
        if "infspeed" in kv and g.family not in ("star", "path"):
            rep = infspeed_report(g)
            rows.append({"family": g.family, "params": g.label, "quantity": "dct_i", "kind": "limit",
                         "value": fmt(rep["dct_limit"]), "source": "infinite-speed-limit",
                         "asymptotic": "false", "method": "formula"})
    emit(rows, CSV_FIELDS + ["method"], args.format, out)
    return 0


def broom_scan(c, n: int, steps: int = 11, trials: int = 2000, seed=0, workers: int = 1) -> dict:
    """Minimise the leading-order broom cost over a ``steps``-point grid in (b, p, x).

    Ties prefer the largest ``x``, then the smallest ``b``, then the smallest ``p``.
    """
    cf = Fraction(str(c))
    grid = [Fraction(i, steps - 1) for i in range(steps)]
    best = None
    for b in grid:
        if b > cf:
            continue
        for p in grid:
            for x in grid:
                f = broom_f(cf, b, p, x)[0]
                key = (f, -x, b, p)
                if best is None or key < best[0]:
                    best = (key, b, p, x, f)
    _, b, p, x, f = best
    g = build_family("broom", c=c, n=n)
    res = simulate(g, BroomCop(float(b), float(p), float(x)), BroomRobber(float(b)), 1, trials, seed,
                   workers=workers)
    lo, hi = res.ci95
    return {"c": c, "n": n, "b": b, "p": p, "x": x, "f_min": f, "f_method": "formula",
            "mc_ratio": res.mean / n, "mc_ci_low": lo / n, "mc_ci_high": hi / n, "mc_method": "mc",
            "trials": trials, "seed": seed}


def cmd_broom_scan(args, out) -> int:
    _, kv = split_tokens(args.tokens)
    row = broom_scan(_number(kv.get("c", "0.5")), _int(kv, "n", 200), _int(kv, "steps", 11),
                     _int(kv, "trials", 2000), _seed(args, kv), _int(kv, "workers", args.workers))
    emit([row], list(row), args.format, out)
    return 0


def conjecture_row(g: Graph, m: int | None = None) -> dict:
    """Bracket ``F_i = ct_i / dct_i`` with solver bounds and test it against 2."""
    K = cop_number(g)
    m = g.n + 1 if m is None else m
    ct_lo = solve_exact(build_game(g, K, m, cap=200_000))
    ct_lo = ct_lo.value_exact if ct_lo.value_exact is not None else Fraction(ct_lo.value)
    exact = [r.value for r in family_values(g.family, g.param_dict)
             if r.quantity == "ct_i" and r.kind in ("exact", "upper") and not r.asymptotic
             and r.source != "cycle-value-as-stated"]
    ct_up = min(exact) if exact else None
    if ct_up is None:
        recs = graph_bounds(g, K)
        ups = [r.value for r in recs if r.quantity == "ct_i" and r.kind == "upper"]
        ct_up = min(ups) if ups else None
    br = dct_bracket(g, K, m)
    f_lo = ct_lo / br.upper if br.upper else None
    f_up = ct_up / br.lower if ct_up is not None and br.lower else None
    if f_lo is not None and f_lo >= 2:
        status = "holds"
    elif f_up is not None and f_up < 2:
        status = "violated"
    else:
        status = "undetermined"
    return {"graph": g.label, "n": g.n, "K": K, "F_lower": f_lo, "F_upper": f_up, "method": "bracket",
            "status": status}


def cmd_conjecture(args, out) -> int:
    positional, kv = split_tokens(args.tokens)
    specs = positional or ["path:2", "path:3", "path:4", "star:1", "star:2", "star:3", "cycle:4", "cycle:5"]
    rows = []
    for spec in specs:
        g = _graph(spec)
        if g.n < 2:
            continue
        try:
            rows.append(conjecture_row(g, _int(kv, "m", None) if "m" in kv else None))
        except StateSpaceTooLarge as exc:
            rows.append({"graph": g.label, "n": g.n, "status": "undetermined", "method": "bracket",
                         "error": str(exc)})
    emit(rows, ["graph", "n", "K", "F_lower", "F_upper", "method", "status", "error"], args.format, out)
    return 0


# ---------------------------------------------------------------------------


COMMANDS = {
    "table": cmd_table,
    "solve-drunk": cmd_solve_drunk,
    "solve-adversarial": cmd_solve_adversarial,
    "simulate": cmd_simulate,
    "bounds": cmd_bounds,
    "convergence": cmd_convergence,
    "broom-scan": cmd_broom_scan,
    "conjecture-check": cmd_conjecture,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cirgame", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("tokens", nargs="*", help="graph/strategy specs and key=value settings")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--seed", type=_number, default=None,
                       help="default seed (else $CIR_SEED, else 0)")
        p.add_argument("--cops", type=int, default=None, help="number of cops (default: cop number)")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--forced-move", action="store_true", help="forbid standing still")
        if name == "solve-adversarial":
            p.add_argument("--tables", action="store_true", help="include strategy tables (JSON)")
            p.add_argument("--dump", metavar="FILE", help="write the game tree as text")
        if name == "simulate":
            p.add_argument("--histogram", action="store_true", help="emit one row per capture turn")
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InvalidGraph, InvalidStrategy, StateSpaceTooLarge, ValueError, RuntimeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def run(argv: list[str]) -> str:
    """Run a command and return its stdout (handy in tests)."""
    buf = io.StringIO()
    code = main(argv, buf)
    if code:
        raise SystemExit(code)
    return buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
