"""Command-line front end: fran-ndt {ndt,sweep,regimes,gap,simulate,figure}."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .analysis import OptimalityCertificate, exact_ndt, gap_ratio, lower_bound
from .bounds import lp_lower_bound
from .core import (Mode, SystemParams, classify_regime, fmt_decimal, fmt_rational,
                   parse_rational, thresholds)
from .errors import (FranError, GapViolation, Infeasible, IndivisibleL, InvalidParams,
                     OutOfRange, Undeliverable)
from .analysis import achievable as achievable_scheme
from .simulator import (build_pipelined_schedule, build_serial_schedule, counted_ndt,
                        finite_p_convergence, least_L, plan_placement, verify_schedule)

EXIT_AUDIT = 1
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3
EXIT_GAP = 4
EXIT_INDIVISIBLE = 5

SWEEP_HEADER = ["axis", "lower", "achievable", "exact", "gap", "mode",
                "axis_q", "lower_q", "achievable_q", "exact_q", "gap_q"]

FIGURES = {
    # name: (M, K, fixed r, modes)
    "fig2b": (2, 2, Fraction(1, 2), ("serial", "pipelined")),
    "fig7a": (2, 2, Fraction(1, 4), ("serial",)),
    "fig7b": (2, 2, Fraction(3, 2), ("serial",)),
    "fig9": (2, 2, Fraction(1, 2), ("pipelined",)),
}
FIGURE_GRID = [Fraction(i, 20) for i in range(21)]


def _threads() -> int:
    raw = os.environ.get("FRAN_NDT_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


def parallel_map(fn: Callable, items: Sequence) -> list:
    """Map in worker threads; results keep the input order."""
    workers = _threads()
    if workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except InvalidParams as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _int_range(text: str) -> range:
    try:
        lo, _, hi = text.partition(":")
        lo_i = int(lo)
        hi_i = int(hi) if hi else lo_i
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from exc
    if lo_i < 1 or hi_i < lo_i:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    return range(lo_i, hi_i + 1)


def _params(args, mu=None, r=None) -> SystemParams:
    mu = args.mu if mu is None else mu
    r = args.r if r is None else r
    if mu is None or r is None:
        raise InvalidParams("both --mu and -r are required")
    return SystemParams.make(args.M, args.K, mu, r, args.N)


def _emit(args, text: str) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(rows: Iterable[Sequence], header: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# ndt

def ndt_record(params: SystemParams, mode: Mode) -> dict:
    lower = lower_bound(params, mode)
    ach = achievable_scheme(params, mode)
    cert = exact_ndt(params, mode)
    rec = {"params": params.to_dict(), "mode": mode.value,
           "regime": classify_regime(params, mode).to_dict(),
           "thresholds": thresholds(params).to_dict(),
           "lower": {"delta": fmt_rational(lower)},
           "achievable": ach.to_dict(), "certificate": cert.to_dict()}
    if mode is Mode.SERIAL:
        rec["lower"] = lp_lower_bound(params).to_dict()
    return rec


def _ndt_table(rec: dict) -> str:
    p, reg, ach, cert = rec["params"], rec["regime"], rec["achievable"], rec["certificate"]
    split = ", ".join(f"{s} {f}" for s, f in ach["split"]["fractions"])
    regime = f"{reg['cache_regime']} / {reg['fronthaul_regime']}"
    if "band" in reg:
        regime += f" / band {reg['band']}"
    lines = [
        f"params      M={p['M']} K={p['K']} N={p['N']} mu={p['mu']} r={p['r']}",
        f"mode        {rec['mode']}",
        f"regime      {regime}",
        f"lower       {rec['lower']['delta']}",
        f"achievable  {ach['delta']}  (delta_f={ach['delta_f']}, delta_e={ach['delta_e']}; {split})",
        f"status      {cert['status']} ({cert['witness']}), gap {cert['gap']}",
    ]
    if "active" in rec["lower"]:
        lines.insert(4, f"active      {', '.join(rec['lower']['active'])}")
    return "\n".join(lines) + "\n"


def cmd_ndt(args) -> int:
    rec = ndt_record(_params(args), Mode(args.mode))
    if args.format == "json":
        _emit(args, json.dumps(rec, indent=2) + "\n")
    elif args.format == "csv":
        p, cert = rec["params"], rec["certificate"]
        row = [p["M"], p["K"], p["N"], p["mu"], p["r"], rec["mode"], rec["lower"]["delta"],
               rec["achievable"]["delta"], cert["status"], cert["gap"], cert["witness"]]
        _emit(args, _csv([row], ["M", "K", "N", "mu", "r", "mode", "lower", "achievable",
                                 "status", "gap", "witness"]))
    else:
        _emit(args, _ndt_table(rec))
    return 0


# sweep

def sweep_rows(M: int, K: int, N: Optional[int], axis: str, fixed: Fraction,
               values: Sequence[Fraction], modes: Sequence[str]) -> list[list[str]]:
    jobs = [(v, m) for v in values for m in modes]

    def one(job):
        v, mode = job
        mu, r = (v, fixed) if axis == "mu" else (fixed, v)
        params = SystemParams.make(M, K, mu, r, N)
        try:
            cert = exact_ndt(params, mode)
        except Infeasible:
            return [fmt_decimal(v), "inf", "inf", "", "", mode,
                    fmt_rational(v), "inf", "inf", "", ""]
        exact = cert.value if cert.characterized else None
        cells = [cert.lower, cert.achievable, exact, cert.gap]
        dec = ["" if c is None else fmt_decimal(c) for c in cells]
        q = ["" if c is None else fmt_rational(c) for c in cells]
        return [fmt_decimal(v), *dec, mode, fmt_rational(v), *q]

    return parallel_map(one, jobs)


def _grid(args) -> list[Fraction]:
    if args.values:
        vals = [parse_rational(v) for v in args.values.split(",") if v.strip()]
    else:
        if args.start is None or args.stop is None or args.step is None:
            raise InvalidParams("give --values or all of --start, --stop, --step")
        if args.step <= 0 or args.stop < args.start:
            raise InvalidParams("need step > 0 and stop >= start")
        vals, v = [], args.start
        while v <= args.stop:
            vals.append(v)
            v += args.step
    if not vals:
        raise InvalidParams("empty grid")
    for v in vals:
        if v < 0 or (args.axis == "mu" and v > 1):
            raise InvalidParams(f"grid value {v} outside the {args.axis} domain")
    return vals


def _sweep_output(args, rows: list[list[str]], M: int, K: int, fixed: Fraction, axis: str) -> None:
    if args.format == "json":
        recs = [dict(zip(SWEEP_HEADER, row)) for row in rows]
        _emit(args, json.dumps(recs, indent=2) + "\n")
    else:
        _emit(args, _csv(rows, SWEEP_HEADER))
    if getattr(args, "gnuplot", None):
        if not args.output:
            raise InvalidParams("--gnuplot needs -o so the script can reference the data file")
        other = "r" if axis == "mu" else "mu"
        with open(args.gnuplot, "w", encoding="utf-8") as fh:
            fh.write(gnuplot_script(args.output, axis, f"M={M}, K={K}, {other}={fmt_rational(fixed)}",
                                    sorted({row[5] for row in rows})))


def gnuplot_script(data: str, axis: str, title: str, modes: Sequence[str]) -> str:
    plots = []
    for mode in modes:
        sel = f'(strcol(6) eq "{mode}" ? $%d : NaN)'
        plots.append(f"'{data}' using 1:{sel % 3} with linespoints title '{mode} achievable'")
        plots.append(f"'{data}' using 1:{sel % 2} with lines dashtype 2 title '{mode} lower bound'")
    return "\n".join([
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set title 'NDT trade-off, {title}'",
        f"set xlabel '{axis}'",
        "set ylabel 'NDT'",
        "set grid",
        "plot " + ", \\\n     ".join(plots),
        "",
    ])


def cmd_sweep(args) -> int:
    fixed = args.r if args.axis == "mu" else args.mu
    if fixed is None:
        raise InvalidParams("the non-swept parameter must be given")
    modes = ["serial", "pipelined"] if args.mode == "both" else [args.mode]
    values = _grid(args)
    SystemParams.make(args.M, args.K, 0, 0, args.N)  # validates M, K, N
    rows = sweep_rows(args.M, args.K, args.N, args.axis, fixed, values, modes)
    _sweep_output(args, rows, args.M, args.K, fixed, args.axis)
    return 0


def cmd_figure(args) -> int:
    M, K, r, modes = FIGURES[args.preset]
    rows = sweep_rows(M, K, None, "mu", r, FIGURE_GRID, modes)
    _sweep_output(args, rows, M, K, r, "mu")
    return 0


# regimes

def cmd_regimes(args) -> int:
    params = _params(args)
    rec = {"params": params.to_dict(), "thresholds": thresholds(params).to_dict(),
           "serial": classify_regime(params, Mode.SERIAL).to_dict(),
           "pipelined": classify_regime(params, Mode.PIPELINED).to_dict()}
    if args.format == "json":
        _emit(args, json.dumps(rec, indent=2) + "\n")
    else:
        t, s, p = rec["thresholds"], rec["serial"], rec["pipelined"]
        band = f" / band {p['band']}" if "band" in p else ""
        _emit(args, "\n".join([
            f"r_th        {t['r_th']}",
            f"mu1, mu2    {t['mu1']}, {t['mu2']}",
            f"serial      {s['cache_regime']} / {s['fronthaul_regime']}",
            f"pipelined   {p['cache_regime']} / {p['fronthaul_regime']}{band}",
        ]) + "\n")
    return 0


# gap

GAP_HEADER = ["M", "K", "mu", "r", "mode", "lower", "achievable", "gap", "gap_decimal"]


def gap_rows(tuples: Sequence[tuple[int, int, Fraction, Fraction]], modes: Sequence[str]):
    jobs = [(t, m) for t in tuples for m in modes]

    def one(job):
        (M, K, mu, r), mode = job
        params = SystemParams.make(M, K, mu, r)
        try:
            lower = lower_bound(params, mode)
            ach = achievable_scheme(params, mode).delta
        except Infeasible:
            return None
        g = ach / lower
        return [M, K, fmt_rational(mu), fmt_rational(r), mode, fmt_rational(lower),
                fmt_rational(ach), fmt_rational(g), fmt_decimal(g)], g

    return [x for x in parallel_map(one, jobs) if x is not None]


def cmd_gap(args) -> int:
    modes = ["serial", "pipelined"] if args.mode == "both" else [args.mode]
    if args.mu is not None or args.r is not None:
        if args.M is None or args.K is None:
            raise InvalidParams("a single tuple needs -M, -K, --mu and -r")
        tuples = [(args.M, args.K, _params(args).mu, _params(args).r)]
    else:
        if args.grid < 2:
            raise InvalidParams("--grid must be at least 2")
        mus = [Fraction(i, args.grid - 1) for i in range(args.grid)]
        rs = [args.r_max * Fraction(j, args.grid) for j in range(1, args.grid + 1)]
        tuples = [(M, K, mu, r) for M in args.M_range for K in args.K_range
                  for mu in mus for r in rs]
    results = gap_rows(tuples, modes)
    _emit(args, _csv([row for row, _ in results], GAP_HEADER))
    if not results:
        print("no feasible tuples", file=sys.stderr)
        return 0
    worst_row, worst = max(results, key=lambda x: x[1])
    bad = sum(1 for _, g in results if not 1 <= g <= 2)
    print(f"tuples {len(results)}, max gap {fmt_rational(worst)} ({fmt_decimal(worst)}) at "
          f"M={worst_row[0]} K={worst_row[1]} mu={worst_row[2]} r={worst_row[3]} {worst_row[4]}, "
          f"violations {bad}", file=sys.stderr)
    if bad:
        raise GapViolation(f"{bad} tuples outside [1, 2]")
    return 0


# simulate

def cmd_simulate(args) -> int:
    params = _params(args)
    demand = [d - 1 for d in args.demand] if args.demand else list(range(params.K))
    mode = Mode.PIPELINED if args.pipelined else Mode.SERIAL
    blocks = args.blocks if args.pipelined else 1
    L = args.L if args.L is not None else least_L(params, mode, blocks)
    plan = plan_placement(params, L, mode, blocks)
    if mode is Mode.PIPELINED:
        sched = build_pipelined_schedule(plan, demand, params, L, args.P, blocks, finite=args.finite)
    else:
        sched = build_serial_schedule(plan, demand, params, L, args.P, finite=args.finite)
    report = verify_schedule(sched, plan, demand, params, L)
    analytical = achievable_scheme(params, mode).delta
    ndt = counted_ndt(sched, L)
    out = {"params": params.to_dict(), "mode": mode.value, "blocks": blocks, "L": L,
           "demand": [d + 1 for d in demand], "placement": plan.to_dict(),
           "schedule": sched.to_dict(), "report": report.to_dict(),
           "analytical_ndt": fmt_rational(analytical),
           "counted_over_analytical": (repr(ndt / float(analytical)) if isinstance(ndt, float)
                                       else fmt_rational(ndt / analytical))}
    if args.ladder:
        lo, hi, step = args.ladder
        ladder = [2 ** k for k in range(lo, hi + 1, step)]
        conv = finite_p_convergence(params, demand, None, ladder)
        out["convergence"] = conv.to_dict()
        report.series = conv.series
        out["report"] = report.to_dict()
    _emit(args, json.dumps(out, indent=2) + "\n")
    if not report.passed:
        failed = [k for k, a in report.audits.items() if not a.passed]
        print(f"audits failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_AUDIT
    return 0


def _ladder(text: str) -> tuple[int, int, int]:
    try:
        parts = [int(x) for x in text.split(":")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected LO:HI[:STEP], got {text!r}") from exc
    if len(parts) == 2:
        parts.append(1)
    if len(parts) != 3 or parts[0] < 1 or parts[1] < parts[0] or parts[2] < 1:
        raise argparse.ArgumentTypeError(f"bad ladder {text!r}")
    return parts[0], parts[1], parts[2]


def _demand(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated file numbers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fran-ndt",
                                 description="NDT bounds, schemes and schedules for cache- and cloud-aided edge networks")
    sub = ap.add_subparsers(dest="command", required=True)

    def system(p, required=True):
        p.add_argument("-M", type=int, required=required, help="number of edge nodes")
        p.add_argument("-K", type=int, required=required, help="number of users")
        p.add_argument("-N", type=int, default=None, help="library size (default K)")
        p.add_argument("--mu", type=_rational, default=None, help="fractional cache size, e.g. 1/4")
        p.add_argument("-r", type=_rational, default=None, help="fronthaul rate, e.g. 1/2")
        p.add_argument("-o", "--output", default=None, help="write to FILE instead of stdout")

    p = sub.add_parser("ndt", help="lower bound, achievable NDT and certificate")
    system(p)
    p.add_argument("--mode", choices=["serial", "pipelined"], default="serial")
    p.add_argument("--format", choices=["json", "csv", "table"], default="table")
    p.set_defaults(func=cmd_ndt)

    p = sub.add_parser("sweep", help="NDT curves over mu or r")
    system(p)
    p.add_argument("--axis", choices=["mu", "r"], default="mu")
    p.add_argument("--values", default=None, help="explicit grid, e.g. 0,1/4,1/2")
    p.add_argument("--start", type=_rational, default=None)
    p.add_argument("--stop", type=_rational, default=None)
    p.add_argument("--step", type=_rational, default=None)
    p.add_argument("--mode", choices=["serial", "pipelined", "both"], default="serial")
    p.add_argument("--format", choices=["json", "csv"], default="csv")
    p.add_argument("--gnuplot", default=None, metavar="SCRIPT", help="also write a gnuplot script")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("regimes", help="thresholds and regime labels")
    system(p)
    p.add_argument("--format", choices=["json", "table"], default="table")
    p.set_defaults(func=cmd_regimes)

    p = sub.add_parser("gap", help="audit achievable/lower-bound ratios over a grid")
    system(p, required=False)
    p.add_argument("--M-range", type=_int_range, default=range(1, 5), dest="M_range")
    p.add_argument("--K-range", type=_int_range, default=range(1, 5), dest="K_range")
    p.add_argument("--grid", type=int, default=9, help="points per axis of the (mu, r) grid")
    p.add_argument("--r-max", type=_rational, default=Fraction(4), dest="r_max")
    p.add_argument("--mode", choices=["serial", "pipelined", "both"], default="serial")
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("simulate", help="build and audit a placement and delivery schedule")
    system(p)
    p.add_argument("-L", type=int, default=None, help="file size in bits (default: smallest valid)")
    p.add_argument("-P", type=_rational, default=Fraction(2 ** 20), help="SNR, a power of two such as 2^20")
    p.add_argument("-d", "--demand", type=_demand, default=None, help="requested files, 1-based, e.g. 1,2")
    p.add_argument("--pipelined", action="store_true")
    p.add_argument("--blocks", type=int, default=1)
    p.add_argument("--finite", action="store_true", help="use finite-SNR cloud rates")
    p.add_argument("--ladder", type=_ladder, default=None, metavar="LO:HI[:STEP]",
                   help="also report NDT(P) for P = 2^LO .. 2^HI")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("figure", help="datasets of the standard 2x2 trade-off curves")
    p.add_argument("preset", choices=sorted(FIGURES))
    p.add_argument("--format", choices=["json", "csv"], default="csv")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--gnuplot", default=None, metavar="SCRIPT")
    p.set_defaults(func=cmd_figure)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except IndivisibleL as exc:
        print(f"error: {exc}; suggested L={exc.suggested_L}", file=sys.stderr)
        return EXIT_INDIVISIBLE
    except (Infeasible, Undeliverable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except GapViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GAP
    except (InvalidParams, OutOfRange, FranError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
