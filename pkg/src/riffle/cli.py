"""Command-line interface for the riffle package.

Subcommands
-----------
constants   cutoff constants for a cut-size measure (or the built-in table)
simulate    sample shuffled decks and their statistics
tvd         distance to uniform: exact for small decks, an MC bound otherwise
scan        TV-lower-bound profile over a grid of (N, K / log N)
coldspot    build a cold-spot test set, calibrate it, measure its power
nonconvex   exact counterexample checks for the cutoff-constant functional

Every command accepts --seed, --out, --format, and --threads.  With --out
the table lands in OUT.csv (or OUT.json) and a rendered figure in OUT.png;
without it the table prints to stdout.  Reruns with the same arguments are
byte-identical.  --threads is validated and accepted for script
compatibility but never changes results: execution is sequential.

Errors raise as JSON on stderr, e.g.
  {"error": "TooLarge", "message": "exact distribution supports N <= 8..."}
with a nonzero exit code.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .coldspot import (
    ascent_statistic,
    build_cold_spots,
    cold_spot_test,
    floor_with_tolerance,
    idealized_pile_sequence,
)
from .constants import TABLE1_MEASURES, constants_bundle
from .errors import InvalidParams, RiffleError
from .exact import exact_tv_curve
from .measures import (
    Beta,
    Dirichlet,
    PointMass,
    PrecisionConfig,
    UniformInterval,
    discretize_measure,
    measure_from_json,
)
from .processes import (
    ExactBisection,
    ExplicitSequence,
    IIDFromMeasure,
    IIDMultinomial,
    Periodic,
    UniformCut,
    gsr,
    process_from_json,
)
from .psiclass import appendix_f, appendix_f_breve, appendix_f_hat, verify_nonconvexity
from .report import (
    csv_text,
    json_document,
    plot_coldspot,
    plot_constants,
    plot_nonconvexity,
    plot_scan,
    plot_statistic_hist,
    plot_tv_curve,
    write_csv,
    write_json,
)
from .rng import stream
from .scans import (
    cold_spot_calibration,
    cold_spot_power,
    cutoff_scan,
    sample_shuffled_deck,
    tv_lower_bound_mc,
    wilson_interval,
)
from .permstats import inverse_deck, longest_increasing_run, rising_sequences

__all__ = ["main"]

_DEFAULT_SEED = 20260214


# ---------------------------------------------------------------------------
# Compact argument syntax
# ---------------------------------------------------------------------------


def _numbers(text: str, expect: int | None = None) -> list:
    vals = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        vals.append(float(Fraction(tok)) if "/" in tok else float(tok))
    if expect is not None and len(vals) != expect:
        raise InvalidParams(f"expected {expect} numbers, got {len(vals)} in {text!r}")
    return vals


def parse_measure(text: str):
    """Measure from compact syntax (beta:1,1 / dirichlet:1,1,1 / point:0.5,0.5
    / uniform_interval:0.25,0.75 / uniform_cut) or a JSON object."""
    text = text.strip()
    if text.startswith("{"):
        return measure_from_json(json.loads(text))
    name, _, rest = text.partition(":")
    name = name.lower()
    if name == "uniform_cut":
        return Beta(1.0, 1.0)
    if name == "beta":
        a, b = _numbers(rest, 2)
        return Beta(a, b)
    if name == "dirichlet":
        return Dirichlet(tuple(_numbers(rest)))
    if name == "point":
        return PointMass(tuple(_numbers(rest)))
    if name == "uniform_interval":
        lo, hi = _numbers(rest, 2)
        return UniformInterval(lo, hi)
    raise InvalidParams(f"unknown measure syntax: {text!r}")


def parse_process(text: str):
    """Process from compact syntax (gsr / multinomial:0.5,0.5 / uniform_cut /
    bisection / measure:<measure> / explicit:2,3;4,1 / periodic:1/3,2/3) or a
    JSON object."""
    text = text.strip()
    if text.startswith("{"):
        return process_from_json(json.loads(text))
    name, _, rest = text.partition(":")
    name = name.lower()
    if name == "gsr":
        return gsr()
    if name == "uniform_cut":
        return UniformCut()
    if name == "bisection":
        return ExactBisection()
    if name in ("multinomial", "point"):
        return IIDMultinomial(tuple(_numbers(rest)))
    if name == "measure":
        return IIDFromMeasure(parse_measure(rest))
    if name == "explicit":
        return ExplicitSequence(
            tuple(tuple(int(x) for x in _numbers(row)) for row in rest.split(";"))
        )
    if name == "periodic":
        return Periodic(
            tuple(
                tuple(Fraction(tok.strip()) for tok in row.split(","))
                for row in rest.split(";")
            )
        )
    raise InvalidParams(f"unknown process syntax: {text!r}")


def _int_list(text: str) -> list:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _single_N(text: str) -> int:
    vals = _int_list(text)
    if len(vals) != 1:
        raise InvalidParams(f"this command takes a single deck size, got {text!r}")
    return vals[0]


def _kgrid(text: str) -> list:
    parts = text.split(":")
    if len(parts) != 3:
        raise InvalidParams(f"--kgrid wants start:stop:step, got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0 or stop < start:
        raise InvalidParams(f"bad --kgrid range {text!r}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(n)]


# ---------------------------------------------------------------------------
# Output plumbing
# ---------------------------------------------------------------------------


def _emit(args, config: dict, rows: list, fieldnames: list, figure=None):
    """Write the delimited table (plus figure) under --out, or print it."""
    if args.out:
        base = args.out
        for ext in (".csv", ".json", ".png"):
            if base.endswith(ext):
                base = base[: -len(ext)]
        if args.format == "json":
            table = f"{base}.json"
            write_json(table, config, rows, args.seed, __version__)
        else:
            table = f"{base}.csv"
            write_csv(table, rows, fieldnames)
        written = [table]
        if figure is not None:
            png = f"{base}.png"
            figure(png)
            written.append(png)
        print("wrote " + " ".join(written))
    elif args.format == "json":
        json.dump(
            json_document(config, rows, args.seed, __version__),
            sys.stdout,
            indent=2,
            sort_keys=True,
        )
        sys.stdout.write("\n")
    else:
        sys.stdout.write(csv_text(rows, fieldnames))


def _config(args, **extra) -> dict:
    base = {
        "command": args.command,
        "seed": args.seed,
        "format": args.format,
    }
    base.update(extra)
    return base


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_constants(args) -> int:
    cfg = PrecisionConfig(
        quadrature_nodes=args.nodes, mc_samples=args.mc_samples, seed=args.seed
    )
    if args.table1:
        entries = list(TABLE1_MEASURES)
    elif args.measure:
        entries = [(args.measure, parse_measure(args.measure))]
    else:
        raise InvalidParams("constants needs --measure or --table1")
    rows = []
    for name, mu in entries:
        b = constants_bundle(mu, cfg)
        rows.append(
            {
                "measure": name,
                "k": mu.k,
                "theta": b.theta,
                "psi2": b.psi2,
                "C": b.C,
                "C_tilde": b.C_tilde,
                "C_bar": b.C_bar,
                "method": b.method_note,
            }
        )
    fields = ["measure", "k", "theta", "psi2", "C", "C_tilde", "C_bar", "method"]
    config = _config(
        args,
        measure=args.measure,
        table1=args.table1,
        nodes=args.nodes,
        mc_samples=args.mc_samples,
    )
    _emit(args, config, rows, fields, figure=lambda p: plot_constants(rows, p))
    return 0


def cmd_simulate(args) -> int:
    process = parse_process(args.process)
    N = _single_N(args.N)
    rng = stream(args.seed, 0x51)
    keep_decks = N <= 200
    rows = []
    risings = []
    for i in range(args.samples):
        deck = np.asarray(sample_shuffled_deck(process, N, args.K, rng))
        r = rising_sequences(deck)
        risings.append(r)
        row = {
            "sample": i,
            "rising_sequences": r,
            "inverse_longest_run": longest_increasing_run(inverse_deck(deck)),
        }
        if keep_decks:
            row["deck"] = " ".join(str(int(c)) for c in deck)
        rows.append(row)
    fields = ["sample", "rising_sequences", "inverse_longest_run"] + (
        ["deck"] if keep_decks else []
    )
    config = _config(
        args, process=args.process, N=N, K=args.K, samples=args.samples
    )
    _emit(
        args,
        config,
        rows,
        fields,
        figure=lambda p: plot_statistic_hist(risings, "rising sequences", p),
    )
    return 0


def cmd_tvd(args) -> int:
    process = parse_process(args.process)
    N = _single_N(args.N)
    use_exact = args.exact or N <= 7
    Ks = [args.K] if args.K is not None else list(range(args.kmax + 1))
    rows = []
    if use_exact:
        curve = exact_tv_curve(process, N, max(Ks))
        for k in Ks:
            rows.append(
                {
                    "N": N,
                    "K": k,
                    "method": "exact",
                    "tv": float(curve[k]),
                    "ci_lo": None,
                    "ci_hi": None,
                }
            )
    else:
        rng = stream(args.seed, 0x71)
        for k in Ks:
            rep = tv_lower_bound_mc(
                process, N, k, args.statistic, rng, samples=args.samples
            )
            rows.append(
                {
                    "N": N,
                    "K": k,
                    "method": f"mc-bound:{args.statistic}",
                    "tv": rep.statistic,
                    "ci_lo": rep.ci[0],
                    "ci_hi": rep.ci[1],
                }
            )
    fields = ["N", "K", "method", "tv", "ci_lo", "ci_hi"]
    config = _config(
        args,
        process=args.process,
        N=N,
        K=args.K,
        kmax=args.kmax,
        exact=use_exact,
        statistic=args.statistic,
        samples=args.samples,
    )
    _emit(args, config, rows, fields, figure=lambda p: plot_tv_curve(rows, p))
    return 0


def cmd_scan(args) -> int:
    mu = parse_measure(args.measure)
    N_list = _int_list(args.N)
    coefficients = _kgrid(args.kgrid)
    bundle = constants_bundle(mu)
    rng = stream(args.seed, 0x5C)
    rows = cutoff_scan(
        mu, N_list, coefficients, args.statistic, args.samples, rng, cbar=bundle.C_bar
    )
    fields = [
        "N",
        "K",
        "coefficient",
        "statistic",
        "estimate",
        "ci_lo",
        "ci_hi",
        "cbar",
        "exact_tv",
    ]
    config = _config(
        args,
        measure=args.measure,
        N=N_list,
        kgrid=args.kgrid,
        statistic=args.statistic,
        samples=args.samples,
    )
    _emit(
        args,
        config,
        rows,
        fields,
        figure=lambda p: plot_scan(rows, p, cbar=bundle.C_bar),
    )
    return 0


def cmd_coldspot(args) -> int:
    mu = parse_measure(args.measure)
    N = _single_N(args.N)
    bundle = constants_bundle(mu)
    K = (
        args.K
        if args.K is not None
        else floor_with_tolerance(0.6 * bundle.C * math.log(N))
    )
    mixture = discretize_measure(mu, args.chi)
    H = build_cold_spots(
        idealized_pile_sequence(mixture, N, K),
        mixture,
        bundle.theta,
        delta=args.delta,
        chi=args.chi,
        rho=args.rho,
        prefix_cap=args.prefix_cap,
    )
    if args.process:
        process = parse_process(args.process)
    elif isinstance(mu, PointMass):
        process = IIDMultinomial(mu.point)
    else:
        process = IIDFromMeasure(mu)
    rng = stream(args.seed, 0xC0)
    row = {
        "N": N,
        "K": K,
        "theta": bundle.theta,
        "delta": args.delta,
        "chi": args.chi,
        "rho": args.rho,
        "prefix_length": H.alpha_tot,
        "prefix_count": H.prefix_count,
        "enumerated": H.enumerated_count,
        "subsampled": int(H.subsampled),
        "intervals": len(H.intervals),
        "size": H.size,
        "boundary": H.boundary_size,
        "threshold": H.size / 2.0 + H.size ** (0.5 + args.delta / 2.0),
    }
    stats_un = stats_sh = None
    if args.calibrate:
        rejects = cold_spot_calibration(H, args.calibrate, rng)
        lo, hi = wilson_interval(rejects, args.calibrate)
        row.update(
            calibration_trials=args.calibrate,
            calibration_rejects=rejects,
            calibration_rate=rejects / args.calibrate,
            calibration_ci_lo=lo,
            calibration_ci_hi=hi,
        )
    if args.power:
        rejects = cold_spot_power(process, K, H, args.power, rng)
        lo, hi = wilson_interval(rejects, args.power)
        row.update(
            power_trials=args.power,
            power_rejects=rejects,
            power_rate=rejects / args.power,
            power_ci_lo=lo,
            power_ci_hi=hi,
        )
        n_hist = min(args.power, 50)
        stats_un = [
            ascent_statistic(rng.permutation(N) + 1, H) for _ in range(n_hist)
        ]
        stats_sh = [
            ascent_statistic(inverse_deck(sample_shuffled_deck(process, N, K, rng)), H)
            for _ in range(n_hist)
        ]
    fields = list(row.keys())
    config = _config(
        args,
        measure=args.measure,
        process=args.process,
        N=N,
        K=K,
        delta=args.delta,
        chi=args.chi,
        rho=args.rho,
        prefix_cap=args.prefix_cap,
        calibrate=args.calibrate,
        power=args.power,
    )
    _emit(
        args,
        config,
        [row],
        fields,
        figure=lambda p: plot_coldspot(
            H.intervals, N, p, stats_uniform=stats_un, stats_shuffled=stats_sh
        ),
    )
    return 0


def cmd_nonconvex(args) -> int:
    etas = _numbers(args.eta)
    rows = []
    curves = []
    xs = np.linspace(1.0, 4.0, 301)
    for eta in etas:
        rep = verify_nonconvexity(eta)
        rows.append(
            {
                "eta": eta,
                "cbar_f": float(rep.cbar_f),
                "cbar_breve": float(rep.cbar_breve),
                "cbar_hat": float(rep.cbar_hat),
                "cbar_hat_exact": str(rep.cbar_hat),
                "theta_hat": float(rep.theta_hat),
                "gap": float(rep.gap),
                "strict_gap": int(rep.strict_gap),
            }
        )
        f, fb, fh = appendix_f(eta), appendix_f_breve(eta), appendix_f_hat(eta)
        curves.append(
            (
                eta,
                xs,
                [f.value_float(x) for x in xs],
                [fb.value_float(x) for x in xs],
                [fh.value_float(x) for x in xs],
            )
        )
    fields = [
        "eta",
        "cbar_f",
        "cbar_breve",
        "cbar_hat",
        "cbar_hat_exact",
        "theta_hat",
        "gap",
        "strict_gap",
    ]
    config = _config(args, eta=args.eta)
    _emit(args, config, rows, fields, figure=lambda p: plot_nonconvexity(curves, p))
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riffle",
        description="generalized riffle shuffles: constants, simulation, "
        "mixing diagnostics",
    )
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=_DEFAULT_SEED)
    common.add_argument(
        "--out", help="output base path; writes OUT.csv/OUT.json and OUT.png"
    )
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument(
        "--threads",
        type=int,
        default=1,
        help="accepted for compatibility; results never depend on it",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", parents=[common], help="cutoff constants")
    p.add_argument("--measure", help="compact measure syntax or JSON")
    p.add_argument("--table1", action="store_true", help="all built-in measures")
    p.add_argument("--nodes", type=int, default=256, help="quadrature nodes")
    p.add_argument("--mc-samples", type=int, default=1_000_000)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("simulate", parents=[common], help="sample shuffled decks")
    p.add_argument("--process", default="gsr")
    p.add_argument("-N", required=True, help="deck size")
    p.add_argument("-K", type=int, required=True, help="number of shuffles")
    p.add_argument("--samples", type=int, default=100)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("tvd", parents=[common], help="distance to uniform")
    p.add_argument("--process", default="gsr")
    p.add_argument("-N", required=True)
    p.add_argument("-K", type=int, default=None, help="single step count")
    p.add_argument("--kmax", type=int, default=8, help="curve 0..kmax when -K absent")
    p.add_argument("--exact", action="store_true", help="force the exact path")
    p.add_argument(
        "--statistic",
        choices=("rising_sequences", "longest_run"),
        default="longest_run",
    )
    p.add_argument("--samples", type=int, default=10_000)
    p.set_defaults(func=cmd_tvd)

    p = sub.add_parser("scan", parents=[common], help="TV bound over a K grid")
    p.add_argument("--measure", required=True)
    p.add_argument("-N", required=True, help="deck size(s), comma separated")
    p.add_argument(
        "--kgrid", required=True, help="start:stop:step in multiples of log N"
    )
    p.add_argument(
        "--statistic",
        choices=("rising_sequences", "longest_run"),
        default="longest_run",
    )
    p.add_argument("--samples", type=int, default=2_000)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("coldspot", parents=[common], help="cold-spot test")
    p.add_argument("--measure", default="point:0.5,0.5")
    p.add_argument("--process", help="sampling process for the power run")
    p.add_argument("-N", default="65536")
    p.add_argument("-K", type=int, default=None, help="default 0.6 C log N")
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--chi", type=float, default=0.05)
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--prefix-cap", type=int, default=1_000_000)
    p.add_argument("--calibrate", type=int, default=200, help="uniform-deck trials")
    p.add_argument("--power", type=int, default=50, help="shuffled-deck trials")
    p.set_defaults(func=cmd_coldspot)

    p = sub.add_parser(
        "nonconvex", parents=[common], help="cutoff-constant counterexample"
    )
    p.add_argument("--eta", default="0.005,0.01,0.02,0.04")
    p.set_defaults(func=cmd_nonconvex)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print(
            json.dumps({"error": "InvalidParams", "message": "--threads must be >= 1"}),
            file=sys.stderr,
        )
        return 2
    try:
        return args.func(args)
    except RiffleError as exc:
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return 2
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
