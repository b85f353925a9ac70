"""Command-line front end.

Subcommands map one-to-one onto the library: ``design`` (filter families),
``impute`` (fill gaps), ``trends`` (filtered estimates), ``compat`` (NSR
diagnostics), ``compare`` (cross-region discrepancy), ``simulate`` (seeded
Monte Carlo bias), and ``demo`` (reproduce the bundled-data reference
results end to end).

Exit codes: 0 success, 1 data or computation error, 2 usage error. Output
format is ``--format``, else the MYETRENDS_FORMAT environment variable,
else text; JSON output is key-sorted so identical runs are byte-identical.
The parsed argument namespace is the whole configuration; flags are
validated before any computation starts.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from .analysis import (
    ComparisonSpec,
    SimulationSpec,
    compare,
    compatibility,
    expected_bias,
    simulate_bias,
    trend_estimates,
)
from .datasets import STANDARD_TARGETS, load_sample, sample_names
from .exceptions import MyeTrendsError
from .filterdesign import DesignSpec, design_filters, variance_inflation, verify_filter_set
from .myeseries import (
    RegionPair,
    display_decimals,
    impute_random_walk,
    load_csv,
    render_value,
    write_csv,
)

_FORMATS = ("text", "json")


def _dump_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _resolve_format(args: argparse.Namespace) -> str:
    if args.format:
        return args.format
    env = os.environ.get("MYETRENDS_FORMAT", "").strip().lower()
    return env if env in _FORMATS else "text"


# ---------------------------------------------------------------------------
# argument parsing helpers


def _parse_periods(text: str) -> tuple[int, ...]:
    try:
        ks = tuple(int(tok) for tok in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"periods must be comma-separated integers, got {text!r}")
    if not ks:
        raise argparse.ArgumentTypeError("periods must be nonempty")
    return ks


def _parse_targets(text: str) -> tuple[tuple[int, int], ...]:
    targets = []
    for tok in text.split(","):
        parts = tok.split(":")
        if len(parts) != 2:
            raise argparse.ArgumentTypeError(
                f"target {tok!r} must look like PERIOD:ENDYEAR, e.g. 3:2006"
            )
        try:
            targets.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise argparse.ArgumentTypeError(f"target {tok!r} has non-integer parts")
    return tuple(targets)


def _parse_trend(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(Fraction(tok.strip()) for tok in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(
            f"trend must be comma-separated numbers (fractions allowed), got {text!r}"
        )


def _parse_noise(text: str):
    """Either one standard deviation for every period, or PERIOD:SD pairs."""
    toks = [t.strip() for t in text.split(",") if t.strip()]
    if not toks:
        raise argparse.ArgumentTypeError("noise must not be empty")
    if all(":" in t for t in toks):
        out = {}
        for t in toks:
            k, sd = t.split(":", 1)
            try:
                out[int(k)] = float(sd)
            except ValueError:
                raise argparse.ArgumentTypeError(f"noise entry {t!r} is not PERIOD:SD")
        return out
    if len(toks) == 1 and ":" not in toks[0]:
        try:
            return float(toks[0])
        except ValueError:
            raise argparse.ArgumentTypeError(f"noise {text!r} is not a number")
    raise argparse.ArgumentTypeError(
        f"noise must be a single number or PERIOD:SD pairs, got {text!r}"
    )


def _add_format_and_out(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=_FORMATS, default=None, help="output format (default: text, or MYETRENDS_FORMAT)")
    p.add_argument("-o", "--out", default=None, help="write output to this file instead of stdout")


def _load_series_arg(path: str):
    """A CLI input is a CSV path, or the name of a bundled sample."""
    if path in sample_names():
        return load_sample(path)
    return load_csv(path)


def _design_from_args(parser, degree: int, periods: tuple[int, ...]) -> DesignSpec:
    try:
        return DesignSpec(periods, degree)
    except ValueError as exc:
        parser.error(str(exc))


# ---------------------------------------------------------------------------
# subcommands


def cmd_design(parser, args) -> int:
    spec = _design_from_args(parser, args.degree, args.periods)
    fs = design_filters(spec)
    report = verify_filter_set(fs)
    if _resolve_format(args) == "json":
        payload = {
            "filters": fs.to_dict(),
            "verification": {
                "passed": report.passed,
                "checks": [
                    {"name": c.name, "passed": c.passed, "residual": c.residual}
                    for c in report.checks
                ],
            },
        }
        _emit(_dump_json(payload), args.out)
    else:
        lines = [f"design: {fs.spec}"]
        lines.append(f"phi    : {fs.phi}")
        for k in fs.spec.periods:
            lines.append(f"psi[{k}] : {fs.psi[k]}")
        lines.append(f"common : {fs.common}")
        for k in fs.spec.periods:
            vif = variance_inflation(fs.psi[k])
            lines.append(f"variance inflation psi[{k}]: {vif} ({float(vif):.2f})")
        lines.append("verification:")
        lines.append(str(report))
        lines.append("all checks passed" if report.passed else "VERIFICATION FAILED")
        _emit("\n".join(lines) + "\n", args.out)
    return 0 if report.passed else 1


def cmd_impute(parser, args) -> int:
    series = _load_series_arg(args.input)
    filled = impute_random_walk(series, args.targets)
    _emit(write_csv(filled), args.out)
    return 0


def cmd_trends(parser, args) -> int:
    series = _load_series_arg(args.input)
    periods = args.periods if args.periods else series.periods()
    spec = _design_from_args(parser, args.degree, periods)
    fs = design_filters(spec)
    te = trend_estimates(series, fs, args.t0)
    dec = display_decimals(series.unit)
    if _resolve_format(args) == "json":
        payload = te.to_dict()
        payload["series"] = series.name
        payload["unit"] = series.unit
        payload["rendered"] = {str(k): render_value(v, dec) for k, v in te.values.items()}
        _emit(_dump_json(payload), args.out)
    else:
        lines = [
            f"trend estimates for {series.name} at {te.at} "
            f"(degree {spec.degree}, periods {','.join(map(str, spec.periods))})"
        ]
        for k in spec.periods:
            lines.append(f"  {k}y: {render_value(te.values[k], dec)}")
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_compat(parser, args) -> int:
    series = _load_series_arg(args.input)
    periods = args.periods if args.periods else tuple(k for k in series.periods() if k > 1)
    if not periods:
        parser.error("no periods above 1 to audit; pass --periods")
    report = compatibility(
        series, periods, log_base=args.log_base, include_imputed=not args.exclude_imputed
    )
    if _resolve_format(args) == "json":
        _emit(_dump_json(report.to_dict()), args.out)
    else:
        scope = "imputed excluded" if args.exclude_imputed else "imputed included"
        lines = [f"compatibility for {series.name} (log base {report.log_base}, {scope})"]
        for k, entry in sorted(report.entries.items()):
            years = sorted(entry.nsr)
            lines.append(
                f"  C({k}y) = {render_value(entry.c, 3)}  over {years[0]}-{years[-1]}"
            )
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def _mode_reference(mode: str, reference: Optional[int], other: int) -> int:
    if reference is not None:
        return reference
    return other if mode == "untimely" else 1


def cmd_compare(parser, args) -> int:
    series_a = _load_series_arg(args.input_a)
    series_b = _load_series_arg(args.input_b)
    pair = RegionPair(series_a, series_b)
    ref = _mode_reference(args.mode, args.reference_period, args.other_period)
    try:
        cspec = ComparisonSpec(args.mode, args.t0, ref, args.other_period)
    except ValueError as exc:
        parser.error(str(exc))
    fs = None
    if args.mode == "proper":
        periods = args.periods if args.periods else tuple(sorted({1, ref, args.other_period}))
        fs = design_filters(_design_from_args(parser, args.degree, periods))
    result = compare(pair, cspec, fs)
    if _resolve_format(args) == "json":
        _emit(_dump_json(result.to_dict()), args.out)
    else:
        dec = display_decimals(series_a.unit)
        _emit(
            f"{args.mode} comparison of {series_a.name} at {args.t0}: "
            f"a({result.reference_period_used}y) = {render_value(result.value_a, dec)}, "
            f"b({result.other_period_used}y) = {render_value(result.value_b, dec)}, "
            f"discrepancy = {result.percent()}%\n",
            args.out,
        )
    return 0


def cmd_simulate(parser, args) -> int:
    ref = _mode_reference(args.mode, args.reference_period, args.other_period)
    noise = args.noise
    if isinstance(noise, float):
        noise = {k: noise for k in {ref, args.other_period}}
    try:
        sspec = SimulationSpec(
            trend=args.trend,
            noise_sd=noise,
            mode=args.mode,
            t0=args.t0,
            replicates=args.replicates,
            seed=args.seed,
            reference_period=ref,
            other_period=args.other_period,
        )
    except ValueError as exc:
        parser.error(str(exc))
    fs = None
    if args.mode == "proper":
        periods = args.periods if args.periods else tuple(sorted({1, ref, args.other_period}))
        fs = design_filters(_design_from_args(parser, args.degree, periods))
    summary = simulate_bias(sspec, fs)
    analytic = expected_bias(sspec.trend, sspec.comparison_spec(), fs)
    if _resolve_format(args) == "json":
        payload = summary.to_dict()
        payload["expected_bias"] = analytic
        _emit(_dump_json(payload), args.out)
    else:
        lines = [
            f"simulated {args.mode} comparison, {summary.replicates} replicates, seed {summary.seed}",
            f"  bias          : {summary.bias!r}",
            f"  expected bias : {analytic!r}",
            f"  std error     : {summary.std_error!r}",
            f"  var(a), var(b): {summary.var_a!r}, {summary.var_b!r}",
        ]
        _emit("\n".join(lines) + "\n", args.out)
    return 0


# ---------------------------------------------------------------------------
# demo: recompute every reference value from the bundled data

# Expected values at printed precision. Each percentage row carries its own
# decimal count, matching the precision the reference results use.
_DEMO_REFERENCE = {
    "income": {
        "decimals": 0,
        "imputed": ("42395", "41328", "42600"),
        "trends": ("43570", "45223", "45320"),
        "c": ("0.017", "0.020"),
        "inapt": ((3, "1.9", 1), (5, "-2.2", 1)),
        "proper": ((3, "3.8", 1), (5, "4.0", 1)),
    },
    "divorce": {
        "decimals": 0,
        "imputed": ("17371", "16181", "16417"),
        "trends": ("19331", "19217", "16695"),
        "c": ("0.008", "0.042"),
        "inapt": ((3, "-13.7", 1), (5, "-24.8", 1)),
        "proper": ((3, "-0.59", 2), (5, "-13.6", 1)),
    },
    "age": {
        "decimals": 2,
        "imputed": ("37.35", "37.45", "37.70"),
        "trends": ("37.59", "37.59", "38.25"),
        "c": ("0.002", "0.004"),
        "inapt": ((3, "-0.53", 2), (5, "0.27", 2)),
        "proper": ((3, "0", 0), (5, "1.8", 1)),
    },
}


def demo_rows() -> list[dict]:
    """Recompute all reference quantities; one row per comparison.

    Proper-mode percentages are computed from the trend values at printed
    precision (the precision the reference table reports), not from full
    double precision; with full precision one value rounds differently.
    """
    fs = design_filters(DesignSpec((1, 3, 5), 1))
    rows: list[dict] = []

    def add(variable: str, quantity: str, computed: str, expected: str) -> None:
        rows.append(
            {
                "variable": variable,
                "quantity": quantity,
                "computed": computed,
                "expected": expected,
                "pass": computed == expected,
            }
        )

    for name, ref in _DEMO_REFERENCE.items():
        dec = ref["decimals"]
        series = load_sample(name)
        full = impute_random_walk(series, STANDARD_TARGETS)
        for (k, t), expected in zip(STANDARD_TARGETS, ref["imputed"]):
            add(name, f"imputed {k}y {t}", render_value(full.value(k, t), dec), expected)
        te = trend_estimates(full, fs, 2007)
        rendered = {k: render_value(te.values[k], dec) for k in (1, 3, 5)}
        for k, expected in zip((1, 3, 5), ref["trends"]):
            add(name, f"trend {k}y 2007", rendered[k], expected)
        comp = compatibility(full, (3, 5))
        for k, expected in zip((3, 5), ref["c"]):
            add(name, f"C {k}y", render_value(comp.c(k), 3), expected)
        pair = RegionPair(full, full)
        for k, expected, pdec in ref["inapt"]:
            res = compare(pair, ComparisonSpec("inapt", 2007, 1, k))
            add(name, f"inapt 1y vs {k}y %", res.percent(pdec), expected)
        for k, expected, pdec in ref["proper"]:
            va = float(rendered[1])
            vb = float(rendered[k])
            pct = render_value(100.0 * (vb / va - 1.0), pdec)
            add(name, f"proper 1y vs {k}y trend %", pct, expected)
    return rows


def cmd_demo(parser, args) -> int:
    rows = demo_rows()
    failed = [r for r in rows if not r["pass"]]
    if _resolve_format(args) == "json":
        payload = {
            "rows": rows,
            "total": len(rows),
            "failed": len(failed),
            "passed": not failed,
        }
        _emit(_dump_json(payload), args.out)
    else:
        lines = [
            "reference reproduction from bundled data",
            "(proper-mode percentages use trend values at printed precision)",
            "",
            f"{'variable':<9} {'quantity':<28} {'computed':>10} {'expected':>10}  result",
        ]
        for r in rows:
            flag = "ok" if r["pass"] else "FAIL"
            lines.append(
                f"{r['variable']:<9} {r['quantity']:<28} "
                f"{r['computed']:>10} {r['expected']:>10}  {flag}"
            )
        lines.append("")
        lines.append(
            f"{len(rows) - len(failed)}/{len(rows)} values reproduce"
            + ("" if not failed else "  <-- MISMATCH")
        )
        _emit("\n".join(lines) + "\n", args.out)
    return 0 if not failed else 1


# ---------------------------------------------------------------------------
# parser assembly


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="myetrends",
        description="Trend-preserving filters and diagnostics for rolling multi-year estimates.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("design", help="design and verify a concurrent filter family")
    p.add_argument("--degree", type=int, required=True, help="polynomial trend degree to preserve")
    p.add_argument("--periods", type=_parse_periods, required=True, help="comma-separated period lengths, e.g. 1,3,5")
    _add_format_and_out(p)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("impute", help="fill missing observations by random-walk forecasting")
    p.add_argument("--in", dest="input", required=True, help="input CSV path (or bundled sample name)")
    p.add_argument("--targets", type=_parse_targets, required=True, help="comma-separated PERIOD:ENDYEAR keys, e.g. 3:2006,5:2007")
    _add_format_and_out(p)
    p.set_defaults(func=cmd_impute)

    p = sub.add_parser("trends", help="filtered trend estimates at one end year")
    p.add_argument("--in", dest="input", required=True, help="input CSV path (or bundled sample name)")
    p.add_argument("--t0", type=int, required=True, help="end year for the estimates")
    p.add_argument("--degree", type=int, default=1, help="trend degree (default 1)")
    p.add_argument("--periods", type=_parse_periods, default=None, help="periods to design for (default: all in the input)")
    _add_format_and_out(p)
    p.set_defaults(func=cmd_trends)

    p = sub.add_parser("compat", help="NSR compatibility diagnostics")
    p.add_argument("--in", dest="input", required=True, help="input CSV path (or bundled sample name)")
    p.add_argument("--periods", type=_parse_periods, default=None, help="periods to audit (default: all above 1)")
    p.add_argument("--log-base", choices=("10", "e"), default="10", help="logarithm base (default 10)")
    p.add_argument("--exclude-imputed", action="store_true", help="drop years whose values touch imputed data")
    _add_format_and_out(p)
    p.set_defaults(func=cmd_compat)

    p = sub.add_parser("compare", help="compare two regions' estimates at one end year")
    p.add_argument("--in-a", dest="input_a", required=True, help="region A CSV (reference side)")
    p.add_argument("--in-b", dest="input_b", required=True, help="region B CSV")
    p.add_argument("--mode", choices=("inapt", "untimely", "proper"), required=True)
    p.add_argument("--t0", type=int, required=True)
    p.add_argument("--reference-period", type=int, default=None, help="region A period (default: 1, or the other period for untimely)")
    p.add_argument("--other-period", type=int, default=3, help="region B period (default 3)")
    p.add_argument("--degree", type=int, default=1, help="proper mode: trend degree (default 1)")
    p.add_argument("--periods", type=_parse_periods, default=None, help="proper mode: design periods (default: the periods involved)")
    _add_format_and_out(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("simulate", help="Monte Carlo comparison-bias experiment")
    p.add_argument("--trend", type=_parse_trend, required=True, help="trend coefficients a0,a1,... (fractions allowed)")
    p.add_argument("--noise", type=_parse_noise, default=0.0, help="noise sd: one number for all periods, or PERIOD:SD pairs")
    p.add_argument("--mode", choices=("inapt", "untimely", "proper"), required=True)
    p.add_argument("--t0", type=int, required=True)
    p.add_argument("--reference-period", type=int, default=None)
    p.add_argument("--other-period", type=int, default=3)
    p.add_argument("--replicates", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--degree", type=int, default=1, help="proper mode: trend degree (default 1)")
    p.add_argument("--periods", type=_parse_periods, default=None, help="proper mode: design periods")
    _add_format_and_out(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("demo", help="recompute the bundled reference results and check them")
    _add_format_and_out(p)
    p.set_defaults(func=cmd_demo)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(parser, args)
    except MyeTrendsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        # validation surfaced from library objects built off flag values
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
