"""Command-line interface: ``bdcalc {bd,rcd,validate,subset-error,rie}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analysis import rcd_curve, rie, select_supporting_params
from .bd_engine import fit_pair
from .curve_model import MetricTransform
from .errors import BdError, ConfigError
from .plotting import emit_rcd_plot, emit_rd_plot
from .report import ReportConfig, load_dataset, run_report, validate_table

TRANSFORMS = {"none": "identity", "log-ssim": "log_ssim", "log-vmaf": "log_vmaf"}

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 1, 2


class _UsageError(Exception):
    pass


def _param_list(text: str) -> list:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        v = float(tok)
        out.append(int(v) if v.is_integer() else v)
    if not out:
        raise argparse.ArgumentTypeError("empty parameter list")
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, help="CSV with columns sequence,config,param,<metrics>")
    common.add_argument("--independent", default="psnr", help="quality metric column (default: psnr)")
    common.add_argument("--dependent", default="bitrate", help="rate-like metric column (default: bitrate)")
    common.add_argument("--transform", choices=sorted(TRANSFORMS), default="none")
    common.add_argument("--clamp-epsilon", type=float, default=None,
                        help="clamp saturated SSIM/VMAF values to 1-eps instead of failing")
    common.add_argument("--json", action="store_true", help="print the JSON result to stdout")
    common.add_argument("--out", help="output file (JSON report or SVG plot)")

    pair = argparse.ArgumentParser(add_help=False)
    pair.add_argument("--anchor", required=True, help="reference configuration")
    pair.add_argument("--test", action="append", default=[],
                      help="test configuration; repeat or comma-separate (default: all others)")
    pair.add_argument("--method", choices=["csi", "pchip", "akima"], default="akima")
    pick = pair.add_mutually_exclusive_group()
    pick.add_argument("--points", type=int, help="number of supporting points I")
    pick.add_argument("--params", type=_param_list, help="comma-separated supporting params")
    pair.add_argument("--min-iou", type=float, default=0.5)
    pair.add_argument("--bd-warn-threshold", type=float, default=None,
                      help="warn when |BD| falls below this fraction")

    parser = argparse.ArgumentParser(prog="bdcalc", description="Bjontegaard-delta calculus and diagnostics")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bd", parents=[common, pair], help="compute a BD report")
    p.add_argument("--plot-dir", help="write one RD plot per sequence and test config here")
    p.add_argument("--rcd", action="store_true", help="include RCD crossings in the report")

    p = sub.add_parser("rcd", parents=[common, pair], help="emit an RCD plot")
    p.add_argument("--sequence", help="sequence to plot (default: the only one)")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--csv", help="also dump the RCD samples as CSV")

    sub.add_parser("validate", parents=[common], help="run support-set validation only")
    sub.add_parser("subset-error", parents=[common, pair], help="subset versus all-points BD study")

    p = sub.add_parser("rie", parents=[common], help="relative interpolation error study")
    p.add_argument("--method", choices=["csi", "pchip", "akima"], default="akima")
    pick = p.add_mutually_exclusive_group(required=True)
    pick.add_argument("--points", type=int)
    pick.add_argument("--params", type=_param_list)
    return parser


def _transform(args) -> MetricTransform:
    kind = TRANSFORMS[args.transform]
    if args.clamp_epsilon is not None:
        return MetricTransform(kind, clamp_epsilon=args.clamp_epsilon, clamp=True)
    return MetricTransform(kind)


def _tests(args) -> list:
    out = []
    for t in args.test:
        out.extend(x.strip() for x in t.split(",") if x.strip())
    return out


def _report_config(args) -> ReportConfig:
    return ReportConfig(
        anchor=args.anchor,
        independent=args.independent.lower(),
        dependent=args.dependent.lower(),
        tests=_tests(args),
        transform=_transform(args),
        method=args.method,
        subset_params=args.params,
        points=args.points,
        min_iou=args.min_iou,
        bd_warn_threshold=args.bd_warn_threshold,
        include_rcd=getattr(args, "rcd", False),
    )


def _emit(args, payload: str) -> None:
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")
    if args.json or not args.out:
        sys.stdout.write(payload)


def _print_warnings(report) -> None:
    for w in report.warnings:
        print(f"warning: {w['code']}: {w['message']}", file=sys.stderr)


def cmd_bd(args) -> int:
    table = load_dataset(args.input)
    cfg = _report_config(args)
    if cfg.method == "csi":
        print("warning: csi is a legacy method prone to overshoot; prefer akima or pchip", file=sys.stderr)
    report = run_report(table, cfg)
    _print_warnings(report)
    _emit(args, report.to_json())
    if getattr(args, "plot_dir", None):
        _plot_rd(table, cfg, Path(args.plot_dir))
    return EXIT_INVALID if report.has_errors else EXIT_OK


def _plot_rd(table, cfg: ReportConfig, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    bd_cfg = cfg.bd_config()
    tests = list(cfg.tests) or [c for c in table.configs() if c != cfg.anchor]
    for seq in table.sequences():
        anchor = table.support_set(seq, cfg.anchor, cfg.independent, cfg.dependent)
        for test in sorted(tests):
            s = table.support_set(seq, test, cfg.independent, cfg.dependent)
            if anchor is None or s is None:
                continue
            try:
                pair = fit_pair(s, anchor, bd_cfg)
            except BdError:
                continue
            emit_rd_plot(
                {test: (pair.test_set, pair.test), cfg.anchor: (pair.anchor_set, pair.anchor)},
                out_dir / f"rd_{seq}_{test}.svg",
                bounds=pair.bounds,
                independent_label=cfg.independent,
                dependent_label=cfg.dependent,
            )


def cmd_rcd(args) -> int:
    table = load_dataset(args.input)
    cfg = _report_config(args)
    sequences = table.sequences()
    seq = args.sequence
    if seq is None:
        if len(sequences) != 1:
            raise _UsageError("--sequence is required when the table holds several sequences")
        seq = sequences[0]
    elif seq not in sequences:
        raise ConfigError(f"unknown sequence {seq!r}")
    tests = cfg.tests or [c for c in table.configs() if c != cfg.anchor]
    if len(tests) != 1:
        raise _UsageError("rcd needs exactly one --test configuration")
    if not args.out:
        raise _UsageError("rcd needs --out for the SVG file")
    for name in (cfg.independent, cfg.dependent):
        if name not in table.catalog:
            raise ConfigError(f"unknown metric {name!r}")
    anchor = table.support_set(seq, cfg.anchor, cfg.independent, cfg.dependent)
    test = table.support_set(seq, tests[0], cfg.independent, cfg.dependent)
    if anchor is None or test is None:
        raise ConfigError(f"{seq}: missing data for {cfg.anchor} or {tests[0]}")
    params = cfg.subset_params
    if params is None and cfg.points is not None:
        common = sorted(set(anchor.params) & set(test.params))
        params = select_supporting_params(common, cfg.points)
    if params is not None:
        anchor, test = anchor.subset(params), test.subset(params)
    curve = rcd_curve(test, anchor, cfg.bd_config(), args.samples)
    label = cfg.independent if cfg.transform.kind == "identity" else f"{cfg.transform.kind}({cfg.independent})"
    unit = table.catalog[cfg.independent].unit
    curve.independent_label = f"{label} [{unit}]" if unit else label
    curve.dependent_label = cfg.dependent
    emit_rcd_plot(curve, args.out, csv_path=args.csv, title=f"RCD {seq}: {tests[0]} vs {cfg.anchor}")
    if args.json:
        payload = {"sequence": seq, "config": tests[0], "bd_percent": curve.bd_percent,
                   "crossings": curve.crossings, "svg": str(args.out)}
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    return EXIT_OK


def cmd_validate(args) -> int:
    table = load_dataset(args.input)
    results = validate_table(table, args.independent.lower(), args.dependent.lower(), _transform(args))
    failed = False
    for r in results:
        label = f"{r['sequence']}/{r['config']}"
        for kind in ("errors", "warnings"):
            for f in r[kind]:
                level = "error" if kind == "errors" else "warning"
                msg = f["message"] if f["message"].startswith(label) else f"{label}: {f['message']}"
                print(f"{level}: {f['code']}: {msg}", file=sys.stderr)
        failed = failed or bool(r["errors"])
    if args.json or args.out:
        _emit(args, json.dumps({"results": results}, indent=2) + "\n")
    return EXIT_INVALID if failed else EXIT_OK


def cmd_subset_error(args) -> int:
    if args.points is None and args.params is None:
        raise _UsageError("subset-error needs --points or --params")
    return cmd_bd(args)


def cmd_rie(args) -> int:
    table = load_dataset(args.input)
    ind, dep = args.independent.lower(), args.dependent.lower()
    for name in (ind, dep):
        if name not in table.catalog:
            raise ConfigError(f"unknown metric {name!r}")
    transform = _transform(args)
    curves = []
    failed = False
    for seq in table.sequences():
        for config in table.configs():
            full = table.support_set(seq, config, ind, dep)
            if full is None:
                continue
            params = args.params if args.params is not None else select_supporting_params(
                sorted(full.params), args.points)
            entry = {"sequence": seq, "config": config, "params": list(params)}
            try:
                r = rie(full.subset(params), full, args.method, transform)
            except (BdError, ValueError) as exc:
                entry.update(mean=None, max=None, error=str(exc))
                failed = True
            else:
                entry.update(mean=r.mean, max=r.max)
            curves.append(entry)
    means = [c["mean"] for c in curves if c["mean"] is not None]
    payload = {
        "meta": {"method": args.method, "transform": transform.kind,
                 "independent": ind, "dependent": dep},
        "per_curve": curves,
        "mean_rie": sum(means) / len(means) if means else None,
    }
    _emit(args, json.dumps(payload, indent=2) + "\n")
    return EXIT_INVALID if failed else EXIT_OK


COMMANDS = {
    "bd": cmd_bd,
    "rcd": cmd_rcd,
    "validate": cmd_validate,
    "subset-error": cmd_subset_error,
    "rie": cmd_rie,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (_UsageError, ConfigError) as exc:
        parser.print_usage(sys.stderr)
        print(f"bdcalc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"bdcalc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BdError as exc:
        print(f"bdcalc: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
