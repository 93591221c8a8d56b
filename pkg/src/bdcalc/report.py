"""CSV ingestion and report orchestration over (sequence, config) pairs."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .analysis import rcd_curve, select_supporting_params, subset_error_stats
from .bd_engine import BdConfig, average_bd, bd_value
from .curve_model import Finding, MetricTransform, PerformancePoint, SupportSet, validate_support_set
from .errors import BdError, ConfigError, DomainError, DuplicateKey, NoOverlap, ParseError, ValidationFailed

KEY_COLUMNS = ("sequence", "config", "param")


@dataclass(frozen=True)
class MetricInfo:
    name: str
    unit: str = ""
    transform: str = "identity"


# units and recommended transforms for commonly used metric columns
KNOWN_METRICS = {
    "psnr": MetricInfo("psnr", "dB"),
    "ssim": MetricInfo("ssim", "", "log_ssim"),
    "vmaf": MetricInfo("vmaf", "", "log_vmaf"),
    "bitrate": MetricInfo("bitrate", "kbps"),
    "rate": MetricInfo("rate", "kbps"),
    "time": MetricInfo("time", "s"),
    "enc_time": MetricInfo("enc_time", "s"),
    "dec_time": MetricInfo("dec_time", "s"),
    "energy": MetricInfo("energy", "J"),
    "enc_energy": MetricInfo("enc_energy", "J"),
    "dec_energy": MetricInfo("dec_energy", "J"),
}

SATURATING_METRICS = ("ssim", "vmaf")


@dataclass(frozen=True)
class Row:
    sequence: str
    config: str
    param: float
    metrics: dict


@dataclass
class RunTable:
    rows: list
    catalog: dict

    @property
    def metrics(self) -> list:
        return list(self.catalog)

    def sequences(self) -> list:
        return sorted({r.sequence for r in self.rows})

    def configs(self) -> list:
        return sorted({r.config for r in self.rows})

    def params(self, sequence: str, config: str) -> list:
        return sorted(r.param for r in self.rows if r.sequence == sequence and r.config == config)

    def support_set(self, sequence: str, config: str, independent: str, dependent: str,
                    params: Optional[Sequence] = None) -> Optional[SupportSet]:
        """Support set for one pair, or None if the pair has no complete rows."""
        wanted = None if params is None else set(params)
        pts = []
        for r in self.rows:
            if r.sequence != sequence or r.config != config:
                continue
            if wanted is not None and r.param not in wanted:
                continue
            x = r.metrics.get(independent)
            y = r.metrics.get(dependent)
            if x is None or y is None:
                continue
            pts.append(PerformancePoint(r.param, x, y))
        if not pts:
            return None
        return SupportSet(tuple(pts), config, sequence)


def _parse_number(text: str, line: int, column: str):
    text = text.strip()
    if text == "" or text.lower() in ("nan", "null", "none", "na"):
        return None
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"column {column!r}: {text!r} is not a number", line) from None
    if not math.isfinite(value):
        raise ParseError(f"column {column!r}: {text!r} is not finite", line)
    return value


def _parse_param(text: str, line: int):
    value = _parse_number(text, line, "param")
    if value is None:
        raise ParseError("column 'param' must not be empty", line)
    return int(value) if value.is_integer() else value


def load_dataset(path, format: str = "csv") -> RunTable:
    """Read a ``sequence,config,param,<metric>...`` CSV file.

    Header names match case-insensitively; metric names are lower-cased.
    Empty cells are kept as explicit nulls.
    """
    if format != "csv":
        raise ValueError(f"unsupported format {format!r}")
    path = Path(path)
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("missing header row", 1) from None
        names = [h.strip().lower() for h in header]
        missing = [c for c in KEY_COLUMNS if c not in names]
        if missing:
            raise ParseError(f"header lacks column(s) {', '.join(missing)}", 1)
        if len(set(names)) != len(names):
            raise ParseError("duplicated header names", 1)
        metric_names = [n for n in names if n not in KEY_COLUMNS]
        idx = {n: i for i, n in enumerate(names)}

        rows = []
        seen = set()
        for line_no, cells in enumerate(reader, start=2):
            if not cells or all(not c.strip() for c in cells):
                continue
            if len(cells) != len(names):
                raise ParseError(f"expected {len(names)} fields, got {len(cells)}", line_no)
            seq = cells[idx["sequence"]].strip()
            cfg = cells[idx["config"]].strip()
            param = _parse_param(cells[idx["param"]], line_no)
            key = (seq, cfg, param)
            if key in seen:
                raise DuplicateKey(f"duplicate key sequence={seq!r} config={cfg!r} param={param!r} (line {line_no})")
            seen.add(key)
            metrics = {m: _parse_number(cells[idx[m]], line_no, m) for m in metric_names}
            rows.append(Row(seq, cfg, param, metrics))

    catalog = {m: KNOWN_METRICS.get(m, MetricInfo(m)) for m in metric_names}
    return RunTable(rows, catalog)


@dataclass
class ReportConfig:
    anchor: str
    independent: str
    dependent: str
    tests: Sequence[str] = ()
    transform: MetricTransform = field(default_factory=MetricTransform)
    method: str = "akima"
    subset_params: Optional[Sequence] = None
    points: Optional[int] = None
    min_iou: float = 0.5
    bd_warn_threshold: Optional[float] = None
    include_rcd: bool = False
    rcd_samples: int = 1000

    def bd_config(self) -> BdConfig:
        return BdConfig(
            method=self.method,
            independent_transform=self.transform,
            min_iou=self.min_iou,
            bd_warn_threshold=self.bd_warn_threshold,
        )


@dataclass
class Report:
    meta: dict
    per_sequence: list
    aggregate: dict
    subset_error: Optional[dict] = None
    warnings: list = field(default_factory=list)

    @property
    def has_errors(self) -> bool:
        return any(entry.get("errors") for entry in self.per_sequence)

    def to_dict(self) -> dict:
        out = {
            "meta": self.meta,
            "per_sequence": self.per_sequence,
            "aggregate": self.aggregate,
        }
        if self.subset_error is not None:
            out["subset_error"] = self.subset_error
        out["warnings"] = self.warnings
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"


def _check_config(table: RunTable, cfg: ReportConfig) -> list:
    for name in (cfg.independent, cfg.dependent):
        if name not in table.catalog:
            raise ConfigError(f"unknown metric {name!r}; available: {', '.join(table.metrics)}")
    configs = table.configs()
    if cfg.anchor not in configs:
        raise ConfigError(f"unknown anchor config {cfg.anchor!r}")
    tests = list(cfg.tests) or [c for c in configs if c != cfg.anchor]
    for t in tests:
        if t not in configs:
            raise ConfigError(f"unknown test config {t!r}")
        if t == cfg.anchor:
            raise ConfigError("the anchor must not be listed as a test config")
    if not tests:
        raise ConfigError("no test configuration to compare against the anchor")
    if cfg.subset_params is not None and cfg.points is not None:
        raise ConfigError("give either explicit subset params or a number of points, not both")
    return sorted(tests)


def _subset_for(cfg: ReportConfig, common: list) -> Optional[list]:
    if cfg.subset_params is not None:
        return sorted(cfg.subset_params)
    if cfg.points is not None:
        return select_supporting_params(common, cfg.points)
    return None


def _failure(exc: Exception) -> Finding:
    if isinstance(exc, ValidationFailed) and exc.report is not None:
        return exc.report.errors[0] if len(exc.report.errors) == 1 else Finding(
            "VALIDATION_FAILED", str(exc))
    code = {NoOverlap: "NO_OVERLAP", DomainError: "DOMAIN_ERROR"}.get(type(exc), "BD_FAILED")
    return Finding(code, str(exc))


def _validation_errors(exc: Exception) -> list:
    if isinstance(exc, ValidationFailed) and exc.report is not None:
        return [f.to_dict() for f in exc.report.errors]
    return [_failure(exc).to_dict()]


def run_report(table: RunTable, cfg: ReportConfig) -> Report:
    tests = _check_config(table, cfg)
    bd_cfg = cfg.bd_config()
    meta = {
        "method": cfg.method,
        "transform": cfg.transform.kind,
        "bounds_policy": "overlap",
        "anchor": cfg.anchor,
        "tests": tests,
        "independent": cfg.independent,
        "dependent": cfg.dependent,
    }
    report_warnings = []
    if cfg.method == "csi":
        report_warnings.append(Finding("LEGACY_METHOD", "cubic spline interpolation may overshoot; "
                                       "prefer akima or pchip").to_dict())
    if cfg.independent in SATURATING_METRICS and cfg.transform.kind == "identity":
        report_warnings.append(Finding(
            "UNTRANSFORMED_SATURATING_METRIC",
            f"{cfg.independent} saturates; the logarithmic transform is recommended",
        ).to_dict())

    entries = []
    by_config = {t: [] for t in tests}
    cases = []
    for seq in table.sequences():
        anchor_all = table.support_set(seq, cfg.anchor, cfg.independent, cfg.dependent)
        for test in tests:
            test_all = table.support_set(seq, test, cfg.independent, cfg.dependent)
            if anchor_all is None or test_all is None:
                report_warnings.append(Finding(
                    "MISSING_PAIR", f"{seq}: no data for {'anchor ' + cfg.anchor if anchor_all is None else test}"
                ).to_dict())
                continue
            common = sorted(set(anchor_all.params) & set(test_all.params))
            subset = _subset_for(cfg, common)
            use_subset = subset is not None and len(subset) < len(common)
            test_s = test_all.subset(subset) if use_subset else test_all
            anchor_s = anchor_all.subset(subset) if use_subset else anchor_all

            entry = {"sequence": seq, "config": test}
            try:
                res = bd_value(test_s, anchor_s, bd_cfg)
            except BdError as exc:
                entry.update(bd=None, iou=None, bounds=None, warnings=[], errors=_validation_errors(exc))
                entries.append(entry)
                continue
            entry.update(bd=res.bd, iou=res.iou, bounds=[res.bounds[0], res.bounds[1]],
                         warnings=[w.to_dict() for w in res.warnings])
            by_config[test].append(res.bd)

            if use_subset:
                entry["params"] = list(subset)
                try:
                    full = bd_value(test_all, anchor_all, bd_cfg)
                except BdError as exc:
                    entry["subset_error_failure"] = _failure(exc).to_dict()
                else:
                    e_sub = res.bd - full.bd
                    entry["bd_all"] = full.bd
                    entry["subset_error"] = e_sub
                    cases.append((seq, test, e_sub))

            if cfg.include_rcd:
                rcd = rcd_curve(test_s, anchor_s, bd_cfg, cfg.rcd_samples)
                entry["rcd_crossings"] = rcd.crossings
            entries.append(entry)

    aggregate = {"mean_bd": {t: average_bd(v) for t, v in by_config.items() if v}}
    stats = subset_error_stats(cases).to_dict() if cases else None
    return Report(meta, entries, aggregate, stats, report_warnings)


def validate_table(table: RunTable, independent: str, dependent: str,
                   transform: MetricTransform = MetricTransform()) -> list:
    """Validation findings for every (sequence, config) support set."""
    for name in (independent, dependent):
        if name not in table.catalog:
            raise ConfigError(f"unknown metric {name!r}")
    results = []
    for seq in table.sequences():
        for config in table.configs():
            s = table.support_set(seq, config, independent, dependent)
            if s is None:
                continue
            try:
                ts = s.transformed(transform)
            except DomainError as exc:
                entry = {"errors": [Finding("SATURATED_VALUE", str(exc)).to_dict()], "warnings": []}
            else:
                entry = validate_support_set(ts).to_dict()
            results.append({"sequence": seq, "config": config, **entry})
    return results
