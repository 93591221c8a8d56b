"""Bjøntegaard-delta computation between a test and an anchor configuration."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import interpolation
from .curve_model import (
    Finding,
    MetricTransform,
    PerformancePoint,
    SupportSet,
    overlap_bounds,
    range_iou,
    validate_support_set,
)
from .errors import EmptyInput, ValidationFailed


@dataclass(frozen=True)
class BdConfig:
    method: str = "akima"
    independent_transform: MetricTransform = field(default_factory=MetricTransform)
    sample_count: int = 1000
    min_iou: float = 0.5
    bd_warn_threshold: Optional[float] = None

    def __post_init__(self):
        if self.method not in interpolation.METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.sample_count < 2:
            raise ValueError("sample_count must be at least 2")


@dataclass
class BdResult:
    bd: float
    bounds: tuple
    iou: float
    method: str
    warnings: list = field(default_factory=list)

    @property
    def bd_percent(self) -> float:
        return 100.0 * self.bd

    def to_dict(self) -> dict:
        return {
            "bd": self.bd,
            "bounds": [self.bounds[0], self.bounds[1]],
            "iou": self.iou,
            "method": self.method,
            "warnings": [w.to_dict() for w in self.warnings],
        }


@dataclass
class BdQualityResult:
    """Mean absolute quality difference over the shared log-rate range."""

    delta: float
    bounds: tuple
    iou: float
    method: str
    warnings: list = field(default_factory=list)


@dataclass
class FittedPair:
    test: interpolation.PiecewisePolynomial
    anchor: interpolation.PiecewisePolynomial
    test_set: SupportSet
    anchor_set: SupportSet
    bounds: tuple
    iou: float
    warnings: list


def prepare_set(s: SupportSet, transform: MetricTransform) -> tuple:
    """Transform, validate and return ``(transformed_set, warnings)``."""
    warnings = []
    if transform.kind != "identity":
        saturated = [p.param if p.param is not None else p.independent
                     for p in s.points if transform.saturates(p.independent)]
        if saturated:
            # only reachable with clamping enabled, otherwise transformed() raises
            warnings.append(Finding(
                "SATURATED_VALUE",
                f"{s.sequence_id}/{s.config_id}: {len(saturated)} value(s) clamped by {transform.kind}",
            ))
    ts = s.transformed(transform)
    report = validate_support_set(ts)
    if not report.ok:
        codes = ", ".join(f.code for f in report.errors)
        raise ValidationFailed(f"{s.sequence_id}/{s.config_id}: {codes}", report)
    return ts, warnings + list(report.warnings)


def fit_set(s: SupportSet, method: str) -> interpolation.PiecewisePolynomial:
    return interpolation.fit(s.independent, np.log10(s.dependent), method)


def fit_pair(test: SupportSet, anchor: SupportSet, cfg: BdConfig) -> FittedPair:
    ts, tw = prepare_set(test, cfg.independent_transform)
    as_, aw = prepare_set(anchor, cfg.independent_transform)
    bounds = overlap_bounds(ts, as_)
    iou = range_iou(ts, as_)
    warnings = tw + aw
    if iou < cfg.min_iou:
        warnings.append(Finding("LOW_IOU", f"range IoU {iou:.3f} is below {cfg.min_iou}"))
    return FittedPair(fit_set(ts, cfg.method), fit_set(as_, cfg.method), ts, as_, bounds, iou, warnings)


def mean_log_difference(pair: FittedPair) -> float:
    lo, hi = pair.bounds
    diff = interpolation.integrate(pair.test, lo, hi) - interpolation.integrate(pair.anchor, lo, hi)
    return diff / (hi - lo)


def bd_value(test: SupportSet, anchor: SupportSet, cfg: BdConfig = BdConfig()) -> BdResult:
    """Relative dependent-metric difference of ``test`` w.r.t. ``anchor``.

    The mean of the log10 difference of both fitted curves over the shared
    independent range is exponentiated; ``-0.1`` means 10% less rate.
    """
    pair = fit_pair(test, anchor, cfg)
    bd = 10.0 ** mean_log_difference(pair) - 1.0
    warnings = list(pair.warnings)
    if cfg.bd_warn_threshold is not None and abs(bd) < cfg.bd_warn_threshold:
        warnings.append(Finding(
            "BELOW_SUBSET_ERROR",
            f"|BD| {abs(bd):.4g} is below the expected error level {cfg.bd_warn_threshold:.4g}",
        ))
    return BdResult(bd, pair.bounds, pair.iou, cfg.method, warnings)


def _quality_set(s: SupportSet, transform: MetricTransform) -> SupportSet:
    ts = s.transformed(transform)
    # swap axes: log rate becomes the abscissa, quality the ordinate
    swapped = [PerformancePoint(p.param, math.log10(p.dependent), p.independent) for p in ts.points]
    return SupportSet(tuple(swapped), s.config_id, s.sequence_id)


def bd_quality(test: SupportSet, anchor: SupportSet, cfg: BdConfig = BdConfig()) -> BdQualityResult:
    """Mean quality difference at equal rate (the BD-PSNR flavour).

    The result is an absolute difference in quality units and carries a
    DISCOURAGED_METRIC warning: rate ranges of different encoders are often
    disjoint, which makes this variant unreliable.
    """
    for s in (test, anchor):
        report = validate_support_set(s)
        if not report.ok:
            raise ValidationFailed(f"{s.sequence_id}/{s.config_id}: invalid support set", report)
    tq = _quality_set(test, cfg.independent_transform)
    aq = _quality_set(anchor, cfg.independent_transform)
    for s in (tq, aq):
        if np.any(np.diff(s.independent) <= 0):
            raise ValidationFailed(f"{s.sequence_id}/{s.config_id}: rates must be strictly monotone")
    lo, hi = overlap_bounds(tq, aq)
    iou = range_iou(tq, aq)
    pt = interpolation.fit(tq.independent, tq.dependent, cfg.method)
    pa = interpolation.fit(aq.independent, aq.dependent, cfg.method)
    delta = (interpolation.integrate(pt, lo, hi) - interpolation.integrate(pa, lo, hi)) / (hi - lo)
    warnings = [Finding("DISCOURAGED_METRIC", "quality-delta BD is not recommended; prefer the rate BD")]
    if iou < cfg.min_iou:
        warnings.append(Finding("LOW_IOU", f"range IoU {iou:.3f} is below {cfg.min_iou}"))
    return BdQualityResult(delta, (lo, hi), iou, cfg.method, warnings)


def simpson(values: np.ndarray, step: float) -> float:
    """Composite Simpson rule on an odd number of equally spaced samples."""
    if values.size % 2 == 0:
        raise ValueError("composite Simpson needs an odd number of samples")
    weights = np.ones(values.size)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    return step / 3.0 * math.fsum(weights * values)


def linear_domain_mean(test: SupportSet, anchor: SupportSet, cfg: BdConfig = BdConfig()) -> float:
    """Mean of the rate ratio minus one, averaged in the linear domain.

    Diagnostic companion of :func:`bd_value`; there is no closed form because
    the fitted polynomial sits in the exponent, so composite Simpson with
    ``cfg.sample_count`` panels is used.
    """
    pair = fit_pair(test, anchor, cfg)
    lo, hi = pair.bounds
    panels = cfg.sample_count + (cfg.sample_count % 2)
    x = np.linspace(lo, hi, panels + 1)
    ratio = 10.0 ** (interpolation.evaluate(pair.test, x) - interpolation.evaluate(pair.anchor, x))
    return simpson(ratio - 1.0, (hi - lo) / panels) / (hi - lo)


def average_bd(results: Sequence) -> float:
    """Arithmetic mean of per-sequence BD values (results or plain floats)."""
    values = [r.bd if isinstance(r, BdResult) else float(r) for r in results]
    if not values:
        raise EmptyInput("cannot average an empty list of BD results")
    return math.fsum(values) / len(values)
