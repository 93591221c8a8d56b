"""Performance points, support sets, metric transforms and range overlap."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DomainError, NoOverlap

TRANSFORM_KINDS = ("identity", "log_ssim", "log_vmaf", "log10_dependent")


@dataclass(frozen=True)
class PerformancePoint:
    """One measured operating point of an encoder configuration.

    ``param`` is the ordinal control value (QP, crf, ...), ``independent`` the
    quality-like metric and ``dependent`` the rate-like metric. Invariants are
    not enforced here; :func:`validate_support_set` reports violations.
    """

    param: Optional[float]
    independent: float
    dependent: float


@dataclass(frozen=True)
class SupportSet:
    """Ordered support points of one configuration for one sequence.

    Points are stored sorted by their independent value. The order in which
    the control parameter visits them is kept through ``param``.
    """

    points: tuple
    config_id: str = ""
    sequence_id: str = ""

    def __post_init__(self):
        pts = tuple(sorted(self.points, key=lambda p: p.independent))
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_arrays(cls, independent, dependent, params=None, config_id="", sequence_id=""):
        independent = [float(v) for v in independent]
        dependent = [float(v) for v in dependent]
        if len(independent) != len(dependent):
            raise ValueError("independent and dependent must have equal length")
        if params is None:
            params = [None] * len(independent)
        elif len(params) != len(independent):
            raise ValueError("params must match the number of points")
        pts = [PerformancePoint(p, x, y) for p, x, y in zip(params, independent, dependent)]
        return cls(tuple(pts), config_id, sequence_id)

    @property
    def count(self) -> int:
        return len(self.points)

    @property
    def independent(self) -> np.ndarray:
        return np.array([p.independent for p in self.points], dtype=float)

    @property
    def dependent(self) -> np.ndarray:
        return np.array([p.dependent for p in self.points], dtype=float)

    @property
    def params(self) -> list:
        return [p.param for p in self.points]

    def value_range(self) -> tuple:
        x = self.independent
        return float(x.min()), float(x.max())

    def transformed(self, transform: "MetricTransform") -> "SupportSet":
        """Return a copy whose independent values went through ``transform``."""
        if transform.kind == "identity":
            return self
        pts = [
            PerformancePoint(p.param, apply_metric_transform(transform, p.independent), p.dependent)
            for p in self.points
        ]
        return SupportSet(tuple(pts), self.config_id, self.sequence_id)

    def subset(self, params: Iterable) -> "SupportSet":
        """Keep only the points whose control parameter is in ``params``."""
        wanted = set(params)
        pts = [p for p in self.points if p.param in wanted]
        return SupportSet(tuple(pts), self.config_id, self.sequence_id)


@dataclass(frozen=True)
class MetricTransform:
    """Monotone transform applied to a metric before interpolation.

    Values past the saturation guard ``1 - clamp_epsilon`` raise
    :class:`DomainError` unless ``clamp`` is set, in which case they are
    pinned to the guard.
    """

    kind: str = "identity"
    clamp_epsilon: float = 1e-6
    clamp: bool = False

    def __post_init__(self):
        if self.kind not in TRANSFORM_KINDS:
            raise ValueError(f"unknown transform kind {self.kind!r}")
        if not self.clamp_epsilon > 0:
            raise ValueError("clamp_epsilon must be positive")

    def __call__(self, value: float) -> float:
        return apply_metric_transform(self, value)

    @property
    def upper_limit(self) -> float:
        if self.kind == "log_ssim":
            return 1.0 - self.clamp_epsilon
        if self.kind == "log_vmaf":
            return 100.0 * (1.0 - self.clamp_epsilon)
        return math.inf

    def saturates(self, value: float) -> bool:
        return value > self.upper_limit


def apply_metric_transform(t: MetricTransform, value: float) -> float:
    value = float(value)
    if t.kind == "identity":
        return value
    if t.kind == "log10_dependent":
        if not value > 0:
            raise DomainError(f"log10 requires a positive value, got {value!r}")
        return math.log10(value)
    if not math.isfinite(value) or value < 0:
        raise DomainError(f"{t.kind} requires a non-negative finite value, got {value!r}")
    if value > t.upper_limit:
        if not t.clamp:
            raise DomainError(
                f"{t.kind} input {value!r} saturates past {t.upper_limit!r}; "
                "exclude the point or enable clamping"
            )
        value = t.upper_limit
    if t.kind == "log_ssim":
        return -10.0 * math.log10(1.0 - value)
    return -10.0 * math.log10(1.0 - value / 100.0)


@dataclass(frozen=True)
class Finding:
    code: str
    message: str

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message}


@dataclass
class ValidationReport:
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def codes(self) -> list:
        return [f.code for f in self.errors + self.warnings]

    def to_dict(self) -> dict:
        return {
            "errors": [f.to_dict() for f in self.errors],
            "warnings": [f.to_dict() for f in self.warnings],
        }


def _strictly_monotone(values: Sequence[float]) -> bool:
    d = np.diff(np.asarray(values, dtype=float))
    return bool(np.all(d > 0) or np.all(d < 0))


def validate_support_set(s: SupportSet) -> ValidationReport:
    report = ValidationReport()
    label = "/".join(v for v in (s.sequence_id, s.config_id) if v) or "support set"
    x = s.independent
    y = s.dependent

    if s.count < 2:
        report.errors.append(Finding("TOO_FEW_POINTS", f"{label}: {s.count} point(s), at least 2 required"))
    if not np.all(np.isfinite(x)):
        report.errors.append(Finding("NON_FINITE_INDEPENDENT", f"{label}: independent values must be finite"))

    params = s.params
    known = [p for p in params if p is not None]
    if len(set(known)) != len(known):
        report.errors.append(Finding("DUPLICATE_PARAM", f"{label}: duplicate control parameter values"))

    if s.count >= 2:
        if known and len(known) == len(params) and len(set(known)) == len(known):
            # monotony is judged along the control parameter
            order = sorted(range(s.count), key=lambda i: params[i])
            ordered = x[order]
        else:
            ordered = x
        if not _strictly_monotone(ordered):
            report.errors.append(
                Finding(
                    "NON_MONOTONE_INDEPENDENT",
                    f"{label}: independent values are not strictly monotone: {ordered.tolist()}",
                )
            )

    if np.any(~(y > 0)):
        report.errors.append(
            Finding("NON_POSITIVE_DEPENDENT", f"{label}: dependent values must be positive for the logarithm")
        )
    elif s.count >= 3:
        d = np.diff(y)
        if not (np.all(d >= 0) or np.all(d <= 0)):
            report.warnings.append(
                Finding(
                    "NON_MONOTONE_DEPENDENT",
                    f"{label}: dependent values are not monotone; they are treated as local extrema",
                )
            )
    return report


def overlap_bounds(a: SupportSet, b: SupportSet) -> tuple:
    a_lo, a_hi = a.value_range()
    b_lo, b_hi = b.value_range()
    low = max(a_lo, b_lo)
    high = min(a_hi, b_hi)
    if not low < high:
        raise NoOverlap(f"independent ranges [{a_lo}, {a_hi}] and [{b_lo}, {b_hi}] do not overlap")
    return low, high


def range_iou(a: SupportSet, b: SupportSet) -> float:
    a_lo, a_hi = a.value_range()
    b_lo, b_hi = b.value_range()
    inter = max(0.0, min(a_hi, b_hi) - max(a_lo, b_lo))
    union = max(a_hi, b_hi) - min(a_lo, b_lo)
    if union <= 0:
        # both ranges collapse onto the same single value
        return 1.0 if (a_lo, a_hi) == (b_lo, b_hi) else 0.0
    return inter / union
