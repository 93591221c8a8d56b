"""Diagnostics around a BD value: curve differences, interpolation and subset errors."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import interpolation
from .bd_engine import BdConfig, bd_value, fit_pair, fit_set, mean_log_difference, prepare_set
from .curve_model import MetricTransform, SupportSet
from .errors import EmptyInput, InvalidCount, NotASubset, OutOfDomain

# Supporting QPs for the standard 22..37 range, one row per number of points.
TABLE_QP_22_37 = {
    2: (22, 37),
    3: (22, 30, 37),
    4: (22, 27, 32, 37),
    5: (22, 26, 30, 34, 37),
    6: (22, 25, 28, 31, 34, 37),
    7: (22, 24, 27, 29, 32, 34, 37),
    8: (22, 24, 26, 28, 30, 32, 34, 37),
    9: (22, 24, 26, 28, 30, 32, 34, 36, 37),
}


@dataclass
class RcdCurve:
    """Relative curve difference in percent, sampled over the shared range."""

    independent: np.ndarray
    delta_percent: np.ndarray
    crossings: list
    bd_percent: float
    test_markers: list = field(default_factory=list)
    anchor_markers: list = field(default_factory=list)
    independent_label: str = "independent"
    dependent_label: str = "dependent"

    @property
    def samples(self) -> list:
        return list(zip(self.independent.tolist(), self.delta_percent.tolist()))


@dataclass
class RieReport:
    mean: float
    max: float
    per_point: list


@dataclass
class SubsetErrorStats:
    mean_abs: float
    std: float
    signed_mean: float
    per_case: list

    def to_dict(self) -> dict:
        return {"mean_abs": self.mean_abs, "std": self.std, "signed_mean": self.signed_mean}


def _bisect_root(g, lo, hi, tol=1e-12, max_iter=200):
    g_lo = g(lo)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        g_mid = g(mid)
        if g_mid == 0.0:
            return mid
        if (g_mid > 0) == (g_lo > 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def rcd_curve(test: SupportSet, anchor: SupportSet, cfg: BdConfig = BdConfig(), n_samples: int = 1000) -> RcdCurve:
    """Sample ``100 * (test_rate / anchor_rate - 1)`` along the shared range.

    Sign changes between adjacent samples are refined by bisection on the
    continuous log difference of the fitted curves.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    pair = fit_pair(test, anchor, cfg)
    lo, hi = pair.bounds

    def log_diff(x):
        return interpolation.evaluate(pair.test, x) - interpolation.evaluate(pair.anchor, x)

    x = np.linspace(lo, hi, n_samples)
    g = log_diff(x)
    delta = 100.0 * (10.0 ** g - 1.0)

    crossings = []
    for i in np.nonzero(g[:-1] * g[1:] < 0)[0]:
        crossings.append(_bisect_root(log_diff, float(x[i]), float(x[i + 1])))

    def markers(s):
        xs = [v for v in s.independent.tolist() if lo <= v <= hi]
        return [(v, 100.0 * (10.0 ** log_diff(v) - 1.0)) for v in xs]

    bd = 10.0 ** mean_log_difference(pair) - 1.0
    return RcdCurve(x, delta, crossings, 100.0 * bd, markers(pair.test_set), markers(pair.anchor_set))


def _point_keys(s: SupportSet):
    return {(p.independent, p.dependent) for p in s.points}


def rie(subset: SupportSet, all_points: SupportSet, method: str = "akima",
        transform: MetricTransform = MetricTransform()) -> RieReport:
    """Relative interpolation error of the curve fitted on ``subset``.

    The error is measured at every point of ``all_points``, subset members
    included, as ``|10**p(x) - rate| / rate``.
    """
    if not _point_keys(subset) <= _point_keys(all_points):
        raise NotASubset("subset contains points that are not in all_points")
    ts, _ = prepare_set(subset, transform)
    ta, _ = prepare_set(all_points, transform)
    curve = fit_set(ts, method)
    lo, hi = curve.domain
    x = ta.independent
    if np.any(x < lo) or np.any(x > hi):
        raise OutOfDomain("all_points extend beyond the subset's independent range")
    rate = ta.dependent
    err = np.abs(10.0 ** interpolation.evaluate(curve, x) - rate) / rate
    per_point = [(p.param, float(e)) for p, e in zip(ta.points, err)]
    return RieReport(math.fsum(err) / err.size, float(err.max()), per_point)


def subset_error(test_sub: SupportSet, anchor_sub: SupportSet, test_all: SupportSet,
                 anchor_all: SupportSet, cfg: BdConfig = BdConfig()) -> float:
    """BD from the subsets minus BD from all points, as a fraction."""
    if not _point_keys(test_sub) <= _point_keys(test_all):
        raise NotASubset("test subset is not contained in the full test set")
    if not _point_keys(anchor_sub) <= _point_keys(anchor_all):
        raise NotASubset("anchor subset is not contained in the full anchor set")
    return bd_value(test_sub, anchor_sub, cfg).bd - bd_value(test_all, anchor_all, cfg).bd


def subset_error_stats(cases: Sequence) -> SubsetErrorStats:
    """Statistics over ``(sequence, config, e_sub)`` triples.

    ``std`` is the population standard deviation about the signed mean.
    """
    cases = list(cases)
    if not cases:
        raise EmptyInput("no subset errors to summarise")
    e = [float(c[2]) for c in cases]
    n = len(e)
    signed_mean = math.fsum(e) / n
    mean_abs = math.fsum(abs(v) for v in e) / n
    std = math.sqrt(math.fsum((v - signed_mean) ** 2 for v in e) / n)
    return SubsetErrorStats(mean_abs, std, signed_mean, cases)


def select_supporting_params(params: Sequence[int], count: int) -> list:
    """Pick ``count`` supporting parameters spread evenly over ``params``.

    Both ends are always kept. Interior picks sit at equidistant fractional
    positions rounded to the nearest available value, halves rounding down.
    The standard 22..37 QP range uses the published lookup instead, which no
    single rounding rule reproduces.
    """
    params = sorted(params)
    n = len(params)
    if not 2 <= count <= n:
        raise InvalidCount(f"count must lie in [2, {n}], got {count}")
    if params == list(range(22, 38)) and count in TABLE_QP_22_37:
        return list(TABLE_QP_22_37[count])
    picks = []
    for k in range(count):
        pos = k * (n - 1) / (count - 1)
        idx = math.ceil(pos - 0.5)
        if not picks or params[idx] != picks[-1]:
            picks.append(params[idx])
    return picks
