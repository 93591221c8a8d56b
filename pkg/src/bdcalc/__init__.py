"""Bjøntegaard-delta calculus with CSI, PCHIP and Akima interpolation."""

from .analysis import (
    RcdCurve,
    RieReport,
    SubsetErrorStats,
    rcd_curve,
    rie,
    select_supporting_params,
    subset_error,
    subset_error_stats,
)
from .bd_engine import BdConfig, BdResult, average_bd, bd_quality, bd_value, linear_domain_mean
from .curve_model import (
    MetricTransform,
    PerformancePoint,
    SupportSet,
    ValidationReport,
    apply_metric_transform,
    overlap_bounds,
    range_iou,
    validate_support_set,
)
from .errors import *  # noqa: F401,F403
from .interpolation import (
    PiecewisePolynomial,
    akima_derivatives,
    evaluate,
    fit,
    integrate,
    pchip_derivatives,
)

__version__ = "0.1.0"
