"""Piecewise-cubic interpolants in the log-dependent domain.

Every interpolant is stored per interval in local-offset form::

    p_i(x) = a_i + b_i*(x - x_i) + c_i*(x - x_i)**2 + d_i*(x - x_i)**3

Supported methods are not-a-knot cubic splines (``csi``), monotone piecewise
cubic Hermite interpolation (``pchip``) and Akima interpolation (``akima``).
Two points always give the straight line and three points the interpolating
parabola, whatever method was requested.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, OutOfDomain

METHODS = ("csi", "pchip", "akima")

CONDITION_WARN = 1e12


class IllConditionedWarning(RuntimeWarning):
    pass


@dataclass(frozen=True, eq=False)
class PiecewisePolynomial:
    knots: np.ndarray
    coeffs: np.ndarray  # shape (n_pieces, 4): a, b, c, d
    method: str

    @property
    def n_pieces(self) -> int:
        return self.coeffs.shape[0]

    @property
    def domain(self) -> tuple:
        return float(self.knots[0]), float(self.knots[-1])

    def __call__(self, x, nu: int = 0):
        return evaluate(self, x, nu)

    def piece(self, i: int, x, nu: int = 0):
        """Evaluate piece ``i`` (or its ``nu``-th derivative) without range checks."""
        a, b, c, d = self.coeffs[i]
        u = np.asarray(x, dtype=float) - self.knots[i]
        return _poly_local(a, b, c, d, u, nu)


def _poly_local(a, b, c, d, u, nu):
    if nu == 0:
        return a + u * (b + u * (c + u * d))
    if nu == 1:
        return b + u * (2.0 * c + 3.0 * d * u)
    if nu == 2:
        return 2.0 * c + 6.0 * d * u
    if nu == 3:
        return 6.0 * d + 0.0 * u
    return 0.0 * u


def _check_knots(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise DegenerateInput("x and y must be one-dimensional arrays of equal length")
    if x.size < 2:
        raise DegenerateInput(f"at least 2 points required, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DegenerateInput("x and y must be finite")
    if np.any(np.diff(x) <= 0):
        raise DegenerateInput("x values must be strictly increasing")
    return x, y


def pchip_derivatives(x, y) -> np.ndarray:
    """Knot derivatives of the monotone cubic Hermite interpolant.

    Interior knots use the weighted harmonic mean of the adjacent secants and
    zero at local extrema. End knots use the three-point formula, limited so
    the end derivative keeps the sign of the first secant and does not exceed
    three times its magnitude when the data turn.
    """
    x, y = _check_knots(x, y)
    h = np.diff(x)
    delta = np.diff(y) / h
    n = x.size
    v = np.zeros(n)
    if n == 2:
        v[:] = delta[0]
        return v

    left, right = delta[:-1], delta[1:]
    hl, hr = h[:-1], h[1:]
    same_sign = left * right > 0
    alpha = (hl + 2.0 * hr) / (3.0 * (hl + hr))
    denom = np.where(same_sign, alpha * right + (1.0 - alpha) * left, 1.0)
    v[1:-1] = np.where(same_sign, left * right / denom, 0.0)

    v[0] = _pchip_end(h[0], h[1], delta[0], delta[1])
    v[-1] = _pchip_end(h[-1], h[-2], delta[-1], delta[-2])
    return v


def _pchip_end(h1, h2, d1, d2):
    v = ((2.0 * h1 + h2) * d1 - h1 * d2) / (h1 + h2)
    if np.sign(v) != np.sign(d1):
        return 0.0
    if np.sign(d1) != np.sign(d2) and abs(v) > abs(3.0 * d1):
        return 3.0 * d1
    return v


def akima_derivatives(x, y) -> np.ndarray:
    """Akima knot derivatives with two extrapolated ghost secants per side.

    Where both slope-difference weights vanish the mean of the two adjacent
    secants is used, so collinear data reproduce the line.
    """
    x, y = _check_knots(x, y)
    delta = np.diff(y) / np.diff(x)
    m = delta.size
    ext = np.empty(m + 4)
    ext[2:-2] = delta
    if m == 1:
        ext[:2] = ext[-2:] = delta[0]
    else:
        ext[1] = 2.0 * ext[2] - ext[3]
        ext[0] = 2.0 * ext[1] - ext[2]
        ext[-2] = 2.0 * ext[-3] - ext[-4]
        ext[-1] = 2.0 * ext[-2] - ext[-3]

    # knot k sits between ext[k+1] (left secant) and ext[k+2] (right secant)
    s_ll, s_l, s_r, s_rr = ext[:-3], ext[1:-2], ext[2:-1], ext[3:]
    w_l = np.abs(s_rr - s_r)
    w_r = np.abs(s_l - s_ll)
    wsum = w_l + w_r
    tie = wsum == 0
    safe = np.where(tie, 1.0, wsum)
    return np.where(tie, 0.5 * (s_l + s_r), (w_l * s_l + w_r * s_r) / safe)


def _hermite_coeffs(x, y, v):
    h = np.diff(x)
    delta = np.diff(y) / h
    a = y[:-1]
    b = v[:-1]
    c = (3.0 * delta - 2.0 * v[:-1] - v[1:]) / h
    d = (v[:-1] + v[1:] - 2.0 * delta) / h**2
    return np.column_stack([a, b, c, d])


def _linear_coeffs(x, y):
    slope = (y[1] - y[0]) / (x[1] - x[0])
    return np.array([[y[0], slope, 0.0, 0.0]])


def _quadratic_coeffs(x, y):
    d0 = (y[1] - y[0]) / (x[1] - x[0])
    d1 = (y[2] - y[1]) / (x[2] - x[1])
    curv = (d1 - d0) / (x[2] - x[0])
    rows = []
    for i in range(2):
        # derivative of y0 + d0*(t-x0) + curv*(t-x0)*(t-x1) at x_i
        slope = d0 + curv * (2.0 * x[i] - x[0] - x[1])
        rows.append([y[i], slope, curv, 0.0])
    return np.array(rows)


def _csi_coeffs(x, y):
    """Not-a-knot spline via second derivatives at the knots."""
    n = x.size
    h = np.diff(x)
    delta = np.diff(y) / h
    A = np.zeros((n, n))
    rhs = np.zeros(n)
    # third derivative continuous across the second and the penultimate knot
    A[0, 0], A[0, 1], A[0, 2] = h[1], -(h[0] + h[1]), h[0]
    A[-1, -3], A[-1, -2], A[-1, -1] = h[-1], -(h[-2] + h[-1]), h[-2]
    for i in range(1, n - 1):
        A[i, i - 1] = h[i - 1]
        A[i, i] = 2.0 * (h[i - 1] + h[i])
        A[i, i + 1] = h[i]
        rhs[i] = 6.0 * (delta[i] - delta[i - 1])

    cond = np.linalg.cond(A)
    if not cond < CONDITION_WARN:
        warnings.warn(
            f"cubic spline system is ill-conditioned (cond={cond:.3g})",
            IllConditionedWarning,
            stacklevel=3,
        )
    try:
        M = np.linalg.solve(A, rhs)  # LU with partial pivoting
    except np.linalg.LinAlgError as exc:
        raise DegenerateInput(f"cubic spline system is singular: {exc}") from None

    a = y[:-1]
    b = delta - h * (2.0 * M[:-1] + M[1:]) / 6.0
    c = M[:-1] / 2.0
    d = (M[1:] - M[:-1]) / (6.0 * h)
    return np.column_stack([a, b, c, d])


def fit(x, y, method: str = "akima") -> PiecewisePolynomial:
    """Fit an interpolant through ``(x, y)``; ``y`` is already in the log domain."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")
    x, y = _check_knots(x, y)
    if x.size == 2:
        return PiecewisePolynomial(x, _linear_coeffs(x, y), "linear")
    if x.size == 3:
        return PiecewisePolynomial(x, _quadratic_coeffs(x, y), "quadratic")
    if method == "csi":
        coeffs = _csi_coeffs(x, y)
    elif method == "pchip":
        coeffs = _hermite_coeffs(x, y, pchip_derivatives(x, y))
    else:
        coeffs = _hermite_coeffs(x, y, akima_derivatives(x, y))
    return PiecewisePolynomial(x, coeffs, method)


def _piece_index(p: PiecewisePolynomial, x: np.ndarray) -> np.ndarray:
    lo, hi = p.knots[0], p.knots[-1]
    if np.any(x < lo) or np.any(x > hi) or np.any(np.isnan(x)):
        raise OutOfDomain(f"evaluation outside [{lo}, {hi}] is refused")
    idx = np.searchsorted(p.knots, x, side="right") - 1
    return np.clip(idx, 0, p.n_pieces - 1)


def evaluate(p: PiecewisePolynomial, x, nu: int = 0):
    """Value (or ``nu``-th derivative) of ``p`` at ``x``; scalar or array."""
    xa = np.asarray(x, dtype=float)
    idx = _piece_index(p, xa)
    a, b, c, d = (p.coeffs[idx, k] for k in range(4))
    out = _poly_local(a, b, c, d, xa - p.knots[idx], nu)
    if np.ndim(out) == 0:
        return float(out)
    return out


def _antiderivative(row, u):
    a, b, c, d = row
    return u * (a + u * (b / 2.0 + u * (c / 3.0 + u * d / 4.0)))


def integrate(p: PiecewisePolynomial, lo: float, hi: float) -> float:
    """Exact definite integral of ``p`` over ``[lo, hi]``."""
    lo = float(lo)
    hi = float(hi)
    if hi < lo:
        raise ValueError("integration bounds must satisfy lo <= hi")
    knots = p.knots
    if lo < knots[0] or hi > knots[-1]:
        raise OutOfDomain(f"integration outside [{knots[0]}, {knots[-1]}] is refused")
    if lo == hi:
        return 0.0
    first = int(np.clip(np.searchsorted(knots, lo, side="right") - 1, 0, p.n_pieces - 1))
    last = int(np.clip(np.searchsorted(knots, hi, side="left") - 1, 0, p.n_pieces - 1))
    total = []
    for i in range(first, last + 1):
        start = max(lo, knots[i])
        stop = min(hi, knots[i + 1])
        if stop <= start:
            continue
        row = p.coeffs[i]
        total.append(_antiderivative(row, stop - knots[i]) - _antiderivative(row, start - knots[i]))
    return math.fsum(total)
