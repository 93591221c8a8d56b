"""Independent reference computations used to check the library.

Nothing here calls into the code paths under test except ``evaluate`` of a
fitted curve where a check is explicitly about integrating that curve.
"""

import math

import numpy as np


def adaptive_simpson(f, a, b, eps=1e-12, max_depth=50):
    """Recursive adaptive Simpson quadrature with Richardson correction."""

    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, eps, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15.0 * eps:
            return left + right + delta / 15.0
        return (recurse(a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
                + recurse(m, b, fm, frm, fb, right, eps / 2.0, depth - 1))

    if a == b:
        return 0.0
    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    return recurse(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), eps, max_depth)


def csi_full_system(x, y):
    """Not-a-knot spline from the full 4(I-1) coefficient system.

    Unknowns are (a, b, c, d) per piece in local offsets; rows are the
    interpolation conditions, C1 and C2 continuity, and equal third
    derivatives across the second and the penultimate knot.
    """
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    n = x.size
    m = n - 1
    h = np.diff(x)
    A = np.zeros((4 * m, 4 * m))
    r = np.zeros(4 * m)
    row = 0
    for i in range(m):
        c = 4 * i
        A[row, c] = 1.0
        r[row] = y[i]
        row += 1
        A[row, c:c + 4] = [1.0, h[i], h[i] ** 2, h[i] ** 3]
        r[row] = y[i + 1]
        row += 1
    for i in range(m - 1):
        c, c2 = 4 * i, 4 * (i + 1)
        A[row, c:c + 4] = [0.0, 1.0, 2 * h[i], 3 * h[i] ** 2]
        A[row, c2 + 1] = -1.0
        row += 1
        A[row, c:c + 4] = [0.0, 0.0, 2.0, 6 * h[i]]
        A[row, c2 + 2] = -2.0
        row += 1
    A[row, 3], A[row, 7] = 1.0, -1.0
    row += 1
    A[row, 4 * (m - 2) + 3], A[row, 4 * (m - 1) + 3] = 1.0, -1.0
    return np.linalg.solve(A, r).reshape(m, 4)


def pchip_direct(x, y):
    """Knot derivatives evaluated term by term from the harmonic-mean rules.

    Boundary values carry the usual shape-preserving limiter.
    """
    n = len(x)
    h = [x[i + 1] - x[i] for i in range(n - 1)]
    d = [(y[i + 1] - y[i]) / h[i] for i in range(n - 1)]
    v = [0.0] * n
    for i in range(1, n - 1):
        if d[i - 1] * d[i] > 0:
            alpha = (h[i - 1] + 2 * h[i]) / (3 * (h[i - 1] + h[i]))
            v[i] = d[i - 1] * d[i] / (alpha * d[i] + (1 - alpha) * d[i - 1])
        else:
            v[i] = 0.0

    def end(h1, h2, d1, d2):
        e = ((2 * h1 + h2) * d1 - h1 * d2) / (h1 + h2)
        if e * d1 <= 0:
            return 0.0
        if d1 * d2 <= 0 and abs(e) > 3 * abs(d1):
            return 3 * d1
        return e

    v[0] = end(h[0], h[1], d[0], d[1])
    v[-1] = end(h[-1], h[-2], d[-1], d[-2])
    return v


def pchip_unlimited_end(h1, h2, d1, d2):
    return ((2 * h1 + h2) * d1 - h1 * d2) / (h1 + h2)


def akima_direct(x, y):
    """Akima derivatives with ghost slopes kept in a dict keyed by slope index (0 and -1, n and n+1 are ghosts)."""
    n = len(x)
    D = {i + 1: (y[i + 1] - y[i]) / (x[i + 1] - x[i]) for i in range(n - 1)}
    # real slopes are D[1..n-1]; ghosts at 0, -1 and n, n+1
    D[0] = 2 * D[1] - D[2]
    D[-1] = 2 * D[0] - D[1]
    D[n] = 2 * D[n - 1] - D[n - 2]
    D[n + 1] = 2 * D[n] - D[n - 1]
    v = []
    for i in range(1, n + 1):
        w1 = abs(D[i + 1] - D[i])
        w2 = abs(D[i - 1] - D[i - 2])
        if w1 + w2 == 0:
            v.append((D[i - 1] + D[i]) / 2)
        else:
            v.append((w1 * D[i - 1] + w2 * D[i]) / (w1 + w2))
    return v


def hermite_value(x, y, v, q):
    """Evaluate the cubic Hermite interpolant from knot data and derivatives."""
    i = int(np.clip(np.searchsorted(x, q, side="right") - 1, 0, len(x) - 2))
    h = x[i + 1] - x[i]
    t = (q - x[i]) / h
    h00 = 2 * t**3 - 3 * t**2 + 1
    h10 = t**3 - 2 * t**2 + t
    h01 = -2 * t**3 + 3 * t**2
    h11 = t**3 - t**2
    return h00 * y[i] + h10 * h * v[i] + h01 * y[i + 1] + h11 * h * v[i + 1]


def random_rd_pair(rng, n_test=None, n_anchor=None):
    """Two plausible rate-distortion support sets with a clear BD offset."""
    from bdcalc import SupportSet

    def one(n, lo, hi, base, slope, offset):
        inner = np.sort(rng.uniform(lo, hi, n - 2))
        x = np.concatenate([[lo], inner, [hi]])
        while np.any(np.diff(x) < 0.2):
            inner = np.sort(rng.uniform(lo, hi, n - 2))
            x = np.concatenate([[lo], inner, [hi]])
        t = x - 30.0
        logr = base + offset + slope * t + rng.uniform(0.0, 0.004) * t**2 + rng.normal(0, 0.01, n)
        logr = np.maximum.accumulate(logr + 1e-3 * np.arange(n))
        return x, 10.0**logr

    n_test = n_test or int(rng.integers(4, 10))
    n_anchor = n_anchor or int(rng.integers(4, 10))
    slope = rng.uniform(0.12, 0.25)
    offset = rng.choice([-1, 1]) * rng.uniform(0.02, 0.2)
    xt, rt = one(n_test, rng.uniform(28, 32), rng.uniform(38, 44), 2.5, slope, offset)
    xa, ra = one(n_anchor, rng.uniform(28, 32), rng.uniform(38, 44), 2.5, slope * rng.uniform(0.97, 1.03), 0.0)
    return (SupportSet.from_arrays(xt, rt, config_id="test"),
            SupportSet.from_arrays(xa, ra, config_id="anchor"))


def bd_by_quadrature(test_curve, anchor_curve, lo, hi, base=10.0):
    from bdcalc.interpolation import evaluate

    integral = adaptive_simpson(lambda q: evaluate(test_curve, q) - evaluate(anchor_curve, q), lo, hi)
    return base ** (integral / (hi - lo)) - 1.0
