"""Static SVG figures: relative curve differences and rate-distortion curves."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Optional
from xml.sax.saxutils import escape

import numpy as np

from . import interpolation
from .analysis import RcdCurve

WIDTH, HEIGHT = 640, 480
MARGIN = {"left": 80, "right": 30, "top": 30, "bottom": 60}


def _fmt(v: float) -> str:
    return f"{v:.3f}"


class _Axes:
    def __init__(self, xlim, ylim):
        self.x0, self.x1 = _padded(*xlim)
        self.y0, self.y1 = _padded(*ylim)
        self.left = MARGIN["left"]
        self.right = WIDTH - MARGIN["right"]
        self.top = MARGIN["top"]
        self.bottom = HEIGHT - MARGIN["bottom"]

    def px(self, x):
        return self.left + (x - self.x0) / (self.x1 - self.x0) * (self.right - self.left)

    def py(self, y):
        return self.bottom - (y - self.y0) / (self.y1 - self.y0) * (self.bottom - self.top)

    def frame(self, xlabel: str, ylabel: str) -> list:
        parts = [
            f'<rect x="{self.left}" y="{self.top}" width="{self.right - self.left}" '
            f'height="{self.bottom - self.top}" fill="none" stroke="black"/>'
        ]
        for t in np.linspace(self.x0, self.x1, 5):
            x = self.px(t)
            parts.append(f'<line x1="{_fmt(x)}" y1="{self.bottom}" x2="{_fmt(x)}" y2="{self.bottom + 5}" stroke="black"/>')
            parts.append(f'<text x="{_fmt(x)}" y="{self.bottom + 20}" text-anchor="middle" font-size="12">{t:.3g}</text>')
        for t in np.linspace(self.y0, self.y1, 5):
            y = self.py(t)
            parts.append(f'<line x1="{self.left - 5}" y1="{_fmt(y)}" x2="{self.left}" y2="{_fmt(y)}" stroke="black"/>')
            parts.append(f'<text x="{self.left - 8}" y="{_fmt(y + 4)}" text-anchor="end" font-size="12">{t:.4g}</text>')
        cx = (self.left + self.right) / 2
        cy = (self.top + self.bottom) / 2
        parts.append(f'<text id="xlabel" x="{_fmt(cx)}" y="{HEIGHT - 15}" text-anchor="middle" font-size="14">{escape(xlabel)}</text>')
        parts.append(f'<text id="ylabel" x="20" y="{_fmt(cy)}" text-anchor="middle" font-size="14" '
                     f'transform="rotate(-90 20 {_fmt(cy)})">{escape(ylabel)}</text>')
        return parts

    def polyline(self, xs, ys, **attrs) -> str:
        pts = " ".join(f"{_fmt(self.px(x))},{_fmt(self.py(y))}" for x, y in zip(xs, ys))
        extra = "".join(f' {k.replace("_", "-")}="{v}"' for k, v in attrs.items())
        return f'<polyline points="{pts}" fill="none"{extra}/>'


def _padded(lo: float, hi: float) -> tuple:
    lo, hi = float(lo), float(hi)
    if hi - lo < 1e-12:
        span = max(abs(lo), 1.0)
        return lo - 0.5 * span, hi + 0.5 * span
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _document(parts: list, title: str) -> str:
    head = (
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">\n'
        f"<title>{escape(title)}</title>\n"
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>\n'
    )
    return head + "\n".join(parts) + "\n</svg>\n"


def emit_rcd_plot(rcd: RcdCurve, path, csv_path=None, title: str = "Relative curve difference") -> Path:
    """Write the RCD as SVG with the independent metric on the vertical axis.

    The dashed vertical line marks the BD value; circles and squares mark the
    supporting points of the test and anchor configuration.
    """
    if rcd.independent.size == 0:
        raise ValueError("RCD has no samples")
    deltas = np.concatenate([rcd.delta_percent, [0.0, rcd.bd_percent]])
    ax = _Axes((deltas.min(), deltas.max()), (rcd.independent.min(), rcd.independent.max()))
    parts = ax.frame(f"Relative {rcd.dependent_label} difference (%)", rcd.independent_label)
    zx = _fmt(ax.px(0.0))
    parts.append(f'<line id="zero-axis" x1="{zx}" y1="{ax.top}" x2="{zx}" y2="{ax.bottom}" stroke="gray"/>')
    bx = _fmt(ax.px(rcd.bd_percent))
    parts.append(f'<line id="bd-line" x1="{bx}" y1="{ax.top}" x2="{bx}" y2="{ax.bottom}" '
                 f'stroke="red" stroke-dasharray="6,4"/>')
    parts.append(ax.polyline(rcd.delta_percent, rcd.independent, id="rcd", stroke="blue", stroke_width=2))
    for x, d in rcd.test_markers:
        parts.append(f'<circle class="marker-test" cx="{_fmt(ax.px(d))}" cy="{_fmt(ax.py(x))}" r="4" '
                     f'fill="none" stroke="black"/>')
    for x, d in rcd.anchor_markers:
        parts.append(f'<rect class="marker-anchor" x="{_fmt(ax.px(d) - 4)}" y="{_fmt(ax.py(x) - 4)}" '
                     f'width="8" height="8" fill="none" stroke="green"/>')
    path = Path(path)
    try:
        path.write_text(_document(parts, title), encoding="utf-8")
        if csv_path is not None:
            write_rcd_csv(rcd, csv_path)
    except OSError as exc:
        raise IOError(f"cannot write plot: {exc}") from exc
    return path


def write_rcd_csv(rcd: RcdCurve, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["independent", "delta_percent"])
        for x, d in zip(rcd.independent.tolist(), rcd.delta_percent.tolist()):
            w.writerow([repr(x), repr(d)])


def read_rcd_csv(path) -> list:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader)
        return [(float(a), float(b)) for a, b in reader]


def emit_rd_plot(curves: dict, path, bounds: Optional[tuple] = None,
                 independent_label: str = "independent", dependent_label: str = "dependent",
                 title: str = "Rate-distortion curves", samples: int = 200) -> Path:
    """Plot supporting points and fitted curves, log10 rate against quality.

    ``curves`` maps a label to ``(support_set, fitted_curve)`` where the curve
    lives in the log10-dependent domain.
    """
    styles = ["blue", "orange", "green", "purple", "brown"]
    xs_all, ys_all = [], []
    for s, _ in curves.values():
        xs_all.extend(np.log10(s.dependent))
        ys_all.extend(s.independent)
    ax = _Axes((min(xs_all), max(xs_all)), (min(ys_all), max(ys_all)))
    parts = ax.frame(f"log10 {dependent_label}", independent_label)
    if bounds is not None:
        for b in bounds:
            y = _fmt(ax.py(b))
            parts.append(f'<line class="bound" x1="{ax.left}" y1="{y}" x2="{ax.right}" y2="{y}" '
                         f'stroke="gray" stroke-dasharray="4,4"/>')
    for k, (label, (s, curve)) in enumerate(curves.items()):
        colour = styles[k % len(styles)]
        q = np.linspace(*curve.domain, samples)
        parts.append(ax.polyline(interpolation.evaluate(curve, q), q, stroke=colour, stroke_width=2,
                                 **{"class": "curve"}))
        for x, y in zip(np.log10(s.dependent), s.independent):
            px, py = ax.px(x), ax.py(y)
            parts.append(f'<path d="M{_fmt(px - 4)},{_fmt(py - 4)} L{_fmt(px + 4)},{_fmt(py + 4)} '
                         f'M{_fmt(px - 4)},{_fmt(py + 4)} L{_fmt(px + 4)},{_fmt(py - 4)}" stroke="{colour}"/>')
        ly = ax.top + 20 + 18 * k
        parts.append(f'<text x="{ax.left + 10}" y="{ly}" font-size="12" fill="{colour}">{escape(label)}</text>')
    path = Path(path)
    path.write_text(_document(parts, title), encoding="utf-8")
    return path
