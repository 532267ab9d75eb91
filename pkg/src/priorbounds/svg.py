"""Minimal self-contained SVG line charts."""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=190, top=40, bottom=55)


@dataclass(frozen=True)
class Axis:
    """Affine map from (optionally log10) data coordinates to pixels."""

    lo: float
    hi: float
    pix_lo: float
    pix_hi: float
    log: bool

    def _t(self, v):
        v = np.asarray(v, dtype=float)
        return np.log10(v) if self.log else v

    def __call__(self, v):
        a, b = self._t(self.lo), self._t(self.hi)
        frac = (self._t(v) - a) / (b - a) if b != a else np.full(np.shape(v), 0.5)
        return self.pix_lo + frac * (self.pix_hi - self.pix_lo)

    def ticks(self, count: int = 5):
        if self.log:
            a, b = math.floor(math.log10(self.lo)), math.ceil(math.log10(self.hi))
            return [10.0**k for k in range(a, b + 1) if self.lo <= 10.0**k <= self.hi] or [self.lo, self.hi]
        return list(np.linspace(self.lo, self.hi, count))


def make_axis(values, pix_lo, pix_hi, log: bool) -> Axis:
    v = np.asarray(values, dtype=float)
    v = v[np.isfinite(v) & (v > 0)] if log else v[np.isfinite(v)]
    if v.size == 0:
        raise ValueError("no plottable values on this axis")
    return Axis(float(v.min()), float(v.max()), pix_lo, pix_hi, log)


def emit_svg(series_list, log_x: bool = True, log_y: bool = True, title: str = "",
             x_label: str = "n", y_label: str = "value") -> str:
    """Render curves as one polyline plus circle markers per series, with a legend.

    On log axes, non-positive points are dropped.
    """
    series_list = [s for s in series_list if len(s.points)]
    if not series_list:
        raise ValueError("nothing to plot")
    xs = np.concatenate([s.n for s in series_list]).astype(float)
    ys = np.concatenate([s.values for s in series_list])
    m = MARGIN
    ax_x = make_axis(xs, m["left"], WIDTH - m["right"], log_x)
    ax_y = make_axis(ys, HEIGHT - m["bottom"], m["top"], log_y)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>']
    x0, x1 = m["left"], WIDTH - m["right"]
    y0, y1 = HEIGHT - m["bottom"], m["top"]
    out.append(f'<path d="M{x0},{y1} V{y0} H{x1}" fill="none" stroke="black"/>')
    for t in ax_x.ticks():
        px = float(ax_x(t))
        out.append(f'<line x1="{px:.2f}" y1="{y0}" x2="{px:.2f}" y2="{y0 + 5}" stroke="black"/>')
        out.append(f'<text x="{px:.2f}" y="{y0 + 18}" text-anchor="middle">{t:g}</text>')
    for t in ax_y.ticks():
        py = float(ax_y(t))
        out.append(f'<line x1="{x0 - 5}" y1="{py:.2f}" x2="{x0}" y2="{py:.2f}" stroke="black"/>')
        out.append(f'<text x="{x0 - 8}" y="{py + 4:.2f}" text-anchor="end">{t:.3g}</text>')
    out.append(f'<text x="{(x0 + x1) / 2:.1f}" y="{HEIGHT - 15}" text-anchor="middle">'
               f'{escape(x_label)}</text>')
    out.append(f'<text x="18" y="{(y0 + y1) / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {(y0 + y1) / 2:.1f})">{escape(y_label)}</text>')

    for i, s in enumerate(series_list):
        color = PALETTE[i % len(PALETTE)]
        x, y = s.n.astype(float), s.values
        keep = np.isfinite(y) & ((x > 0) | (not log_x)) & ((y > 0) | (not log_y))
        px, py = ax_x(x[keep]), ax_y(y[keep])
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
        out.append(f'<g class="series" data-series="{escape(s.series)}">')
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>')
        out.extend(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="3" fill="{color}"/>' for a, b in zip(px, py))
        out.append("</g>")
        ly = m["top"] + 10 + 20 * i
        out.append(f'<line x1="{x1 + 15}" y1="{ly}" x2="{x1 + 40}" y2="{ly}" stroke="{color}" '
                   f'stroke-width="2"/>')
        out.append(f'<text x="{x1 + 46}" y="{ly + 4}">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
