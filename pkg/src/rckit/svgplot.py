"""Minimal standalone SVG line charts.

Hand-rolled markup instead of a plotting dependency: the output is a small,
byte-deterministic, self-contained XML document (no external resources),
which makes the emitted figures trivially diffable in tests.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

__all__ = ["write_line_chart"]

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
_WIDTH, _HEIGHT = 840.0, 520.0
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 80.0, 24.0, 28.0, 56.0


def _ticks(lo: float, hi: float, count: int = 6) -> list:
    if not math.isfinite(lo) or not math.isfinite(hi) or hi <= lo:
        return [lo]
    span = hi - lo
    step = 10.0 ** math.floor(math.log10(span / count))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if span / (step * mult) <= count:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    ticks = []
    value = first
    while value <= hi + 1e-12 * span:
        ticks.append(0.0 if abs(value) < 1e-12 * span else value)
        value += step
    return ticks


def _fmt_tick(v: float, log: bool) -> str:
    if log:
        return f"1e{v:g}"
    return f"{v:.6g}"


def write_line_chart(path, series, x_label: str, y_label: str,
                     x_log: bool = False, y_log: bool = False) -> None:
    """Write polylines for (label, xs, ys) triples with axes and a legend.

    Log axes plot the base-10 logarithm; non-finite or non-positive points
    (on log scales) are dropped from the polyline, leaving a gap.
    """
    cooked = []
    for label, xs, ys in series:
        pts = []
        for x, y in zip(xs, ys):
            if not (math.isfinite(x) and math.isfinite(y)):
                continue
            if x_log:
                if x <= 0:
                    continue
                x = math.log10(x)
            if y_log:
                if y <= 0:
                    continue
                y = math.log10(y)
            pts.append((x, y))
        cooked.append((label, pts))
    all_pts = [pt for _, pts in cooked for pt in pts]
    if not all_pts:
        raise ValueError("nothing to plot: every point was dropped")
    xs_all = [p[0] for p in all_pts]
    ys_all = [p[1] for p in all_pts]
    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = min(ys_all), max(ys_all)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.04 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad

    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def sx(x):
        return _MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y):
        return _MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH:g}" '
        f'height="{_HEIGHT:g}" viewBox="0 0 {_WIDTH:g} {_HEIGHT:g}">',
        f'<rect x="0" y="0" width="{_WIDTH:g}" height="{_HEIGHT:g}" fill="white"/>',
        f'<rect x="{_MARGIN_L:.2f}" y="{_MARGIN_T:.2f}" width="{plot_w:.2f}" '
        f'height="{plot_h:.2f}" fill="none" stroke="#333333" stroke-width="1"/>',
    ]
    for tx in _ticks(x_lo, x_hi):
        px = sx(tx)
        parts.append(f'<line x1="{px:.2f}" y1="{_MARGIN_T + plot_h:.2f}" '
                     f'x2="{px:.2f}" y2="{_MARGIN_T + plot_h + 6:.2f}" '
                     f'stroke="#333333" stroke-width="1"/>')
        parts.append(f'<text x="{px:.2f}" y="{_MARGIN_T + plot_h + 20:.2f}" '
                     f'font-family="sans-serif" font-size="12" text-anchor="middle">'
                     f'{escape(_fmt_tick(tx, x_log))}</text>')
    for ty in _ticks(y_lo, y_hi):
        py = sy(ty)
        parts.append(f'<line x1="{_MARGIN_L - 6:.2f}" y1="{py:.2f}" '
                     f'x2="{_MARGIN_L:.2f}" y2="{py:.2f}" '
                     f'stroke="#333333" stroke-width="1"/>')
        parts.append(f'<text x="{_MARGIN_L - 10:.2f}" y="{py + 4:.2f}" '
                     f'font-family="sans-serif" font-size="12" text-anchor="end">'
                     f'{escape(_fmt_tick(ty, y_log))}</text>')
    parts.append(f'<text x="{_MARGIN_L + plot_w / 2:.2f}" y="{_HEIGHT - 14:.2f}" '
                 f'font-family="sans-serif" font-size="14" text-anchor="middle">'
                 f'{escape(x_label)}</text>')
    parts.append(f'<text x="20" y="{_MARGIN_T + plot_h / 2:.2f}" '
                 f'font-family="sans-serif" font-size="14" text-anchor="middle" '
                 f'transform="rotate(-90 20 {_MARGIN_T + plot_h / 2:.2f})">'
                 f'{escape(y_label)}</text>')
    for idx, (label, pts) in enumerate(cooked):
        color = _PALETTE[idx % len(_PALETTE)]
        if pts:
            point_txt = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
            parts.append(f'<polyline points="{point_txt}" fill="none" '
                         f'stroke="{color}" stroke-width="1.5"/>')
        ly = _MARGIN_T + 16 + 18 * idx
        parts.append(f'<line x1="{_MARGIN_L + 12:.2f}" y1="{ly:.2f}" '
                     f'x2="{_MARGIN_L + 40:.2f}" y2="{ly:.2f}" '
                     f'stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{_MARGIN_L + 46:.2f}" y="{ly + 4:.2f}" '
                     f'font-family="sans-serif" font-size="12">{escape(label)}</text>')
    parts.append("</svg>")
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(parts) + "\n")
