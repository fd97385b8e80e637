"""Minimal self-contained SVG line charts."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 400
MARGIN = dict(left=60, right=130, top=40, bottom=50)
COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728")


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def line_chart(
    x,
    series: dict[str, list],
    *,
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    log_x: bool = False,
    vline: float | None = None,
    vline_label: str = "",
) -> str:
    """Render ``series`` against ``x``; ``None`` values break a curve.

    ``vline`` draws a black dashed vertical line at that x position.
    """
    xs = [float(v) for v in x]
    if not xs:
        raise ValueError("nothing to plot")
    tx = (lambda v: math.log10(v)) if log_x else (lambda v: v)
    x_lo, x_hi = tx(min(xs)), tx(max(xs))
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1, x_hi + 1
    ys = [float(v) for s in series.values() for v in s if v is not None]
    y_lo, y_hi = (min(ys), max(ys)) if ys else (0.0, 1.0)
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    left, top = MARGIN["left"], MARGIN["top"]
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(v):
        return left + (tx(v) - x_lo) / (x_hi - x_lo) * pw

    def py(v):
        return top + (y_hi - v) / (y_hi - y_lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')
    for yv in _ticks(y_lo, y_hi):
        out.append(
            f'<text x="{left - 6}" y="{py(yv) + 4:.2f}" text-anchor="end">{yv:.3g}</text>'
        )
    for xv in xs:
        out.append(
            f'<text x="{px(xv):.2f}" y="{top + ph + 16}" text-anchor="middle">{xv:g}</text>'
        )
    if xlabel:
        out.append(f'<text x="{left + pw / 2:.1f}" y="{HEIGHT - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    if ylabel:
        out.append(
            f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" '
            f'transform="rotate(-90 16 {top + ph / 2:.1f})">{escape(ylabel)}</text>'
        )
    for i, (name, values) in enumerate(series.items()):
        color = COLORS[i % len(COLORS)]
        d, pen_down = [], False
        for xv, yv in zip(xs, values):
            if yv is None:
                pen_down = False
                continue
            d.append(f'{"L" if pen_down else "M"}{px(xv):.2f},{py(float(yv)):.2f}')
            pen_down = True
        out.append(
            f'<path class="series" data-name="{escape(name)}" d="{" ".join(d)}" '
            f'fill="none" stroke="{color}" stroke-width="2"/>'
        )
        ly = top + 14 + 18 * i
        out.append(f'<line x1="{left + pw + 10}" y1="{ly}" x2="{left + pw + 30}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 35}" y="{ly + 4}">{escape(name)}</text>')
    if vline is not None:
        vx = px(float(vline))
        out.append(
            f'<line class="threshold" x1="{vx:.2f}" y1="{top}" x2="{vx:.2f}" y2="{top + ph}" '
            f'stroke="black" stroke-dasharray="6,4" stroke-width="1.5"/>'
        )
        if vline_label:
            out.append(f'<text x="{vx + 4:.2f}" y="{top + 12}">{escape(vline_label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
