"""CSV and SVG serialisation of curve sets sharing one abscissa."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

ABSCISSA = "t_over_tau_d"
_COLOURS = ("#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d35400", "#555555")


def fmt(value):
    """17 significant digits, the shortest width that round-trips any double."""
    return format(float(value), ".17g")


def _common_abscissa(curves):
    if not curves:
        raise ValueError("no curves to write")
    x = curves[0].abscissa
    for c in curves[1:]:
        if c.abscissa.shape != x.shape or not np.array_equal(c.abscissa, x):
            raise ValueError("curves must share one abscissa")
    return x


def to_csv(curves, header=None):
    """Render ``# key=value`` lines, a column header and one row per sample."""
    x = _common_abscissa(curves)
    lines = [f"# {key}={value}" for key, value in (header or {}).items()]
    lines.append(",".join([ABSCISSA] + [c.label for c in curves]))
    columns = [x] + [c.values for c in curves]
    for row in zip(*columns):
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def read_csv(text):
    """Parse :func:`to_csv` output back into ``(header, labels, table)``."""
    header, rows, labels = {}, [], None
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            header[key] = value
        elif labels is None:
            labels = line.split(",")
        elif line:
            rows.append([float(v) for v in line.split(",")])
    return header, labels, np.array(rows)


def _ticks(lo, hi, n=5):
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / n
    step = 10 ** math.floor(math.log10(raw))
    for mult in (1, 2, 5, 10):
        if raw <= mult * step:
            step *= mult
            break
    start = math.ceil(lo / step) * step
    return [start + i * step for i in range(int((hi - start) / step + 1e-9) + 1)]


def to_svg(curves, title="", xlabel=ABSCISSA, ylabel="", width=640, height=420):
    """Minimal line plot with axes, ticks and a legend."""
    x = _common_abscissa(curves)
    ys = np.concatenate([c.values for c in curves])
    ymin, ymax = float(np.min(ys)), float(np.max(ys))
    if ymax == ymin:
        ymin, ymax = ymin - 1, ymax + 1
    pad = 0.05 * (ymax - ymin)
    ymin, ymax = ymin - pad, ymax + pad
    xmin, xmax = float(x[0]), float(x[-1])
    left, right, top, bottom = 70, 20, 40, 50
    pw, ph = width - left - right, height - top - bottom

    def sx(v):
        return left + (v - xmin) / (xmax - xmin) * pw

    def sy(v):
        return top + (ymax - v) / (ymax - ymin) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{width / 2}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{left + pw / 2}" y="{height - 10}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="15" y="{top + ph / 2}" text-anchor="middle" '
        f'transform="rotate(-90 15 {top + ph / 2})">{escape(ylabel)}</text>',
    ]
    for t in _ticks(xmin, xmax):
        px = sx(t)
        out.append(f'<line x1="{px:.2f}" y1="{top + ph}" x2="{px:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px:.2f}" y="{top + ph + 18}" text-anchor="middle">{t:.4g}</text>')
    for t in _ticks(ymin, ymax):
        py = sy(t)
        out.append(f'<line x1="{left - 5}" y1="{py:.2f}" x2="{left}" y2="{py:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{py + 4:.2f}" text-anchor="end">{t:.4g}</text>')
    for i, c in enumerate(curves):
        colour = _COLOURS[i % len(_COLOURS)]
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, c.values))
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{pts}"/>')
        ly = top + 15 + 16 * i
        out.append(f'<line x1="{left + pw - 150}" y1="{ly}" x2="{left + pw - 125}" y2="{ly}" stroke="{colour}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw - 120}" y="{ly + 4}">{escape(c.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
