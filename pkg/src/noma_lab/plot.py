"""Tiny static SVG line plotter (no plotting dependency)."""

import math
from xml.sax.saxutils import escape

COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"]


def _ticks(lo, hi, count=5):
    if hi <= lo:
        return [lo]
    step = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(step))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= step), default=step)
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-12 * abs(hi or 1):
        out.append(round(v, 12))
        v += step
    return out


def line_plot(series, xlabel="", ylabel="", title="", logy=False, width=640, height=420):
    """Render ``series`` = [(label, xs, ys), ...] as an SVG string.

    Non-positive y values are dropped when ``logy`` is set.
    """
    left, right, top, bottom = 70, 150, 30, 50
    pts = []
    for label, xs, ys in series:
        clean = [(float(x), float(y)) for x, y in zip(xs, ys)
                 if math.isfinite(y) and (not logy or y > 0)]
        pts.append((label, clean))
    allx = [x for _, c in pts for x, _ in c] or [0.0, 1.0]
    ally = [y for _, c in pts for _, y in c] or [1.0]
    fy = (lambda v: math.log10(v)) if logy else (lambda v: v)
    x0, x1 = min(allx), max(allx)
    y0, y1 = min(fy(y) for y in ally), max(fy(y) for y in ally)
    if logy:
        y0, y1 = math.floor(y0), math.ceil(y1)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1
    pw, ph = width - left - right, height - top - bottom
    sx = lambda x: left + (x - x0) / (x1 - x0) * pw
    sy = lambda y: top + (1 - (fy(y) - y0) / (y1 - y0)) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'font-family="sans-serif" font-size="11">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for t in _ticks(x0, x1):
        X = sx(t)
        out.append(f'<line x1="{X:.1f}" y1="{top}" x2="{X:.1f}" y2="{top + ph}" stroke="#ddd"/>')
        out.append(f'<text x="{X:.1f}" y="{top + ph + 15}" text-anchor="middle">{t:g}</text>')
    yt = range(int(y0), int(y1) + 1) if logy else _ticks(y0, y1)
    for t in yt:
        Y = top + (1 - (t - y0) / (y1 - y0)) * ph
        lab = f"1e{t}" if logy else f"{t:g}"
        out.append(f'<line x1="{left}" y1="{Y:.1f}" x2="{left + pw}" y2="{Y:.1f}" stroke="#ddd"/>')
        out.append(f'<text x="{left - 5}" y="{Y + 4:.1f}" text-anchor="end">{lab}</text>')
    for k, (label, c) in enumerate(pts):
        col = COLORS[k % len(COLORS)]
        if c:
            path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in c)
            out.append(f'<polyline fill="none" stroke="{col}" stroke-width="1.5" points="{path}"/>')
        ly = top + 15 + 16 * k
        out.append(f'<line x1="{left + pw + 10}" y1="{ly - 4}" x2="{left + pw + 30}" '
                   f'y2="{ly - 4}" stroke="{col}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 35}" y="{ly}">{escape(str(label))}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{height - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="15" y="{top + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 15 {top + ph / 2})">{escape(ylabel)}</text>')
    if title:
        out.append(f'<text x="{left + pw / 2}" y="18" text-anchor="middle">{escape(title)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, series, **kw):
    with open(path, "w") as fh:
        fh.write(line_plot(series, **kw))
