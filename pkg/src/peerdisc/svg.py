"""Minimal SVG line charts for sweep results (no plotting dependency)."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

__all__ = ["render_sweep", "nice_ticks"]

WIDTH, HEIGHT = 720, 480
LEFT, RIGHT, TOP, BOTTOM = 70, 190, 40, 60
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2",
           "#17becf", "#7f7f7f", "#bcbd22")


def nice_ticks(lo, hi, n=6):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 2.5, 5, 10) if s * mag >= raw), default=raw)
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def _finite(v):
    return v is not None and isinstance(v, (int, float)) and math.isfinite(v)


def render_sweep(result, path, title="", xlabel=None, ylabel="E{S}", logx=False):
    """Write ``result`` (a :class:`~peerdisc.sweep.SweepResult`) as an SVG chart.

    Analysis: solid lines. Bounds: dashed. Monte Carlo: circles with
    +-2 stderr whiskers. Design markers: filled squares.
    """
    var = result.variable
    xlabel = xlabel or var
    series = {label: [r for r in result.rows if r["series"] == label] for label in result.series}

    def xval(v):
        return math.log10(v) if logx else v

    xs, ys = [], []
    for rows in series.values():
        for r in rows:
            if _finite(r.get(var)) and (not logx or r[var] > 0):
                xs.append(xval(r[var]))
            for key in ("es_closed", "es_general", "bound_lower", "bound_upper", "mc_mean"):
                if _finite(r.get(key)):
                    ys.append(r[key])
    for m in result.markers:
        if _finite(m["es"]):
            ys.append(m["es"])
    if not xs:
        xs = [0.0, 1.0]
    if not ys:
        ys = [0.0, 1.0]
    x_lo, x_hi = min(xs), max(xs)
    if x_hi == x_lo:
        x_hi = x_lo + 1
    y_lo, y_hi = min(0.0, min(ys)), max(ys) * 1.05 or 1.0
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(x):
        return LEFT + (xval(x) - x_lo) / (x_hi - x_lo) * pw

    def py(y):
        return TOP + ph - (y - y_lo) / (y_hi - y_lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'font-family="sans-serif" font-size="12">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{LEFT + pw / 2}" y="22" text-anchor="middle" font-size="14">'
        f"{escape(title)}</text>",
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in nice_ticks(y_lo, y_hi):
        y = py(t)
        out.append(f'<line x1="{LEFT}" y1="{y:.1f}" x2="{LEFT + pw}" y2="{y:.1f}" '
                   f'stroke="#ddd"/>')
        out.append(f'<text x="{LEFT - 6}" y="{y + 4:.1f}" text-anchor="end">{t:g}</text>')
    for t in nice_ticks(x_lo, x_hi):
        xv = 10 ** t if logx else t
        x = LEFT + (t - x_lo) / (x_hi - x_lo) * pw
        out.append(f'<line x1="{x:.1f}" y1="{TOP + ph}" x2="{x:.1f}" y2="{TOP + ph + 5}" '
                   f'stroke="black"/>')
        out.append(f'<text x="{x:.1f}" y="{TOP + ph + 18}" text-anchor="middle">{xv:g}</text>')
    out.append(f'<text x="{LEFT + pw / 2}" y="{HEIGHT - 15}" text-anchor="middle">'
               f"{escape(xlabel)}</text>")
    out.append(f'<text transform="translate(18,{TOP + ph / 2}) rotate(-90)" '
               f'text-anchor="middle">{escape(ylabel)}</text>')

    for i, (label, rows) in enumerate(series.items()):
        color = PALETTE[i % len(PALETTE)]
        for key, dash in (("analysis", ""), ("bound_lower", "6,4"), ("bound_upper", "2,3")):
            pts = []
            for r in rows:
                y = (r.get("es_closed") if _finite(r.get("es_closed")) else r.get("es_general")) \
                    if key == "analysis" else r.get(key)
                if _finite(y) and _finite(r.get(var)):
                    pts.append(f"{px(r[var]):.1f},{py(y):.1f}")
            if len(pts) > 1:
                style = f' stroke-dasharray="{dash}"' if dash else ""
                out.append(f'<polyline points="{" ".join(pts)}" fill="none" stroke="{color}" '
                           f'stroke-width="1.6"{style}/>')
        for r in rows:
            if _finite(r.get("mc_mean")):
                x, y = px(r[var]), py(r["mc_mean"])
                if _finite(r.get("mc_stderr")):
                    e = 2 * r["mc_stderr"]
                    out.append(f'<line x1="{x:.1f}" y1="{py(r["mc_mean"] - e):.1f}" '
                               f'x2="{x:.1f}" y2="{py(r["mc_mean"] + e):.1f}" stroke="{color}"/>')
                out.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="3.5" fill="white" '
                           f'stroke="{color}"/>')
        for m in result.markers:
            if m["series"] == label and _finite(m["es"]) and _finite(m["x"]):
                out.append(f'<rect x="{px(m["x"]) - 4:.1f}" y="{py(m["es"]) - 4:.1f}" '
                           f'width="8" height="8" fill="{color}"/>')
        ly = TOP + 10 + 18 * i
        lx = LEFT + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 22}" y2="{ly}" stroke="{color}" '
                   f'stroke-width="2"/>')
        out.append(f'<text x="{lx + 28}" y="{ly + 4}">{escape(label)}</text>')
    out.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")
