"""Dependency-free SVG output: line plots and heat maps.

CSV files are the contract; these plots are a convenience for eyeballing
results.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")
DASHES = ("", "6,3", "2,3", "8,3,2,3")

# Heat maps map error in [0, 0.5] linearly from white to dark red.
HEAT_DOMAIN = (0.0, 0.5)


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    return [round(start + i * step, 12) for i in range(int((hi - start) / step + 1e-9) + 1)]


def _svg(width: int, height: int, body: list[str]) -> str:
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'font-family="sans-serif" font-size="11">\n'
            f'<rect width="100%" height="100%" fill="white"/>\n' + "\n".join(body) + "\n</svg>\n")


def line_plot(series: dict[str, tuple], *, title: str = "", xlabel: str = "",
              ylabel: str = "", logx: bool = False, width: int = 640, height: int = 420) -> str:
    """``series`` maps a label to (x, y) or (x, y, style) with style 'line' or 'points'."""
    left, right, top, bottom = 60, 150, 30, 45
    pw, ph = width - left - right, height - top - bottom
    xs = np.concatenate([np.asarray(s[0], float) for s in series.values()])
    ys = np.concatenate([np.asarray(s[1], float) for s in series.values()])
    ok = np.isfinite(ys) & np.isfinite(xs)
    if logx:
        ok &= xs > 0
    if not ok.any():
        return _svg(width, height, [f'<text x="{left}" y="{top}">no finite data</text>'])
    fx = np.log10 if logx else (lambda v: np.asarray(v, float))
    x0, x1 = float(fx(xs[ok]).min()), float(fx(xs[ok]).max())
    y0, y1 = float(ys[ok].min()), float(ys[ok].max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    pad = 0.05 * (y1 - y0 or 1.0)
    y0, y1 = y0 - pad, y1 + pad

    def px(v):
        return left + (fx(v) - x0) / (x1 - x0) * pw

    def py(v):
        return top + (y1 - v) / (y1 - y0) * ph

    body = [f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for t in _ticks(y0, y1):
        body.append(f'<line x1="{left - 4}" y1="{py(t):.1f}" x2="{left}" y2="{py(t):.1f}" stroke="black"/>'
                    f'<text x="{left - 6}" y="{py(t) + 4:.1f}" text-anchor="end">{t:g}</text>')
    xt = [10 ** e for e in range(math.floor(x0), math.ceil(x1) + 1)] if logx else _ticks(x0, x1)
    for t in xt:
        if logx and not x0 - 1e-9 <= math.log10(t) <= x1 + 1e-9:
            continue
        X = px(t)
        body.append(f'<line x1="{X:.1f}" y1="{top + ph}" x2="{X:.1f}" y2="{top + ph + 4}" stroke="black"/>'
                    f'<text x="{X:.1f}" y="{top + ph + 16}" text-anchor="middle">{t:g}</text>')
    for i, (label, s) in enumerate(series.items()):
        x, y = np.asarray(s[0], float), np.asarray(s[1], float)
        style = s[2] if len(s) > 2 else "line"
        color = PALETTE[i % len(PALETTE)]
        keep = np.isfinite(x) & np.isfinite(y) & ((x > 0) if logx else True)
        pts = [(px(a), py(b)) for a, b in zip(x[keep], y[keep])]
        if style == "points":
            body += [f'<circle cx="{a:.1f}" cy="{b:.1f}" r="2.5" fill="{color}"/>' for a, b in pts]
        elif pts:
            dash = DASHES[(i // len(PALETTE)) % len(DASHES)]
            d = " ".join(f"{a:.1f},{b:.1f}" for a, b in pts)
            extra = f' stroke-dasharray="{dash}"' if dash else ""
            body.append(f'<polyline points="{d}" fill="none" stroke="{color}" stroke-width="1.5"{extra}/>')
        ly = top + 14 * i + 8
        body.append(f'<rect x="{left + pw + 10}" y="{ly - 6}" width="12" height="3" fill="{color}"/>'
                    f'<text x="{left + pw + 26}" y="{ly}">{escape(label)}</text>')
    body.append(f'<text x="{left + pw / 2}" y="{height - 8}" text-anchor="middle">{escape(xlabel)}</text>')
    body.append(f'<text x="14" y="{top + ph / 2}" text-anchor="middle" '
                f'transform="rotate(-90 14 {top + ph / 2})">{escape(ylabel)}</text>')
    body.append(f'<text x="{left + pw / 2}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>')
    return _svg(width, height, body)


def heat_color(v: float) -> str:
    """White at 0, dark red at 0.5 (clipped); grey for NaN."""
    if not np.isfinite(v):
        return "#cccccc"
    t = min(max((v - HEAT_DOMAIN[0]) / (HEAT_DOMAIN[1] - HEAT_DOMAIN[0]), 0.0), 1.0)
    r = round(255 - 115 * t)
    g = b = round(255 * (1 - t))
    return f"#{r:02x}{g:02x}{b:02x}"


def heatmap(matrix, row_labels, col_labels, *, title: str = "", xlabel: str = "p",
            ylabel: str = "rho", cell: int = 28) -> str:
    M = np.asarray(matrix, float)
    left, top = 60, 36
    w = left + cell * M.shape[1] + 90
    h = top + cell * M.shape[0] + 50
    body = [f'<text x="{left}" y="20" font-size="13">{escape(title)}</text>']
    for i, rl in enumerate(row_labels):
        y = top + i * cell
        body.append(f'<text x="{left - 6}" y="{y + cell / 2 + 4}" text-anchor="end">{rl:g}</text>')
        for j in range(M.shape[1]):
            v = M[i, j]
            body.append(f'<rect x="{left + j * cell}" y="{y}" width="{cell}" height="{cell}" '
                        f'fill="{heat_color(v)}"><title>{v:.4f}</title></rect>')
    for j, cl in enumerate(col_labels):
        body.append(f'<text x="{left + j * cell + cell / 2}" y="{top + M.shape[0] * cell + 14}" '
                    f'text-anchor="middle" font-size="9">{cl:g}</text>')
    body.append(f'<text x="{left + M.shape[1] * cell / 2}" y="{h - 8}" text-anchor="middle">{escape(xlabel)}</text>')
    body.append(f'<text x="14" y="{top + M.shape[0] * cell / 2}" text-anchor="middle">{escape(ylabel)}</text>')
    lx = left + M.shape[1] * cell + 20
    for k in range(11):
        v = HEAT_DOMAIN[0] + k * (HEAT_DOMAIN[1] - HEAT_DOMAIN[0]) / 10
        body.append(f'<rect x="{lx}" y="{top + k * 12}" width="14" height="12" fill="{heat_color(v)}"/>')
        if k % 5 == 0:
            body.append(f'<text x="{lx + 18}" y="{top + k * 12 + 10}">{v:g}</text>')
    return _svg(w, h, body)
