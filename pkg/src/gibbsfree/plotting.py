"""Self-rendered, byte-deterministic SVG line plots.

No timestamps, ids or float noise: coordinates are printed with two decimals,
so the same series always produce the same file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .errors import EmptySeries
from .io import atomic_write_text

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=170, top=40, bottom=50)
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


@dataclass(frozen=True)
class Series:
    label: str
    x: tuple
    y: tuple

    @classmethod
    def of(cls, label, x, y):
        x = tuple(float(v) for v in x)
        y = tuple(float(v) for v in y)
        if len(x) != len(y):
            raise ValueError(f"series {label!r}: x and y differ in length")
        return cls(label, x, y)


def _fmt(v):
    return f"{v:.2f}"


def _nice_ticks(lo, hi, n=5):
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 5, 10) if s * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    return [start + i * step for i in range(int((hi - start) / step + 1e-9) + 1)]


def _tick_label(v, log):
    if log:
        e = int(round(v))
        return f"1e{e}"
    return f"{v:.4g}"


def render_svg(series, kind="loglog", title="", xlabel="", ylabel="", notes=()):
    """Render line series to an SVG string.

    Parameters
    ----------
    series : sequence of Series
    kind : {"loglog", "linear"}
        On log axes, points with non-positive coordinates are dropped.
    notes : sequence of str
        Extra legend lines, e.g. fitted slopes.

    Raises
    ------
    EmptySeries
        If there is no series or no plottable point.
    """
    if kind not in ("loglog", "linear"):
        raise ValueError(f"unknown plot kind {kind!r}")
    log = kind == "loglog"
    curves = []
    for s in series:
        x = np.asarray(s.x, dtype=float)
        y = np.asarray(s.y, dtype=float)
        ok = np.isfinite(x) & np.isfinite(y)
        if log:
            ok &= (x > 0) & (y > 0)
            x, y = np.log10(np.where(ok, x, 1.0)), np.log10(np.where(ok, y, 1.0))
        curves.append((s.label, x[ok], y[ok]))
    if not curves or all(c[1].size == 0 for c in curves):
        raise EmptySeries("nothing to plot")

    xs = np.concatenate([c[1] for c in curves])
    ys = np.concatenate([c[2] for c in curves])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    if log:
        x0, x1 = math.floor(x0 * 2) / 2, math.ceil(x1 * 2) / 2
        y0, y1 = math.floor(y0), math.ceil(y1)

    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(v):
        return MARGIN["left"] + (v - x0) / (x1 - x0) * pw

    def py(v):
        return MARGIN["top"] + (y1 - v) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" '
        'fill="none" stroke="black"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH // 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')

    xt = [t for t in (range(math.ceil(x0), math.floor(x1) + 1) if log else _nice_ticks(x0, x1))]
    yt = [t for t in (range(int(y0), int(y1) + 1) if log else _nice_ticks(y0, y1))]
    for t in xt:
        X = _fmt(px(t))
        out.append(f'<line x1="{X}" y1="{MARGIN["top"] + ph}" x2="{X}" y2="{MARGIN["top"] + ph + 5}" stroke="black"/>')
        out.append(
            f'<text x="{X}" y="{MARGIN["top"] + ph + 18}" text-anchor="middle">{_tick_label(t, log)}</text>'
        )
    for t in yt:
        Y = _fmt(py(t))
        out.append(f'<line x1="{MARGIN["left"] - 5}" y1="{Y}" x2="{MARGIN["left"]}" y2="{Y}" stroke="black"/>')
        out.append(f'<text x="{MARGIN["left"] - 8}" y="{Y}" text-anchor="end" dy="4">{_tick_label(t, log)}</text>')
    if xlabel:
        out.append(
            f'<text x="{MARGIN["left"] + pw // 2}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>'
        )
    if ylabel:
        cy = MARGIN["top"] + ph // 2
        out.append(
            f'<text x="18" y="{cy}" text-anchor="middle" transform="rotate(-90 18 {cy})">{escape(ylabel)}</text>'
        )

    lx = WIDTH - MARGIN["right"] + 12
    ly = MARGIN["top"] + 10
    for i, (label, x, y) in enumerate(curves):
        color = PALETTE[i % len(PALETTE)]
        if x.size:
            pts = " ".join(f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in zip(x, y))
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly + 4}">{escape(label)}</text>')
        ly += 18
    for note in notes:
        out.append(f'<text x="{lx}" y="{ly + 4}" font-size="11">{escape(note)}</text>')
        ly += 16
    out.append("</svg>")
    return "\n".join(out) + "\n"


def plot(series, kind="loglog", path=None, **labels):
    """Render with :func:`render_svg` and optionally write atomically to ``path``."""
    svg = render_svg(series, kind, **labels)
    if path is not None:
        atomic_write_text(path, svg)
    return svg
