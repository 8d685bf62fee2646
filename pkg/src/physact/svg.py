"""Minimal self-contained SVG 1.1 line plots."""
from __future__ import annotations

from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#2ca02c", "#d62728", "#7f7f7f", "#ff7f0e", "#9467bd")

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 40, 50


@dataclass
class Series:
    label: str
    x: np.ndarray
    y: np.ndarray
    color: str | None = None
    markers: bool = False


def _ticks(lo, hi, n=5):
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _fmt(v):
    return f"{v:.3g}"


def emit_svg(series: list[Series], title: str = "", xlabel: str = "", ylabel: str = "",
             log_y: bool = False) -> tuple[str, list[str]]:
    """Render ``series`` as one panel; returns ``(svg_text, warnings)``.

    Lines become ``<polyline>`` elements, marker series ``<circle>`` groups.
    With ``log_y`` non-positive values are clamped to the smallest positive
    value in the panel and a warning is returned.
    """
    if not series:
        raise ValueError("no series to plot")
    warnings = []
    prepared = []
    for s in series:
        x = np.asarray(s.x, dtype=float)
        y = np.asarray(s.y, dtype=float)
        if x.size == 0 or x.shape != y.shape:
            raise ValueError(f"series {s.label!r} is empty or ragged")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError(f"series {s.label!r} has non-finite values")
        prepared.append((s, x, y))

    if log_y:
        positive = np.concatenate([y[y > 0] for _, _, y in prepared])
        if positive.size == 0:
            raise ValueError("log scale needs at least one positive value")
        floor = positive.min()
        clamped = []
        for s, x, y in prepared:
            if np.any(y <= 0):
                warnings.append(f"series {s.label!r}: {int(np.sum(y <= 0))} non-positive values clamped to {floor!r} on log axis")
                y = np.where(y > 0, y, floor)
            clamped.append((s, x, np.log10(y)))
        prepared = clamped

    xs = np.concatenate([x for _, x, _ in prepared])
    ys = np.concatenate([y for _, _, y in prepared])
    x0, x1 = xs.min(), xs.max()
    y0, y1 = ys.min(), ys.max()
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(v):
        return LEFT + (v - x0) / (x1 - x0) * pw

    def py(v):
        return TOP + (1 - (v - y0) / (y1 - y0)) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<path d="M{LEFT},{TOP} V{TOP + ph} H{LEFT + pw}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        X = px(t)
        out.append(f'<path d="M{X:.2f},{TOP + ph} v5" stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{TOP + ph + 18}" text-anchor="middle">{_fmt(t)}</text>')
    for t in _ticks(y0, y1):
        Y = py(t)
        label = _fmt(10**t) if log_y else _fmt(t)
        out.append(f'<path d="M{LEFT},{Y:.2f} h-5" stroke="black"/>')
        out.append(f'<text x="{LEFT - 8}" y="{Y + 4:.2f}" text-anchor="end">{label}</text>')
    out.append(f'<text x="{LEFT + pw / 2}" y="{HEIGHT - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    ytitle = f"{ylabel} (log10 axis)" if log_y and ylabel else ylabel
    out.append(f'<text x="16" y="{TOP + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 16 {TOP + ph / 2})">{escape(ytitle)}</text>')

    for i, (s, x, y) in enumerate(prepared):
        color = s.color or PALETTE[i % len(PALETTE)]
        if s.markers:
            out.append(f'<g fill="{color}">')
            out.extend(f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="3"/>' for a, b in zip(x, y))
            out.append('</g>')
        else:
            pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
            out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')

    out.append('<g class="legend">')
    for i, (s, _, _) in enumerate(prepared):
        color = s.color or PALETTE[i % len(PALETTE)]
        ly = TOP + 10 + 16 * i
        lx = LEFT + pw - 150
        out.append(f'<rect x="{lx}" y="{ly - 8}" width="12" height="8" fill="{color}"/>')
        out.append(f'<text x="{lx + 18}" y="{ly}">{escape(s.label)}</text>')
    out.append('</g>')
    out.append('</svg>')
    return "\n".join(out) + "\n", warnings
