"""Deterministic SVG rendering of traces, eigenvalue curves, and projections.

All documents are SVG 1.1 with a fixed 800x800 view box, a fixed color
palette, and fixed-precision coordinates, so rendering the same inputs
yields byte-identical files.
"""

from __future__ import annotations

import math

import numpy as np

from .model import Gaussian
from .project import ellipse_outline
from .sensitivity import EigenCurves, FactorTrace

SIZE = 800
PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)

_HEADER = (
    '<?xml version="1.0" encoding="UTF-8"?>\n'
    '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
    f'width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">'
)


def _fmt(v: float) -> str:
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


def _poly(points, color: str, width: float = 1.5, dash: str | None = None,
          opacity: float | None = None) -> str:
    coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
    extra = f' stroke-dasharray="{dash}"' if dash else ""
    if opacity is not None:
        extra += f' stroke-opacity="{_fmt(opacity)}"'
    return (
        f'<polyline fill="none" stroke="{color}" stroke-width="{_fmt(width)}"'
        f'{extra} points="{coords}"/>'
    )


def _polygon(points, color: str, opacity: float) -> str:
    coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
    return f'<polygon fill="{color}" fill-opacity="{_fmt(opacity)}" points="{coords}"/>'


def _dot(x: float, y: float, color: str, r: float = 3.0) -> str:
    return f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(r)}" fill="{color}"/>'


def _text(x: float, y: float, content: str, color: str = "#333333", size: int = 14) -> str:
    return (
        f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-family="sans-serif" '
        f'font-size="{size}" fill="{color}">{content}</text>'
    )


def _arrowhead(tip, prev, color: str) -> str:
    dx, dy = tip[0] - prev[0], tip[1] - prev[1]
    norm = math.hypot(dx, dy)
    if norm == 0.0:
        return ""
    ux, uy = dx / norm, dy / norm
    px, py = -uy, ux
    base_x, base_y = tip[0] - 10.0 * ux, tip[1] - 10.0 * uy
    pts = [
        tip,
        (base_x + 4.0 * px, base_y + 4.0 * py),
        (base_x - 4.0 * px, base_y - 4.0 * py),
    ]
    coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
    return f'<polygon fill="{color}" points="{coords}"/>'


def render_traces_svg(traces: list[FactorTrace], dim_names: tuple[str, ...]) -> str:
    """Factor traces on the unit circle, both orientations per axis.

    The area swept on the interpolation side (s in [0, 1]) is shaded; an
    arrowhead marks the trace end at the uncertainty limit.  Traces that
    never move (identical models across the sweep) collapse to a dot.
    """
    if not traces:
        raise ValueError("no traces to render")
    if traces[0].points.shape[1] != 2:
        raise ValueError("trace rendering is defined for q = 2; sweep with q = 2")
    cx = cy = SIZE / 2.0
    radius = 320.0

    def to_px(p):
        return cx + radius * p[0], cy - radius * p[1]

    parts = [_HEADER]
    parts.append(f'<rect width="{SIZE}" height="{SIZE}" fill="#ffffff"/>')
    parts.append(
        f'<line x1="{_fmt(cx - radius)}" y1="{_fmt(cy)}" x2="{_fmt(cx + radius)}" '
        f'y2="{_fmt(cy)}" stroke="#dddddd" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{_fmt(cx)}" y1="{_fmt(cy - radius)}" x2="{_fmt(cx)}" '
        f'y2="{_fmt(cy + radius)}" stroke="#dddddd" stroke-width="1"/>'
    )
    parts.append(
        f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(radius)}" '
        f'fill="none" stroke="#888888" stroke-width="1"/>'
    )

    for trace in traces:
        color = PALETTE[trace.axis_index % len(PALETTE)]
        pts = trace.points
        moved = float(np.abs(pts - pts[0]).max()) > 1e-12
        for sign in (1.0, -1.0):
            oriented = sign * pts
            px = [to_px(p) for p in oriented]
            if not moved:
                parts.append(_dot(*px[0], color, r=4.0))
                continue
            split = max(trace.region_split, 1)
            shade = [(cx, cy)] + px[:split]
            if len(shade) >= 3:
                parts.append(_polygon(shade, color, opacity=0.15))
            dash = None if sign > 0 else "5 4"
            parts.append(_poly(px, color, width=1.8, dash=dash))
            tip = px[-1]
            prev = next((p for p in reversed(px[:-1]) if p != tip), None)
            if prev is not None:
                parts.append(_arrowhead(tip, prev, color))
        label_px = to_px(pts[0])
        parts.append(_text(label_px[0] + 6.0, label_px[1] - 6.0,
                           dim_names[trace.axis_index], color=color))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_eigencurves_svg(curves: EigenCurves) -> str:
    """Eigenvalue share of total variance per component over the sweep.

    Shares (lambda_i / sum lambda) keep the diverging raw eigenvalues
    comparable across the whole s range including the limit step.  Flagged
    avoided crossings appear as dashed vertical markers.
    """
    n_steps, d = curves.values.shape
    left, right, top, bottom = 70.0, 30.0, 40.0, 60.0
    plot_w = SIZE - left - right
    plot_h = SIZE - top - bottom

    totals = curves.values.sum(axis=1)
    safe = np.where(totals > 0.0, totals, 1.0)
    shares = curves.values / safe[:, None]

    def x_at(k: int) -> float:
        return left + plot_w * (k / (n_steps - 1))

    def y_at(v: float) -> float:
        return top + plot_h * (1.0 - v)

    parts = [_HEADER]
    parts.append(f'<rect width="{SIZE}" height="{SIZE}" fill="#ffffff"/>')
    parts.append(
        f'<rect x="{_fmt(left)}" y="{_fmt(top)}" width="{_fmt(plot_w)}" '
        f'height="{_fmt(plot_h)}" fill="none" stroke="#888888" stroke-width="1"/>'
    )
    for k, _pair in curves.avoided_crossing_flags:
        x = x_at(k)
        parts.append(
            f'<line x1="{_fmt(x)}" y1="{_fmt(top)}" x2="{_fmt(x)}" '
            f'y2="{_fmt(top + plot_h)}" stroke="#aaaaaa" stroke-width="1" '
            f'stroke-dasharray="4 4"/>'
        )
    for i in range(d):
        color = PALETTE[i % len(PALETTE)]
        pts = [(x_at(k), y_at(shares[k, i])) for k in range(n_steps)]
        parts.append(_poly(pts, color, width=1.8))
        parts.append(_text(left + 8.0, top + 18.0 + 16.0 * i, f"component {i + 1}", color=color))
    # s=1 sits at t=0.5 exactly, independent of the grid parity.
    ticks = [(left, "s=0"), (left + plot_w * 0.5, "s=1"), (left + plot_w, "s=inf")]
    for x, label in ticks:
        parts.append(
            f'<line x1="{_fmt(x)}" y1="{_fmt(top + plot_h)}" x2="{_fmt(x)}" '
            f'y2="{_fmt(top + plot_h + 6.0)}" stroke="#333333" stroke-width="1"/>'
        )
        parts.append(_text(x - 14.0, top + plot_h + 24.0, label))
    parts.append(_text(left, top - 12.0, "share of total variance"))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_projection_svg(entries: list[tuple[Gaussian, str]]) -> str:
    """Projected items in component space: means plus 1 and 2 sigma ellipses.

    Items are colored by label (first-appearance order); items with zero
    covariance render as a plain dot.
    """
    if not entries:
        raise ValueError("nothing to render")
    for g, _label in entries:
        if g.dim != 2:
            raise ValueError("projection rendering is defined for q = 2")

    outlines: list[tuple[int, float, np.ndarray]] = []  # (entry, k_sigma, points)
    bounds_pts = [g.mean() for g, _ in entries]
    for i, (g, _label) in enumerate(entries):
        if float(np.abs(g.cov()).max()) == 0.0:
            continue
        for k_sigma in (1.0, 2.0):
            outline = ellipse_outline(g, k_sigma)
            outlines.append((i, k_sigma, outline))
            bounds_pts.append(outline)
    stacked = np.vstack([np.atleast_2d(p) for p in bounds_pts])
    lo = stacked.min(axis=0)
    hi = stacked.max(axis=0)
    span = np.maximum(hi - lo, 1e-12)
    margin = 70.0
    scale = min((SIZE - 2 * margin) / span[0], (SIZE - 2 * margin) / span[1])
    mid = (lo + hi) / 2.0

    def to_px(p):
        return SIZE / 2.0 + (p[0] - mid[0]) * scale, SIZE / 2.0 - (p[1] - mid[1]) * scale

    color_of: dict[str, str] = {}
    for _, label in entries:
        if label not in color_of:
            color_of[label] = PALETTE[len(color_of) % len(PALETTE)]

    parts = [_HEADER]
    parts.append(f'<rect width="{SIZE}" height="{SIZE}" fill="#ffffff"/>')
    for i, k_sigma, outline in outlines:
        color = color_of[entries[i][1]]
        px = [to_px(p) for p in outline]
        parts.append(_poly(px, color, width=1.5, opacity=0.9 if k_sigma == 1.0 else 0.45))
    for g, label in entries:
        x, y = to_px(g.mean())
        parts.append(_dot(x, y, color_of[label], r=3.5))
    for j, (label, color) in enumerate(color_of.items()):
        parts.append(_dot(24.0, 24.0 + 18.0 * j, color, r=4.0))
        parts.append(_text(34.0, 28.0 + 18.0 * j, label))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
