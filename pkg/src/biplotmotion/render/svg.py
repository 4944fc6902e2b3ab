"""Deterministic SVG output for frames and facet sheets."""

from __future__ import annotations

import math
from collections.abc import Sequence
from xml.sax.saxutils import escape

from ..animation import Frame, pause_frame
from ..pca import BiplotState
from .style import RenderStyle, Viewport, states_viewport

LEGEND_WIDTH = 130


def _f(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def _attr(v) -> str:
    return escape(str(v), {'"': "&quot;"})


def _header(width: float, height: float, style: RenderStyle) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(width)}" height="{_f(height)}" '
        f'viewBox="0 0 {_f(width)} {_f(height)}" font-family="sans-serif">',
        "<defs>",
        f'<marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="6" markerHeight="6" '
        f'orient="auto-start-reverse"><path d="M0,0 L10,5 L0,10 z" fill="{style.vector_color}"/></marker>',
        "</defs>",
        f'<rect class="background" x="0" y="0" width="{_f(width)}" height="{_f(height)}" '
        f'fill="{style.background}"/>',
    ]


def _circle(x, y, r, color, opacity=None, cls="sample", group=None) -> str:
    op = "" if opacity is None else f' fill-opacity="{opacity:.4f}"'
    g = "" if group is None else f' data-group="{_attr(group)}"'
    return f'<circle class="{cls}"{g} cx="{_f(x)}" cy="{_f(y)}" r="{_f(r)}" fill="{color}"{op}/>'


def frame_body(frame: Frame, style: RenderStyle, viewport: Viewport, colors: dict[str, str],
               caption: str | None = None) -> list[str]:
    """Panel content in local coordinates (0, 0, width, height)."""
    m = style.margin
    to_px = viewport.mapper(m, m, style.width - 2 * m, style.height - 2 * m)
    out = []

    out.append('<g class="axes" stroke="#cccccc" stroke-width="0.5">')
    x0, y0 = to_px(0.0, 0.0)
    xa, _ = to_px(viewport.xmin, 0.0)
    xb, _ = to_px(viewport.xmax, 0.0)
    _, ya = to_px(0.0, viewport.ymin)
    _, yb = to_px(0.0, viewport.ymax)
    out.append(f'<line x1="{_f(xa)}" y1="{_f(y0)}" x2="{_f(xb)}" y2="{_f(y0)}"/>')
    out.append(f'<line x1="{_f(x0)}" y1="{_f(ya)}" x2="{_f(x0)}" y2="{_f(yb)}"/>')
    out.append("</g>")

    out.append('<g class="shadows">')
    for sh in frame.shadows:
        for (x, y), g in zip(sh.points, sh.groups):
            px, py = to_px(x, y)
            out.append(_circle(px, py, style.point_radius, colors[g], sh.opacity, "shadow", g))
    out.append("</g>")

    drawn_as_points: set[str] = set()
    out.append('<g class="hulls">')
    if frame.hulls is not None:
        for h in frame.hulls:
            if h.passthrough:
                drawn_as_points.add(h.group)
                continue
            d = " ".join(("M" if i == 0 else "L") + f"{_f(px)},{_f(py)}"
                         for i, (px, py) in enumerate(to_px(x, y) for x, y in h.vertices))
            col = colors[h.group]
            out.append(f'<path class="hull" data-group="{_attr(h.group)}" d="{d} Z" fill="{col}" '
                       f'fill-opacity="{style.hull_opacity:.4f}" stroke="{col}" stroke-width="1.2"/>')
    out.append("</g>")

    out.append('<g class="samples">')
    for (x, y), g in zip(frame.sample_points, frame.groups):
        if frame.hulls is not None and g not in drawn_as_points:
            continue
        px, py = to_px(x, y)
        out.append(_circle(px, py, style.point_radius, colors[g], group=g))
    out.append("</g>")

    out.append(f'<g class="vectors" stroke="{style.vector_color}" fill="{style.vector_color}">')
    for (x, y), name in zip(frame.variable_vectors, frame.variable_names):
        px, py = to_px(x, y)
        out.append(f'<line x1="{_f(x0)}" y1="{_f(y0)}" x2="{_f(px)}" y2="{_f(py)}" stroke-width="1.2" '
                   'marker-end="url(#arrow)"/>')
        ang = math.atan2(y, x)
        lx, ly = px + 8 * math.cos(ang), py - 8 * math.sin(ang)
        anchor = "start" if math.cos(ang) >= 0 else "end"
        out.append(f'<text class="vector-label" x="{_f(lx)}" y="{_f(ly)}" text-anchor="{anchor}" '
                   f'stroke="none" font-size="{style.label_font_size:g}">{escape(name)}</text>')
    out.append("</g>")

    label = caption if caption is not None else frame.level
    out.append(f'<text class="level" x="{_f(style.width / 2)}" y="{_f(m * 0.6)}" text-anchor="middle" '
               f'font-size="{style.label_font_size * 1.4:g}">{escape(label)}</text>')
    return out


def legend(groups: Sequence[str], colors: dict[str, str], style: RenderStyle, x: float) -> list[str]:
    out = ['<g class="legend">']
    for i, g in enumerate(groups):
        y = style.margin + i * (style.label_font_size + 8)
        out.append(f'<rect class="legend-key" data-group="{_attr(g)}" x="{_f(x)}" y="{_f(y)}" '
                   f'width="10" height="10" fill="{colors[g]}"/>')
        out.append(f'<text x="{_f(x + 16)}" y="{_f(y + 9)}" font-size="{style.label_font_size:g}">'
                   f"{escape(g)}</text>")
    out.append("</g>")
    return out


def _panel(body: list[str], x: float, y: float) -> list[str]:
    return [f'<g class="panel" transform="translate({_f(x)},{_f(y)})">', *body, "</g>"]


def render_frame_svg(frame: Frame, style: RenderStyle, viewport: Viewport,
                     groups: Sequence[str] | None = None) -> str:
    groups = list(groups) if groups is not None else list(dict.fromkeys(frame.groups))
    colors = style.colors_for(groups)
    lines = _header(style.width + LEGEND_WIDTH, style.height, style)
    lines += _panel(frame_body(frame, style, viewport, colors), 0, 0)
    lines += legend(groups, colors, style, style.width + 10)
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_facets(states: Sequence[BiplotState], style: RenderStyle, cols: int = 4,
                  scale_var: float = 1.0, hulls: bool = False, fixed_vectors=None,
                  viewport: Viewport | None = None) -> str:
    """Grid of per-level panels sharing one viewport and one legend."""
    if not states:
        raise ValueError("no states to facet")
    if cols < 1:
        raise ValueError("cols must be >= 1")
    cols = min(cols, len(states))
    rows = math.ceil(len(states) / cols)
    vp = viewport or states_viewport(states, scale_var)
    groups = list(dict.fromkeys(g for s in states for g in s.group_of_row))
    colors = style.colors_for(groups)
    lines = _header(cols * style.width + LEGEND_WIDTH, rows * style.height, style)
    for i, st in enumerate(states):
        V = fixed_vectors if fixed_vectors is not None else st.V * scale_var
        fr = pause_frame(st, V, hulls=hulls)
        r, c = divmod(i, cols)
        lines += _panel(frame_body(fr, style, vp, colors, caption=st.level), c * style.width,
                        r * style.height)
    lines += legend(groups, colors, style, cols * style.width + 10)
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
