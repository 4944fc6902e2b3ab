"""Line charts of the fit (PS, CC) and bias (AMB, MB, RMSB) series."""

from __future__ import annotations

from xml.sax.saxutils import escape

from ..errors import ConfigError
from ..evaluation import EvaluationReport
from .style import RenderStyle
from .svg import _f

SERIES_COLORS = ("#1f77b4", "#d62728", "#2ca02c")


def _line_chart(title: str, levels: list[str], series: dict[str, list[float]], style: RenderStyle,
                mark_max: str | None = None) -> str:
    W, H, m = style.width, style.height * 0.6, style.margin + 20
    vals = [v for vs in series.values() for v in vs]
    lo, hi = min(vals + [0.0]), max(vals)
    if hi - lo < 1e-12:
        hi = lo + 1.0
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    n = len(levels)

    def px(i):
        return m + (W - 2 * m) * i / (n - 1)

    def py(v):
        return H - m - (H - 2 * m) * (v - lo) / (hi - lo)

    fs = style.label_font_size
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(W)}" height="{_f(H)}" '
           f'viewBox="0 0 {_f(W)} {_f(H)}" font-family="sans-serif">',
           f'<rect x="0" y="0" width="{_f(W)}" height="{_f(H)}" fill="{style.background}"/>',
           f'<text class="title" x="{_f(W / 2)}" y="{_f(m / 2)}" text-anchor="middle" '
           f'font-size="{fs * 1.3:g}">{escape(title)}</text>',
           f'<line class="x-axis" x1="{_f(m)}" y1="{_f(H - m)}" x2="{_f(W - m)}" y2="{_f(H - m)}" '
           'stroke="#000000"/>',
           f'<line class="y-axis" x1="{_f(m)}" y1="{_f(m)}" x2="{_f(m)}" y2="{_f(H - m)}" stroke="#000000"/>']
    for i, lv in enumerate(levels):
        out.append(f'<g class="x-tick"><line x1="{_f(px(i))}" y1="{_f(H - m)}" x2="{_f(px(i))}" '
                   f'y2="{_f(H - m + 4)}" stroke="#000000"/><text x="{_f(px(i))}" y="{_f(H - m + 6 + fs)}" '
                   f'text-anchor="middle" font-size="{fs:g}">{escape(lv)}</text></g>')
    for k in range(5):
        v = lo + (hi - lo) * k / 4
        out.append(f'<text class="y-tick" x="{_f(m - 4)}" y="{_f(py(v) + fs / 3)}" text-anchor="end" '
                   f'font-size="{fs * 0.9:g}">{v:.3f}</text>')
    for j, (name, vs) in enumerate(series.items()):
        col = SERIES_COLORS[j % len(SERIES_COLORS)]
        pts = " ".join(f"{_f(px(i))},{_f(py(v))}" for i, v in enumerate(vs))
        out.append(f'<polyline class="series" data-series="{name}" points="{pts}" fill="none" '
                   f'stroke="{col}" stroke-width="1.5"/>')
        for i, v in enumerate(vs):
            out.append(f'<circle class="point" data-series="{name}" cx="{_f(px(i))}" cy="{_f(py(v))}" '
                       f'r="2.5" fill="{col}"/>')
        ly = m + j * (fs + 6)
        out.append(f'<g class="legend-entry"><line x1="{_f(W - m - 60)}" y1="{_f(ly)}" '
                   f'x2="{_f(W - m - 45)}" y2="{_f(ly)}" stroke="{col}" stroke-width="2"/>'
                   f'<text x="{_f(W - m - 40)}" y="{_f(ly + fs / 3)}" font-size="{fs:g}">{name}</text></g>')
        if name == mark_max:
            i = max(range(n), key=lambda k: (vs[k], -k))
            out.append(f'<circle class="max-marker" data-series="{name}" data-level="{escape(levels[i])}" '
                       f'cx="{_f(px(i))}" cy="{_f(py(vs[i]))}" r="6" fill="none" stroke="{col}" '
                       'stroke-width="1.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_measure_charts(report: EvaluationReport, style: RenderStyle | None = None) -> tuple[str, str]:
    """``(fit_svg, bias_svg)`` with levels on a categorical x-axis."""
    style = style or RenderStyle()
    if len(report.records) < 2:
        raise ConfigError("measure charts need at least 2 levels; use the table output instead")
    levels = report.levels
    fit = _line_chart("Fit measures", levels,
                      {"PS": [r.PS for r in report.records], "CC": [r.CC for r in report.records]},
                      style, mark_max="PS")
    bias = _line_chart("Bias measures", levels,
                       {"AMB": [r.AMB for r in report.records], "MB": [r.MB for r in report.records],
                        "RMSB": [r.RMSB for r in report.records]}, style)
    return fit, bias
