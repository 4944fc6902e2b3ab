from __future__ import annotations

import colorsys
import json
import warnings
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from ..errors import ConfigError, RenderError


def hue_palette(n: int = 10, lightness: float = 0.55, saturation: float = 0.65) -> list[str]:
    """``n`` evenly spaced hues starting at 15 degrees."""
    out = []
    for i in range(n):
        h = (15.0 + 360.0 * i / n) % 360.0 / 360.0
        r, g, b = colorsys.hls_to_rgb(h, lightness, saturation)
        out.append("#{:02x}{:02x}{:02x}".format(round(r * 255), round(g * 255), round(b * 255)))
    return out


@dataclass(frozen=True)
class RenderStyle:
    width: int = 640
    height: int = 640
    group_palette: tuple[str, ...] = field(default_factory=lambda: tuple(hue_palette(10)))
    vector_color: str = "#333333"
    label_font_size: float = 11.0
    hull_opacity: float = 0.3
    margin: int = 40
    point_radius: float = 3.5
    background: str = "#ffffff"

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ConfigError("style width and height must be positive", flag="--style")
        if not 0.0 <= self.hull_opacity <= 1.0:
            raise ConfigError("hull_opacity must lie in [0, 1]", flag="--style")
        if not self.group_palette:
            raise ConfigError("group_palette is empty", flag="--style")

    @classmethod
    def from_json(cls, path) -> "RenderStyle":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read style file {path}: {exc}", flag="--style") from None
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(f"unknown style field(s): {', '.join(unknown)}", flag="--style")
        if "group_palette" in raw:
            raw["group_palette"] = tuple(raw["group_palette"])
        return cls(**raw)

    def colors_for(self, groups: list[str]) -> dict[str, str]:
        if len(groups) > len(self.group_palette):
            warnings.warn(f"{len(groups)} groups but only {len(self.group_palette)} palette colors; "
                          "cycling", stacklevel=2)
        return {g: self.group_palette[i % len(self.group_palette)] for i, g in enumerate(groups)}


@dataclass(frozen=True)
class Viewport:
    """Data-space bounds shared by every frame and panel of one run."""

    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self) -> None:
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise RenderError(f"degenerate viewport {self}")

    @classmethod
    def around(cls, arrays, pad: float = 0.05, include_origin: bool = True) -> "Viewport":
        pts = [np.asarray(a, dtype=float).reshape(-1, 2) for a in arrays]
        if include_origin:
            pts.append(np.zeros((1, 2)))
        allp = np.vstack(pts)
        lo, hi = allp.min(axis=0), allp.max(axis=0)
        span = hi - lo
        if span[0] <= 0 or span[1] <= 0:
            raise RenderError("all plotted coordinates collapse onto a line or point")
        lo, hi = lo - pad * span, hi + pad * span
        return cls(float(lo[0]), float(hi[0]), float(lo[1]), float(hi[1]))

    def mapper(self, x0: float, y0: float, w: float, h: float):
        """Data -> pixel map into the box (x0, y0, w, h), preserving aspect ratio."""
        sx = w / (self.xmax - self.xmin)
        sy = h / (self.ymax - self.ymin)
        s = min(sx, sy)
        ox = x0 + (w - s * (self.xmax - self.xmin)) / 2
        oy = y0 + (h - s * (self.ymax - self.ymin)) / 2

        def to_px(x, y):
            return ox + (x - self.xmin) * s, oy + (self.ymax - y) * s
        return to_px


def sequence_viewport(seq) -> Viewport:
    arrays = []
    for f in seq.frames:
        arrays += [f.sample_points, f.variable_vectors]
        arrays += [s.points for s in f.shadows]
    return Viewport.around(arrays)


def states_viewport(states, scale_var: float = 1.0) -> Viewport:
    arrays = []
    for s in states:
        arrays += [s.Z, s.V * scale_var]
    return Viewport.around(arrays)
