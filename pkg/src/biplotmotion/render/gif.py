"""Raster frames and animated GIF assembly.

Frames are drawn straight into palette mode against one fixed 256-color
palette: every group color at a ladder of opacities blended onto the
background. Translucent layers therefore paint the blended color instead of
compositing, and text is drawn without anti-aliasing. Pillow LZW-compresses
each frame; the container (header, global palette, loop and delay
extensions) is written here so that every frame is kept, including
consecutive identical pause frames which Pillow's own multi-frame writer
would merge.
"""

from __future__ import annotations

import functools
import math
import struct
from pathlib import Path

from PIL import GifImagePlugin, Image, ImageDraw, ImageFont

from ..animation import Frame, FrameSequence
from ..errors import OutputError
from .style import RenderStyle, Viewport, sequence_viewport
from .svg import LEGEND_WIDTH

OPACITY_LEVELS = (1.0, 0.8, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.05)
AXIS_GRAY = (0xcc, 0xcc, 0xcc)


def _rgb(hexcolor: str) -> tuple[int, int, int]:
    h = hexcolor.lstrip("#")
    if len(h) == 3:
        h = "".join(c * 2 for c in h)
    return int(h[0:2], 16), int(h[2:4], 16), int(h[4:6], 16)


def _blend(c, bg, alpha: float) -> tuple[int, int, int]:
    return tuple(round(alpha * a + (1 - alpha) * b) for a, b in zip(c, bg))


class Palette:
    """Fixed 256-entry palette and the index of each (color, opacity) pair."""

    def __init__(self, style: RenderStyle, groups: list[str]):
        self.bg = _rgb(style.background)
        self.levels = sorted(set(OPACITY_LEVELS + (style.hull_opacity,)), reverse=True)
        colors = [self.bg, (0, 0, 0), AXIS_GRAY, _rgb(style.vector_color)]
        self.group_rgb = {g: _rgb(c) for g, c in style.colors_for(groups).items()}
        for rgb in dict.fromkeys(self.group_rgb.values()):
            colors += [_blend(rgb, self.bg, a) for a in self.levels]
        colors = list(dict.fromkeys(colors))
        if len(colors) > 256:
            raise ValueError("too many distinct colors for one GIF palette")
        self.colors = colors + [(0, 0, 0)] * (256 - len(colors))
        self._index = {c: i for i, c in reversed(list(enumerate(colors)))}

    def index(self, rgb, opacity: float = 1.0) -> int:
        level = min(self.levels, key=lambda a: (abs(a - opacity), -a))
        return self._index[_blend(rgb, self.bg, level) if level < 1.0 else tuple(rgb)]

    def flat(self) -> list[int]:
        return [v for c in self.colors for v in c]


@functools.lru_cache(maxsize=8)
def _font(size: float):
    return ImageFont.load_default(size=size)


def _draw(img: Image.Image) -> ImageDraw.ImageDraw:
    d = ImageDraw.Draw(img)
    d.fontmode = "1"
    return d


def _static_layer(style: RenderStyle, viewport: Viewport, groups: list[str], pal: Palette) -> Image.Image:
    """Background, axes and legend: everything that does not change between frames."""
    img = Image.new("P", (style.width + LEGEND_WIDTH, style.height), pal.index(pal.bg))
    img.putpalette(pal.flat())
    draw = _draw(img)
    m = style.margin
    to_px = viewport.mapper(m, m, style.width - 2 * m, style.height - 2 * m)
    font = _font(style.label_font_size)
    gray = pal.index(AXIS_GRAY)
    draw.line([to_px(viewport.xmin, 0.0), to_px(viewport.xmax, 0.0)], fill=gray)
    draw.line([to_px(0.0, viewport.ymin), to_px(0.0, viewport.ymax)], fill=gray)
    for i, g in enumerate(groups):
        y = m + i * (style.label_font_size + 8)
        x = style.width + 10
        draw.rectangle([x, y, x + 10, y + 10], fill=pal.index(pal.group_rgb[g]))
        draw.text((x + 16, y), g, fill=pal.index((0, 0, 0)), font=font)
    return img


def rasterize_frame(frame: Frame, style: RenderStyle, viewport: Viewport, groups: list[str],
                    pal: Palette | None = None, static: Image.Image | None = None) -> Image.Image:
    """Palette-mode image of one frame, same layout as the SVG output."""
    pal = pal or Palette(style, groups)
    img = (static if static is not None else _static_layer(style, viewport, groups, pal)).copy()
    draw = _draw(img)
    m = style.margin
    to_px = viewport.mapper(m, m, style.width - 2 * m, style.height - 2 * m)
    font = _font(style.label_font_size)
    r = style.point_radius
    x0, y0 = to_px(0.0, 0.0)

    # shadows oldest first so fresher traces sit on top
    for sh in sorted(frame.shadows, key=lambda s: s.opacity):
        for (x, y), g in zip(sh.points, sh.groups):
            px, py = to_px(x, y)
            draw.ellipse([px - r, py - r, px + r, py + r], fill=pal.index(pal.group_rgb[g], sh.opacity))
    point_groups = None
    if frame.hulls is not None:
        point_groups = {h.group for h in frame.hulls if h.passthrough}
        for h in frame.hulls:
            if h.passthrough:
                continue
            poly = [to_px(x, y) for x, y in h.vertices]
            rgb = pal.group_rgb[h.group]
            draw.polygon(poly, fill=pal.index(rgb, style.hull_opacity))
            draw.line(poly + poly[:1], fill=pal.index(rgb), width=1)
    for (x, y), g in zip(frame.sample_points, frame.groups):
        if point_groups is not None and g not in point_groups:
            continue
        px, py = to_px(x, y)
        draw.ellipse([px - r, py - r, px + r, py + r], fill=pal.index(pal.group_rgb[g]))

    vcol = pal.index(_rgb(style.vector_color))
    for (x, y), name in zip(frame.variable_vectors, frame.variable_names):
        px, py = to_px(x, y)
        draw.line([(x0, y0), (px, py)], fill=vcol, width=1)
        ang = math.atan2(py - y0, px - x0)
        head = [(px, py)]
        for da in (2.6, -2.6):
            head.append((px + 7 * math.cos(ang + da), py + 7 * math.sin(ang + da)))
        draw.polygon(head, fill=vcol)
        draw.text((px + 4, py - 4), name, fill=vcol, font=font)

    draw.text((style.width / 2, m * 0.3), frame.level, fill=pal.index((0, 0, 0)), font=font, anchor="mt")
    return img


def encode_gif(images: list[Image.Image], palette: list[tuple[int, int, int]], delay_cs: int) -> bytes:
    """Looping GIF89a from palette-mode images indexed into ``palette``."""
    if not images:
        raise ValueError("no frames")
    w, h = images[0].size
    out = bytearray(b"GIF89a")
    out += struct.pack("<HHBBB", w, h, 0xF7, 0, 0)
    out += bytes(v for c in palette for v in c)
    out += b"\x21\xff\x0bNETSCAPE2.0\x03\x01\x00\x00\x00"
    gce = b"\x21\xf9\x04" + struct.pack("<BHBB", 0x04, delay_cs, 0, 0)
    encoded: dict[int, bytes] = {}
    for im in images:
        if im.size != (w, h) or im.mode != "P":
            raise ValueError("frames must be equally sized palette images")
        # repeated frames are the same object; encode each once
        if id(im) not in encoded:
            encoded[id(im)] = b"".join(GifImagePlugin.getdata(im))
        out += gce + encoded[id(im)]
    out += b"\x3b"
    return bytes(out)


def gif_delay(fps: float) -> int:
    """Frame delay in centiseconds."""
    return max(1, round(100 / fps))


def assemble_gif(seq: FrameSequence, style: RenderStyle, out, viewport: Viewport | None = None) -> Path:
    if not seq.frames:
        raise ValueError("empty frame sequence")
    vp = viewport or sequence_viewport(seq)
    groups = seq.groups or list(dict.fromkeys(g for f in seq.frames for g in f.groups))
    pal = Palette(style, groups)
    static = _static_layer(style, vp, groups, pal)
    images = []
    img, prev_key = None, None
    for f in seq.frames:
        # consecutive pause frames of one state are identical; rasterize once
        key = (f.state_index, len(f.shadows)) if f.phase.kind == "pause" else None
        if key is None or key != prev_key:
            img = rasterize_frame(f, style, vp, groups, pal, static)
        images.append(img)
        prev_key = key
    data = encode_gif(images, pal.colors, gif_delay(seq.fps))
    out = Path(out)
    try:
        out.write_bytes(data)
    except OSError as exc:
        raise OutputError(f"cannot write {out}: {exc}", flag="--out") from None
    return out
