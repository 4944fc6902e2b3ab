from .charts import render_measure_charts
from .frames_json import export_frames_json, import_frames_json
from .gif import assemble_gif
from .style import RenderStyle, Viewport, hue_palette, sequence_viewport, states_viewport
from .svg import render_facets, render_frame_svg

__all__ = [
    "RenderStyle", "Viewport", "assemble_gif", "export_frames_json", "hue_palette",
    "import_frames_json", "render_facets", "render_frame_svg", "render_measure_charts",
    "sequence_viewport", "states_viewport",
]
