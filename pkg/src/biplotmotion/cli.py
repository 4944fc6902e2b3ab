"""Command-line entry point.

Subcommands mirror the three pipelines: ``moveplot`` (one global PCA, fixed
variable vectors), ``moveplot2`` (per-level PCA with manual reflection),
``moveplot3`` (per-level PCA with Procrustes alignment) and ``evaluate``
(the moveplot3 pipeline, emitting only the comparison measures).
"""

from __future__ import annotations

import argparse
import contextlib
import shutil
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import TextIO

from . import __version__
from .alignment import AlignmentResult, align_series, reflect_at_levels
from .animation import build_timeline
from .data import Dataset, ingest_csv, ingest_target_csv, slice_by_time
from .errors import BiplotMotionError, ConfigError, OutputError
from .evaluation import EvaluationReport, evaluate_series
from .pca import BiplotState, global_biplot, pca_biplot, per_slice_pca, project_slices
from .render import (RenderStyle, assemble_gif, export_frames_json, render_facets, render_frame_svg,
                     render_measure_charts, sequence_viewport)

SUBCOMMANDS = ("moveplot", "moveplot2", "moveplot3", "evaluate")


def parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "t", "yes", "y", "on"):
        return True
    if t in ("0", "false", "f", "no", "n", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}")


def _csv_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


@dataclass
class RunConfig:
    subcommand: str
    input: Path
    time_var: str
    group_var: str
    move: bool = False
    hulls: bool = False
    shadow: bool = False
    shadow_decay: float = 0.6
    scale_var: float = 1.0
    scaled: bool = True
    global_standardize: bool = False
    level_order: list[str] | None = None
    align_time: list[str] = field(default_factory=list)
    reflect: str | None = None
    target: Path | None = None
    align_on: str = "samples"
    gpa_tol: float = 1e-10
    gpa_max_iter: int = 100
    format: str | None = None
    out: Path | None = None
    style: Path | None = None
    facet_cols: int = 4
    pause_frames: int = 10
    transition_frames: int = 30
    fps: float = 20.0
    emit_eval: bool = False

    def validate(self) -> None:
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigError(f"unknown subcommand {self.subcommand!r}")
        if self.shadow and self.hulls:
            raise ConfigError("--shadow is only available with --hulls=false", flag="--shadow")
        if (self.align_time or self.reflect) and self.subcommand != "moveplot2":
            raise ConfigError("--align-time/--reflect only apply to moveplot2", flag="--align-time")
        if self.align_time and not self.reflect:
            raise ConfigError("--align-time needs --reflect x|y|xy", flag="--reflect")
        if self.reflect and self.reflect not in ("x", "y", "xy"):
            raise ConfigError(f"unknown reflection axis {self.reflect!r}", flag="--reflect")
        if self.target is not None and self.subcommand not in ("moveplot3", "evaluate"):
            raise ConfigError("--target only applies to moveplot3/evaluate", flag="--target")
        if self.scale_var <= 0:
            raise ConfigError("--scale-var must be positive", flag="--scale-var")
        if self.facet_cols < 1:
            raise ConfigError("--facet-cols must be >= 1", flag="--facet-cols")
        if self.fps <= 0:
            raise ConfigError("--fps must be positive", flag="--fps")
        if self.pause_frames < 1:
            raise ConfigError("--pause-frames must be >= 1", flag="--pause-frames")
        if self.transition_frames < 0:
            raise ConfigError("--transition-frames must be >= 0", flag="--transition-frames")
        if self.align_on not in ("samples", "variables"):
            raise ConfigError(f"unknown --align-on value {self.align_on!r}", flag="--align-on")
        fmt = self.output_format
        if fmt not in ("svg", "gif", "json", "facet"):
            raise ConfigError(f"unknown --format {fmt!r}", flag="--format")
        if self.subcommand != "evaluate" and not self.move and fmt in ("gif", "json"):
            raise ConfigError(f"--format {fmt} needs an animation; add --move", flag="--format")

    @property
    def output_format(self) -> str:
        if self.format:
            return self.format
        return "gif" if self.move else "facet"

    @property
    def out_path(self) -> Path:
        if self.out is not None:
            return Path(self.out)
        if self.subcommand == "evaluate":
            return Path("evaluation")
        ext = {"facet": ".svg", "svg": "_frames", "gif": ".gif", "json": ".json"}[self.output_format]
        return Path(self.subcommand + ext)


@dataclass
class RunResult:
    dataset: Dataset
    states: list[BiplotState]
    alignment: AlignmentResult | None = None
    report: EvaluationReport | None = None
    outputs: list[Path] = field(default_factory=list)
    n_frames: int | None = None


@contextlib.contextmanager
def _flag(name: str):
    """Attribute errors raised inside the block to command-line flag ``name``."""
    try:
        yield
    except BiplotMotionError as exc:
        if exc.flag is None:
            exc.flag = name
        raise


def _eval_stem(cfg: RunConfig) -> Path:
    out = cfg.out_path
    if cfg.subcommand == "evaluate":
        return out
    return out.with_name(out.stem + "_eval") if out.suffix else out.with_name(out.name + "_eval")


class _Writer:
    def __init__(self):
        self.paths: list[Path] = []

    def text(self, path: Path, content: str) -> Path:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(content, encoding="utf-8", newline="\n")
        except OSError as exc:
            raise OutputError(f"cannot write {path}: {exc}", flag="--out") from None
        self.paths.append(path)
        return path

    def track(self, path: Path) -> Path:
        self.paths.append(path)
        return path

    def cleanup(self) -> None:
        for p in reversed(self.paths):
            with contextlib.suppress(OSError):
                if p.is_dir():
                    shutil.rmtree(p)
                else:
                    p.unlink()


def execute(cfg: RunConfig) -> RunResult:
    """Run one pipeline and write its artifacts; removes partial outputs on failure."""
    cfg.validate()
    with _flag("--style"):
        style = RenderStyle.from_json(cfg.style) if cfg.style else RenderStyle()
    writer = _Writer()
    try:
        return _execute(cfg, style, writer)
    except BaseException:
        writer.cleanup()
        raise


def _execute(cfg: RunConfig, style: RenderStyle, writer: _Writer) -> RunResult:
    with _flag("--input"):
        try:
            d = ingest_csv(cfg.input, cfg.time_var, cfg.group_var, cfg.level_order)
        except FileNotFoundError:
            raise ConfigError(f"input file {cfg.input} not found", flag="--input") from None
        slices = slice_by_time(d)

    alignment = report = None
    if cfg.subcommand == "moveplot":
        with _flag("--input"):
            states = project_slices(global_biplot(d, cfg.scaled), slices)
        mode = "fixed"
    else:
        with _flag("--time-var"):
            states = per_slice_pca(d, slices, cfg.scaled, cfg.global_standardize)
        mode = "dynamic"
        if cfg.subcommand == "moveplot2":
            if cfg.align_time:
                with _flag("--align-time"):
                    states = reflect_at_levels(states, cfg.align_time, cfg.reflect)
        else:
            target = None
            if cfg.target is not None:
                with _flag("--target"):
                    try:
                        X, groups = ingest_target_csv(cfg.target, cfg.group_var, d.variable_names,
                                                      cfg.time_var)
                    except FileNotFoundError:
                        raise ConfigError(f"target file {cfg.target} not found", flag="--target") from None
                    target = pca_biplot(X, cfg.scaled, "Target", d.variable_names, groups)
            with _flag("--target" if target is not None else "--group-var"):
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    alignment = align_series(states, target, cfg.align_on, cfg.gpa_tol, cfg.gpa_max_iter)
            states = alignment.aligned_states
            with _flag("--input"):
                report = evaluate_series(alignment)

    result = RunResult(d, states, alignment, report)
    with _flag("--out"):
        if cfg.subcommand != "evaluate":
            _write_plot(cfg, style, states, mode, writer, result)
        if report is not None and (cfg.emit_eval or cfg.subcommand == "evaluate"):
            _write_eval(cfg, style, report, writer)
    result.outputs = list(writer.paths)
    return result


def _write_plot(cfg, style, states, mode, writer, result) -> None:
    out = cfg.out_path
    fmt = cfg.output_format
    fixed_v = states[0].V * cfg.scale_var if mode == "fixed" else None
    if fmt == "facet":
        writer.text(out, render_facets(states, style, cfg.facet_cols, cfg.scale_var, cfg.hulls,
                                       fixed_vectors=fixed_v))
        return
    with _flag("--time-var"):
        seq = build_timeline(states, mode, cfg.pause_frames, cfg.transition_frames, cfg.fps,
                             cfg.scale_var, cfg.hulls, cfg.shadow, cfg.shadow_decay)
    result.n_frames = len(seq)
    if fmt == "json":
        writer.text(out, export_frames_json(seq))
    elif fmt == "gif":
        out.parent.mkdir(parents=True, exist_ok=True)
        writer.track(out)
        assemble_gif(seq, style, out)
    else:
        vp = sequence_viewport(seq)
        if out.exists() and not out.is_dir():
            raise OutputError(f"{out} exists and is not a directory", flag="--out")
        created = not out.exists()
        out.mkdir(parents=True, exist_ok=True)
        if created:
            writer.track(out)
        width = max(4, len(str(len(seq))))
        for f in seq.frames:
            path = out / f"frame_{f.index:0{width}d}.svg"
            writer.text(path, render_frame_svg(f, style, vp, seq.groups))


def _write_eval(cfg, style, report: EvaluationReport, writer) -> None:
    stem = _eval_stem(cfg)
    base = stem.with_suffix("") if stem.suffix in (".csv", ".json", ".txt") else stem
    writer.text(base.with_name(base.name + ".csv"), report.to_csv())
    writer.text(base.with_name(base.name + ".json"), report.to_json() + "\n")
    writer.text(base.with_name(base.name + ".txt"), report.to_table() + "\n")
    if len(report.records) >= 2:
        fit, bias = render_measure_charts(report, style)
        writer.text(base.with_name(base.name + "_fit.svg"), fit)
        writer.text(base.with_name(base.name + "_bias.svg"), bias)


def print_run_summary(cfg: RunConfig, result: RunResult, stream: TextIO | None = None) -> None:
    stream = stream or sys.stdout
    d = result.dataset
    pr = lambda *a: print(*a, file=stream)  # noqa: E731
    pr(f"{cfg.subcommand}: n={d.n} p={d.p} T={len(d.levels)} variables={','.join(d.variable_names)}")
    pr("slices: " + " ".join(f"{s.level}={s.n}" for s in result.states))
    if cfg.subcommand == "moveplot":
        ev = result.states[0].explained_variance
        pr(f"explained variance (global): {ev[0]:.4f} {ev[1]:.4f}")
    else:
        pr("explained variance: " + " ".join(
            f"{s.level}={s.explained_variance[0]:.4f}/{s.explained_variance[1]:.4f}" for s in result.states))
    if cfg.subcommand == "moveplot2" and cfg.align_time:
        pr(f"reflected about {cfg.reflect}: {','.join(cfg.align_time)}")
    a = result.alignment
    if a is not None:
        if a.target_supplied:
            pr(f"alignment: supplied target, final RSS={a.final_rss:.6g}")
        else:
            flag = "" if a.converged else " (not converged)"
            pr(f"alignment: GPA iterations={a.iterations} final RSS={a.final_rss:.6g}{flag}")
    if result.n_frames is not None:
        pr(f"frames: {result.n_frames} at {cfg.fps:g} fps")
    for p in result.outputs:
        if not (p.parent in result.outputs):
            pr(f"wrote {p}")
    if cfg.subcommand == "evaluate" and result.report is not None:
        pr(result.report.to_table())


def _add_common(p: argparse.ArgumentParser, sub: str) -> None:
    p.add_argument("--input", required=True, type=Path, help="CSV file, header in the first row")
    p.add_argument("--time-var", required=True, help="column with the ordered time levels")
    p.add_argument("--group-var", required=True, help="column with the group labels")
    p.add_argument("--level-order", type=_csv_list, help="explicit comma-separated time level order")
    p.add_argument("--scaled", type=parse_bool, nargs="?", const=True, default=True,
                   help="scale variables to unit variance (default true)")
    p.add_argument("--style", type=Path, help="JSON file with rendering style fields")
    if sub != "evaluate":
        p.add_argument("--move", type=parse_bool, nargs="?", const=True, default=False,
                       help="animate (default false: static facets; the animation is opt-in)")
        p.add_argument("--hulls", type=parse_bool, nargs="?", const=True, default=False,
                       help="draw convex hulls per group (groups with <3 points are drawn as points)")
        p.add_argument("--shadow", type=parse_bool, nargs="?", const=True, default=False,
                       help="keep faded traces of earlier states (needs --hulls=false)")
        p.add_argument("--shadow-decay", type=float, default=0.6)
        p.add_argument("--scale-var", type=float, default=1.0, help="multiplier for variable vectors")
        p.add_argument("--format", choices=("svg", "gif", "json", "facet"))
        p.add_argument("--facet-cols", type=int, default=4)
        p.add_argument("--pause-frames", type=int, default=10)
        p.add_argument("--transition-frames", type=int, default=30)
        p.add_argument("--fps", type=float, default=20.0)
    p.add_argument("--out", type=Path, help="output path (evaluate: file stem)")
    if sub in ("moveplot2", "moveplot3", "evaluate"):
        p.add_argument("--global-standardize", action="store_true",
                       help="standardize with statistics over all levels instead of per level")
    if sub == "moveplot2":
        p.add_argument("--align-time", type=_csv_list, default=[], help="levels to reflect")
        p.add_argument("--reflect", choices=("x", "y", "xy"))
    if sub in ("moveplot3", "evaluate"):
        p.add_argument("--target", type=Path, help="target configuration CSV (default: GPA consensus)")
        p.add_argument("--align-on", choices=("samples", "variables"), default="samples")
        p.add_argument("--gpa-tol", type=float, default=1e-10)
        p.add_argument("--gpa-max-iter", type=int, default=100)
    if sub == "moveplot3":
        p.add_argument("--emit-eval", action="store_true", help="also write the evaluation measures")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="biplotmotion", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)
    helps = {
        "moveplot": "one global PCA; variable vectors stay fixed",
        "moveplot2": "PCA per level; optional manual reflection",
        "moveplot3": "PCA per level aligned by Procrustes analysis",
        "evaluate": "comparison measures of each level against the alignment target",
    }
    for name in SUBCOMMANDS:
        _add_common(subs.add_parser(name, help=helps[name], description=helps[name]), name)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    keys = RunConfig.__dataclass_fields__.keys()
    return RunConfig(**{k: v for k, v in vars(ns).items() if k in keys and v is not None})


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = config_from_args(ns)
    try:
        result = execute(cfg)
    except BiplotMotionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    print_run_summary(cfg, result)
    return 0


if __name__ == "__main__":
    sys.exit(main())
