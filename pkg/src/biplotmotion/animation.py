"""Frame timelines: pauses at each state, linear transitions between them."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field, replace

import numpy as np

from .data import row_keys
from .errors import BalanceError, ConfigError, ShapeError
from .hull import convex_hull
from .pca import BiplotState

SHADOW_CUTOFF = 0.02


@dataclass(frozen=True)
class Phase:
    kind: str  # "pause" or "transition"
    from_level: str
    to_level: str
    u: float | None = None


@dataclass(frozen=True, eq=False)
class GroupHull:
    group: str
    vertices: np.ndarray
    passthrough: bool = False  # draw the points, not a polygon


@dataclass(frozen=True, eq=False)
class Shadow:
    level: str
    points: np.ndarray
    groups: tuple[str, ...]
    opacity: float


@dataclass(frozen=True, eq=False)
class Frame:
    index: int
    clock: float
    phase: Phase
    sample_points: np.ndarray
    groups: tuple[str, ...]
    variable_vectors: np.ndarray
    variable_names: tuple[str, ...]
    hulls: tuple[GroupHull, ...] | None = None
    shadows: tuple[Shadow, ...] = ()
    state_index: int = 0

    @property
    def level(self) -> str:
        if self.phase.kind == "pause" or (self.phase.u is not None and self.phase.u >= 0.5):
            return self.phase.to_level
        return self.phase.from_level


@dataclass(eq=False)
class FrameSequence:
    frames: list[Frame]
    fps: float
    states_covered: list[str]
    hulls_enabled: bool = False
    mode: str = "fixed"
    groups: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.frames)


def expected_frame_count(n_states: int, pause_frames: int, transition_frames: int) -> int:
    return n_states * pause_frames + (n_states - 1) * transition_frames


def linear_ease(a, b, u: float) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ShapeError(f"cannot interpolate between shapes {a.shape} and {b.shape}")
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"easing parameter must lie in [0, 1], got {u}")
    return (1.0 - u) * a + u * b


def transition_params(n: int) -> np.ndarray:
    """Easing parameters for an ``n``-frame transition; both endpoints included."""
    if n <= 0:
        return np.empty(0)
    if n == 1:
        return np.array([0.5])
    return np.linspace(0.0, 1.0, n)


def group_hulls(points: np.ndarray, groups: Sequence[str]) -> tuple[GroupHull, ...]:
    out = []
    garr = np.asarray(groups, dtype=object)
    for g in dict.fromkeys(groups):
        pts = points[garr == g]
        hull = convex_hull(pts)
        if hull is None:
            out.append(GroupHull(g, pts.copy(), passthrough=True))
        else:
            out.append(GroupHull(g, hull))
    return tuple(out)


class _SamplePath:
    """Point interpolation between two consecutive states.

    Rows are matched by (group, ordinal). When keys do not match (fixed frame
    with differing group sizes), a group's smaller point set is cycled up to
    the larger count; groups present on one side only stay put and appear or
    vanish at the far endpoint.
    """

    def __init__(self, a: BiplotState, b: BiplotState, strict: bool):
        ka, kb = row_keys(a.group_of_row), row_keys(b.group_of_row)
        self.a, self.b = a, b
        self.matched = sorted(ka) == sorted(kb)
        if self.matched:
            pos = {k: j for j, k in enumerate(kb)}
            self.perm = [pos[k] for k in ka]
            return
        if strict:
            raise BalanceError(
                f"levels {a.level!r} and {b.level!r} have different sample rows; "
                "dynamic animation needs matched rows", levels=[a.level, b.level])
        ga = np.asarray(a.group_of_row, dtype=object)
        gb = np.asarray(b.group_of_row, dtype=object)
        starts, ends, groups, only = [], [], [], []
        for g in dict.fromkeys(a.group_of_row + b.group_of_row):
            pa, pb = a.Z[ga == g], b.Z[gb == g]
            if len(pa) and len(pb):
                m = max(len(pa), len(pb))
                starts.append(pa[np.arange(m) % len(pa)])
                ends.append(pb[np.arange(m) % len(pb)])
                groups += [g] * m
                only += [0] * m
            else:
                side = pa if len(pa) else pb
                starts.append(side)
                ends.append(side)
                groups += [g] * len(side)
                only += [-1 if len(pa) else 1] * len(side)
        self.start = np.vstack(starts)
        self.end = np.vstack(ends)
        self.groups = tuple(groups)
        self.only = np.asarray(only)

    def at(self, u: float) -> tuple[np.ndarray, tuple[str, ...]]:
        if u == 0.0:
            return self.a.Z, self.a.group_of_row
        if u == 1.0:
            return self.b.Z, self.b.group_of_row
        if self.matched:
            return linear_ease(self.a.Z, self.b.Z[self.perm], u), self.a.group_of_row
        pts = linear_ease(self.start, self.end, u)
        return pts, self.groups


def pause_frame(state: BiplotState, vectors: np.ndarray, index: int = 0, clock: float = 0.0,
                hulls: bool = False, state_index: int = 0) -> Frame:
    return Frame(index, clock, Phase("pause", state.level, state.level), state.Z,
                 state.group_of_row, vectors, state.variable_names,
                 group_hulls(state.Z, state.group_of_row) if hulls else None,
                 state_index=state_index)


def build_timeline(states: Sequence[BiplotState], mode: str = "fixed", pause_frames: int = 10,
                   transition_frames: int = 30, fps: float = 20.0, scale_var: float = 1.0,
                   hulls: bool = False, shadow: bool = False,
                   shadow_decay: float = 0.6) -> FrameSequence:
    """Pauses at each state with linear transitions in between.

    In fixed mode the variable vectors are the first state's ``V`` (shared by
    all states from a global PCA); in dynamic mode they are interpolated.
    """
    if mode not in ("fixed", "dynamic"):
        raise ConfigError(f"unknown animation mode {mode!r}")
    if len(states) < 2:
        raise ConfigError("an animation needs at least 2 states")
    if pause_frames < 1 or transition_frames < 0:
        raise ConfigError("pause frames must be >= 1 and transition frames >= 0",
                          flag="--pause-frames" if pause_frames < 1 else "--transition-frames")
    if fps <= 0:
        raise ConfigError("fps must be positive", flag="--fps")
    if shadow and hulls:
        raise ConfigError("shadow trails are only available without hulls", flag="--shadow")

    if mode == "fixed":
        fixed_v = states[0].V * scale_var
        vecs = [fixed_v] * len(states)
    else:
        vecs = [s.V * scale_var for s in states]
    paths = [_SamplePath(a, b, strict=mode == "dynamic") for a, b in zip(states, states[1:])]
    us = transition_params(transition_frames)

    frames: list[Frame] = []

    def add(phase: Phase, pts, groups, V, names, k):
        i = len(frames)
        frames.append(Frame(i, i / fps, phase, pts, tuple(groups), V, names,
                            group_hulls(pts, groups) if hulls else None, state_index=k))

    for k, st in enumerate(states):
        for _ in range(pause_frames):
            add(Phase("pause", st.level, st.level), st.Z, st.group_of_row, vecs[k],
                st.variable_names, k)
        if k == len(states) - 1:
            break
        nxt = states[k + 1]
        for u in us:
            u = float(u)
            pts, groups = paths[k].at(u)
            if mode == "fixed":
                V = fixed_v
            elif u == 0.0:
                V = vecs[k]
            elif u == 1.0:
                V = vecs[k + 1]
            else:
                V = linear_ease(vecs[k], vecs[k + 1], u)
            add(Phase("transition", st.level, nxt.level, u), pts, groups, V, st.variable_names, k)

    groups = list(dict.fromkeys(g for s in states for g in s.group_of_row))
    seq = FrameSequence(frames, fps, [s.level for s in states], hulls, mode, groups)
    if shadow:
        seq = shadow_trails(seq, shadow_decay, states)
    return seq


def shadow_trails(seq: FrameSequence, decay: float = 0.6,
                  states: Sequence[BiplotState] | None = None) -> FrameSequence:
    """Attach faded copies of earlier states' samples to every frame.

    A state ``a`` steps behind the frame's current state gets opacity
    ``decay**a``; copies fainter than the cutoff are dropped. During a
    transition the current state is the one being left.
    """
    if seq.hulls_enabled:
        raise ConfigError("shadow trails are only available without hulls", flag="--shadow")
    if not 0.0 < decay < 1.0:
        raise ConfigError(f"shadow decay must lie in (0, 1), got {decay}", flag="--shadow-decay")
    if states is None:
        snap: dict[int, Frame] = {}
        for f in seq.frames:
            if f.phase.kind == "pause":
                snap.setdefault(f.state_index, f)
        history = [(snap[k].phase.from_level, snap[k].sample_points, snap[k].groups)
                   for k in sorted(snap)]
    else:
        history = [(s.level, s.Z, s.group_of_row) for s in states]
    frames = []
    for f in seq.frames:
        shadows = []
        for j in range(f.state_index):
            op = decay ** (f.state_index - j)
            if op < SHADOW_CUTOFF:
                continue
            lv, pts, groups = history[j]
            shadows.append(Shadow(lv, pts, tuple(groups), op))
        frames.append(replace(f, shadows=tuple(shadows)))
    return replace(seq, frames=frames)
