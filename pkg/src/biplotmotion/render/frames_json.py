"""JSON frame manifest: export and lossless re-import."""

from __future__ import annotations

import json

import numpy as np

from ..animation import Frame, FrameSequence, GroupHull, Phase, Shadow


def _pts(points, groups):
    return [{"x": float(x), "y": float(y), "group": g} for (x, y), g in zip(points, groups)]


def frames_to_dict(seq: FrameSequence) -> dict:
    frames = []
    for f in seq.frames:
        frames.append({
            "index": f.index,
            "clock": float(f.clock),
            "state": f.state_index,
            "phase": {"kind": f.phase.kind, "from": f.phase.from_level, "to": f.phase.to_level,
                      "u": None if f.phase.u is None else float(f.phase.u)},
            "samples": _pts(f.sample_points, f.groups),
            "vectors": [{"x": float(x), "y": float(y), "name": n}
                        for (x, y), n in zip(f.variable_vectors, f.variable_names)],
            "hulls": [{"group": h.group, "passthrough": h.passthrough,
                       "vertices": [[float(x), float(y)] for x, y in h.vertices]}
                      for h in (f.hulls or ())],
            "shadows": [{"level": s.level, "opacity": float(s.opacity),
                         "samples": _pts(s.points, s.groups)} for s in f.shadows],
        })
    return {"fps": float(seq.fps), "mode": seq.mode, "hulls_enabled": seq.hulls_enabled,
            "levels": list(seq.states_covered), "groups": list(seq.groups), "frames": frames}


def export_frames_json(seq: FrameSequence) -> str:
    return json.dumps(frames_to_dict(seq), separators=(",", ":"), allow_nan=False) + "\n"


def _arr(items) -> np.ndarray:
    return np.array([[d["x"], d["y"]] for d in items], dtype=float).reshape(-1, 2)


def import_frames_json(text: str) -> FrameSequence:
    doc = json.loads(text)
    frames = []
    for fd in doc["frames"]:
        ph = fd["phase"]
        hulls = None
        if doc["hulls_enabled"]:
            hulls = tuple(GroupHull(h["group"], np.array(h["vertices"], dtype=float).reshape(-1, 2),
                                    h["passthrough"]) for h in fd["hulls"])
        frames.append(Frame(
            index=fd["index"],
            clock=fd["clock"],
            phase=Phase(ph["kind"], ph["from"], ph["to"], ph["u"]),
            sample_points=_arr(fd["samples"]),
            groups=tuple(d["group"] for d in fd["samples"]),
            variable_vectors=_arr(fd["vectors"]),
            variable_names=tuple(d["name"] for d in fd["vectors"]),
            hulls=hulls,
            shadows=tuple(Shadow(s["level"], _arr(s["samples"]),
                                 tuple(d["group"] for d in s["samples"]), s["opacity"])
                          for s in fd["shadows"]),
            state_index=fd["state"],
        ))
    return FrameSequence(frames, doc["fps"], list(doc["levels"]), doc["hulls_enabled"], doc["mode"],
                         list(doc["groups"]))
