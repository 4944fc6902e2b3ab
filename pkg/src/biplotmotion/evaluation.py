"""Procrustes-based comparison measures between configurations."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass

import numpy as np

from .alignment import AlignmentResult, orthogonal_procrustes
from .errors import DegenerateConfigurationError, ShapeError

MEASURES = ("PS", "CC", "AMB", "MB", "RMSB")


@dataclass(frozen=True)
class EvaluationRecord:
    level: str
    PS: float
    CC: float
    AMB: float
    MB: float
    RMSB: float


@dataclass(frozen=True)
class EvaluationReport:
    records: tuple[EvaluationRecord, ...]

    @property
    def levels(self) -> list[str]:
        return [r.level for r in self.records]

    @property
    def fit_series(self) -> list[tuple[str, float, float]]:
        return [(r.level, r.PS, r.CC) for r in self.records]

    @property
    def bias_series(self) -> list[tuple[str, float, float, float]]:
        return [(r.level, r.AMB, r.MB, r.RMSB) for r in self.records]

    def to_json(self) -> str:
        return json.dumps([asdict(r) for r in self.records], indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("level",) + MEASURES)
        for r in self.records:
            w.writerow((r.level,) + tuple(repr(getattr(r, m)) for m in MEASURES))
        return buf.getvalue()

    def to_table(self, label: str = "Target vs.") -> str:
        """Measures as rows, one column per level, 4 decimals."""
        heads = [f"{label} {r.level}" for r in self.records]
        width = max([len(h) for h in heads] + [8])
        lines = ["".ljust(5) + "".join(h.rjust(width + 2) for h in heads)]
        for m in MEASURES:
            cells = []
            for r in self.records:
                v = getattr(r, m)
                v = 0.0 if abs(v) < 5e-5 else v  # no "-0.0000"
                cells.append(f"{v:.4f}".rjust(width + 2))
            lines.append(m.ljust(5) + "".join(cells))
        return "\n".join(lines)


def measures_from_aligned(A, T, level: str = "") -> EvaluationRecord:
    """Measures for a configuration ``A`` already aligned onto target ``T``."""
    A = np.asarray(A, dtype=float)
    T = np.asarray(T, dtype=float)
    Tc = T - T.mean(axis=0)
    Ac = A - A.mean(axis=0)
    ss_t = float(np.sum(Tc**2))
    D = (A - T).ravel()
    ps = float(np.sum(D**2) / ss_t)
    cc = float(np.sum(Ac * Tc) / np.sqrt(np.sum(Ac**2) * ss_t))
    cc = min(1.0, max(-1.0, cc))
    return EvaluationRecord(level, ps, cc, float(np.mean(np.abs(D))), float(np.mean(D)),
                            float(np.sqrt(np.mean(D**2))))


def evaluate_pair(config, target, level: str = "") -> EvaluationRecord:
    config = np.asarray(config, dtype=float)
    target = np.asarray(target, dtype=float)
    if config.shape != target.shape:
        raise ShapeError(f"configuration {config.shape} and target {target.shape} differ in shape")
    if config.shape[0] < 2:
        raise DegenerateConfigurationError("evaluation needs at least 2 matched points")
    if np.sum((target - target.mean(axis=0)) ** 2) <= 1e-300:
        raise DegenerateConfigurationError("target configuration has zero spread")
    tr = orthogonal_procrustes(config, target, allow_scale=True)
    return measures_from_aligned(tr.apply(config), target, level)


def evaluate_series(aligned: AlignmentResult) -> EvaluationReport:
    target = aligned.consensus
    records = [evaluate_pair(aligned.configuration(i), target, st.level)
               for i, st in enumerate(aligned.aligned_states)]
    return EvaluationReport(tuple(records))
