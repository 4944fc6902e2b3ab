"""Reflection correction and Procrustes alignment of biplot series."""

from __future__ import annotations

import warnings
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .data import row_keys
from .errors import (BalanceError, ConfigError, DegenerateConfigurationError, ShapeError,
                     UnknownLevelError)
from .pca import BiplotState

AXES = {"x": np.array([1.0, -1.0]), "y": np.array([-1.0, 1.0]), "xy": np.array([-1.0, -1.0])}


class ConvergenceWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class SimilarityTransform:
    """``x -> s * x @ Q + t`` applied row-wise."""

    Q: np.ndarray
    s: float = 1.0
    t: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def apply(self, X: np.ndarray, translate: bool = True) -> np.ndarray:
        Y = self.s * (np.asarray(X, dtype=float) @ self.Q)
        return Y + self.t if translate else Y

    @property
    def is_reflection(self) -> bool:
        return bool(np.linalg.det(self.Q) < 0)


@dataclass(eq=False)
class AlignmentResult:
    aligned_states: list[BiplotState]
    transforms: list[SimilarityTransform]
    consensus: np.ndarray
    iterations: int = 0
    final_rss: float = 0.0
    rss_history: list[float] = field(default_factory=list)
    converged: bool = True
    target_supplied: bool = False
    # row order of ``consensus``; configurations are compared in this order
    row_order: list = field(default_factory=list)
    align_on: str = "samples"
    target: BiplotState | None = None
    aligned_configs: list[np.ndarray] = field(default_factory=list)

    def configuration(self, i: int) -> np.ndarray:
        """The i-th aligned configuration, rows in ``row_order``."""
        return _config(self.aligned_states[i], self.row_order, self.align_on)


def apply_reflection(state: BiplotState, axis: str) -> BiplotState:
    try:
        flip = AXES[axis]
    except KeyError:
        raise ConfigError(f"unknown reflection axis {axis!r}; use one of x, y, xy",
                          flag="--reflect") from None
    return state.with_coords(Z=state.Z * flip, V=state.V * flip)


def reflect_at_levels(states: Sequence[BiplotState], align_time: Sequence[str],
                      axis: str) -> list[BiplotState]:
    valid = [s.level for s in states]
    unknown = [lv for lv in align_time if lv not in valid]
    if unknown:
        raise UnknownLevelError(
            f"unknown time level(s) {', '.join(unknown)}; valid levels: {', '.join(valid)}",
            flag="--align-time")
    if axis not in AXES:
        apply_reflection(states[0], axis)
    chosen = set(align_time)
    return [apply_reflection(s, axis) if s.level in chosen else s for s in states]


def orthogonal_procrustes(source, target, allow_scale: bool = True) -> SimilarityTransform:
    """Least-squares similarity transform taking ``source`` onto ``target``.

    Q ranges over all orthogonal matrices, reflections included.
    """
    A = np.asarray(source, dtype=float)
    B = np.asarray(target, dtype=float)
    if A.shape != B.shape or A.ndim != 2:
        raise ShapeError(f"configurations must have equal shapes, got {A.shape} and {B.shape}")
    if A.shape[0] < 2:
        raise DegenerateConfigurationError("Procrustes alignment needs at least 2 points")
    mu_a, mu_b = A.mean(axis=0), B.mean(axis=0)
    Ac, Bc = A - mu_a, B - mu_b
    ss_a = float(np.sum(Ac**2))
    if ss_a <= 1e-300:
        raise DegenerateConfigurationError("source configuration has zero spread")
    U, sig, Wt = np.linalg.svd(Ac.T @ Bc)
    Q = U @ Wt
    s = float(sig.sum() / ss_a) if allow_scale else 1.0
    if s <= 0:
        # orthogonal source/target cross-product: any Q is optimal, scale collapses
        raise DegenerateConfigurationError("target carries no signal along the source configuration")
    t = mu_b - s * (mu_a @ Q)
    return SimilarityTransform(Q, s, t)


def _rss(configs: np.ndarray) -> float:
    return float(np.sum((configs - configs.mean(axis=0)) ** 2))


SPECTRAL_STARTS = 16
EXHAUSTIVE_REFLECTIONS = 10


def _as_complex(Y: np.ndarray) -> np.ndarray:
    return Y[..., 0] + 1j * Y[..., 1]


def _rotation(angle: float) -> np.ndarray:
    # right-multiplying row vectors by this matrix is complex multiplication by e^{i angle}
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, s], [-s, c]])


def _spectral_starts(Y: np.ndarray, top: int) -> list[np.ndarray]:
    """Starting orientations from the phase-synchronization relaxation.

    A 2-D configuration is a complex vector and a rotation a unit phase, so
    maximizing the agreement of the rotated configurations is maximizing
    a^H H a over unit phases, H holding the normalized cross products. The
    leading eigenvector of H relaxes that; reflections are complex
    conjugations, searched exhaustively for small ensembles and greedily
    otherwise. Returns one orthogonal matrix per configuration for each of the
    ``top`` best reflection patterns.
    """
    k = len(Y)
    z = _as_complex(Y)
    z = z / np.linalg.norm(z, axis=1, keepdims=True)

    def score(bits):
        w = np.where(np.asarray(bits)[:, None], np.conj(z), z)
        lam, vec = np.linalg.eigh(np.conj(w) @ w.T)
        return lam[-1], vec[:, -1]

    if k <= EXHAUSTIVE_REFLECTIONS:
        patterns = [(0,) + tuple(int(b) for b in np.binary_repr(i, k - 1)) if k > 1 else (0,)
                    for i in range(2 ** (k - 1))]
    else:
        bits = [0] * k
        best = score(bits)[0]
        improved = True
        while improved:
            improved = False
            for i in range(1, k):
                bits[i] ^= 1
                lam = score(bits)[0]
                if lam > best + 1e-12:
                    best, improved = lam, True
                else:
                    bits[i] ^= 1
        patterns = [tuple(bits)]
    scored = sorted(((score(b), b) for b in patterns), key=lambda t: -t[0][0])
    starts = []
    for (_, phases), bits in scored[:top]:
        starts.append(np.stack([(np.diag([1.0, -1.0]) if b else np.eye(2)) @ _rotation(np.angle(a))
                                for b, a in zip(bits, phases)]))
    return starts


def _reference_starts(Y: np.ndarray) -> list[np.ndarray]:
    """Orientations aligning every configuration to configuration j, for each j."""
    out = []
    for j in range(len(Y)):
        Qs = []
        for i in range(len(Y)):
            U, _, Wt = np.linalg.svd(Y[i].T @ Y[j])
            Qs.append(np.eye(Y.shape[2]) if i == j else U @ Wt)
        out.append(np.stack(Qs))
    return out


def _gpa_run(Y: np.ndarray, Qs: np.ndarray, total: float, tol: float, max_iter: int):
    """One monotone GPA descent from centered, pre-oriented configurations ``Y``."""
    k = len(Y)
    Y = Y.copy()
    Qs = Qs.copy()
    scales = np.ones(k)
    history = [_rss(Y)]
    converged = False
    it = 0
    while it < max_iter:
        it += 1
        total_sum = Y.sum(axis=0)
        for i in range(k):
            # rotate onto the mean of the *other* configurations, updated in
            # place; aligning to a mean that contains Y[i] stalls at saddles
            others = total_sum - Y[i]
            U, _, Wt = np.linalg.svd(Y[i].T @ others)
            R = U @ Wt
            new = Y[i] @ R
            total_sum += new - Y[i]
            Y[i] = new
            Qs[i] = Qs[i] @ R
        # ten Berge scaling: leading eigenvector of the configuration correlation matrix
        S = np.einsum("aij,bij->ab", Y, Y)
        sq = np.sqrt(np.diag(S))
        w, vecs = np.linalg.eigh(S / np.outer(sq, sq))
        phi = vecs[:, -1]
        phi = phi if phi.sum() >= 0 else -phi
        rho = np.sqrt(total) * phi / sq
        if np.all(rho > 0):
            Y *= rho[:, None, None]
            scales *= rho
        history.append(_rss(Y))
        if history[-2] - history[-1] < tol:
            converged = True
            break
    return Y, Qs, scales, history, converged, it


def gpa_consensus(configs, tol: float = 1e-10, max_iter: int = 100) -> AlignmentResult:
    """Generalized Procrustes analysis to the mean configuration.

    Each sweep rotates/reflects every configuration in turn onto the mean of
    the others, then rescales all of them (ten Berge's update) and takes the
    consensus as the mean. Iteration stops once the residual sum of squares
    drops by less than ``tol``.

    The residual surface has local minima once there are more than a couple
    of configurations, so the descent is run from several deterministic
    starting orientations: the inputs as given, each input as a common
    reference, and (for 2-D configurations) the best phase-synchronization
    relaxations. The lowest final residual wins, ties going to the inputs as
    given; ``rss_history`` is that run's. Since GPA fixes the ensemble only up
    to one shared orthogonal transform, the winner is turned to agree with
    the consensus of the as-given run.

    Scale factors keep the ensemble's total centered sum of squares fixed.
    ``aligned_states`` is left empty; the aligned configurations are in
    ``aligned_configs``.
    """
    arrs = [np.asarray(c, dtype=float) for c in configs]
    if len(arrs) < 2:
        raise ShapeError("GPA needs at least 2 configurations")
    shape = arrs[0].shape
    if any(a.shape != shape for a in arrs) or len(shape) != 2:
        raise ShapeError(f"GPA configurations must share one shape; got {[a.shape for a in arrs]}")
    k, dim = len(arrs), shape[1]
    means = np.array([a.mean(axis=0) for a in arrs])
    Y0 = np.stack([a - mu for a, mu in zip(arrs, means)])
    norms = np.einsum("kij,kij->k", Y0, Y0)
    if np.any(norms <= 1e-300):
        raise DegenerateConfigurationError("a configuration has zero spread")
    total = float(norms.sum())

    plain = _gpa_run(Y0, np.stack([np.eye(dim)] * k), total, tol, max_iter)
    best = plain
    if k > 2:
        starts = _reference_starts(Y0)
        if dim == 2:
            starts += _spectral_starts(Y0, SPECTRAL_STARTS)
        for Q0 in starts:
            run = _gpa_run(np.einsum("kij,kjl->kil", Y0, Q0), Q0, total, tol, max_iter)
            if run[3][-1] < best[3][-1] - 1e-9 * total:
                best = run
    Y, Qs, scales, history, converged, it = best
    if best is not plain:
        U, _, Wt = np.linalg.svd(Y.mean(axis=0).T @ plain[0].mean(axis=0))
        G = U @ Wt
        Y = Y @ G
        Qs = Qs @ G
    if not converged:
        warnings.warn(f"GPA did not converge in {max_iter} iterations", ConvergenceWarning, stacklevel=2)
    transforms = [SimilarityTransform(Qs[i], float(scales[i]), -scales[i] * (means[i] @ Qs[i]))
                  for i in range(k)]
    return AlignmentResult([], transforms, Y.mean(axis=0), it, history[-1], history, converged,
                           aligned_configs=list(Y))


def _check_balance(states: Sequence[BiplotState]) -> list[tuple[str, int]]:
    ref = sorted(row_keys(states[0].group_of_row))
    bad = [s.level for s in states[1:] if sorted(row_keys(s.group_of_row)) != ref]
    if bad:
        raise BalanceError(
            f"time slices are unbalanced relative to {states[0].level!r}: {', '.join(bad)}; "
            "automated alignment needs the same groups and group sizes in every slice", levels=bad)
    return row_keys(states[0].group_of_row)


def _config(state: BiplotState, order, align_on: str) -> np.ndarray:
    if align_on == "variables":
        return state.V
    pos = {k: j for j, k in enumerate(row_keys(state.group_of_row))}
    return state.Z[[pos[k] for k in order]]


def _apply(state: BiplotState, tr: SimilarityTransform, align_on: str) -> BiplotState:
    # V is directional: rotation and scale only
    return state.with_coords(Z=tr.apply(state.Z, translate=align_on == "samples"),
                             V=tr.apply(state.V, translate=False))


def align_series(states: Sequence[BiplotState], target: BiplotState | None = None,
                 align_on: str = "samples", tol: float = 1e-10, max_iter: int = 100) -> AlignmentResult:
    """Align every state to a consensus (GPA) or to a fixed target.

    The recovered rotation/reflection and scale are applied to both Z and V.
    """
    if align_on not in ("samples", "variables"):
        raise ConfigError(f"unknown alignment configuration {align_on!r}", flag="--align-on")
    if len(states) < 1:
        raise ShapeError("no states to align")
    if align_on == "samples":
        order = _check_balance(states)
        if target is not None and sorted(row_keys(target.group_of_row)) != sorted(order):
            raise ShapeError(
                f"target rows ({target.n}) do not match the slice rows ({len(order)}) "
                "by group and within-group position", flag="--target")
    else:
        names = states[0].variable_names
        bad = [s.level for s in states if s.variable_names != names]
        if bad:
            raise BalanceError(f"variable sets differ at levels {', '.join(bad)}", levels=bad)
        order = list(names)
    configs = [_config(s, order, align_on) for s in states]

    if target is None:
        if len(states) < 2:
            raise ShapeError("consensus alignment needs at least 2 states")
        g = gpa_consensus(configs, tol=tol, max_iter=max_iter)
        aligned = [_apply(s, tr, align_on) for s, tr in zip(states, g.transforms)]
        return AlignmentResult(aligned, g.transforms, g.consensus, g.iterations, g.final_rss,
                               g.rss_history, g.converged, False, order, align_on,
                               aligned_configs=g.aligned_configs)

    if align_on == "variables" and target.variable_names != states[0].variable_names:
        raise ShapeError("target variables differ from the data variables", flag="--target")
    tconf = _config(target, order, align_on)
    transforms = [orthogonal_procrustes(c, tconf, allow_scale=True) for c in configs]
    aligned = [_apply(s, tr, align_on) for s, tr in zip(states, transforms)]
    moved = [tr.apply(c) for c, tr in zip(configs, transforms)]
    rss = float(sum(np.sum((m - tconf) ** 2) for m in moved))
    return AlignmentResult(aligned, transforms, tconf, 1, rss, [rss], True, True, order, align_on,
                           target=target, aligned_configs=moved)
