"""Two-component PCA biplots, globally or per time slice."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field, replace

import numpy as np

from .data import Dataset, TimeSlice
from .errors import DataError, DegenerateColumnError, RankDeficiencyError, UndersizedSliceError

RANK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class StandardizationStats:
    means: np.ndarray
    scales: np.ndarray
    scaled: bool


@dataclass(frozen=True, eq=False)
class BiplotState:
    """One time level's biplot.

    ``Z`` holds sample principal coordinates (n_t x 2) and ``V`` variable
    standard coordinates (p x 2). ``singular_values`` keeps the full spectrum
    of the decomposition the state came from.
    """

    level: str
    Z: np.ndarray
    V: np.ndarray
    variable_names: tuple[str, ...]
    group_of_row: tuple[str, ...]
    explained_variance: tuple[float, float]
    singular_values: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def n(self) -> int:
        return self.Z.shape[0]

    def with_coords(self, Z: np.ndarray | None = None, V: np.ndarray | None = None) -> "BiplotState":
        return replace(self, Z=self.Z if Z is None else Z, V=self.V if V is None else V)


def standardize(X, scaled: bool = True, names: Sequence[str] | None = None):
    """Center the columns of ``X`` and optionally divide by the sample sd.

    Returns ``(X_std, StandardizationStats)``.
    """
    X = np.asarray(X, dtype=float)
    if X.shape[0] < 2:
        raise DataError("standardization needs at least 2 rows")
    means = X.mean(axis=0)
    Xc = X - means
    if scaled:
        sd = X.std(axis=0, ddof=1)
        # relative test so tiny-but-real variation on large magnitudes survives
        floor = 1e-12 * np.maximum(np.abs(means), 1.0)
        bad = np.flatnonzero(sd <= floor)
        if bad.size:
            j = int(bad[0])
            col = names[j] if names is not None else f"column {j}"
            raise DegenerateColumnError(f"{col} has zero variance and cannot be scaled", column=col)
        Xc = Xc / sd
    else:
        sd = np.ones(X.shape[1])
    return Xc, StandardizationStats(means, sd, scaled)


TIE_TOL = 1e-12


def sign_convention(V: np.ndarray) -> np.ndarray:
    """Per-column signs making each column's largest-magnitude entry positive.

    Magnitudes within ``TIE_TOL`` of the column maximum count as tied and the
    lowest index wins, so rounding noise cannot flip a sign (two standardized
    variables always load +-1/sqrt(2)).
    """
    A = np.abs(V)
    idx = np.argmax(A >= A.max(axis=0) - TIE_TOL, axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return signs


def _svd_biplot(Xs: np.ndarray, level: str, names, groups) -> BiplotState:
    n, p = Xs.shape
    if p < 2:
        raise DataError("a 2-D biplot needs at least 2 variables")
    if n < 3:
        raise UndersizedSliceError(f"level {level!r} has {n} rows; at least 3 are required", level=level)
    U, d, Vt = np.linalg.svd(Xs, full_matrices=False)
    if d.size < 2 or d[0] == 0 or d[1] <= RANK_TOL * d[0]:
        raise RankDeficiencyError(f"level {level!r}: data has rank < 2, no 2-D biplot exists")
    V = Vt[:2].T.copy()
    signs = sign_convention(V)
    V *= signs
    Z = U[:, :2] * (d[:2] * signs)
    total = float(np.sum(d**2))
    ev = (float(d[0] ** 2 / total), float(d[1] ** 2 / total))
    return BiplotState(level, Z, V, tuple(names), tuple(groups), ev, d)


def pca_biplot(X, scaled: bool = True, level: str = "all", variable_names=None,
               groups=None) -> BiplotState:
    X = np.asarray(X, dtype=float)
    if X.shape[0] < 3:
        raise UndersizedSliceError(f"level {level!r} has {X.shape[0]} rows; at least 3 are required",
                                   level=level)
    names = variable_names if variable_names is not None else [f"V{j + 1}" for j in range(X.shape[1])]
    groups = groups if groups is not None else ["all"] * X.shape[0]
    Xs, _ = standardize(X, scaled, names)
    return _svd_biplot(Xs, level, names, groups)


def global_biplot(d: Dataset, scaled: bool = True) -> BiplotState:
    return pca_biplot(d.numeric_block, scaled, "all", d.variable_names, d.group_labels)


def project_slices(global_state: BiplotState, slices: Sequence[TimeSlice]) -> list[BiplotState]:
    """Split the global scores by slice; every result shares the global ``V``."""
    n = global_state.n
    out = []
    for s in slices:
        idx = np.asarray(s.row_indices, dtype=int)
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise IndexError(f"slice {s.level!r} indexes rows outside the global configuration")
        out.append(BiplotState(
            level=s.level,
            Z=global_state.Z[idx],
            V=global_state.V,
            variable_names=global_state.variable_names,
            group_of_row=tuple(global_state.group_of_row[i] for i in idx),
            explained_variance=global_state.explained_variance,
            singular_values=global_state.singular_values,
        ))
    return out


def per_slice_pca(d: Dataset, slices: Sequence[TimeSlice], scaled: bool = True,
                  global_standardize: bool = False) -> list[BiplotState]:
    """Independent PCA for every slice.

    With ``global_standardize`` the data are centered/scaled once over all
    rows and each slice is decomposed without re-centering.
    """
    for s in slices:
        if s.count < 3:
            raise UndersizedSliceError(
                f"level {s.level!r} has {s.count} rows; per-slice PCA needs at least 3", level=s.level)
    if global_standardize:
        Xg, _ = standardize(d.numeric_block, scaled, d.variable_names)
    states = []
    for s in slices:
        idx = list(s.row_indices)
        groups = [d.group_labels[i] for i in idx]
        if global_standardize:
            states.append(_svd_biplot(Xg[idx], s.level, d.variable_names, groups))
        else:
            Xs, _ = standardize(d.numeric_block[idx], scaled, d.variable_names)
            states.append(_svd_biplot(Xs, s.level, d.variable_names, groups))
    return states
