"""Tabular input: CSV ingestion and partitioning into ordered time slices."""

from __future__ import annotations

import csv
import datetime as dt
import math
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CardinalityError, DataError, MissingColumnError, ParseError, UndersizedSliceError

IMPLICIT_GROUP = "all"


@dataclass(frozen=True, eq=False)
class Dataset:
    """Numeric block plus the time and group labels of every row.

    ``levels`` holds the distinct time labels in their resolved order.
    """

    numeric_block: np.ndarray
    time_labels: tuple[str, ...]
    group_labels: tuple[str, ...]
    variable_names: tuple[str, ...]
    levels: tuple[str, ...]
    column_units: tuple[str | None, ...] | None = None

    def __post_init__(self) -> None:
        X = np.asarray(self.numeric_block, dtype=float)
        if X.ndim != 2:
            raise DataError("numeric block must be two-dimensional")
        n, p = X.shape
        if p < 2:
            raise DataError(f"at least two numeric variables are required, got {p}")
        if len(self.variable_names) != p:
            raise DataError("variable_names does not match the numeric block width")
        if len(self.time_labels) != n or len(self.group_labels) != n:
            raise DataError("time/group labels must have one entry per row")
        bad = np.argwhere(~np.isfinite(X))
        if bad.size:
            r, c = bad[0]
            raise ParseError(f"non-finite value in row {r + 1}, column {self.variable_names[c]!r}",
                             row=int(r) + 1, column=self.variable_names[c])
        if len(set(self.levels)) != len(self.levels):
            raise DataError("duplicate entries in level order")
        present = set(self.time_labels)
        if set(self.levels) != present:
            missing = [lv for lv in self.levels if lv not in present]
            unknown = sorted(present - set(self.levels))
            if missing:
                raise UndersizedSliceError(
                    f"time level(s) with no rows: {', '.join(missing)}", level=missing[0])
            raise DataError(f"time labels missing from level order: {', '.join(unknown)}")
        if len(self.levels) < 2:
            raise CardinalityError(
                f"the time variable needs at least 2 distinct levels, found {len(self.levels)}")
        X.setflags(write=False)
        object.__setattr__(self, "numeric_block", X)

    @property
    def n(self) -> int:
        return self.numeric_block.shape[0]

    @property
    def p(self) -> int:
        return self.numeric_block.shape[1]

    @classmethod
    def from_arrays(cls, X, time_labels: Sequence, group_labels: Sequence | None = None,
                    variable_names: Sequence[str] | None = None,
                    level_order: Sequence[str] | None = None) -> "Dataset":
        """Build a dataset from in-memory arrays.

        Without ``group_labels`` every row belongs to one implicit group.
        """
        X = np.asarray(X, dtype=float)
        times = tuple(str(t) for t in time_labels)
        groups = (tuple(str(g) for g in group_labels) if group_labels is not None
                  else (IMPLICIT_GROUP,) * len(times))
        names = (tuple(variable_names) if variable_names is not None
                 else tuple(f"V{j + 1}" for j in range(X.shape[1] if X.ndim == 2 else 0)))
        levels = resolve_level_order(times, level_order)
        return cls(X, times, groups, names, levels)


@dataclass(frozen=True)
class TimeSlice:
    level: str
    row_indices: tuple[int, ...]

    @property
    def count(self) -> int:
        return len(self.row_indices)


def _natural_key(labels: Sequence[str]):
    try:
        return {lab: int(lab) for lab in labels}
    except ValueError:
        pass
    try:
        return {lab: dt.date.fromisoformat(lab) for lab in labels}
    except ValueError:
        return None


def resolve_level_order(time_labels: Sequence[str],
                        level_order: Sequence[str] | None = None) -> tuple[str, ...]:
    """Order of the distinct time levels.

    An explicit ``level_order`` wins. Otherwise integer or ISO-date labels sort
    ascending and anything else keeps first-appearance order.
    """
    seen = list(dict.fromkeys(time_labels))
    if level_order is not None:
        order = tuple(str(x) for x in level_order)
        unknown = [x for x in seen if x not in order]
        if unknown:
            raise DataError(f"--level-order omits level(s): {', '.join(unknown)}", flag="--level-order")
        extra = [x for x in order if x not in seen]
        if extra:
            raise UndersizedSliceError(f"--level-order names level(s) with no rows: {', '.join(extra)}",
                                       level=extra[0], flag="--level-order")
        return order
    keys = _natural_key(seen)
    if keys is not None:
        return tuple(sorted(seen, key=keys.__getitem__))
    return tuple(seen)


def ingest_csv(path, time_var: str, group_var: str | None = None,
               level_order: Sequence[str] | None = None) -> Dataset:
    """Read a header-first UTF-8 CSV into a :class:`Dataset`.

    Every column other than ``time_var`` and ``group_var`` must be numeric.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path} is empty") from None
        rows = [r for r in reader if r and any(cell.strip() for cell in r)]

    for name, flag in ((time_var, "--time-var"), (group_var, "--group-var")):
        if name is not None and name not in header:
            raise MissingColumnError(f"column {name!r} not found; available: {', '.join(header)}",
                                     flag=flag)
    t_idx = header.index(time_var)
    g_idx = header.index(group_var) if group_var is not None else None
    num_idx = [j for j in range(len(header)) if j not in (t_idx, g_idx)]

    values = np.empty((len(rows), len(num_idx)))
    times, groups = [], []
    for i, row in enumerate(rows):
        line = i + 2
        if len(row) != len(header):
            raise ParseError(f"line {line}: expected {len(header)} fields, got {len(row)}", row=line)
        times.append(row[t_idx].strip())
        groups.append(row[g_idx].strip() if g_idx is not None else IMPLICIT_GROUP)
        for k, j in enumerate(num_idx):
            cell = row[j].strip()
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(f"line {line}, column {header[j]!r}: cannot parse {cell!r} as a number",
                                 row=line, column=header[j]) from None
            if not math.isfinite(v):
                raise ParseError(f"line {line}, column {header[j]!r}: non-finite value {cell!r}",
                                 row=line, column=header[j])
            values[i, k] = v

    levels = resolve_level_order(times, level_order)
    return Dataset(values, tuple(times), tuple(groups), tuple(header[j] for j in num_idx), levels)


def slice_by_time(d: Dataset) -> list[TimeSlice]:
    buckets: dict[str, list[int]] = {lv: [] for lv in d.levels}
    for i, t in enumerate(d.time_labels):
        buckets[t].append(i)
    return [TimeSlice(lv, tuple(buckets[lv])) for lv in d.levels]


def row_keys(groups: Sequence[str]) -> list[tuple[str, int]]:
    """(group, ordinal within group) for each row, in row order."""
    counts: dict[str, int] = {}
    keys = []
    for g in groups:
        k = counts.get(g, 0)
        keys.append((g, k))
        counts[g] = k + 1
    return keys


def ingest_target_csv(path, group_var: str | None, variable_names: Sequence[str],
                      time_var: str | None = None) -> tuple[np.ndarray, tuple[str, ...]]:
    """Read a single-configuration target table.

    Numeric columns are selected by ``variable_names`` (in that order); a time
    column, if present, is ignored.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path} is empty", flag="--target") from None
        rows = [r for r in reader if r and any(cell.strip() for cell in r)]
    missing = [v for v in variable_names if v not in header]
    if group_var is not None and group_var not in header:
        missing.insert(0, group_var)
    if missing:
        raise MissingColumnError(f"target file lacks column(s): {', '.join(missing)}", flag="--target")
    cols = [header.index(v) for v in variable_names]
    X = np.empty((len(rows), len(cols)))
    groups = []
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise ParseError(f"target line {i + 2}: expected {len(header)} fields", row=i + 2,
                             flag="--target")
        groups.append(row[header.index(group_var)].strip() if group_var is not None else IMPLICIT_GROUP)
        for k, j in enumerate(cols):
            try:
                X[i, k] = float(row[j])
            except ValueError:
                raise ParseError(f"target line {i + 2}, column {header[j]!r}: cannot parse {row[j]!r}",
                                 row=i + 2, column=header[j], flag="--target") from None
    if not np.all(np.isfinite(X)):
        raise ParseError("target contains non-finite values", flag="--target")
    return X, tuple(groups)
