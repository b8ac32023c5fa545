"""Sample ingestion, order components, anti-ranks and the rank transform.

Conventions used throughout the package:

* a sample is an ``n x d`` matrix of non-negative finite reals, one row per
  observation and one column per risk component;
* *levels* are 1-based: level ``l`` refers to the l-th largest entry of a
  row, so ``l = 1`` is the row maximum and ``l = d`` the row minimum;
* column indices in code are 0-based.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    EmptyInputError,
    EmptySampleError,
    InvalidSampleError,
    LevelOutOfRangeError,
    NegativeValueError,
    NonNumericError,
    RaggedRowsError,
)

__all__ = [
    "SampleMatrix",
    "RankTransformed",
    "load_csv",
    "sort_descending",
    "lth_largest",
    "anti_ranks",
    "rank_transform",
    "inverse_rank_matrix",
]


@dataclass(frozen=True)
class SampleMatrix:
    """Immutable ``n x d`` matrix of non-negative observations.

    ``values[i, j]`` is the j-th component of observation i.  Column names
    are kept for reports; they default to ``col1 .. cold``.
    """

    values: np.ndarray
    columns: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 2:
            raise InvalidSampleError(f"expected a 2-d matrix, got ndim={arr.ndim}")
        n, d = arr.shape
        if n < 1:
            raise EmptySampleError("sample has no rows")
        if d < 2:
            raise InvalidSampleError(f"need at least 2 columns, got {d}")
        if not np.isfinite(arr).all():
            raise InvalidSampleError("sample entries must be finite")
        if (arr < 0).any():
            i, j = np.argwhere(arr < 0)[0]
            raise NegativeValueError(f"negative entry {arr[i, j]!r} at row {i}, column {j}")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)
        cols = tuple(self.columns) or tuple(f"col{j + 1}" for j in range(d))
        if len(cols) != d:
            raise InvalidSampleError(f"{len(cols)} column names for {d} columns")
        object.__setattr__(self, "columns", cols)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def column(self, j: int) -> np.ndarray:
        """Return column ``j`` (0-based)."""
        return self.values[:, j]

    def level_values(self, level: int) -> np.ndarray:
        """Per-row l-th largest component, for all rows at once."""
        _check_level(level, self.d)
        if self.d == 1:  # pragma: no cover - guarded by d >= 2
            return self.values[:, 0]
        idx = self.d - level
        return np.partition(self.values, idx, axis=1)[:, idx]


@dataclass(frozen=True)
class RankTransformed:
    """Rank-standardized values ``m_i`` at one level plus their order statistics.

    ``values[i]`` is the l-th largest of ``(1/r_i^j, j = 1..d)`` where
    ``r_i^j`` are the anti-ranks of the source sample; ``order_stats`` is the
    same vector sorted non-increasing.
    """

    level: int
    values: np.ndarray
    order_stats: np.ndarray

    def kth_order_stat(self, k: int) -> float:
        """k-th largest rank value (1-based k)."""
        n = self.order_stats.shape[0]
        if not 1 <= k <= n:
            raise LevelOutOfRangeError(f"k={k} outside [1, {n}]")
        return float(self.order_stats[k - 1])


def _check_level(level: int, d: int) -> None:
    if not 1 <= level <= d:
        raise LevelOutOfRangeError(f"level {level} outside [1, {d}]")


def sort_descending(values: Iterable[float]) -> np.ndarray:
    """Sort a vector non-increasing; ties keep their multiplicity."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise EmptyInputError("cannot sort an empty vector")
    return np.sort(arr)[::-1]


def lth_largest(row: Iterable[float], level: int) -> float:
    """The l-th largest entry of ``row``, counted with multiplicity."""
    arr = np.asarray(row, dtype=np.float64)
    if arr.size == 0:
        raise EmptyInputError("empty row")
    _check_level(level, arr.size)
    return float(np.partition(arr, arr.size - level)[arr.size - level])


def _as_values(sample: SampleMatrix | np.ndarray) -> np.ndarray:
    if isinstance(sample, SampleMatrix):
        return sample.values
    return SampleMatrix(np.asarray(sample, dtype=np.float64)).values


def anti_ranks(sample: SampleMatrix | np.ndarray) -> np.ndarray:
    """Columnwise anti-ranks: ``r[i, j] = #{p : Z[p, j] >= Z[i, j]}``.

    Ties count each other, so equal entries share the same (largest) rank.
    The result is invariant under strictly increasing maps applied per
    column.
    """
    values = _as_values(sample)
    n, d = values.shape
    ranks = np.empty((n, d), dtype=np.int64)
    for j in range(d):
        col = values[:, j]
        ascending = np.sort(col)
        # #{p : Z_p >= v} = n - #{p : Z_p < v}
        ranks[:, j] = n - np.searchsorted(ascending, col, side="left")
    return ranks


def rank_transform(sample: SampleMatrix | np.ndarray, level: int) -> RankTransformed:
    """Standardize margins via ``1/r_i^j`` and take the per-row l-th largest."""
    values = _as_values(sample)
    _check_level(level, values.shape[1])
    inverse = 1.0 / anti_ranks(sample)
    idx = values.shape[1] - level
    m = np.partition(inverse, idx, axis=1)[:, idx]
    return RankTransformed(level=level, values=m, order_stats=np.sort(m)[::-1])


def inverse_rank_matrix(sample: SampleMatrix | np.ndarray) -> np.ndarray:
    """Matrix of ``1/r_i^j`` values, the nonparametric standardization."""
    return 1.0 / anti_ranks(sample)


def _decode_stream(source) -> Iterable[str]:
    if isinstance(source, (str, Path)):
        path = Path(source)
        return io.StringIO(path.read_text(encoding="utf-8"))
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8"))
    if hasattr(source, "read"):
        payload = source.read()
        if isinstance(payload, bytes):
            payload = payload.decode("utf-8")
        return io.StringIO(payload)
    raise NonNumericError(f"unsupported CSV source type: {type(source)!r}")


def load_csv(
    source,
    *,
    delimiter: str = ",",
    header: bool = True,
    columns: Sequence[str | int] | None = None,
) -> SampleMatrix:
    """Read a delimited text file into a :class:`SampleMatrix`.

    Parameters
    ----------
    source:
        Path, bytes, or file-like object holding UTF-8 delimited text.
    delimiter:
        Field separator, default comma.
    header:
        Whether the first line carries column names.
    columns:
        Optional subset of columns to keep, by name or 0-based index.
    """
    reader = csv.reader(_decode_stream(source), delimiter=delimiter)
    rows: list[list[str]] = [row for row in reader if row and any(f.strip() for f in row)]
    names: tuple[str, ...] = ()
    if header:
        if not rows:
            raise EmptySampleError("no rows at all, expected a header line")
        names = tuple(f.strip() for f in rows[0])
        rows = rows[1:]
    if not rows:
        raise EmptySampleError("no data rows")

    width = len(rows[0])
    data = np.empty((len(rows), width), dtype=np.float64)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise RaggedRowsError(f"row {i + 1} has {len(row)} fields, expected {width}")
        for j, fieldtext in enumerate(row):
            try:
                value = float(fieldtext)
            except ValueError:
                raise NonNumericError(f"cannot parse {fieldtext!r} at row {i + 1}, column {j + 1}") from None
            if not np.isfinite(value):
                raise NonNumericError(f"non-finite entry {fieldtext!r} at row {i + 1}, column {j + 1}")
            if value < 0:
                raise NegativeValueError(f"negative entry {fieldtext!r} at row {i + 1}, column {j + 1}")
            data[i, j] = value
    if not names:
        names = tuple(f"col{j + 1}" for j in range(width))
    if len(names) != width:
        raise RaggedRowsError(f"header has {len(names)} fields, data rows have {width}")

    if columns is not None:
        keep: list[int] = []
        for c in columns:
            if isinstance(c, int):
                if not 0 <= c < width:
                    raise LevelOutOfRangeError(f"column index {c} outside [0, {width - 1}]")
                keep.append(c)
            else:
                if c not in names:
                    raise NonNumericError(f"no column named {c!r} (have {names})")
                keep.append(names.index(c))
        data = data[:, keep]
        names = tuple(names[j] for j in keep)

    return SampleMatrix(values=data, columns=names)
