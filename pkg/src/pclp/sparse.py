"""Dual-indexed nonnegative sparse matrix with monotone entry mutation.

The matrix keeps both a row-major and a column-major view of the same
entry set so that solvers can walk a row's support and then propagate
the effect of a weight change through the touched columns. Zero-valued
entries are never stored; setting an entry to zero removes it from both
views.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator

import numpy as np


class UpdateKind(Enum):
    RESTRICT_COVERING_ENTRY = "restrict_covering_entry"
    RELAX_COVERING_ENTRY = "relax_covering_entry"
    RELAX_PACKING_ENTRY = "relax_packing_entry"
    TRANSLATE_PACKING = "translate_packing"
    TRANSLATE_COVERING = "translate_covering"
    TRANSLATE_OBJECTIVE = "translate_objective"


#: entry-update kinds whose new value must be strictly below the stored one
_DECREASING = {UpdateKind.RESTRICT_COVERING_ENTRY, UpdateKind.RELAX_PACKING_ENTRY}
#: entry-update kinds whose new value must be strictly above the stored one
_INCREASING = {UpdateKind.RELAX_COVERING_ENTRY}


@dataclass(frozen=True)
class UpdateEvent:
    """A single monotone update to a matrix entry or an RHS/objective entry.

    ``row``/``col`` are whichever indexes the kind needs; translations carry
    only the index of the translated constraint or variable.
    """

    kind: UpdateKind
    row: int | None
    col: int | None
    new_value: float


class SparseError(ValueError):
    pass


class NonMonotoneUpdate(SparseError):
    pass


class IndexOutOfRange(SparseError):
    pass


class SparseNonnegMatrix:
    """Sparse m-by-n matrix over nonnegative reals, indexed both ways."""

    __slots__ = ("m", "n", "_rows", "_cols", "_row_cache", "_col_cache")

    def __init__(self, m: int, n: int):
        if m < 1 or n < 1:
            raise SparseError(f"matrix must be at least 1x1, got {m}x{n}")
        self.m = m
        self.n = n
        self._rows: list[dict[int, float]] = [dict() for _ in range(m)]
        self._cols: list[dict[int, float]] = [dict() for _ in range(n)]
        self._row_cache: list[tuple[np.ndarray, np.ndarray] | None] = [None] * m
        self._col_cache: list[tuple[np.ndarray, np.ndarray] | None] = [None] * n

    # -- construction ------------------------------------------------------

    @classmethod
    def from_entries(cls, m: int, n: int, entries) -> "SparseNonnegMatrix":
        mat = cls(m, n)
        for i, j, v in entries:
            mat.set(i, j, float(v))
        return mat

    @classmethod
    def from_dense(cls, dense) -> "SparseNonnegMatrix":
        arr = np.asarray(dense, dtype=float)
        if arr.ndim != 2:
            raise SparseError("dense input must be 2-dimensional")
        mat = cls(arr.shape[0], arr.shape[1])
        for i in range(arr.shape[0]):
            for j in range(arr.shape[1]):
                if arr[i, j] != 0.0:
                    mat.set(i, j, float(arr[i, j]))
        return mat

    def copy(self) -> "SparseNonnegMatrix":
        out = SparseNonnegMatrix(self.m, self.n)
        for i, rowmap in enumerate(self._rows):
            out._rows[i] = dict(rowmap)
        for j, colmap in enumerate(self._cols):
            out._cols[j] = dict(colmap)
        return out

    # -- access ------------------------------------------------------------

    def get(self, i: int, j: int) -> float:
        self._check_index(i, j)
        return self._rows[i].get(j, 0.0)

    def set(self, i: int, j: int, value: float) -> None:
        """Unchecked write; use apply_update for monotone event semantics."""
        self._check_index(i, j)
        if value < 0.0:
            raise SparseError(f"negative entry ({i},{j})={value}")
        if value == 0.0:
            self._rows[i].pop(j, None)
            self._cols[j].pop(i, None)
        else:
            self._rows[i][j] = value
            self._cols[j][i] = value
        self._row_cache[i] = None
        self._col_cache[j] = None

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Return (column indexes, values) of row i as parallel arrays."""
        cached = self._row_cache[i]
        if cached is None:
            items = self._rows[i]
            cached = (
                np.fromiter(items.keys(), dtype=np.int64, count=len(items)),
                np.fromiter(items.values(), dtype=np.float64, count=len(items)),
            )
            self._row_cache[i] = cached
        return cached

    def col(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """Return (row indexes, values) of column j as parallel arrays."""
        cached = self._col_cache[j]
        if cached is None:
            items = self._cols[j]
            cached = (
                np.fromiter(items.keys(), dtype=np.int64, count=len(items)),
                np.fromiter(items.values(), dtype=np.float64, count=len(items)),
            )
            self._col_cache[j] = cached
        return cached

    def row_map(self, i: int) -> dict[int, float]:
        return self._rows[i]

    def col_map(self, j: int) -> dict[int, float]:
        return self._cols[j]

    def entries(self) -> Iterator[tuple[int, int, float]]:
        for i, rowmap in enumerate(self._rows):
            for j, v in rowmap.items():
                yield (i, j, v)

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self._rows)

    def max_entry(self) -> float:
        best = 0.0
        for rowmap in self._rows:
            for v in rowmap.values():
                if v > best:
                    best = v
        return best

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.m, self.n))
        for i, j, v in self.entries():
            out[i, j] = v
        return out

    # -- products ----------------------------------------------------------

    def dot_row(self, i: int, x: np.ndarray) -> float:
        cols, vals = self.row(i)
        if len(cols) == 0:
            return 0.0
        return float(vals @ x[cols])

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """Row-major (C x). x has length n."""
        out = np.zeros(self.m)
        for i in range(self.m):
            out[i] = self.dot_row(i, x)
        return out

    def matvec_by_columns(self, x: np.ndarray) -> np.ndarray:
        """Same product accumulated column-wise; used for index consistency checks."""
        out = np.zeros(self.m)
        for j in range(self.n):
            xj = x[j]
            if xj == 0.0:
                continue
            rows, vals = self.col(j)
            if len(rows):
                out[rows] += vals * xj
        return out

    def rmatvec(self, y: np.ndarray) -> np.ndarray:
        """Transpose product (C^T y). y has length m."""
        out = np.zeros(self.n)
        for j in range(self.n):
            rows, vals = self.col(j)
            if len(rows):
                out[j] = float(vals @ y[rows])
        return out

    # -- mutation ----------------------------------------------------------

    def _check_index(self, i: int, j: int) -> None:
        if not (0 <= i < self.m and 0 <= j < self.n):
            raise IndexOutOfRange(f"({i},{j}) outside {self.m}x{self.n}")

    def apply_update(self, event: UpdateEvent) -> float:
        """Apply a monotone entry update; returns the previous value."""
        if event.kind in (UpdateKind.TRANSLATE_PACKING, UpdateKind.TRANSLATE_COVERING,
                          UpdateKind.TRANSLATE_OBJECTIVE):
            raise SparseError("translation events target RHS/objective, not the matrix")
        i, j = event.row, event.col
        if i is None or j is None:
            raise SparseError("entry update needs both row and col")
        self._check_index(i, j)
        old = self.get(i, j)
        new = float(event.new_value)
        if new < 0.0:
            raise SparseError(f"negative value {new}")
        if event.kind in _DECREASING and not new < old:
            raise NonMonotoneUpdate(
                f"{event.kind.value} at ({i},{j}): {new} is not below stored {old}")
        if event.kind in _INCREASING and not new > old:
            raise NonMonotoneUpdate(
                f"{event.kind.value} at ({i},{j}): {new} is not above stored {old}")
        self.set(i, j, new)
        return old


def apply_update(matrix: SparseNonnegMatrix, event: UpdateEvent) -> SparseNonnegMatrix:
    """Functional-style wrapper over SparseNonnegMatrix.apply_update."""
    matrix.apply_update(event)
    return matrix
