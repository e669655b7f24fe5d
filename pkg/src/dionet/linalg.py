"""Small dense row-major matrices and vectors of float64.

Only what the training code needs: construction with eager shape and
finiteness checks, a matrix product, ``axpy`` and the squared Frobenius
norm. Values are treated as immutable once built.
"""
from __future__ import annotations

from array import array
from typing import Iterable, Sequence

from ._backend import kernels
from .errors import NumericError, ShapeError


def _as_buffer(values: Iterable[float]) -> array:
    buf = array("d", values)
    if not kernels.all_finite(buf):
        raise NumericError("non-finite value")
    return buf


class Matrix:
    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows: int, cols: int, data: Iterable[float]):
        if rows < 0 or cols < 0:
            raise ShapeError(f"negative shape ({rows}, {cols})")
        buf = _as_buffer(data)
        if len(buf) != rows * cols:
            raise ShapeError(f"{len(buf)} values for a {rows}x{cols} matrix")
        self.rows = rows
        self.cols = cols
        self._data = buf

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> Matrix:
        if not rows:
            return cls(0, 0, [])
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ShapeError("ragged rows")
        return cls(len(rows), ncols, [float(v) for r in rows for v in r])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> Matrix:
        return cls(rows, cols, array("d", bytes(8 * rows * cols)))

    @classmethod
    def identity(cls, n: int) -> Matrix:
        data = array("d", bytes(8 * n * n))
        for i in range(n):
            data[i * n + i] = 1.0
        return cls(n, n, data)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def data(self) -> tuple[float, ...]:
        return tuple(self._data)

    def __getitem__(self, ij: tuple[int, int]) -> float:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        return self._data[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return Vector(self._data[i * self.cols:(i + 1) * self.cols])

    def tolist(self) -> list[list[float]]:
        c = self.cols
        return [list(self._data[i * c:(i + 1) * c]) for i in range(self.rows)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __repr__(self) -> str:
        return f"Matrix({self.tolist()!r})"


class Vector:
    __slots__ = ("_data",)

    def __init__(self, data: Iterable[float]):
        self._data = _as_buffer(data)

    @classmethod
    def zeros(cls, n: int) -> Vector:
        return cls(array("d", bytes(8 * n)))

    def __len__(self) -> int:
        return len(self._data)

    def __getitem__(self, i: int) -> float:
        return self._data[i]

    def __iter__(self):
        return iter(self._data)

    @property
    def data(self) -> tuple[float, ...]:
        return tuple(self._data)

    def tolist(self) -> list[float]:
        return list(self._data)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Vector):
            return NotImplemented
        return self._data == other._data

    def __repr__(self) -> str:
        return f"Vector({self.tolist()!r})"


def _checked(buf: array, what: str) -> array:
    if not kernels.all_finite(buf):
        raise NumericError(f"{what} produced a non-finite value")
    return buf


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if a.cols != b.rows:
        raise ShapeError(f"matmul {a.shape} x {b.shape}")
    out = kernels.matmul(a._data, b._data, a.rows, a.cols, b.cols)
    return Matrix(a.rows, b.cols, _checked(out, "matmul"))


def axpy(alpha: float, x, y):
    """Return ``alpha * x + y`` for two matrices (or two vectors) of equal shape."""
    if type(x) is not type(y):
        raise ShapeError("axpy operands must both be matrices or both vectors")
    if isinstance(x, Matrix):
        if x.shape != y.shape:
            raise ShapeError(f"axpy {x.shape} vs {y.shape}")
        return Matrix(x.rows, x.cols, _checked(kernels.axpy(float(alpha), x._data, y._data), "axpy"))
    if len(x) != len(y):
        raise ShapeError(f"axpy length {len(x)} vs {len(y)}")
    return Vector(_checked(kernels.axpy(float(alpha), x._data, y._data), "axpy"))


def frobenius_sq(x) -> float:
    s = kernels.sumsq(x._data)
    if s != s or s == float("inf"):
        raise NumericError("frobenius_sq overflowed")
    return s
