"""Dense 2-D matrix of finite reals, the package's only numeric container.

Vectors are 1-row or 1-column matrices; storage is a flat row-major
``array('d')``. Operations delegate to the active kernel backend and are
pure from the caller's perspective unless documented as in-place. Nothing
here shares mutable state, so independent matrices may be used from
concurrent code freely.
"""

from __future__ import annotations

import math
from array import array
from typing import Iterable, Sequence

from .backend import kernels as _K
from .errors import NonFiniteError, ShapeMismatchError


def _zero_buf(size: int) -> array:
    return array("d", bytes(8 * size))


class Matrix:
    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, entries: Iterable[float] | None = None):
        if rows < 1 or cols < 1:
            raise ShapeMismatchError(f"matrix dimensions must be positive, got {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        if entries is None:
            self.data = _zero_buf(rows * cols)
            return
        self.data = array("d", entries)
        if len(self.data) != rows * cols:
            raise ShapeMismatchError(
                f"{rows}x{cols} matrix needs {rows * cols} entries, got {len(self.data)}"
            )
        if not _K.all_finite(self.data, len(self.data)):
            raise NonFiniteError("matrix entries must be finite")

    # -- construction -------------------------------------------------------

    @classmethod
    def _raw(cls, rows: int, cols: int, buf: array) -> "Matrix":
        """Wrap an existing buffer without validation (internal fast path)."""
        m = cls.__new__(cls)
        m.rows = rows
        m.cols = cols
        m.data = buf
        return m

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols)

    @classmethod
    def full(cls, rows: int, cols: int, value: float) -> "Matrix":
        if not math.isfinite(value):
            raise NonFiniteError("fill value must be finite")
        return cls._raw(rows, cols, array("d", [value]) * (rows * cols))

    @classmethod
    def from_rows(cls, rows_of_values: Sequence[Sequence[float]]) -> "Matrix":
        rows = len(rows_of_values)
        if rows == 0:
            raise ShapeMismatchError("need at least one row")
        cols = len(rows_of_values[0])
        flat = []
        for r in rows_of_values:
            if len(r) != cols:
                raise ShapeMismatchError("ragged rows")
            flat.extend(r)
        return cls(rows, cols, flat)

    def copy(self) -> "Matrix":
        return Matrix._raw(self.rows, self.cols, array("d", self.data))

    # -- access --------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def size(self) -> int:
        return self.rows * self.cols

    def get(self, i: int, j: int) -> float:
        return self.data[i * self.cols + j]

    def to_rows(self) -> list[list[float]]:
        c = self.cols
        return [list(self.data[i * c:(i + 1) * c]) for i in range(self.rows)]

    def column(self, j: int) -> list[float]:
        return [self.data[i * self.cols + j] for i in range(self.rows)]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and self.shape == other.shape
            and self.data == other.data
        )

    __hash__ = None  # mutable buffer; not hashable

    def __repr__(self) -> str:
        if self.size <= 16:
            return f"Matrix({self.to_rows()!r})"
        return f"Matrix({self.rows}x{self.cols})"

    def is_finite(self) -> bool:
        return bool(_K.all_finite(self.data, self.size))

    # -- products ------------------------------------------------------------

    def matmul(self, other: "Matrix") -> "Matrix":
        """self (n x m) . other (m x p)."""
        if self.cols != other.rows:
            raise ShapeMismatchError(f"cannot multiply {self.shape} by {other.shape}")
        out = _zero_buf(self.rows * other.cols)
        _K.matmul_nn(self.data, other.data, out, self.rows, self.cols, other.cols)
        return Matrix._raw(self.rows, other.cols, out)

    def matmul_tn(self, other: "Matrix") -> "Matrix":
        """transpose(self (n x m)) . other (n x p), without materializing the transpose."""
        if self.rows != other.rows:
            raise ShapeMismatchError(
                f"cannot multiply transpose of {self.shape} by {other.shape}"
            )
        out = _zero_buf(self.cols * other.cols)
        _K.matmul_tn(self.data, other.data, out, self.rows, self.cols, other.cols)
        return Matrix._raw(self.cols, other.cols, out)

    def matmul_nt(self, other: "Matrix") -> "Matrix":
        """self (n x m) . transpose(other (p x m))."""
        if self.cols != other.cols:
            raise ShapeMismatchError(
                f"cannot multiply {self.shape} by transpose of {other.shape}"
            )
        out = _zero_buf(self.rows * other.rows)
        _K.matmul_nt(self.data, other.data, out, self.rows, self.cols, other.rows)
        return Matrix._raw(self.rows, other.rows, out)

    def transpose(self) -> "Matrix":
        out = _zero_buf(self.size)
        r, c = self.rows, self.cols
        for i in range(r):
            for j in range(c):
                out[j * r + i] = self.data[i * c + j]
        return Matrix._raw(c, r, out)

    # -- elementwise ---------------------------------------------------------

    def sub(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        out = _zero_buf(self.size)
        _K.subtract(self.data, other.data, out, self.size)
        return Matrix._raw(self.rows, self.cols, out)

    def hadamard(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        out = _zero_buf(self.size)
        _K.hadamard(self.data, other.data, out, self.size)
        return Matrix._raw(self.rows, self.cols, out)

    def scale(self, factor: float) -> "Matrix":
        out = _zero_buf(self.size)
        _K.scale_fill(self.data, out, self.size, factor)
        return Matrix._raw(self.rows, self.cols, out)

    def sgn(self) -> "Matrix":
        """Entrywise two-valued sign (+1 for entries >= 0)."""
        out = _zero_buf(self.size)
        _K.sgn_fill(self.data, out, self.size)
        return Matrix._raw(self.rows, self.cols, out)

    def sign3(self) -> "Matrix":
        """Entrywise three-valued sign in {-1, 0, +1}."""
        out = _zero_buf(self.size)
        _K.sign3_fill(self.data, out, self.size)
        return Matrix._raw(self.rows, self.cols, out)

    # -- row/column structure --------------------------------------------------

    def with_bias_row(self) -> "Matrix":
        """Copy with a row of ones appended at the bottom."""
        buf = array("d", self.data)
        buf.extend(array("d", [1.0]) * self.cols)
        return Matrix._raw(self.rows + 1, self.cols, buf)

    def drop_last_row(self) -> "Matrix":
        if self.rows < 2:
            raise ShapeMismatchError("cannot drop the only row")
        return Matrix._raw(self.rows - 1, self.cols, self.data[: (self.rows - 1) * self.cols])

    def gather_columns(self, indices: Sequence[int]) -> "Matrix":
        idx = array("q", indices)
        k = len(idx)
        if k == 0:
            raise ShapeMismatchError("need at least one column index")
        out = _zero_buf(self.rows * k)
        _K.gather_columns(self.data, self.rows, self.cols, idx, out, k)
        return Matrix._raw(self.rows, k, out)

    def argmax_columns(self) -> list[int]:
        out = array("q", bytes(8 * self.cols))
        _K.argmax_columns(self.data, self.rows, self.cols, out)
        return list(out)

    def mean_sq_diff(self, other: "Matrix") -> float:
        """Mean of squared entrywise differences, over all rows*cols entries."""
        self._same_shape(other)
        return _K.mean_sq_diff(self.data, other.data, self.size)

    def _same_shape(self, other: "Matrix") -> None:
        if self.shape != other.shape:
            raise ShapeMismatchError(f"shape mismatch: {self.shape} vs {other.shape}")
