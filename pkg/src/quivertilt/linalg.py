"""Exact dense linear algebra over a prime field F_p.

Everything downstream (module homs, exactness checks, census enumeration)
reduces to the operations here.  Matrices are immutable wrappers around
int64 numpy arrays with entries in [0, p); row reduction is delegated to the
compiled kernel when available and to the numpy fallback otherwise.

Zero-row and zero-column matrices are legal throughout and behave as zero
maps.
"""

from __future__ import annotations

import os

import numpy as np

if os.environ.get("QUIVERTILT_PURE_KERNEL"):
    from . import _fpkernel_py as _kernel
else:
    try:
        from . import _fpkernel as _kernel  # type: ignore[attr-defined]
    except ImportError:
        from . import _fpkernel_py as _kernel

KERNEL_NAME = _kernel.KERNEL_NAME

# int64 matmul is exact as long as inner * (p-1)^2 fits; generous guard.
_MAX_MODULUS = 1 << 20


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def _check_modulus(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"modulus {p} is not prime")
    if p > _MAX_MODULUS:
        raise ValueError(f"modulus {p} too large for the int64 kernel")


class Matrix:
    """An immutable rows x cols matrix over F_p."""

    __slots__ = ("p", "a")

    def __init__(self, p: int, data, _trusted: bool = False):
        if _trusted:
            a = data
        else:
            _check_modulus(p)
            a = np.array(data, dtype=np.int64)
            if a.ndim != 2:
                raise ValueError(f"matrix data must be 2-dimensional, got shape {a.shape}")
            a %= p
        a.setflags(write=False)
        self.p = p
        self.a = a

    # -- constructors -------------------------------------------------

    @staticmethod
    def zeros(p: int, rows: int, cols: int) -> "Matrix":
        return Matrix(p, np.zeros((rows, cols), dtype=np.int64), _trusted=True)

    @staticmethod
    def identity(p: int, n: int) -> "Matrix":
        return Matrix(p, np.eye(n, dtype=np.int64), _trusted=True)

    @staticmethod
    def from_columns(p: int, cols, rows: int) -> "Matrix":
        """Assemble a matrix from an iterable of length-``rows`` columns."""
        cols = list(cols)
        if not cols:
            return Matrix.zeros(p, rows, 0)
        a = np.stack([np.asarray(c, dtype=np.int64).reshape(rows) for c in cols], axis=1)
        return Matrix(p, a)

    # -- basic structure ----------------------------------------------

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self):
        return self.a.shape

    def is_zero(self) -> bool:
        return not self.a.any()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.p == other.p and self.shape == other.shape and bool((self.a == other.a).all())

    def __hash__(self):
        return hash((self.p, self.shape, self.a.tobytes()))

    def __repr__(self):
        return f"Matrix(p={self.p}, {self.rows}x{self.cols})"

    def tolist(self):
        return self.a.tolist()

    # -- arithmetic ----------------------------------------------------

    def _assert_compatible(self, other: "Matrix") -> None:
        if self.p != other.p:
            raise ValueError("matrices over different fields")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._assert_compatible(other)
        return Matrix(self.p, (self.a + other.a) % self.p, _trusted=True)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._assert_compatible(other)
        return Matrix(self.p, (self.a - other.a) % self.p, _trusted=True)

    def __neg__(self) -> "Matrix":
        return Matrix(self.p, (-self.a) % self.p, _trusted=True)

    def scale(self, c: int) -> "Matrix":
        return Matrix(self.p, (self.a * (c % self.p)) % self.p, _trusted=True)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._assert_compatible(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch: {self.shape} @ {other.shape}")
        return Matrix(self.p, (self.a @ other.a) % self.p, _trusted=True)

    def transpose(self) -> "Matrix":
        return Matrix(self.p, np.ascontiguousarray(self.a.T), _trusted=True)

    # -- stacking -------------------------------------------------------

    @staticmethod
    def hstack(mats) -> "Matrix":
        mats = list(mats)
        p = mats[0].p
        return Matrix(p, np.hstack([m.a for m in mats]), _trusted=True)

    @staticmethod
    def vstack(mats) -> "Matrix":
        mats = list(mats)
        p = mats[0].p
        return Matrix(p, np.vstack([m.a for m in mats]), _trusted=True)

    @staticmethod
    def block_diag(mats) -> "Matrix":
        mats = list(mats)
        p = mats[0].p
        rows = sum(m.rows for m in mats)
        cols = sum(m.cols for m in mats)
        out = np.zeros((rows, cols), dtype=np.int64)
        r = c = 0
        for m in mats:
            out[r : r + m.rows, c : c + m.cols] = m.a
            r += m.rows
            c += m.cols
        return Matrix(p, out, _trusted=True)

    def kron(self, other: "Matrix") -> "Matrix":
        self._assert_compatible(other)
        return Matrix(self.p, np.kron(self.a, other.a) % self.p, _trusted=True)

    # -- elimination -----------------------------------------------------

    def rref(self):
        """Return (reduced row echelon form, pivot column tuple)."""
        work = np.ascontiguousarray(self.a.copy())
        pivots = _kernel.rref_mod(work, self.p) if work.size else []
        return Matrix(self.p, work, _trusted=True), tuple(pivots)

    def rank(self) -> int:
        _, pivots = self.rref()
        return len(pivots)

    def nullspace(self) -> "Matrix":
        """Matrix whose columns form a basis of {v : self @ v = 0}."""
        red, pivots = self.rref()
        free = [j for j in range(self.cols) if j not in set(pivots)]
        basis = np.zeros((self.cols, len(free)), dtype=np.int64)
        for idx, j in enumerate(free):
            basis[j, idx] = 1
            for r, pc in enumerate(pivots):
                basis[pc, idx] = (-red.a[r, j]) % self.p
        return Matrix(self.p, basis, _trusted=True)

    def column_space_pivots(self):
        """Indices of a maximal independent subset of the columns."""
        _, pivots = self.rref()
        return pivots

    def solve_matrix(self, b: "Matrix"):
        """Some X with self @ X = b, or None if inconsistent."""
        self._assert_compatible(b)
        if b.rows != self.rows:
            raise ValueError(f"rhs has {b.rows} rows, expected {self.rows}")
        aug = np.hstack([self.a, b.a])
        red, pivots = Matrix(self.p, aug, _trusted=True).rref()
        x = np.zeros((self.cols, b.cols), dtype=np.int64)
        for r, pc in enumerate(pivots):
            if pc >= self.cols:
                return None
            x[pc] = red.a[r, self.cols :]
        return Matrix(self.p, x, _trusted=True)

    def solve(self, b):
        """Some x with self @ x = b (b a length-``rows`` vector), or None."""
        bm = Matrix(self.p, np.asarray(b, dtype=np.int64).reshape(self.rows, 1))
        x = self.solve_matrix(bm)
        return None if x is None else x.a.reshape(self.cols)

    def inverse(self):
        """Inverse matrix, or None when not square or singular."""
        if self.rows != self.cols:
            return None
        x = self.solve_matrix(Matrix.identity(self.p, self.rows))
        if x is None:
            return None
        if (self @ x) != Matrix.identity(self.p, self.rows):
            return None
        return x

    def is_invertible(self) -> bool:
        return self.rows == self.cols and self.rank() == self.rows

    def power(self, e: int) -> "Matrix":
        if self.rows != self.cols:
            raise ValueError("power of a non-square matrix")
        result = Matrix.identity(self.p, self.rows)
        base = self
        while e > 0:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result


def column_span_basis(mat: Matrix) -> Matrix:
    """Matrix whose columns are an independent spanning subset of mat's columns."""
    pivots = mat.column_space_pivots()
    return Matrix(mat.p, np.ascontiguousarray(mat.a[:, list(pivots)]), _trusted=True)


def span_dim(mat: Matrix) -> int:
    return mat.rank()


def in_column_span(mat: Matrix, vec) -> bool:
    return mat.solve(vec) is not None
