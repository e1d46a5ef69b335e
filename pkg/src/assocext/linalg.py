"""Exact dense linear algebra over the rationals.

Everything here works on :class:`fractions.Fraction` entries and never
rounds.  Matrices and subspaces are immutable; a subspace is stored by the
reduced row echelon form of a spanning set, which makes equality of
subspaces and equality of cosets decidable by comparing tuples.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

Scalar = Fraction
Vector = tuple  # tuple[Fraction, ...]


def as_scalar(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floating point values are not accepted; use p/q")
    return Fraction(x)


def vector(values: Iterable) -> Vector:
    return tuple(as_scalar(v) for v in values)


def zero_vector(n: int) -> Vector:
    return (Fraction(0),) * n


@dataclass(frozen=True)
class Matrix:
    rows: tuple
    ncols: int

    def __post_init__(self):
        for r in self.rows:
            if len(r) != self.ncols:
                raise ValueError("ragged matrix")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], ncols: Optional[int] = None) -> "Matrix":
        rows = tuple(vector(r) for r in rows)
        if ncols is None:
            if not rows:
                raise ValueError("ncols required for a matrix with no rows")
            ncols = len(rows[0])
        return cls(rows, ncols)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int) -> "Matrix":
        cols = [vector(c) for c in cols]
        for c in cols:
            if len(c) != nrows:
                raise ValueError("column length mismatch")
        rows = tuple(tuple(c[i] for c in cols) for i in range(nrows))
        return cls(rows, len(cols))

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Matrix":
        return cls(tuple(zero_vector(ncols) for _ in range(nrows)), ncols)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(
            tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)), n
        )

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple:
        return (self.nrows, self.ncols)

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.rows)

    @property
    def T(self) -> "Matrix":
        return Matrix(tuple(self.column(j) for j in range(self.ncols)), self.nrows)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = [other.column(j) for j in range(other.ncols)]
            return Matrix(
                tuple(tuple(_dot(r, c) for c in cols) for r in self.rows), other.ncols
            )
        v = vector(other)
        if len(v) != self.ncols:
            raise ValueError("vector length mismatch")
        return tuple(_dot(r, v) for r in self.rows)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Matrix(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)),
            self.ncols,
        )

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch")
        return Matrix(
            tuple(a + b for a, b in zip(self.rows, other.rows)), self.ncols + other.ncols
        )

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.ncols:
            raise ValueError("column count mismatch")
        return Matrix(self.rows + other.rows, self.ncols)


def _dot(a, b):
    s = Fraction(0)
    for x, y in zip(a, b):
        if x and y:
            s += x * y
    return s


def _rref_rows(rows: Sequence[Sequence], ncols: int):
    """Return (nonzero RREF rows, pivot columns) of the given rows."""
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        if piv != 1:
            m[r] = [x / piv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return tuple(tuple(row) for row in m[:r]), tuple(pivots)


def rref(m: Matrix) -> Matrix:
    """Reduced row echelon form, zero rows kept at the bottom."""
    reduced, _ = _rref_rows(m.rows, m.ncols)
    pad = tuple(zero_vector(m.ncols) for _ in range(m.nrows - len(reduced)))
    return Matrix(reduced + pad, m.ncols)


def rank(m: Matrix) -> int:
    return len(_rref_rows(m.rows, m.ncols)[1])


@dataclass(frozen=True)
class Subspace:
    """A subspace of Q^n held as the nonzero rows of an RREF matrix."""

    ambient_dim: int
    basis: tuple
    pivots: tuple

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient_dim: int) -> "Subspace":
        vecs = [vector(v) for v in vectors]
        for v in vecs:
            if len(v) != ambient_dim:
                raise ValueError(f"vector of length {len(v)} in ambient dimension {ambient_dim}")
        rows, piv = _rref_rows(vecs, ambient_dim)
        return cls(ambient_dim, rows, piv)

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, (), ())

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls.span(Matrix.identity(n).rows, n)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def reduce(self, v: Sequence) -> Vector:
        """Remainder of v after elimination against the RREF rows."""
        v = vector(v)
        if len(v) != self.ambient_dim:
            raise ValueError(
                f"dimension mismatch: vector of length {len(v)}, ambient {self.ambient_dim}"
            )
        out = list(v)
        for row, p in zip(self.basis, self.pivots):
            f = out[p]
            if f:
                out = [x - f * y for x, y in zip(out, row)]
        return tuple(out)

    def __contains__(self, v) -> bool:
        return not any(self.reduce(v))

    def coordinates(self, v: Sequence) -> Vector:
        """Coefficients of v in the RREF basis; raises if v is not in the span."""
        v = vector(v)
        if v not in self:
            raise ValueError("vector not in subspace")
        return tuple(v[p] for p in self.pivots)

    def __add__(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise ValueError("ambient dimension mismatch")
        return Subspace.span(self.basis + other.basis, self.ambient_dim)

    def __le__(self, other: "Subspace") -> bool:
        return all(b in other for b in self.basis)

    def intersection(self, other: "Subspace") -> "Subspace":
        # solve x·A = y·B for the stacked basis rows
        if self.ambient_dim != other.ambient_dim:
            raise ValueError("ambient dimension mismatch")
        if not self.basis or not other.basis:
            return Subspace.zero(self.ambient_dim)
        cols = list(self.basis) + [tuple(-x for x in b) for b in other.basis]
        k = kernel(Matrix.from_columns(cols, self.ambient_dim))
        vecs = []
        for coeffs in k.basis:
            acc = [Fraction(0)] * self.ambient_dim
            for c, b in zip(coeffs[: self.dim], self.basis):
                if c:
                    acc = [x + c * y for x, y in zip(acc, b)]
            vecs.append(acc)
        return Subspace.span(vecs, self.ambient_dim)

    def complement_basis(self, sub: "Subspace") -> tuple:
        """Canonical basis of a complement of ``sub`` inside ``self``.

        The vectors are reduced against ``sub`` and brought to RREF, so two
        calls with equal arguments return identical tuples.
        """
        reduced = [sub.reduce(b) for b in self.basis]
        return Subspace.span(reduced, self.ambient_dim).basis


def kernel(m: Matrix) -> Subspace:
    """Null space {x : m x = 0} as a subspace of Q^{ncols}."""
    rows, pivots = _rref_rows(m.rows, m.ncols)
    free = [c for c in range(m.ncols) if c not in pivots]
    vecs = []
    for f in free:
        x = [Fraction(0)] * m.ncols
        x[f] = Fraction(1)
        for row, p in zip(rows, pivots):
            x[p] = -row[f]
        vecs.append(x)
    return Subspace.span(vecs, m.ncols)


def image(m: Matrix) -> Subspace:
    """Column space as a subspace of Q^{nrows}."""
    return Subspace.span([m.column(j) for j in range(m.ncols)], m.nrows)


def solve_affine(m: Matrix, b: Sequence) -> Optional[tuple]:
    """Solve m x = b.

    Returns ``None`` when b is not in the column space, otherwise a pair
    ``(particular, kernel)``.  The particular solution sets every free
    variable to zero, so it depends linearly on b.
    """
    b = vector(b)
    if len(b) != m.nrows:
        raise ValueError("right-hand side length mismatch")
    aug = [tuple(r) + (bi,) for r, bi in zip(m.rows, b)]
    rows, pivots = _rref_rows(aug, m.ncols + 1)
    if pivots and pivots[-1] == m.ncols:
        return None
    x = [Fraction(0)] * m.ncols
    for row, p in zip(rows, pivots):
        x[p] = row[m.ncols]
    return tuple(x), kernel(m)


def quotient_class(rep: Sequence, mod: Subspace) -> Vector:
    """Canonical representative of rep + mod."""
    return mod.reduce(rep)


def inverse(m: Matrix) -> Matrix:
    n = m.nrows
    if n != m.ncols:
        raise ValueError("inverse of a non-square matrix")
    aug = [tuple(r) + tuple(Fraction(int(i == j)) for j in range(n)) for i, r in enumerate(m.rows)]
    rows, pivots = _rref_rows(aug, 2 * n)
    # the augmented identity keeps rank n; a pivot past column n means m is singular
    if any(p >= n for p in pivots):
        raise ZeroDivisionError("singular matrix")
    return Matrix(tuple(r[n:] for r in rows), n)
