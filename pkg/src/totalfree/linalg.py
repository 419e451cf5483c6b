"""Exact linear algebra over the rationals.

Matrices are immutable grids of ``fractions.Fraction``.  Rank, kernels,
determinants and inverses are computed by rational Gaussian elimination;
there is no floating point anywhere, so every predicate built on top of
this module (codimension tests, membership tests, Saito determinants) is
exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Scalar = int | Fraction
Vector = tuple[Fraction, ...]


def _frac(x: Scalar) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def dot(u: Sequence[Scalar], v: Sequence[Scalar]) -> Fraction:
    if len(u) != len(v):
        raise ValueError(f"dot of length {len(u)} against {len(v)}")
    return sum((_frac(a) * b for a, b in zip(u, v)), Fraction(0))


class Matrix:
    """Immutable rational matrix."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Iterable[Iterable[Scalar]]):
        grid = tuple(tuple(_frac(x) for x in row) for row in entries)
        if grid and any(len(row) != len(grid[0]) for row in grid):
            raise ValueError("ragged rows")
        self.entries: tuple[Vector, ...] = grid
        self.rows = len(grid)
        self.cols = len(grid[0]) if grid else 0

    @classmethod
    def zero(cls, rows: int, cols: int) -> Matrix:
        return cls([[0] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n: int) -> Matrix:
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Matrix) and self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in row) for row in self.entries)
        return f"Matrix({self.rows}x{self.cols}: {body})"

    def row(self, i: int) -> Vector:
        return self.entries[i]

    def column(self, j: int) -> Vector:
        return tuple(row[j] for row in self.entries)

    def transpose(self) -> Matrix:
        return Matrix(zip(*self.entries)) if self.rows else Matrix([[]] * 0)

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        cols = [other.column(j) for j in range(other.cols)]
        return Matrix([[dot(row, c) for c in cols] for row in self.entries])

    def apply(self, v: Sequence[Scalar]) -> Vector:
        """Matrix times column vector."""
        return tuple(dot(row, v) for row in self.entries)

    def rref(self) -> tuple[Matrix, tuple[int, ...]]:
        """Reduced row echelon form and the pivot column indices."""
        m = [list(row) for row in self.entries]
        pivots: list[int] = []
        r = 0
        for c in range(self.cols):
            if r == self.rows:
                break
            pivot_row = next((i for i in range(r, self.rows) if m[i][c] != 0), None)
            if pivot_row is None:
                continue
            m[r], m[pivot_row] = m[pivot_row], m[r]
            inv = m[r][c]
            m[r] = [x / inv for x in m[r]]
            for i in range(self.rows):
                if i != r and m[i][c] != 0:
                    f = m[i][c]
                    m[i] = [a - f * b for a, b in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
        return Matrix(m), tuple(pivots)

    def rank(self) -> int:
        """Exact rank over the rationals."""
        # Forward elimination only; no need for the reduced form.
        m = [list(row) for row in self.entries]
        rank = 0
        for c in range(self.cols):
            pivot_row = next((i for i in range(rank, self.rows) if m[i][c] != 0), None)
            if pivot_row is None:
                continue
            m[rank], m[pivot_row] = m[pivot_row], m[rank]
            piv = m[rank][c]
            for i in range(rank + 1, self.rows):
                if m[i][c] != 0:
                    f = m[i][c] / piv
                    m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
            rank += 1
            if rank == self.rows:
                break
        return rank

    def kernel_basis(self) -> list[Vector]:
        """Basis of the right null space; empty iff the columns are independent.

        The basis is canonical: it comes from the reduced echelon form, one
        vector per free column in ascending column order, with a 1 in the
        free position.
        """
        red, pivots = self.rref()
        pivot_set = set(pivots)
        free = [c for c in range(self.cols) if c not in pivot_set]
        basis = []
        for f in free:
            v = [Fraction(0)] * self.cols
            v[f] = Fraction(1)
            for i, p in enumerate(pivots):
                v[p] = -red.entries[i][f]
            basis.append(tuple(v))
        return basis

    def det(self) -> Fraction:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        m = [list(row) for row in self.entries]
        n = self.rows
        result = Fraction(1)
        for c in range(n):
            pivot_row = next((i for i in range(c, n) if m[i][c] != 0), None)
            if pivot_row is None:
                return Fraction(0)
            if pivot_row != c:
                m[c], m[pivot_row] = m[pivot_row], m[c]
                result = -result
            result *= m[c][c]
            piv = m[c][c]
            for i in range(c + 1, n):
                if m[i][c] != 0:
                    f = m[i][c] / piv
                    m[i] = [a - f * b for a, b in zip(m[i], m[c])]
        return result

    def inverse(self) -> Matrix:
        if self.rows != self.cols:
            raise ValueError("inverse of a non-square matrix")
        n = self.rows
        aug = Matrix([list(row) + [1 if i == j else 0 for j in range(n)]
                      for i, row in enumerate(self.entries)])
        red, pivots = aug.rref()
        if pivots[:n] != tuple(range(n)):
            raise ValueError("matrix is singular")
        return Matrix([row[n:] for row in red.entries])


def rank_of_rows(rows: Sequence[Sequence[Scalar]], width: int | None = None) -> int:
    """Rank of a list of row vectors; handles the empty list."""
    if not rows:
        return 0
    del width
    return Matrix(rows).rank()
