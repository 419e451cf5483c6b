"""Product decomposition through connectivity of the linear matroid of normals.

An arrangement is a product exactly when its index set splits into blocks
with additive rank, and the finest such partition is the set of connected
components of the matroid of normals.  Components are computed from
fundamental circuits with respect to one greedy basis: link every non-basis
element to the basis elements of its fundamental circuit; the connected
components of that graph are the matroid components.  Only exact rank
queries are needed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .arrangement import Arrangement, arrangement
from .errors import InternalInvariantError
from .linalg import Matrix


def _rank_of(arr: Arrangement, indices: list[int]) -> int:
    if not indices:
        return 0
    return Matrix([arr.hyperplanes[i].normal for i in indices]).rank()


def connected_components(arr: Arrangement) -> list[tuple[int, ...]]:
    """Finest partition of hyperplane indices with additive rank.

    Blocks are returned sorted by smallest member; the empty arrangement
    yields the empty partition.  Correctness: a non-basis element lies in a
    common circuit with exactly the basis elements b for which swapping b
    out and the element in preserves the rank, and joining along these
    fundamental circuits reaches every pair that shares any circuit.
    """
    n = arr.n
    if n == 0:
        return []
    basis: list[int] = []
    for i in range(n):
        if _rank_of(arr, basis + [i]) > len(basis):
            basis.append(i)
    full_rank = len(basis)
    basis_set = set(basis)

    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[ry] = rx

    for e in range(n):
        if e in basis_set:
            continue
        for b in basis:
            swapped = [x for x in basis if x != b] + [e]
            if _rank_of(arr, swapped) == full_rank:
                union(e, b)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    blocks = sorted((sorted(g) for g in groups.values()), key=lambda b: b[0])
    return [tuple(b) for b in blocks]


def is_irreducible(arr: Arrangement) -> bool:
    """No product structure: essential and matroid-connected.

    The empty arrangement and anything with a trivial direction are
    reducible by convention (they factor off empty one-dimensional pieces);
    a single hyperplane in dimension 1 is irreducible.
    """
    if arr.n == 0:
        return False
    if arr.rank() < arr.dim:
        return False
    return len(connected_components(arr)) == 1


@dataclass(frozen=True)
class Factor:
    """One irreducible factor, essential in its own coordinates."""

    arrangement: Arrangement
    indices: tuple[int, ...]   # original hyperplane indices, ascending

    @property
    def rank(self) -> int:
        return self.arrangement.dim


@dataclass(frozen=True)
class Decomposition:
    """Product decomposition into irreducible factors plus trivial directions.

    ``change_of_basis`` is an invertible matrix sending the padded product
    normals (factor normals laid out block by block, zero on the trivial
    coordinates) to covectors proportional to the original normals.
    """

    ambient_dim: int
    factors: tuple[Factor, ...]
    trivial_directions: int
    change_of_basis: Matrix

    def factor_ranks(self) -> tuple[int, ...]:
        return tuple(f.rank for f in self.factors)

    def max_factor_rank(self) -> int:
        return max((f.rank for f in self.factors), default=0)


def _span_basis_rows(arr: Arrangement, indices: tuple[int, ...]) -> Matrix:
    red, pivots = Matrix([arr.hyperplanes[i].normal for i in indices]).rref()
    return Matrix(red.entries[:len(pivots)])


def decompose(arr: Arrangement) -> Decomposition:
    """Split into irreducible essential factors ordered by smallest index."""
    blocks = connected_components(arr)
    factors = []
    basis_rows: list[tuple] = []
    for block in blocks:
        basis = _span_basis_rows(arr, block)
        _, pivots = basis.rref()
        rows = [[arr.hyperplanes[i].normal[p] for p in pivots] for i in block]
        factors.append(Factor(arrangement(len(pivots), rows), block))
        basis_rows.extend(basis.entries)
    rank = len(basis_rows)
    # Complete the stacked factor bases to an invertible matrix with
    # standard basis vectors, greedily in coordinate order.
    completion: list[tuple] = []
    for i in range(arr.dim):
        if rank + len(completion) == arr.dim:
            break
        candidate = tuple(1 if j == i else 0 for j in range(arr.dim))
        trial = basis_rows + completion + [candidate]
        if Matrix(trial).rank() == len(trial):
            completion.append(candidate)
    change = Matrix(basis_rows + completion) if arr.dim else Matrix([])
    if arr.dim and change.det() == 0:
        raise InternalInvariantError("change of basis is singular")
    return Decomposition(arr.dim, tuple(factors), arr.dim - rank, change)


def reassemble_normals(decomp: Decomposition) -> list[tuple]:
    """Original-coordinate covectors recovered from the decomposition.

    For each factor hyperplane, pad its normal into the product coordinates
    and push it through the change of basis.  The results are proportional
    to the original normals, in original index order.
    """
    offsets = []
    at = 0
    for f in decomp.factors:
        offsets.append(at)
        at += f.rank
    rows: dict[int, tuple] = {}
    for f, off in zip(decomp.factors, offsets):
        for local, orig in enumerate(f.indices):
            padded = [0] * decomp.ambient_dim
            normal = f.arrangement.hyperplanes[local].normal
            for j, c in enumerate(normal):
                padded[off + j] = c
            rows[orig] = tuple(
                sum(padded[k] * decomp.change_of_basis.entries[k][c]
                    for k in range(decomp.ambient_dim))
                for c in range(decomp.ambient_dim))
    return [rows[i] for i in sorted(rows)]
