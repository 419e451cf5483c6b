"""Central hyperplane arrangements and multiarrangements.

A hyperplane is stored as its primitive integer normal covector with the
first nonzero entry positive, so equality of hyperplanes is equality of
tuples.  An arrangement is an ambient dimension plus an ordered,
duplicate-free list of hyperplanes; a multiplicity is a tuple of positive
integers aligned with that order.  The empty arrangement and dimension-0
arrangements are legal values (they arise as essentialization output and
product factors).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    DimensionMismatchError,
    DuplicateHyperplaneError,
    MalformedFlatError,
    ParseError,
)
from .linalg import Matrix, Scalar, _frac
from .poly import HomPoly, divisible_by_power

IntVector = tuple[int, ...]
Multiplicity = tuple[int, ...]


@dataclass(frozen=True)
class Hyperplane:
    """Primitive integer normal covector; the hyperplane is its kernel."""

    normal: IntVector

    @property
    def dim(self) -> int:
        return len(self.normal)

    def linear_form(self) -> HomPoly:
        return HomPoly.linear(self.normal)

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.normal) + ")"


def normalize_hyperplane(coeffs: Sequence[Scalar]) -> Hyperplane:
    """Canonical form: clear denominators, divide by gcd, first nonzero > 0."""
    fracs = [_frac(c) for c in coeffs]
    if all(c == 0 for c in fracs):
        raise ValueError("zero covector does not define a hyperplane")
    denom_lcm = math.lcm(*(c.denominator for c in fracs))
    ints = [int(c * denom_lcm) for c in fracs]
    g = math.gcd(*ints)
    ints = [c // g for c in ints]
    first = next(c for c in ints if c != 0)
    if first < 0:
        ints = [-c for c in ints]
    return Hyperplane(tuple(ints))


@dataclass(frozen=True)
class Arrangement:
    """Central arrangement: ambient dimension plus ordered distinct hyperplanes."""

    dim: int
    hyperplanes: tuple[Hyperplane, ...]

    def __post_init__(self):
        seen: dict[IntVector, int] = {}
        for i, h in enumerate(self.hyperplanes):
            if h.dim != self.dim:
                raise DimensionMismatchError(
                    f"hyperplane {i} has dimension {h.dim}, expected {self.dim}")
            if h.normal in seen:
                raise DuplicateHyperplaneError(
                    f"hyperplane {i} duplicates hyperplane {seen[h.normal]}")
            seen[h.normal] = i

    @property
    def n(self) -> int:
        return len(self.hyperplanes)

    def normals(self) -> list[IntVector]:
        return [h.normal for h in self.hyperplanes]

    def normal_matrix(self) -> Matrix:
        if not self.hyperplanes:
            return Matrix.zero(0, self.dim)
        return Matrix(self.normals())

    def rank(self) -> int:
        return self.normal_matrix().rank() if self.hyperplanes else 0

    def __str__(self) -> str:
        body = ", ".join(str(h) for h in self.hyperplanes)
        return f"Arrangement(dim={self.dim}, [{body}])"


def arrangement(dim: int, rows: Iterable[Sequence[Scalar]]) -> Arrangement:
    """Build an arrangement from raw covectors, normalizing each."""
    return Arrangement(dim, tuple(normalize_hyperplane(r) for r in rows))


def uniform_multiplicity(n: int, value: int = 1) -> Multiplicity:
    return (value,) * n


def check_multiplicity(arr: Arrangement, m: Multiplicity) -> None:
    if len(m) != arr.n:
        raise DimensionMismatchError(
            f"multiplicity has {len(m)} entries for {arr.n} hyperplanes")
    if any(v < 1 for v in m):
        raise ValueError("multiplicities must be positive integers")


# -- derivations -----------------------------------------------------------


@dataclass(frozen=True)
class Derivation:
    """Polynomial vector field: one homogeneous component per coordinate.

    All nonzero components share ``degree``; the zero derivation carries the
    zero-degree marker -1.
    """

    components: tuple[HomPoly, ...]
    degree: int

    @property
    def dim(self) -> int:
        return len(self.components)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def apply_to(self, covector: Sequence[Scalar]) -> HomPoly:
        """Value on the linear form with the given coefficients."""
        if len(covector) != self.dim:
            raise DimensionMismatchError("covector arity does not match derivation")
        out = HomPoly.zero(self.dim)
        for a, comp in zip(covector, self.components):
            if a != 0 and not comp.is_zero():
                out = out + comp.scale(a)
        return out


def derivation(components: Sequence[HomPoly]) -> Derivation:
    comps = tuple(components)
    degrees = {c.degree for c in comps if not c.is_zero()}
    if len(degrees) > 1:
        raise ValueError(f"components of mixed degrees {sorted(degrees)}")
    if any(c.num_vars != len(comps) for c in comps):
        raise DimensionMismatchError("component variable count must equal arity")
    return Derivation(comps, degrees.pop() if degrees else -1)


def euler_derivation(dim: int) -> Derivation:
    return derivation([HomPoly.variable(dim, i) for i in range(dim)])


def is_member(theta: Derivation, arr: Arrangement, m: Multiplicity) -> bool:
    """Membership in the logarithmic derivation module of ``(arr, m)``.

    True iff for every hyperplane H the value of ``theta`` on the defining
    form of H is divisible by that form raised to the multiplicity of H.
    """
    if theta.dim != arr.dim:
        raise DimensionMismatchError(
            f"derivation in {theta.dim} variables on a dimension-{arr.dim} arrangement")
    check_multiplicity(arr, m)
    for h, mult in zip(arr.hyperplanes, m):
        value = theta.apply_to(h.normal)
        if not divisible_by_power(value, h.linear_form(), mult):
            return False
    return True


# -- structural operations -------------------------------------------------


@dataclass(frozen=True)
class Essentialization:
    """Result of projecting an arrangement onto the span of its normals.

    ``new_to_old`` maps points of the essential space back into the original
    coordinates; composing the new normals with it recovers the old ones.
    """

    arrangement: Arrangement
    new_to_old: Matrix          # dim x rank section
    old_to_new: Matrix          # rank x dim; rows span the normals' row space
    trivial_directions: int


def essentialize(arr: Arrangement) -> Essentialization:
    """Rewrite the normals in a basis of their span.

    The basis rows come from the reduced echelon form of the normal matrix,
    so the output is deterministic.  Distinctness survives because the
    rewriting is injective on the span.
    """
    red, pivots = arr.normal_matrix().rref()
    r = len(pivots)
    basis = Matrix(red.entries[:r]) if r else Matrix.zero(0, arr.dim)
    # RREF basis is the identity on pivot columns, so span coefficients can
    # be read off directly.
    new_rows = [[h.normal[p] for p in pivots] for h in arr.hyperplanes]
    section = Matrix([[1 if (i in pivots and pivots.index(i) == j) else 0
                       for j in range(r)] for i in range(arr.dim)])
    ess = arrangement(r, new_rows) if new_rows else Arrangement(r, ())
    return Essentialization(ess, section, basis, arr.dim - r)


def deletion(arr: Arrangement, h: int) -> Arrangement:
    if not 0 <= h < arr.n:
        raise IndexError(f"hyperplane index {h} out of range 0..{arr.n - 1}")
    return Arrangement(arr.dim, arr.hyperplanes[:h] + arr.hyperplanes[h + 1:])


@dataclass(frozen=True)
class Restriction:
    """Restriction to one hyperplane, with the bookkeeping the induction needs.

    ``index_map[i]`` is the index of hyperplane i's image among the distinct
    restricted hyperplanes (None at the restricted index itself); the map is
    many-to-one when images collide.
    """

    arrangement: Arrangement
    basis: tuple[IntVector, ...]     # integer basis of the restricted-to hyperplane
    index_map: tuple[int | None, ...]


def restriction(arr: Arrangement, h0: int) -> Restriction:
    if not 0 <= h0 < arr.n:
        raise IndexError(f"hyperplane index {h0} out of range 0..{arr.n - 1}")
    a0 = arr.hyperplanes[h0].normal
    p = next(i for i, c in enumerate(a0) if c != 0)
    # Hermite-style kernel basis of the normal: deterministic integer vectors.
    basis = []
    for j in range(arr.dim):
        if j == p:
            continue
        w = [0] * arr.dim
        w[j] = a0[p]
        w[p] = -a0[j]
        basis.append(tuple(w))
    images: list[Hyperplane] = []
    index_of: dict[IntVector, int] = {}
    index_map: list[int | None] = []
    for i, h in enumerate(arr.hyperplanes):
        if i == h0:
            index_map.append(None)
            continue
        restricted = [sum(c * w[k] for k, c in enumerate(h.normal)) for w in basis]
        img = normalize_hyperplane(restricted)
        if img.normal not in index_of:
            index_of[img.normal] = len(images)
            images.append(img)
        index_map.append(index_of[img.normal])
    return Restriction(Arrangement(arr.dim - 1, tuple(images)), tuple(basis),
                       tuple(index_map))


def product(a1: Arrangement, a2: Arrangement) -> Arrangement:
    """Disjoint union in the direct sum of the two ambient spaces."""
    dim = a1.dim + a2.dim
    rows = [h.normal + (0,) * a2.dim for h in a1.hyperplanes]
    rows += [(0,) * a1.dim + h.normal for h in a2.hyperplanes]
    return Arrangement(dim, tuple(Hyperplane(tuple(r)) for r in rows))


# -- rank-2 flats and localization ------------------------------------------


@dataclass(frozen=True)
class Flat2:
    """Closed rank-2 flat: member indices plus two spanning normals."""

    members: tuple[int, ...]
    span_basis: tuple[IntVector, IntVector]


def rank2_flats(arr: Arrangement) -> list[Flat2]:
    """All closed rank-2 flats, ordered by their two smallest members.

    Every pair of distinct hyperplanes in a central arrangement has
    independent normals, so each pair lies in exactly one returned flat.
    """
    normals = arr.normals()
    flats: list[Flat2] = []
    covered: set[tuple[int, int]] = set()
    for i in range(arr.n):
        for j in range(i + 1, arr.n):
            if (i, j) in covered:
                continue
            members = [i, j]
            for k in range(arr.n):
                if k in (i, j):
                    continue
                if Matrix([normals[i], normals[j], normals[k]]).rank() == 2:
                    members.append(k)
            members.sort()
            for a in range(len(members)):
                for b in range(a + 1, len(members)):
                    covered.add((members[a], members[b]))
            flats.append(Flat2(tuple(members),
                               (normals[members[0]], normals[members[1]])))
    return flats


def localization(arr: Arrangement, m: Multiplicity, flat: Flat2
                 ) -> tuple[Arrangement, Multiplicity]:
    """The rank-2 multiarrangement seen in the coordinates of a flat's span."""
    check_multiplicity(arr, m)
    span = Matrix(list(flat.span_basis))
    if span.cols != arr.dim:
        raise MalformedFlatError(
            f"span basis has arity {span.cols}, ambient dimension is {arr.dim}")
    _, pivots = span.rref()
    if len(pivots) != 2:
        raise MalformedFlatError("span basis is not two independent covectors")
    block = Matrix([[span.entries[r][c] for c in pivots] for r in range(2)])
    inv = block.inverse()
    rows = []
    mult = []
    for k in flat.members:
        if not 0 <= k < arr.n:
            raise MalformedFlatError(f"member index {k} out of range")
        a = arr.hyperplanes[k].normal
        coeff = tuple(sum(_frac(a[pivots[r]]) * inv.entries[r][c] for r in range(2))
                      for c in range(2))
        # coeff solves coeff . span = a on the pivot columns; verify the rest.
        for c in range(arr.dim):
            if sum(coeff[r] * span.entries[r][c] for r in range(2)) != a[c]:
                raise MalformedFlatError(
                    f"hyperplane {k} does not lie in the flat's span")
        rows.append(coeff)
        mult.append(m[k])
    return arrangement(2, rows), tuple(mult)


def subarrangement(arr: Arrangement, indices: Sequence[int]) -> Arrangement:
    """The subarrangement on the given hyperplane indices, in input order."""
    return Arrangement(arr.dim, tuple(arr.hyperplanes[i] for i in indices))


# -- text format -------------------------------------------------------------

_COEFF_RE = re.compile(r"^[+-]?\d+(/[1-9]\d*)?$")


def parse_arrangement(text: str) -> tuple[Arrangement, Multiplicity]:
    """Parse the arrangement text format.

    Grammar (one declaration per line, '#' starts a comment)::

        dim 4
        hyperplane 1 -1 0 0 mult 2
        hyperplane 0 0 1/2 -1

    Coefficients are integers or rationals ``p/q``; ``mult k`` is optional
    and defaults to 1.  Hyperplane order defines index order.
    """
    dim: int | None = None
    rows: list[Hyperplane] = []
    mults: list[int] = []
    first_line: dict[IntVector, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] == "dim":
            if dim is not None:
                raise ParseError("duplicate dim declaration", lineno)
            if len(tokens) != 2 or not tokens[1].isdigit():
                raise ParseError("expected 'dim <nonnegative integer>'", lineno)
            dim = int(tokens[1])
        elif tokens[0] == "hyperplane":
            if dim is None:
                raise ParseError("hyperplane before dim declaration", lineno)
            coeff_tokens = tokens[1:]
            mult = 1
            if "mult" in coeff_tokens:
                at = coeff_tokens.index("mult")
                mult_tokens = coeff_tokens[at + 1:]
                coeff_tokens = coeff_tokens[:at]
                if len(mult_tokens) != 1 or not mult_tokens[0].isdigit() \
                        or int(mult_tokens[0]) < 1:
                    raise ParseError("expected 'mult <positive integer>'", lineno)
                mult = int(mult_tokens[0])
            if len(coeff_tokens) != dim:
                raise ParseError(
                    f"expected {dim} coefficients, got {len(coeff_tokens)}", lineno)
            for t in coeff_tokens:
                if not _COEFF_RE.match(t):
                    raise ParseError(f"bad coefficient {t!r}", lineno)
            coeffs = [Fraction(t) for t in coeff_tokens]
            if all(c == 0 for c in coeffs):
                raise ParseError("zero covector does not define a hyperplane", lineno)
            h = normalize_hyperplane(coeffs)
            if h.normal in first_line:
                raise DuplicateHyperplaneError(
                    f"duplicate hyperplane (same as line {first_line[h.normal]})",
                    lineno)
            first_line[h.normal] = lineno
            rows.append(h)
            mults.append(mult)
        else:
            raise ParseError(f"unknown directive {tokens[0]!r}", lineno)
    if dim is None:
        raise ParseError("missing dim declaration")
    return Arrangement(dim, tuple(rows)), tuple(mults)


def format_arrangement(arr: Arrangement, m: Multiplicity | None = None) -> str:
    lines = [f"dim {arr.dim}"]
    for i, h in enumerate(arr.hyperplanes):
        line = "hyperplane " + " ".join(str(c) for c in h.normal)
        if m is not None and m[i] != 1:
            line += f" mult {m[i]}"
        lines.append(line)
    return "\n".join(lines) + "\n"
