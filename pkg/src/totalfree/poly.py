"""Sparse homogeneous polynomials with exact rational coefficients.

A polynomial is a map from exponent tuples (one entry per variable, entries
summing to the degree) to nonzero ``Fraction`` coefficients.  The zero
polynomial is the empty map with the conventional degree marker -1.
Everything an arrangement needs reduces to three exact primitives: ring
arithmetic, linear changes of variables, and the power-divisibility test
``alpha^m | f`` implemented through such a change of variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .linalg import Matrix, Scalar, _frac

Exponent = tuple[int, ...]

ZERO_DEGREE = -1  # degree marker of the zero polynomial


@dataclass(frozen=True)
class HomPoly:
    """Homogeneous polynomial in ``num_vars`` variables.

    ``coeffs`` never stores zero coefficients, and every exponent tuple sums
    to ``degree``.  Instances are immutable; all operations return new ones.
    """

    num_vars: int
    degree: int
    coeffs: Mapping[Exponent, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        if not self.coeffs and self.degree != ZERO_DEGREE:
            raise ValueError("zero polynomial must carry the zero degree marker")
        for e, c in self.coeffs.items():
            if len(e) != self.num_vars:
                raise ValueError(f"exponent {e} has wrong arity for {self.num_vars} variables")
            if sum(e) != self.degree:
                raise ValueError(f"exponent {e} does not match degree {self.degree}")
            if c == 0:
                raise ValueError("zero coefficient stored")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, num_vars: int) -> HomPoly:
        return cls(num_vars, ZERO_DEGREE, {})

    @classmethod
    def from_terms(cls, num_vars: int, terms: Mapping[Exponent, Scalar]) -> HomPoly:
        clean = {tuple(e): _frac(c) for e, c in terms.items() if c != 0}
        if not clean:
            return cls.zero(num_vars)
        degrees = {sum(e) for e in clean}
        if len(degrees) != 1:
            raise ValueError(f"terms of mixed degrees {sorted(degrees)}")
        return cls(num_vars, degrees.pop(), clean)

    @classmethod
    def monomial(cls, num_vars: int, exponent: Sequence[int], coeff: Scalar = 1) -> HomPoly:
        return cls.from_terms(num_vars, {tuple(exponent): coeff})

    @classmethod
    def variable(cls, num_vars: int, index: int) -> HomPoly:
        e = [0] * num_vars
        e[index] = 1
        return cls.monomial(num_vars, e)

    @classmethod
    def linear(cls, coeffs: Sequence[Scalar]) -> HomPoly:
        """The linear form with the given covector of coefficients."""
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            if c != 0:
                e = [0] * n
                e[i] = 1
                terms[tuple(e)] = c
        return cls.from_terms(n, terms)

    @classmethod
    def constant(cls, num_vars: int, value: Scalar) -> HomPoly:
        return cls.from_terms(num_vars, {(0,) * num_vars: value})

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_linear(self) -> bool:
        return self.degree == 1

    # -- arithmetic --------------------------------------------------------

    def _check_compatible(self, other: HomPoly) -> None:
        if self.num_vars != other.num_vars:
            raise ValueError("polynomials in different numbers of variables")

    def __add__(self, other: HomPoly) -> HomPoly:
        self._check_compatible(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.degree != other.degree:
            raise ValueError(f"cannot add homogeneous degrees {self.degree} and {other.degree}")
        terms = dict(self.coeffs)
        for e, c in other.coeffs.items():
            s = terms.get(e, Fraction(0)) + c
            if s == 0:
                terms.pop(e, None)
            else:
                terms[e] = s
        return HomPoly.from_terms(self.num_vars, terms)

    def __neg__(self) -> HomPoly:
        return self.scale(-1)

    def __sub__(self, other: HomPoly) -> HomPoly:
        return self + (-other)

    def scale(self, c: Scalar) -> HomPoly:
        if c == 0 or self.is_zero():
            return HomPoly.zero(self.num_vars)
        c = _frac(c)
        return HomPoly(self.num_vars, self.degree, {e: c * v for e, v in self.coeffs.items()})

    def __mul__(self, other: HomPoly) -> HomPoly:
        self._check_compatible(other)
        if self.is_zero() or other.is_zero():
            return HomPoly.zero(self.num_vars)
        terms: dict[Exponent, Fraction] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(e, Fraction(0)) + c1 * c2
                if s == 0:
                    terms.pop(e, None)
                else:
                    terms[e] = s
        return HomPoly.from_terms(self.num_vars, terms)

    def __pow__(self, k: int) -> HomPoly:
        if k < 0:
            raise ValueError("negative power")
        result = HomPoly.constant(self.num_vars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def evaluate(self, point: Sequence[Scalar]) -> Fraction:
        if len(point) != self.num_vars:
            raise ValueError("point has wrong arity")
        pt = [_frac(x) for x in point]
        total = Fraction(0)
        for e, c in self.coeffs.items():
            v = c
            for x, k in zip(pt, e):
                v *= x ** k
            total += v
        return total

    def substitute(self, change: Matrix) -> HomPoly:
        """Apply the linear change of variables ``x_i = sum_j change[i][j] * y_j``.

        ``change`` has one row per old variable; the number of columns is the
        number of new variables.
        """
        if change.rows != self.num_vars:
            raise ValueError("substitution matrix has wrong number of rows")
        new_vars = change.cols
        if self.is_zero():
            return HomPoly.zero(new_vars)
        images = [HomPoly.linear(change.row(i)) for i in range(self.num_vars)]
        # Cache powers of each image; exponents repeat heavily across terms.
        powers: list[dict[int, HomPoly]] = [{} for _ in range(self.num_vars)]

        def image_power(i: int, k: int) -> HomPoly:
            if k not in powers[i]:
                powers[i][k] = images[i] ** k
            return powers[i][k]

        result = HomPoly.zero(new_vars)
        for e, c in self.coeffs.items():
            term = HomPoly.constant(new_vars, c)
            for i, k in enumerate(e):
                if k:
                    term = term * image_power(i, k)
            if result.is_zero():
                result = term
            else:
                result = result + term
        return result


def divisible_by_power(f: HomPoly, alpha: HomPoly, m: int) -> bool:
    """Exact test of ``alpha^m | f`` for a nonzero linear form ``alpha``.

    Performs an invertible linear change of variables sending ``alpha`` to a
    scalar multiple of the first coordinate, then inspects the surviving
    monomials: divisibility holds iff all of them have first-variable
    exponent at least ``m``.  The zero polynomial is divisible by anything.
    """
    if not alpha.is_linear() or alpha.is_zero():
        raise ValueError("alpha must be a nonzero linear form")
    if m < 1:
        raise ValueError("m must be a positive integer")
    if f.num_vars != alpha.num_vars:
        raise ValueError("f and alpha live in different variable sets")
    if f.is_zero():
        return True
    if f.degree < m:
        return False
    n = f.num_vars
    a = [alpha.coeffs.get(tuple(1 if j == i else 0 for j in range(n)), Fraction(0))
         for i in range(n)]
    p = next(i for i, c in enumerate(a) if c != 0)
    # Columns: e_p (alpha evaluates to a_p != 0), then a kernel basis of alpha.
    cols: list[list[Fraction]] = [[Fraction(1) if i == p else Fraction(0) for i in range(n)]]
    for j in range(n):
        if j == p:
            continue
        w = [Fraction(0)] * n
        w[j] = a[p]
        w[p] = -a[j]
        cols.append(w)
    change = Matrix([[cols[c][i] for c in range(n)] for i in range(n)])
    g = f.substitute(change)
    return all(e[0] >= m for e in g.coeffs)


def poly_det(grid: Sequence[Sequence[HomPoly]]) -> HomPoly:
    """Exact determinant of a square grid of homogeneous polynomials.

    Cofactor expansion along the first remaining row.  The caller must
    arrange the grid so that all permutation products share one total degree
    (true whenever each row is degree-uniform, as for derivation coefficient
    matrices); otherwise the required additions fail.
    """
    n = len(grid)
    if any(len(row) != n for row in grid):
        raise ValueError("grid is not square")
    if n == 0:
        raise ValueError("empty grid")
    num_vars = grid[0][0].num_vars

    def expand(row: int, cols: tuple[int, ...]) -> HomPoly:
        if len(cols) == 1:
            return grid[row][cols[0]]
        total = HomPoly.zero(num_vars)
        for k, c in enumerate(cols):
            entry = grid[row][c]
            if entry.is_zero():
                continue
            rest = cols[:k] + cols[k + 1:]
            minor = expand(row + 1, rest)
            term = entry * minor
            if k % 2:
                term = -term
            total = term if total.is_zero() else total + term
        return total

    return expand(0, tuple(range(n)))


# -- text form (used by the CLI basis files and reports) -------------------


def poly_to_str(f: HomPoly, var_prefix: str = "x") -> str:
    if f.is_zero():
        return "0"
    parts = []
    for e in sorted(f.coeffs, reverse=True):
        c = f.coeffs[e]
        factors = []
        for i, k in enumerate(e):
            if k == 1:
                factors.append(f"{var_prefix}{i + 1}")
            elif k > 1:
                factors.append(f"{var_prefix}{i + 1}^{k}")
        body = "*".join(factors)
        if not body:
            term = str(abs(c))
        elif abs(c) == 1:
            term = body
        else:
            term = f"{abs(c)}*{body}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, term))
    first_sign, first_term = parts[0]
    out = ("-" if first_sign == "-" else "") + first_term
    for sign, term in parts[1:]:
        out += f" {sign} {term}"
    return out


def parse_poly(text: str, num_vars: int, var_prefix: str = "x") -> HomPoly:
    """Parse ``3*x1^2*x2 - 1/2*x3^3`` style polynomial text.

    Supported: integer or ``p/q`` coefficients, ``*`` products, ``^`` powers,
    variables ``x1`` .. ``x<num_vars>``.  The result must be homogeneous.
    """
    s = text.strip()
    if not s or s == "0":
        return HomPoly.zero(num_vars)
    # Split into signed terms at top level (no parentheses in this grammar).
    terms: list[tuple[int, str]] = []
    sign, buf = 1, []
    i = 0
    if s[0] in "+-":
        sign = -1 if s[0] == "-" else 1
        i = 1
    while i < len(s):
        ch = s[i]
        if ch in "+-":
            terms.append((sign, "".join(buf)))
            sign = -1 if ch == "-" else 1
            buf = []
        else:
            buf.append(ch)
        i += 1
    terms.append((sign, "".join(buf)))

    total: dict[Exponent, Fraction] = {}
    for sgn, chunk in terms:
        chunk = chunk.strip()
        if not chunk:
            raise ValueError(f"empty term in {text!r}")
        coeff = Fraction(sgn)
        expo = [0] * num_vars
        for factor in chunk.split("*"):
            factor = factor.strip()
            if not factor:
                raise ValueError(f"empty factor in {text!r}")
            if factor.startswith(var_prefix):
                var_part, _, pow_part = factor.partition("^")
                try:
                    idx = int(var_part[len(var_prefix):])
                except ValueError:
                    raise ValueError(f"bad variable {factor!r}") from None
                if not 1 <= idx <= num_vars:
                    raise ValueError(f"variable {var_part!r} out of range 1..{num_vars}")
                power = 1
                if pow_part:
                    power = int(pow_part)
                    if power < 0:
                        raise ValueError(f"negative power in {factor!r}")
                expo[idx - 1] += power
            else:
                try:
                    coeff *= Fraction(factor)
                except (ValueError, ZeroDivisionError):
                    raise ValueError(f"bad coefficient {factor!r}") from None
        key = tuple(expo)
        total[key] = total.get(key, Fraction(0)) + coeff
    return HomPoly.from_terms(num_vars, total)
