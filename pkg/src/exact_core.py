import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from sympy import gcdex

logger = logging.getLogger(__name__)

Rational = Fraction
Vector = Tuple[Fraction, ...]
Matrix = Tuple[Vector, ...]
Scalar = Union[int, Fraction]

_RATIONAL_PATTERN = re.compile(r'^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$')


class MalformedRational(ValueError):
    """Raised when text does not spell an exact rational "p/q"."""


class DimensionMismatch(ValueError):
    """Raised when vectors or matrices of incompatible sizes are combined."""


def parse_rational(value: Union[str, int, Fraction]) -> Fraction:
    """
    Reads "p/q", "p" or an int/Fraction. Floats are refused so that
    nothing inexact can leak into the computation.
    """
    if isinstance(value, bool):
        raise MalformedRational(f"not a rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if not isinstance(value, str):
        raise MalformedRational(f"not a rational: {value!r}")
    match = _RATIONAL_PATTERN.match(value)
    if match is None:
        raise MalformedRational(f"not a rational: {value!r}")
    numerator, denominator = match.group(1), match.group(2)
    if denominator is not None and int(denominator) == 0:
        raise MalformedRational(f"zero denominator: {value!r}")
    return Fraction(int(numerator), int(denominator or 1))


def format_rational(value: Fraction) -> str:
    return str(Fraction(value))


# --- vectors and matrices ---

def as_vector(values: Iterable) -> Vector:
    return tuple(parse_rational(v) for v in values)


def as_matrix(rows: Iterable[Iterable]) -> Matrix:
    return tuple(as_vector(row) for row in rows)


def zero_vector(dim: int) -> Vector:
    return tuple(Fraction(0) for _ in range(dim))


def basis_vector(dim: int, index: int) -> Vector:
    return tuple(Fraction(1 if i == index else 0) for i in range(dim))


def identity_matrix(dim: int) -> Matrix:
    return tuple(basis_vector(dim, i) for i in range(dim))


def _check_same_length(u: Sequence, v: Sequence) -> None:
    if len(u) != len(v):
        raise DimensionMismatch(f"length {len(u)} vs {len(v)}")


def vec_add(u: Sequence, v: Sequence) -> Vector:
    _check_same_length(u, v)
    return tuple(Fraction(a) + b for a, b in zip(u, v))


def vec_sub(u: Sequence, v: Sequence) -> Vector:
    _check_same_length(u, v)
    return tuple(Fraction(a) - b for a, b in zip(u, v))


def vec_scale(c: Scalar, v: Sequence) -> Vector:
    return tuple(Fraction(c) * a for a in v)


def dot(u: Sequence, v: Sequence) -> Fraction:
    _check_same_length(u, v)
    return sum((Fraction(a) * b for a, b in zip(u, v)), Fraction(0))


def is_integral_vector(v: Sequence) -> bool:
    return all(Fraction(a).denominator == 1 for a in v)


def transpose(m: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(Fraction(x) for x in col) for col in zip(*m))


def mat_vec(m: Sequence[Sequence], v: Sequence) -> Vector:
    return tuple(dot(row, v) for row in m)


def covec_mat(r: Sequence, m: Sequence[Sequence]) -> Vector:
    """Row vector times matrix, i.e. the covector v -> r(m v)."""
    return mat_vec(transpose(m), r)


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    columns = transpose(b)
    return tuple(tuple(dot(row, col) for col in columns) for row in a)


def mat_add(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    return tuple(vec_add(x, y) for x, y in zip(a, b))


def mat_scale(c: Scalar, m: Sequence[Sequence]) -> Matrix:
    return tuple(vec_scale(c, row) for row in m)


def common_denominator(values: Iterable) -> int:
    result = 1
    for value in values:
        result = math.lcm(result, Fraction(value).denominator)
    return result


# --- Gaussian rationals and unit values ---

@dataclass(frozen=True)
class GaussianRational:
    """re + i*im with both parts exact rationals."""
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, 're', Fraction(self.re))
        object.__setattr__(self, 'im', Fraction(self.im))

    @staticmethod
    def lift(value: Union['GaussianRational', Scalar]) -> 'GaussianRational':
        if isinstance(value, GaussianRational):
            return value
        return GaussianRational(Fraction(value), Fraction(0))

    def __add__(self, other):
        other = GaussianRational.lift(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = GaussianRational.lift(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussianRational.lift(other) - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        other = GaussianRational.lift(other)
        return GaussianRational(self.re * other.re - self.im * other.im,
                                self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def to_json(self) -> dict:
        return {'re': format_rational(self.re), 'im': format_rational(self.im)}

    def __str__(self):
        if self.im == 0:
            return format_rational(self.re)
        return f"{format_rational(self.re)}+{format_rational(self.im)}i"


@dataclass(frozen=True)
class UnitValue:
    """
    The nonzero complex number exp(exponent) = e^{2 pi i exponent}.
    Built through unit_reduce, the real part of the exponent sits in [0, 1).
    """
    exponent: GaussianRational

    def __mul__(self, other: 'UnitValue') -> 'UnitValue':
        return unit_reduce(self.exponent + other.exponent)

    def inverse(self) -> 'UnitValue':
        return unit_reduce(-self.exponent)

    @property
    def exponent_mod1(self) -> Fraction:
        return self.exponent.re - math.floor(self.exponent.re)

    def is_trivial(self) -> bool:
        return self.exponent_mod1 == 0 and self.exponent.im == 0

    def to_json(self) -> dict:
        payload = {'exponent_mod1': format_rational(self.exponent_mod1)}
        if self.exponent.im != 0:
            payload['exponent_im'] = format_rational(self.exponent.im)
        return payload


def unit_reduce(z: Union[GaussianRational, Scalar]) -> UnitValue:
    z = GaussianRational.lift(z)
    return UnitValue(GaussianRational(z.re - math.floor(z.re), z.im))


# --- integer normal forms ---

def _integer_rows(matrix: Sequence[Sequence]) -> List[List[int]]:
    rows = []
    for row in matrix:
        converted = []
        for entry in row:
            entry = Fraction(entry)
            if entry.denominator != 1:
                raise ValueError(f"non-integer matrix entry {entry}")
            converted.append(int(entry))
        rows.append(converted)
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise DimensionMismatch("ragged matrix")
    return rows


def hermite_normal_form(matrix: Sequence[Sequence]) -> Tuple[Tuple[Tuple[int, ...], ...], Tuple[Tuple[int, ...], ...]]:
    """
    Row-style Hermite normal form.

    Returns (H, U) with H = U * M, U unimodular. The nonzero rows of H sit on
    top with strictly increasing pivot columns, every pivot is positive and the
    entries above a pivot lie in [0, pivot).
    """
    rows = _integer_rows(matrix)
    m = len(rows)
    ncols = len(rows[0]) if m else 0
    h = [r[:] for r in rows]
    u = [[1 if i == j else 0 for j in range(m)] for i in range(m)]

    pivot_row = 0
    for col in range(ncols):
        if pivot_row >= m:
            break
        for i in range(pivot_row + 1, m):
            b = h[i][col]
            if b == 0:
                continue
            a = h[pivot_row][col]
            x, y, g = (int(t) for t in gcdex(a, b))
            p, q = -b // g, a // g
            h[pivot_row], h[i] = (
                [x * s + y * t for s, t in zip(h[pivot_row], h[i])],
                [p * s + q * t for s, t in zip(h[pivot_row], h[i])],
            )
            u[pivot_row], u[i] = (
                [x * s + y * t for s, t in zip(u[pivot_row], u[i])],
                [p * s + q * t for s, t in zip(u[pivot_row], u[i])],
            )
        pivot = h[pivot_row][col]
        if pivot == 0:
            continue
        if pivot < 0:
            h[pivot_row] = [-s for s in h[pivot_row]]
            u[pivot_row] = [-s for s in u[pivot_row]]
            pivot = -pivot
        for r in range(pivot_row):
            factor = h[r][col] // pivot
            if factor:
                h[r] = [s - factor * t for s, t in zip(h[r], h[pivot_row])]
                u[r] = [s - factor * t for s, t in zip(u[r], u[pivot_row])]
        pivot_row += 1

    return tuple(tuple(r) for r in h), tuple(tuple(r) for r in u)
@dataclass(frozen=True)
class IntegerLattice:
    """
    The Z-span of rational generators, kept as the Hermite normal form of the
    generators scaled to integers, so membership queries reuse one reduction.
    """
    generators: Tuple[Vector, ...]
    scale: int
    h: Tuple[Tuple[int, ...], ...]
    u: Tuple[Tuple[int, ...], ...]

    @classmethod
    def span(cls, generators: Sequence[Sequence]) -> 'IntegerLattice':
        gens = tuple(as_vector(g) for g in generators)
        if not gens:
            raise ValueError("IntegerLattice needs at least one generator")
        if any(len(g) != len(gens[0]) for g in gens):
            raise DimensionMismatch("generators of different lengths")
        scale = common_denominator([x for g in gens for x in g])
        h, u = hermite_normal_form([[x * scale for x in g] for g in gens])
        return cls(gens, scale, h, u)

    @property
    def ambient_dim(self) -> int:
        return len(self.generators[0])

    def solve(self, target: Sequence) -> Optional[Tuple[int, ...]]:
        """Integer coefficients on the generators reaching target, or None."""
        target = as_vector(target)
        if len(target) != self.ambient_dim:
            raise DimensionMismatch(
                f"generator of length {self.ambient_dim} vs target of length {len(target)}")
        scaled = [t * self.scale for t in target]
        # the lattice sits inside (1/scale) Z^m
        if any(t.denominator != 1 for t in scaled):
            return None
        residual = [int(t) for t in scaled]

        combination = [0] * len(self.generators)
        for k, row in enumerate(self.h):
            pivot_col = next((j for j, entry in enumerate(row) if entry != 0), None)
            if pivot_col is None:
                break
            quotient, remainder = divmod(residual[pivot_col], row[pivot_col])
            if remainder:
                logger.debug("target %s fails at pivot column %d", target, pivot_col)
                return None
            combination[k] = quotient
            residual = [r - quotient * e for r, e in zip(residual, row)]

        if any(residual):
            return None
        count = len(self.generators)
        return tuple(sum(combination[k] * self.u[k][j] for k in range(count)) for j in range(count))

    def __contains__(self, target: Sequence) -> bool:
        return self.solve(target) is not None


def lattice_membership(generators: Sequence[Sequence], target: Sequence) -> Optional[Tuple[int, ...]]:
    """
    Integer coefficients c with sum(c_i * generators[i]) == target,
    or None when the target is outside the lattice the generators span.
    """
    if not generators:
        return () if all(t == 0 for t in as_vector(target)) else None
    return IntegerLattice.span(generators).solve(target)
