import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from itertools import combinations, permutations
from typing import Callable, Dict, Sequence, Tuple

from exact_core import (DimensionMismatch, GaussianRational, IntegerLattice, Matrix, Scalar, Vector,
                        as_matrix, as_vector, basis_vector, identity_matrix, mat_add, mat_mul,
                        mat_scale, mat_vec, transpose)

logger = logging.getLogger(__name__)


class NotAComplexStructure(ValueError):
    """Raised when a matrix does not square to minus the identity."""


@dataclass(frozen=True)
class TorusData:
    """
    V = Q^2n with the lattice Z^2n in the standard basis and J acting as
    multiplication by i. Build through check_complex_structure.
    """
    n: int
    J: Matrix

    @property
    def dim(self) -> int:
        return 2 * self.n

    def apply(self, v: Sequence) -> Vector:
        return mat_vec(self.J, v)

    def basis(self, index: int) -> Vector:
        return basis_vector(self.dim, index)


def check_complex_structure(J: Sequence[Sequence]) -> TorusData:
    J = as_matrix(J)
    size = len(J)
    if size == 0 or size % 2 or any(len(row) != size for row in J):
        raise NotAComplexStructure(f"need a square matrix of even size, got {size} rows")
    if mat_mul(J, J) != mat_scale(-1, identity_matrix(size)):
        raise NotAComplexStructure("J * J is not -I")
    return TorusData(n=size // 2, J=J)


def standard_torus(n: int) -> TorusData:
    """J sends e_{2k-1} to e_{2k} and e_{2k} to -e_{2k-1}."""
    rows = [[0] * (2 * n) for _ in range(2 * n)]
    for k in range(n):
        rows[2 * k + 1][2 * k] = 1
        rows[2 * k][2 * k + 1] = -1
    return check_complex_structure(rows)


@dataclass(frozen=True)
class AltForm2:
    """Alternating bilinear form stored as its full antisymmetric Gram matrix."""
    coeffs: Matrix

    def __post_init__(self):
        coeffs = as_matrix(self.coeffs)
        size = len(coeffs)
        if any(len(row) != size for row in coeffs):
            raise DimensionMismatch("AltForm2 needs a square matrix")
        for a in range(size):
            for b in range(size):
                if coeffs[a][b] != -coeffs[b][a]:
                    raise ValueError(f"not antisymmetric at ({a}, {b})")
        object.__setattr__(self, 'coeffs', coeffs)

    @classmethod
    def zero(cls, dim: int) -> 'AltForm2':
        return cls(tuple(tuple(Fraction(0) for _ in range(dim)) for _ in range(dim)))

    @classmethod
    def from_terms(cls, dim: int, terms: Dict[Tuple[int, int], Scalar]) -> 'AltForm2':
        """terms maps 0-based (a, b), a != b, to the value on (e_a, e_b)."""
        rows = [[Fraction(0)] * dim for _ in range(dim)]
        for (a, b), value in terms.items():
            if a == b:
                raise ValueError(f"repeated index in {(a, b)}")
            rows[a][b] += Fraction(value)
            rows[b][a] -= Fraction(value)
        return cls(tuple(tuple(r) for r in rows))

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def __call__(self, x: Sequence, y: Sequence) -> Fraction:
        return sum((Fraction(x[a]) * self.coeffs[a][b] * y[b]
                    for a in range(self.dim) if x[a]
                    for b in range(self.dim) if y[b]), Fraction(0))

    def __add__(self, other: 'AltForm2') -> 'AltForm2':
        return AltForm2(mat_add(self.coeffs, other.coeffs))

    def __sub__(self, other: 'AltForm2') -> 'AltForm2':
        return AltForm2(mat_add(self.coeffs, mat_scale(-1, other.coeffs)))

    def __neg__(self) -> 'AltForm2':
        return AltForm2(mat_scale(-1, self.coeffs))

    def __rmul__(self, c: Scalar) -> 'AltForm2':
        return AltForm2(mat_scale(c, self.coeffs))

    def terms(self) -> Dict[Tuple[int, int], Fraction]:
        """Nonzero coefficients on a < b."""
        return {(a, b): self.coeffs[a][b]
                for a, b in combinations(range(self.dim), 2) if self.coeffs[a][b]}

    def covector(self, y: Sequence) -> Vector:
        """c with omega(x, y) = c . x."""
        return mat_vec(self.coeffs, y)

    def upper(self) -> Vector:
        return tuple(self.coeffs[a][b] for a, b in combinations(range(self.dim), 2))

    def is_zero(self) -> bool:
        return not any(self.upper())

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.upper())


def _det3(x: Sequence, y: Sequence, z: Sequence, a: int, b: int, c: int) -> Fraction:
    return (Fraction(x[a]) * (Fraction(y[b]) * z[c] - Fraction(y[c]) * z[b])
            - Fraction(x[b]) * (Fraction(y[a]) * z[c] - Fraction(y[c]) * z[a])
            + Fraction(x[c]) * (Fraction(y[a]) * z[b] - Fraction(y[b]) * z[a]))


@dataclass(frozen=True)
class AltForm3:
    """Alternating trilinear form: coefficients on strictly increasing 0-based triples."""
    dim: int
    coeffs: Tuple[Tuple[Tuple[int, int, int], Fraction], ...] = ()

    @classmethod
    def from_terms(cls, dim: int, terms: Dict[Tuple[int, int, int], Scalar]) -> 'AltForm3':
        collected: Dict[Tuple[int, int, int], Fraction] = {}
        for triple, value in terms.items():
            if len(set(triple)) != 3:
                raise ValueError(f"repeated index in {triple}")
            if any(not 0 <= t < dim for t in triple):
                raise DimensionMismatch(f"index out of range in {triple}")
            ordered = tuple(sorted(triple))
            sign = 1 if _inversions(triple) % 2 == 0 else -1
            collected[ordered] = collected.get(ordered, Fraction(0)) + sign * Fraction(value)
        return cls(dim, tuple(sorted((t, c) for t, c in collected.items() if c)))

    def __call__(self, x: Sequence, y: Sequence, z: Sequence) -> Fraction:
        return sum((c * _det3(x, y, z, *t) for t, c in self.coeffs), Fraction(0))

    def covector(self, y: Sequence, z: Sequence) -> Vector:
        """c with E(x, y, z) = c . x for every x."""
        c = [Fraction(0)] * self.dim
        for (a, b, d), value in self.coeffs:
            c[a] += value * (y[b] * z[d] - y[d] * z[b])
            c[b] -= value * (y[a] * z[d] - y[d] * z[a])
            c[d] += value * (y[a] * z[b] - y[b] * z[a])
        return tuple(c)

    def __rmul__(self, c: Scalar) -> 'AltForm3':
        return AltForm3.from_terms(self.dim, {t: c * v for t, v in self.coeffs})

    def __add__(self, other: 'AltForm3') -> 'AltForm3':
        if other.dim != self.dim:
            raise DimensionMismatch(f"AltForm3 of dim {self.dim} vs {other.dim}")
        terms = dict(self.coeffs)
        for t, v in other.coeffs:
            terms[t] = terms.get(t, Fraction(0)) + v
        return AltForm3.from_terms(self.dim, terms)

    def terms(self) -> Dict[Tuple[int, int, int], Fraction]:
        return dict(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for _, c in self.coeffs)


@dataclass(frozen=True)
class HodgeImage:
    """omega^H(x, y) = re(x, y) + i * im(x, y)."""
    re: AltForm2
    im: AltForm2

    def __call__(self, x: Sequence, y: Sequence) -> GaussianRational:
        return GaussianRational(self.re(x, y), self.im(x, y))

    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im.is_zero()


def _inversions(seq: Sequence[int]) -> int:
    return sum(1 for i, j in combinations(range(len(seq)), 2) if seq[i] > seq[j])


def _check_dims(T: TorusData, dim: int) -> None:
    if T.dim != dim:
        raise DimensionMismatch(f"torus of real dimension {T.dim} vs form of dimension {dim}")


def type_condition_check(T: TorusData, E: AltForm3) -> bool:
    """E(x,y,z) = E(ix,iy,z) + E(x,iy,iz) + E(ix,y,iz) on every basis triple."""
    _check_dims(T, E.dim)
    images = [T.apply(T.basis(i)) for i in range(T.dim)]
    for a, b, c in combinations(range(T.dim), 3):
        x, y, z = T.basis(a), T.basis(b), T.basis(c)
        jx, jy, jz = images[a], images[b], images[c]
        if E(x, y, z) != E(jx, jy, z) + E(x, jy, jz) + E(jx, y, jz):
            logger.debug("type condition fails on basis triple %s", (a, b, c))
            return False
    return True


def contract3(E: AltForm3, w: Sequence) -> AltForm2:
    """(x, y) -> E(w, x, y)."""
    w = as_vector(w)
    if len(w) != E.dim:
        raise DimensionMismatch(f"vector of length {len(w)} vs form of dimension {E.dim}")
    rows = [[Fraction(0)] * E.dim for _ in range(E.dim)]
    for (a, b, c), value in E.coeffs:
        for (p, q), s in (((b, c), w[a]), ((a, c), -w[b]), ((a, b), w[c])):
            if s:
                rows[p][q] += value * s
                rows[q][p] -= value * s
    return AltForm2(tuple(tuple(r) for r in rows))


def j_pullback2(T: TorusData, omega: AltForm2) -> AltForm2:
    """(x, y) -> omega(Jx, Jy)."""
    _check_dims(T, omega.dim)
    return AltForm2(mat_mul(mat_mul(transpose(T.J), omega.coeffs), T.J))


def anti_invariant_part(T: TorusData, omega: AltForm2) -> AltForm2:
    return Fraction(1, 2) * (omega - j_pullback2(T, omega))


def is_type_one_one(T: TorusData, omega: AltForm2) -> bool:
    return anti_invariant_part(T, omega).is_zero()


def hodge_projection(T: TorusData, omega: AltForm2) -> HodgeImage:
    _check_dims(T, omega.dim)
    real = Fraction(1, 4) * (omega - j_pullback2(T, omega))
    # omega(Jx, y) + omega(x, Jy)
    mixed = mat_add(mat_mul(transpose(T.J), omega.coeffs), mat_mul(omega.coeffs, T.J))
    return HodgeImage(re=real, im=Fraction(1, 4) * AltForm2(mixed))


def in_integral_plus_type_one_one(T: TorusData, omega: AltForm2) -> bool:
    """
    Whether omega lies in Alt^2(Z^2n, Z) + Alt^2(R)^(1,1). The projector onto the
    anti-invariant part kills exactly the (1,1) summand, so this is lattice
    membership of anti(omega) among the images of the integer basis forms.
    """
    _check_dims(T, omega.dim)
    return anti_invariant_part(T, omega).upper() in anti_invariant_lattice(T)


@lru_cache(maxsize=32)
def anti_invariant_lattice(T: TorusData) -> IntegerLattice:
    """Anti-invariant parts of the integer basis forms e_a*^e_b*, reduced once per torus."""
    return IntegerLattice.span([anti_invariant_part(T, AltForm2.from_terms(T.dim, {(a, b): 1})).upper()
                                for a, b in combinations(range(T.dim), 2)])


def skew_symmetrize(f: Callable, args: Sequence):
    """Signed sum of f over all orderings of args (two or three of them)."""
    if len(args) not in (2, 3):
        raise ValueError(f"skew_symmetrize takes 2 or 3 arguments, got {len(args)}")
    terms = []
    for order in permutations(range(len(args))):
        value = f(*(args[i] for i in order))
        terms.append(value if _inversions(order) % 2 == 0 else -value)
    return reduce(lambda s, t: s + t, terms)
