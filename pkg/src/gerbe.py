import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from exact_core import (DimensionMismatch, GaussianRational, Scalar, UnitValue, Vector, as_vector,
                        basis_vector, covec_mat, dot, unit_reduce, vec_add, vec_scale, vec_sub,
                        zero_vector)
from torus import (AltForm2, AltForm3, TorusData, contract3,
                   in_integral_plus_type_one_one, j_pullback2, type_condition_check)

logger = logging.getLogger(__name__)


class TypeConditionFailed(ValueError):
    """Raised when E has a (3,0)+(0,3) part for the given complex structure."""


class TorusMismatch(ValueError):
    """Raised when two gerbes live on different tori."""


@dataclass(frozen=True)
class ExponentFn:
    """
    v -> const + lin_re(v) + i * lin_im(v). The function itself is exp of this,
    with exp(z) = e^{2 pi i z}.
    """
    const: GaussianRational
    lin_re: Vector
    lin_im: Vector

    @classmethod
    def zero(cls, dim: int) -> 'ExponentFn':
        return cls(GaussianRational(), zero_vector(dim), zero_vector(dim))

    @classmethod
    def constant(cls, dim: int, value) -> 'ExponentFn':
        return cls(GaussianRational.lift(value), zero_vector(dim), zero_vector(dim))

    @property
    def dim(self) -> int:
        return len(self.lin_re)

    def __call__(self, v: Sequence) -> GaussianRational:
        return self.const + GaussianRational(dot(self.lin_re, v), dot(self.lin_im, v))

    def __add__(self, other: 'ExponentFn') -> 'ExponentFn':
        return ExponentFn(self.const + other.const,
                          vec_add(self.lin_re, other.lin_re), vec_add(self.lin_im, other.lin_im))

    def __sub__(self, other: 'ExponentFn') -> 'ExponentFn':
        return ExponentFn(self.const - other.const,
                          vec_sub(self.lin_re, other.lin_re), vec_sub(self.lin_im, other.lin_im))

    def __neg__(self) -> 'ExponentFn':
        return ExponentFn(-self.const, vec_scale(-1, self.lin_re), vec_scale(-1, self.lin_im))

    def add_constant(self, value) -> 'ExponentFn':
        return ExponentFn(self.const + value, self.lin_re, self.lin_im)

    def shift(self, u: Sequence) -> 'ExponentFn':
        """The function v -> self(v + u)."""
        return ExponentFn(self(u), self.lin_re, self.lin_im)

    def linear_is_zero(self) -> bool:
        return not any(self.lin_re) and not any(self.lin_im)

    def is_holomorphic(self, T: TorusData) -> bool:
        # l(Jv) = i l(v) for l = lin_re + i lin_im
        return (covec_mat(self.lin_re, T.J) == vec_scale(-1, self.lin_im)
                and covec_mat(self.lin_im, T.J) == tuple(self.lin_re))

    def to_json(self) -> dict:
        return {
            'const': self.const.to_json(),
            'lin_re': [str(c) for c in self.lin_re],
            'lin_im': [str(c) for c in self.lin_im],
        }


@dataclass(frozen=True)
class Character:
    """
    lambda -> exp(sum exponent_i * lambda_i) on Z^2n. Real parts are kept in
    [0, 1), so equal characters compare equal.
    """
    exponent: tuple

    def __post_init__(self):
        object.__setattr__(self, 'exponent',
                           tuple(unit_reduce(c).exponent for c in self.exponent))

    @classmethod
    def from_values(cls, dim: int, fn: Callable[[Vector], GaussianRational]) -> 'Character':
        return cls(tuple(GaussianRational.lift(fn(basis_vector(dim, j))) for j in range(dim)))

    @classmethod
    def trivial(cls, dim: int) -> 'Character':
        return cls(tuple(GaussianRational() for _ in range(dim)))

    def __call__(self, lam: Sequence) -> UnitValue:
        total = GaussianRational()
        for c, n in zip(self.exponent, lam):
            total = total + c * Fraction(n)
        return unit_reduce(total)

    def __mul__(self, other: 'Character') -> 'Character':
        return Character(tuple(a + b for a, b in zip(self.exponent, other.exponent)))

    def inverse(self) -> 'Character':
        return Character(tuple(-a for a in self.exponent))

    def is_trivial(self) -> bool:
        return all(c.is_zero() for c in self.exponent)

    def to_json(self) -> list:
        return [unit_reduce(c).to_json() for c in self.exponent]


@dataclass(frozen=True)
class GerbeData:
    """Canonical data (B, E) of a holomorphic gerbe on the torus."""
    torus: TorusData
    B: AltForm2
    E: AltForm3

    def __post_init__(self):
        if self.B.dim != self.torus.dim or self.E.dim != self.torus.dim:
            raise DimensionMismatch(
                f"torus of dimension {self.torus.dim} with B of {self.B.dim} and E of {self.E.dim}")
        if not self.E.is_integral():
            raise ValueError("E must have integer coefficients")
        if not type_condition_check(self.torus, self.E):
            raise TypeConditionFailed("E does not satisfy the type condition for this J")


def k_value(T: TorusData, E: AltForm3, x: Sequence, y: Sequence, z: Sequence) -> Fraction:
    """Re H_{y,z}(x)."""
    jx, jy, jz = T.apply(x), T.apply(y), T.apply(z)
    return Fraction(1, 8) * (E(x, y, z) + Fraction(1, 2) * E(jx, jy, z) + Fraction(1, 2) * E(jx, y, jz))


def l_value(T: TorusData, E: AltForm3, x: Sequence, y: Sequence, z: Sequence) -> Fraction:
    """Im H_{y,z}(x)."""
    jx, jy, jz = T.apply(x), T.apply(y), T.apply(z)
    return Fraction(1, 8) * (Fraction(1, 2) * E(x, jy, z) + Fraction(1, 2) * E(x, y, jz) - E(jx, y, z))


# --- k and l as covectors in one slot ---

def _pull(T: TorusData, c: Sequence) -> Vector:
    return covec_mat(c, T.J)


def k_covector(T: TorusData, E: AltForm3, y: Sequence, z: Sequence) -> Vector:
    """c with k(x, y, z) = c . x."""
    mixed = vec_add(E.covector(T.apply(y), z), E.covector(y, T.apply(z)))
    return vec_add(vec_scale(Fraction(1, 8), E.covector(y, z)), vec_scale(Fraction(1, 16), _pull(T, mixed)))


def l_covector(T: TorusData, E: AltForm3, y: Sequence, z: Sequence) -> Vector:
    """c with l(x, y, z) = c . x."""
    mixed = vec_add(E.covector(T.apply(y), z), E.covector(y, T.apply(z)))
    return vec_sub(vec_scale(Fraction(1, 16), mixed), vec_scale(Fraction(1, 8), _pull(T, E.covector(y, z))))


def l_covector_middle(T: TorusData, E: AltForm3, x: Sequence, z: Sequence) -> Vector:
    """c with l(x, y, z) = c . y."""
    # E(x, y, z) = -E(y, x, z)
    c = vec_add(vec_scale(Fraction(1, 2), _pull(T, E.covector(x, z))),
                vec_scale(Fraction(1, 2), E.covector(x, T.apply(z))))
    return vec_scale(Fraction(1, 8), vec_sub(E.covector(T.apply(x), z), c))


def l_covector_last(T: TorusData, E: AltForm3, x: Sequence, y: Sequence) -> Vector:
    """c with l(x, y, z) = c . z."""
    # E(x, y, z) = E(z, x, y)
    c = vec_add(E.covector(x, T.apply(y)), _pull(T, E.covector(x, y)))
    return vec_scale(Fraction(1, 8), vec_sub(vec_scale(Fraction(1, 2), c), E.covector(T.apply(x), y)))


def h_exponent(G: GerbeData, lam1: Sequence, lam2: Sequence) -> ExponentFn:
    T, E = G.torus, G.E
    return ExponentFn(GaussianRational(), k_covector(T, E, lam1, lam2), l_covector(T, E, lam1, lam2))


def phi_exponent(G: GerbeData, lam1: Sequence, lam2: Sequence) -> ExponentFn:
    """Canonical cocycle exponent (1/2)B(l1, l2) + H_{l1,l2}(v), without the beta constants."""
    return h_exponent(G, lam1, lam2).add_constant(Fraction(1, 2) * G.B(lam1, lam2))


def translation_factor(G: GerbeData, w: Sequence, lam1: Sequence, lam2: Sequence) -> GaussianRational:
    return h_exponent(G, lam1, lam2)(as_vector(w))


def translation_delta_b(G: GerbeData, w: Sequence) -> AltForm2:
    """(1/8)(5E(w,.,.) - 3E(w,i.,i.))."""
    omega = contract3(G.E, w)
    return Fraction(1, 8) * (5 * omega - 3 * j_pullback2(G.torus, omega))


def translate_gerbe(G: GerbeData, w: Sequence) -> GerbeData:
    return GerbeData(G.torus, G.B + translation_delta_b(G, w), G.E)


def gerbes_isomorphic(G1: GerbeData, G2: GerbeData) -> bool:
    if G1.torus != G2.torus:
        raise TorusMismatch("gerbes live on different complex tori")
    if G1.E != G2.E:
        return False
    return in_integral_plus_type_one_one(G1.torus, G1.B - G2.B)


def coboundary1(cochain: Callable[[Vector], ExponentFn], lam1: Sequence, lam2: Sequence) -> ExponentFn:
    """(delta c)_{l1,l2}(v) = c_{l2}(v + l1) - c_{l1+l2}(v) + c_{l1}(v)."""
    lam1, lam2 = as_vector(lam1), as_vector(lam2)
    return cochain(lam2).shift(lam1) - cochain(vec_add(lam1, lam2)) + cochain(lam1)


def coboundary2(cochain: Callable[[Vector, Vector], ExponentFn],
                lam1: Sequence, lam2: Sequence, lam3: Sequence) -> ExponentFn:
    lam1, lam2, lam3 = as_vector(lam1), as_vector(lam2), as_vector(lam3)
    return (cochain(lam2, lam3).shift(lam1)
            - cochain(vec_add(lam1, lam2), lam3)
            + cochain(lam1, vec_add(lam2, lam3))
            - cochain(lam1, lam2))


def scalar_cochain(dim: int, fn: Callable[[Vector], Scalar]) -> Callable[[Vector], ExponentFn]:
    """Wraps a constant-valued 1-cochain so coboundary1 can act on it."""
    return lambda lam: ExponentFn.constant(dim, fn(lam))
