import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import List, Optional, Sequence, Tuple

from exact_core import GaussianRational, Vector, as_vector, basis_vector, covec_mat, vec_scale
from gerbe import ExponentFn, GerbeData, coboundary1, l_covector_middle, translation_factor
from symmetry import Decomposition, SubgroupCase, decomposition

logger = logging.getLogger(__name__)


@dataclass
class VerificationSettings:
    """
    Random integer pairs added to the basis pairs when checking
    identities that are quadratic in the lattice arguments.
    """
    samples: int = 10
    seed: int = 0
    entry_bound: int = 3


@dataclass(frozen=True)
class TauContext:
    gerbe: GerbeData
    w: Vector
    dec: Decomposition
    case: SubgroupCase
    # reproduces the minus sign in front of the mu exponent as it is usually printed
    printed_mu_sign: bool = False


@dataclass(frozen=True)
class TauFailure:
    lam1: Vector
    lam2: Vector
    residual: ExponentFn


def build_context(gerbe: GerbeData, w: Sequence, case: SubgroupCase, check: bool = True,
                  printed_mu_sign: bool = False) -> TauContext:
    w = as_vector(w)
    dec = decomposition(gerbe.torus, gerbe.E, w, case, check=check)
    return TauContext(gerbe=gerbe, w=w, dec=dec, case=case, printed_mu_sign=printed_mu_sign)


def eta_exponent(ctx: TauContext, lam: Sequence) -> ExponentFn:
    """-i l(w, v, lam) - l(w, iv, lam)."""
    T, E = ctx.gerbe.torus, ctx.gerbe.E
    m = l_covector_middle(T, E, ctx.w, lam)
    return ExponentFn(GaussianRational(), vec_scale(-1, covec_mat(m, T.J)), vec_scale(-1, m))


def mu_exponent(ctx: TauContext, lam: Sequence) -> GaussianRational:
    T, E = ctx.gerbe.torus, ctx.gerbe.E
    jw, jlam = T.apply(ctx.w), T.apply(lam)
    value = Fraction(1, 16) * (Fraction(3, 2) * E(jw, jlam, lam) + Fraction(1, 2) * E(jw, lam, jlam))
    return GaussianRational(-value if ctx.printed_mu_sign else value)


def nu_exponent(ctx: TauContext, lam: Sequence) -> Fraction:
    """-(1/2) sum_{i<j} n_i n_j eps(e_i, e_j) over the standard basis in index order."""
    n = as_vector(lam)
    eps = ctx.dec.epsw.coeffs
    total = Fraction(0)
    for i in range(len(n)):
        if not n[i]:
            continue
        for j in range(i + 1, len(n)):
            total += n[i] * n[j] * eps[i][j]
    return Fraction(-1, 2) * total


def phi_factor_exponent(ctx: TauContext, lam: Sequence) -> ExponentFn:
    """L(v, lam) = (i/2)Ew(iv, lam) - (1/2)Ew(v, lam) + (i/4)Ew(i lam, lam)."""
    T, Ew = ctx.gerbe.torus, ctx.dec.Ew
    a = Ew.covector(lam)
    const = GaussianRational(0, Fraction(1, 4) * Ew(T.apply(lam), lam))
    return ExponentFn(const, vec_scale(Fraction(-1, 2), a), vec_scale(Fraction(1, 2), covec_mat(a, T.J)))


def tau_exponent(ctx: TauContext, lam: Sequence) -> ExponentFn:
    lam = as_vector(lam)
    return (phi_factor_exponent(ctx, lam) + eta_exponent(ctx, lam)).add_constant(
        mu_exponent(ctx, lam) + nu_exponent(ctx, lam))


def tau_residual(ctx: TauContext, lam1: Sequence, lam2: Sequence) -> ExponentFn:
    """Exponent of exp(H_{l1,l2}(w)) * (delta tau)_{l1,l2}; trivial means zero linear part and an integer constant."""
    return coboundary1(lambda lam: tau_exponent(ctx, lam), lam1, lam2).add_constant(
        translation_factor(ctx.gerbe, ctx.w, lam1, lam2))


def default_pairs(dim: int, settings: Optional[VerificationSettings] = None) -> List[Tuple[Vector, Vector]]:
    """Every ordered pair of basis vectors plus settings.samples seeded random integer pairs."""
    settings = settings or VerificationSettings()
    pairs = [(basis_vector(dim, i), basis_vector(dim, j)) for i, j in product(range(dim), repeat=2)]
    rng = random.Random(settings.seed)
    bound = settings.entry_bound
    for _ in range(settings.samples):
        pairs.append((as_vector(rng.randint(-bound, bound) for _ in range(dim)),
                      as_vector(rng.randint(-bound, bound) for _ in range(dim))))
    return pairs


def tau_failures(ctx: TauContext, pairs: Optional[Sequence] = None,
                 settings: Optional[VerificationSettings] = None) -> List[TauFailure]:
    if pairs is None:
        pairs = default_pairs(ctx.gerbe.torus.dim, settings)
    failures = []
    for lam1, lam2 in pairs:
        lam1, lam2 = as_vector(lam1), as_vector(lam2)
        residual = tau_residual(ctx, lam1, lam2)
        const = residual.const
        if residual.linear_is_zero() and const.im == 0 and const.re.denominator == 1:
            if const.re:
                # delta nu leaves sum_{i<j} a_i b_j eps_ij behind, an integer
                logger.debug("integer residual %s at %s, %s", const.re, lam1, lam2)
            continue
        logger.debug("tau identity fails at %s, %s with residual %s", lam1, lam2, residual)
        failures.append(TauFailure(lam1, lam2, residual))
    return failures


def verify_tau(ctx: TauContext, pairs: Optional[Sequence] = None,
               settings: Optional[VerificationSettings] = None) -> bool:
    """exp(H_{l1,l2}(w)) (delta tau^w)_{l1,l2} = 1 on every sampled pair."""
    failures = tau_failures(ctx, pairs, settings)
    if failures:
        logger.warning("tau identity fails on %d pairs for w = %s", len(failures),
                       [str(c) for c in ctx.w])
    return not failures
