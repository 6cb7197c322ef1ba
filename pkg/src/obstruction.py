import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations, product
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from exact_core import (GaussianRational, UnitValue, Vector, as_vector, covec_mat, format_rational,
                        unit_reduce, vec_add, vec_scale)
from gerbe import Character, ExponentFn, GerbeData, l_covector_last, l_value
from symmetry import Decomposition, NotInSubgroup, SubgroupCase, decomposition, in_subgroup
from torus import skew_symmetrize
from trivialization import TauContext, build_context, tau_exponent

logger = logging.getLogger(__name__)


class InternalMismatch(ValueError):
    """Two routes to the same quantity disagree; this is a bug, not bad input."""


class ClosedFormMismatch(ValueError):
    """An explicit skew-symmetrization disagrees with the closed form of its case."""


class FirstObstructionNonzero(ValueError):
    pass


class Obstruction(Enum):
    FIRST = 'first'
    SECOND = 'second'


@dataclass(frozen=True)
class ObstructionContext:
    gerbe: GerbeData
    case: SubgroupCase
    printed_mu_sign: bool = False

    # closed-form coefficients c in exp(c * E(w1, w2, w3))
    SECOND_OBSTRUCTION = {
        SubgroupCase.INTEGRAL: Fraction(-9),
        SubgroupCase.TYPE_ONE_ONE: Fraction(36),
    }
    GERBAL_CLASS = {
        SubgroupCase.INTEGRAL: Fraction(-3, 2),
        SubgroupCase.TYPE_ONE_ONE: Fraction(6),
    }
    GENERAL_FACTOR = Fraction(3)

    @property
    def dim(self) -> int:
        return self.gerbe.torus.dim

    def require(self, *vectors: Sequence) -> None:
        for w in vectors:
            if not in_subgroup(self.gerbe.torus, self.gerbe.E, w, self.case):
                raise NotInSubgroup(f"w = {[format_rational(c) for c in as_vector(w)]} "
                                    f"is outside the {self.case.value} subgroup")

    def decomposition(self, w: Sequence) -> Decomposition:
        return decomposition(self.gerbe.torus, self.gerbe.E, w, self.case)

    def tau_context(self, w: Sequence) -> TauContext:
        return build_context(self.gerbe, w, self.case, printed_mu_sign=self.printed_mu_sign)


@dataclass(frozen=True)
class ThetaGroupElement:
    alpha: Character
    w: Vector


@dataclass
class SubgroupSpec:
    """
    Generators of a subgroup of the case subgroup. With include_lattice the
    standard basis of Z^2n is added wherever it lies in the case subgroup.
    """
    generators: List[Vector]
    case: SubgroupCase
    include_lattice: bool = True

    def elements(self, gerbe: GerbeData) -> List[Vector]:
        T, E = gerbe.torus, gerbe.E
        gens = [as_vector(g) for g in self.generators]
        for g in gens:
            if not in_subgroup(T, E, g, self.case):
                raise NotInSubgroup(f"generator {[format_rational(c) for c in g]} "
                                    f"is outside the {self.case.value} subgroup")
        if self.include_lattice:
            for i in range(T.dim):
                e = T.basis(i)
                if in_subgroup(T, E, e, self.case):
                    gens.append(e)
                else:
                    logger.warning("lattice vector e%d is outside the %s subgroup, skipped",
                                   i + 1, self.case.value)
        return gens


@dataclass(frozen=True)
class FirstObstructionReport:
    skew: Character
    closed_form: Character


@dataclass(frozen=True)
class SecondObstructionReport:
    brute_force: UnitValue
    general_factor: UnitValue
    closed_form: UnitValue
    gerbal: UnitValue
    exponents: Dict[str, GaussianRational]
    agreement: Dict[str, bool]
    imaginary_zero: bool


@dataclass
class ObstructionVerdict:
    which: Obstruction
    vanishes: bool
    certificate: Optional[Tuple[Vector, ...]] = None
    value: Optional[UnitValue] = None
    cross_check: Dict[str, object] = field(default_factory=dict)


# --- theta group cocycle ---

def s_value(ctx: ObstructionContext, w1: Sequence, w2: Sequence, lam: Sequence) -> GaussianRational:
    """S = (i/2)Ew2(iw1, lam) - (1/2)Ew2(w1, lam) - i l(w2, w1, lam) - l(w2, iw1, lam)."""
    ctx.require(w2)
    T, E = ctx.gerbe.torus, ctx.gerbe.E
    Ew2 = ctx.decomposition(w2).Ew
    jw1 = T.apply(w1)
    re = Fraction(-1, 2) * Ew2(w1, lam) - l_value(T, E, w2, jw1, lam)
    im = Fraction(1, 2) * Ew2(jw1, lam) - l_value(T, E, w2, w1, lam)
    return GaussianRational(re, im)


def xi_character(ctx: ObstructionContext, w1: Sequence, w2: Sequence) -> Character:
    """
    (tau^{w1+w2})^{-1} (w1 . tau^{w2}) tau^{w1}, checked against exp(S(w1, w2, .)).
    """
    w1, w2 = as_vector(w1), as_vector(w2)
    ctx.require(w1, w2, vec_add(w1, w2))
    t1, t2, t12 = ctx.tau_context(w1), ctx.tau_context(w2), ctx.tau_context(vec_add(w1, w2))

    values = []
    for j in range(ctx.dim):
        lam = ctx.gerbe.torus.basis(j)
        composed = tau_exponent(t2, lam).shift(w1) - tau_exponent(t12, lam) + tau_exponent(t1, lam)
        if not composed.linear_is_zero():
            raise InternalMismatch(f"tau composition depends on v at lambda = e{j + 1}")
        values.append(composed.const)
    via_tau = Character(tuple(values))
    via_s = Character.from_values(ctx.dim, lambda lam: s_value(ctx, w1, w2, lam))
    if via_tau != via_s:
        raise InternalMismatch("tau composition and S disagree")
    return via_s


def theta_exponent(ctx: ObstructionContext, w1: Sequence, w2: Sequence) -> ExponentFn:
    """v -> i l(w2,w1,v) + l(w2,w1,iv) - (i/2)Ew2(iw1,v) - (1/2)Ew2(iw1,iv)."""
    ctx.require(w1, w2)
    T, E = ctx.gerbe.torus, ctx.gerbe.E
    Ew2 = ctx.decomposition(w2).Ew
    # v -> l(w2, w1, v) - (1/2)Ew2(iw1, v), using Ew2(x, v) = -Ew2(v, x)
    im = vec_add(l_covector_last(T, E, w2, w1), vec_scale(Fraction(1, 2), Ew2.covector(T.apply(w1))))
    return ExponentFn(GaussianRational(), covec_mat(im, T.J), im)


def theta_value(ctx: ObstructionContext, w1: Sequence, w2: Sequence, v: Sequence) -> GaussianRational:
    return theta_exponent(ctx, w1, w2)(as_vector(v))


def theta_group_multiply(a: ThetaGroupElement, b: ThetaGroupElement,
                         ctx: ObstructionContext) -> ThetaGroupElement:
    w = vec_add(a.w, b.w)
    ctx.require(a.w, b.w, w)
    twist = Character.from_values(ctx.dim, lambda lam: s_value(ctx, a.w, b.w, lam))
    return ThetaGroupElement(alpha=a.alpha * b.alpha * twist, w=w)


def commutator(ctx: ObstructionContext, a: ThetaGroupElement, b: ThetaGroupElement) -> Character:
    """alpha of (a b)(b a)^{-1}; trivial exactly when a and b commute."""
    return theta_group_multiply(a, b, ctx).alpha * theta_group_multiply(b, a, ctx).alpha.inverse()


# --- first obstruction ---

def first_obstruction_unitary(ctx: ObstructionContext, w1: Sequence, w2: Sequence) -> Character:
    """lam -> (1/8)(E(iw2, iw1, lam) - E(iw2, w1, i lam)) - Ew2(w1, lam)."""
    ctx.require(w1, w2)
    T, E = ctx.gerbe.torus, ctx.gerbe.E
    Ew2 = ctx.decomposition(w2).Ew
    jw1, jw2 = T.apply(w1), T.apply(w2)
    return Character.from_values(
        T.dim,
        lambda lam: Fraction(1, 8) * (E(jw2, jw1, lam) - E(jw2, w1, T.apply(lam))) - Ew2(w1, lam))


def first_obstruction_closed_form(ctx: ObstructionContext, w1: Sequence, w2: Sequence) -> Character:
    E = ctx.gerbe.E
    if ctx.case is SubgroupCase.INTEGRAL:
        return Character.from_values(ctx.dim, lambda lam: E(w2, w1, lam))
    return Character.from_values(ctx.dim, lambda lam: E(w1, w2, lam))


def first_obstruction_alternating(ctx: ObstructionContext, w1: Sequence, w2: Sequence) -> FirstObstructionReport:
    skew = first_obstruction_unitary(ctx, w1, w2) * first_obstruction_unitary(ctx, w2, w1).inverse()
    closed = first_obstruction_closed_form(ctx, w1, w2)
    if skew != closed:
        raise ClosedFormMismatch(
            f"skew-symmetrized first obstruction {skew.to_json()} vs closed form {closed.to_json()}")
    return FirstObstructionReport(skew=skew, closed_form=closed)


# --- second obstruction ---

def second_obstruction_cocycle(ctx: ObstructionContext, w1: Sequence, w2: Sequence,
                               w3: Sequence) -> GaussianRational:
    """Theta^{w2,w3}(w1)."""
    return theta_value(ctx, w2, w3, w1)


def second_obstruction_alternating(ctx: ObstructionContext, w1: Sequence, w2: Sequence,
                                   w3: Sequence) -> SecondObstructionReport:
    """
    Three candidates for the alternating class: the explicit skew-symmetrization
    of the cocycle, 3(E^{w3}(w1,w2) + E^{w1}(w2,w3) - E^{w2}(w1,w3)) and the
    closed form of the case. The closed form is the one decisions use.
    """
    w1, w2, w3 = as_vector(w1), as_vector(w2), as_vector(w3)
    ctx.require(w1, w2, w3)
    E = ctx.gerbe.E
    brute = skew_symmetrize(lambda a, b, c: second_obstruction_cocycle(ctx, a, b, c), (w1, w2, w3))
    dec1, dec2, dec3 = (ctx.decomposition(w) for w in (w1, w2, w3))
    general = ctx.GENERAL_FACTOR * (dec3.Ew(w1, w2) + dec1.Ew(w2, w3) - dec2.Ew(w1, w3))
    e = E(w1, w2, w3)
    exponents = {
        'brute_force': GaussianRational.lift(brute),
        'general_factor': GaussianRational(general),
        'closed_form': GaussianRational(ctx.SECOND_OBSTRUCTION[ctx.case] * e),
        'gerbal': GaussianRational(ctx.GERBAL_CLASS[ctx.case] * e),
    }
    units = {name: unit_reduce(z) for name, z in exponents.items()}
    agreement = {name: units[name] == units['brute_force']
                 for name in ('general_factor', 'closed_form', 'gerbal')}
    if not all(agreement.values()):
        logger.debug("second obstruction candidates disagree at E(w1,w2,w3) = %s: %s", e,
                     {k: str(v) for k, v in exponents.items()})
    return SecondObstructionReport(
        brute_force=units['brute_force'],
        general_factor=units['general_factor'],
        closed_form=units['closed_form'],
        gerbal=units['gerbal'],
        exponents=exponents,
        agreement=agreement,
        imaginary_zero=exponents['brute_force'].im == 0,
    )


def gerbal_class(ctx: ObstructionContext, w1: Sequence, w2: Sequence, w3: Sequence) -> UnitValue:
    ctx.require(w1, w2, w3)
    for a, b in combinations((w1, w2, w3), 2):
        if not first_obstruction_closed_form(ctx, a, b).is_trivial():
            raise FirstObstructionNonzero(
                f"first obstruction does not vanish on ({[str(c) for c in a]}, {[str(c) for c in b]})")
    return unit_reduce(ctx.GERBAL_CLASS[ctx.case] * ctx.gerbe.E(w1, w2, w3))


# --- decisions on finitely generated subgroups ---

def obstruction_vanishes(spec: SubgroupSpec, gerbe: GerbeData, which: Obstruction) -> ObstructionVerdict:
    """
    Decides on generator tuples in lexicographic order; the certificate is the
    first failing tuple (generators, plus the lattice vector for the first obstruction).
    """
    ctx = ObstructionContext(gerbe, spec.case)
    gens = spec.elements(gerbe)

    if which is Obstruction.FIRST:
        for w1, w2 in combinations(gens, 2):
            report = first_obstruction_alternating(ctx, w1, w2)
            for j in range(ctx.dim):
                lam = gerbe.torus.basis(j)
                value = report.closed_form(lam)
                if not value.is_trivial():
                    logger.info("first obstruction fails at (%s, %s, e%d)",
                                [str(c) for c in w1], [str(c) for c in w2], j + 1)
                    return ObstructionVerdict(which, False, (w1, w2, lam), value,
                                              {'skew_matches_closed_form': True})
        return ObstructionVerdict(which, True, cross_check={'skew_matches_closed_form': True})

    for w1, w2, w3 in combinations(gens, 3):
        report = second_obstruction_alternating(ctx, w1, w2, w3)
        if not report.closed_form.is_trivial():
            logger.info("second obstruction fails at (%s, %s, %s)",
                        [str(c) for c in w1], [str(c) for c in w2], [str(c) for c in w3])
            return ObstructionVerdict(which, False, (w1, w2, w3), report.closed_form,
                                      second_report_json(report))
    return ObstructionVerdict(which, True)


def second_report_json(report: SecondObstructionReport) -> dict:
    return {
        'candidates': {
            'brute_force': report.brute_force.to_json(),
            'general_factor': report.general_factor.to_json(),
            'closed_form': report.closed_form.to_json(),
            'gerbal': report.gerbal.to_json(),
        },
        'exponents': {name: z.to_json() for name, z in sorted(report.exponents.items())},
        'agrees_with_brute_force': dict(sorted(report.agreement.items())),
        'brute_force_imaginary_zero': report.imaginary_zero,
        'all_nontrivial': not any(u.is_trivial() for u in (
            report.brute_force, report.general_factor, report.closed_form, report.gerbal)),
    }


def theta_table(ctx: ObstructionContext, vectors: Dict[str, Sequence]) -> pd.DataFrame:
    """Theta^{wi,wj}(e_k) for every ordered pair of named vectors and every basis vector."""
    records = []
    names = sorted(vectors)
    for a, b in product(names, repeat=2):
        theta = theta_exponent(ctx, vectors[a], vectors[b])
        for k in range(ctx.dim):
            value = theta(ctx.gerbe.torus.basis(k))
            records.append({'w1': a, 'w2': b, 'v': f"e{k + 1}",
                            're': format_rational(value.re), 'im': format_rational(value.im)})
    return pd.DataFrame(records, columns=['w1', 'w2', 'v', 're', 'im'])
