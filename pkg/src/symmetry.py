import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

import pandas as pd

from exact_core import Vector, as_vector, format_rational
from torus import (AltForm2, AltForm3, TorusData, anti_invariant_lattice, anti_invariant_part, contract3,
                   in_integral_plus_type_one_one, is_type_one_one, j_pullback2)

logger = logging.getLogger(__name__)


class NotInSubgroup(ValueError):
    """Raised when a translation vector is outside the subgroup of the chosen case."""


class SubgroupCase(Enum):
    INTEGRAL = 'integral'
    TYPE_ONE_ONE = 'oneone'


@dataclass(frozen=True)
class Decomposition:
    """
    (1/8)(5E(w,.,.) - 3E(w,i.,i.)) = Ew + epsw with Ew of type (1,1)
    and epsw integral.
    """
    Ew: AltForm2
    epsw: AltForm2

    def __add__(self, other: 'Decomposition') -> 'Decomposition':
        return Decomposition(self.Ew + other.Ew, self.epsw + other.epsw)


@dataclass(frozen=True)
class PClass:
    representative: AltForm2
    is_zero: bool


def p_class(T: TorusData, E: AltForm3, w: Sequence) -> PClass:
    representative = contract3(E, w)
    return PClass(representative, in_integral_plus_type_one_one(T, representative))


def in_K(T: TorusData, E: AltForm3, w: Sequence) -> bool:
    return p_class(T, E, w).is_zero


def in_subgroup(T: TorusData, E: AltForm3, w: Sequence, case: SubgroupCase) -> bool:
    omega = contract3(E, w)
    if case is SubgroupCase.INTEGRAL:
        return omega.is_integral()
    return is_type_one_one(T, omega)


def decomposition(T: TorusData, E: AltForm3, w: Sequence, case: SubgroupCase,
                  check: bool = True) -> Decomposition:
    """
    Integral case: Ew = -(3/8)(E(w,.,.) + E(w,i.,i.)), epsw = E(w,.,.).
    Type (1,1) case: Ew = (1/4)E(w,.,.), epsw = 0.

    check=False skips the membership test; the returned pair then need not
    satisfy the type and integrality requirements.
    """
    w = as_vector(w)
    if check and not in_subgroup(T, E, w, case):
        raise NotInSubgroup(f"w = {[format_rational(c) for c in w]} "
                            f"is outside the {case.value} subgroup")
    return _split(T, E, w, case)


@lru_cache(maxsize=1024)
def _split(T: TorusData, E: AltForm3, w: Vector, case: SubgroupCase) -> Decomposition:
    omega = contract3(E, w)
    if case is SubgroupCase.INTEGRAL:
        return Decomposition(Ew=Fraction(-3, 8) * (omega + j_pullback2(T, omega)), epsw=omega)
    return Decomposition(Ew=Fraction(1, 4) * omega, epsw=AltForm2.zero(T.dim))


def membership_table(T: TorusData, E: AltForm3, grid: Iterable) -> pd.DataFrame:
    """One row per w in grid^2n with the three membership verdicts."""
    grid = [Fraction(g) for g in grid]
    records = []
    for w in product(grid, repeat=T.dim):
        record = {f"w{i + 1}": format_rational(c) for i, c in enumerate(w)}
        omega = contract3(E, w)
        anti = anti_invariant_part(T, omega)
        record['in_K'] = anti.upper() in anti_invariant_lattice(T)
        record['integral'] = omega.is_integral()
        record['oneone'] = anti.is_zero()
        records.append(record)
    table = pd.DataFrame(records)
    logger.info("membership: %d of %d grid points in K(E,V), %d integral",
                int(table['in_K'].sum()), len(table), int(table['integral'].sum()))
    return table
