import pytest
import random
import sys
import os
from fractions import Fraction
from itertools import product

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../src')))

from exact_core import basis_vector, vec_add
from gerbe import translation_delta_b
from symmetry import (NotInSubgroup, SubgroupCase, decomposition, in_K, in_subgroup, membership_table,
                      p_class)
from torus import anti_invariant_part, contract3, is_type_one_one

HALF = Fraction(1, 2)
GRID = [Fraction(0), Fraction(1, 3), HALF, Fraction(1)]


# --- TESTS ---

def test_p_class_representative(torus2, e123):
    """The representative is E(w,.,.); e1 is in K, e1/2 is not."""
    E = e123()
    assert p_class(torus2, E, basis_vector(4, 0)).representative == contract3(E, basis_vector(4, 0))
    assert p_class(torus2, E, basis_vector(4, 0)).is_zero
    assert not p_class(torus2, E, (HALF, 0, 0, 0)).is_zero


def test_membership_rules_on_grid(torus2, e123):
    """For E = e1*^e2*^e3*: K needs w1, w2 integral; the integral case adds w3; (1,1) needs w1 = w2 = 0."""
    E = e123()
    for w in product(GRID, repeat=4):
        integral = [c.denominator == 1 for c in w]
        assert in_K(torus2, E, w) == (integral[0] and integral[1])
        assert in_subgroup(torus2, E, w, SubgroupCase.INTEGRAL) == all(integral[:3])
        assert in_subgroup(torus2, E, w, SubgroupCase.TYPE_ONE_ONE) == (w[0] == 0 and w[1] == 0)


def test_both_subgroups_lie_in_k(integral_sampler, oneone_sampler):
    """Every sampled vector of either subgroup is in K(E,V)."""
    rng = random.Random(12)
    for sampler, case in ((integral_sampler, SubgroupCase.INTEGRAL), (oneone_sampler, SubgroupCase.TYPE_ONE_ONE)):
        for _ in range(10):
            G, vectors = sampler(rng, 3)
            for w in vectors:
                assert in_subgroup(G.torus, G.E, w, case)
                assert in_K(G.torus, G.E, w)


def test_integral_decomposition_example(torus2, e123):
    """w = e1 on E = e1*^e2*^e3*: eps = e2*^e3*, Ew = -(3/8)(e2*^e3* - e1*^e4*)."""
    dec = decomposition(torus2, e123(), basis_vector(4, 0), SubgroupCase.INTEGRAL)
    omega = contract3(e123(), basis_vector(4, 0))
    assert dec.epsw == omega
    assert dec.Ew(basis_vector(4, 1), basis_vector(4, 2)) == Fraction(-3, 8)
    assert dec.Ew(basis_vector(4, 0), basis_vector(4, 3)) == Fraction(3, 8)


def test_decomposition_invariants(integral_sampler, oneone_sampler):
    """Ew + epsw is the translation shift, Ew is (1,1), epsw is integral, and the split is additive."""
    rng = random.Random(31)
    for sampler, case in ((integral_sampler, SubgroupCase.INTEGRAL), (oneone_sampler, SubgroupCase.TYPE_ONE_ONE)):
        for _ in range(15):
            G, (w1, w2) = sampler(rng, 2)
            T, E = G.torus, G.E
            dec = decomposition(T, E, w1, case)
            assert dec.Ew + dec.epsw == translation_delta_b(G, w1)
            assert anti_invariant_part(T, dec.Ew).is_zero()
            assert dec.epsw.is_integral()
            assert decomposition(T, E, vec_add(w1, w2), case) == dec + decomposition(T, E, w2, case)


def test_type_one_one_decomposition(torus2, e123):
    """w = e3 contracts to e1*^e2*, which is (1,1): Ew = (1/4)e1*^e2*, eps = 0."""
    dec = decomposition(torus2, e123(), basis_vector(4, 2), SubgroupCase.TYPE_ONE_ONE)
    assert is_type_one_one(torus2, dec.Ew)
    assert dec.Ew(basis_vector(4, 0), basis_vector(4, 1)) == Fraction(1, 4)
    assert dec.epsw.is_zero()


@pytest.mark.parametrize("w,case", [
    ((HALF, 0, 0, 0), SubgroupCase.INTEGRAL),
    ((0, 0, Fraction(1, 3), 0), SubgroupCase.INTEGRAL),
    ((1, 0, 0, 0), SubgroupCase.TYPE_ONE_ONE),
])
def test_decomposition_outside_subgroup(torus2, e123, w, case):
    """Vectors outside the chosen subgroup are refused."""
    with pytest.raises(NotInSubgroup):
        decomposition(torus2, e123(), w, case)


def test_decomposition_unchecked(torus2, e123):
    """check=False still returns the formula value."""
    dec = decomposition(torus2, e123(), (HALF, 0, 0, 0), SubgroupCase.INTEGRAL, check=False)
    assert dec.epsw == contract3(e123(), (HALF, 0, 0, 0))
    assert not dec.epsw.is_integral()


def test_membership_table(torus2, e123):
    """Sixteen rows for the grid {0, 1/2}; counts follow the membership rules."""
    table = membership_table(torus2, e123(), [0, HALF])
    assert len(table) == 16
    assert list(table.columns) == ['w1', 'w2', 'w3', 'w4', 'in_K', 'integral', 'oneone']
    assert int(table['in_K'].sum()) == 4
    assert int(table['integral'].sum()) == 2
    assert int(table['oneone'].sum()) == 4
    first = table.iloc[0]
    assert (first['w1'], first['w4']) == ('0', '0')
    assert set(table['w3']) == {'0', '1/2'}
