import pytest
import random
import sys
import os
from fractions import Fraction
from itertools import combinations

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../src')))

from exact_core import DimensionMismatch, basis_vector
from torus import (AltForm2, AltForm3, NotAComplexStructure, anti_invariant_lattice, anti_invariant_part,
                   check_complex_structure, contract3, hodge_projection, in_integral_plus_type_one_one, j_pullback2,
                   skew_symmetrize, standard_torus, type_condition_check)


def form2(**terms):
    """AltForm2 on Z^4 from keyword names like e23=1 (1-based indices)."""
    return AltForm2.from_terms(4, {(int(k[1]) - 1, int(k[2]) - 1): v for k, v in terms.items()})


def random_form2(rng, dim=4):
    return AltForm2.from_terms(dim, {p: Fraction(rng.randint(-6, 6), rng.randint(1, 5))
                                     for p in combinations(range(dim), 2)})


def n3_counterexample():
    """J: e_k -> e_{k+3}, e_{k+3} -> -e_k on Z^6."""
    rows = [[0] * 6 for _ in range(6)]
    for k in range(3):
        rows[k + 3][k] = 1
        rows[k][k + 3] = -1
    return check_complex_structure(rows)


# --- TESTS ---

def test_fixture_complex_structure_is_valid(torus2):
    """The running n = 2 fixture squares to -I."""
    assert torus2.n == 2
    assert torus2.apply(basis_vector(4, 0)) == basis_vector(4, 1)
    assert torus2.apply(basis_vector(4, 3)) == tuple(-x for x in basis_vector(4, 2))


def test_identity_is_not_a_complex_structure():
    """I * I = I, not -I."""
    with pytest.raises(NotAComplexStructure):
        check_complex_structure([[1, 0], [0, 1]])


def test_rotation_by_i():
    """n = 1 with J = [[0,-1],[1,0]]."""
    assert check_complex_structure([[0, -1], [1, 0]]).n == 1


def test_odd_size_rejected():
    """Complex structures only live in even real dimension."""
    with pytest.raises(NotAComplexStructure):
        check_complex_structure([[0, 1, 0], [1, 0, 0], [0, 0, 1]])


def test_type_condition_always_holds_in_dimension_two(torus2):
    """Twenty random integer E on the n = 2 fixture pass."""
    rng = random.Random(8)
    for _ in range(20):
        E = AltForm3.from_terms(4, {t: rng.randint(-5, 5) for t in combinations(range(4), 3)})
        assert type_condition_check(torus2, E)


def test_type_condition_counterexample_n3():
    """On the n = 3 structure, e1*^e2*^e3* is of type (3,0)+(0,3) at (e1,e2,e3)."""
    T = n3_counterexample()
    assert not type_condition_check(T, AltForm3.from_terms(6, {(0, 1, 2): 1}))
    assert type_condition_check(T, AltForm3(6))


def test_type_condition_dimension_mismatch(torus2):
    """E on Z^6 cannot be checked against a torus of real dimension 4."""
    with pytest.raises(DimensionMismatch):
        type_condition_check(torus2, AltForm3.from_terms(6, {(0, 1, 2): 1}))


def test_altform3_antisymmetric_evaluation(e123):
    """Evaluation follows the sign of the permutation."""
    E = e123()
    e = [basis_vector(4, i) for i in range(4)]
    assert E(e[0], e[1], e[2]) == 1
    assert E(e[1], e[0], e[2]) == -1
    assert E(e[2], e[0], e[1]) == 1
    assert E(e[0], e[0], e[2]) == 0
    assert AltForm3.from_terms(4, {(1, 0, 2): 1}) == AltForm3.from_terms(4, {(0, 1, 2): -1})


def test_contract3_examples(e123):
    """Contraction with e4/7 vanishes; with e1/2 on 2E it gives e2*^e3*."""
    assert contract3(e123(), (0, 0, 0, Fraction(1, 7))).is_zero()
    assert contract3(e123(2), (Fraction(1, 2), 0, 0, 0)) == form2(e23=1)
    assert contract3(e123(5), (0, 0, 0, 0)).is_zero()


def test_contract3_general_vector(e123):
    """E(w,.,.) = w1 e23 - w2 e13 + w3 e12 for E = e1*^e2*^e3*."""
    w = (Fraction(1, 3), Fraction(2), Fraction(-1, 2), Fraction(5))
    assert contract3(e123(), w) == form2(e23=Fraction(1, 3), e13=-2, e12=Fraction(-1, 2))


def test_j_pullback2_examples(torus2):
    """e2*^e3* pulls back to -e1*^e4*; invariant forms are fixed."""
    assert j_pullback2(torus2, form2(e23=1)) == form2(e14=-1)
    assert j_pullback2(torus2, form2(e12=3, e34=-1)) == form2(e12=3, e34=-1)
    assert j_pullback2(torus2, AltForm2.zero(4)).is_zero()


def test_anti_invariant_part_examples(torus2):
    """anti(e2*^e3*) = (1/2)(e2*^e3* + e1*^e4*)."""
    half = Fraction(1, 2)
    assert anti_invariant_part(torus2, form2(e23=1)) == form2(e23=half, e14=half)
    assert anti_invariant_part(torus2, form2(e12=1)).is_zero()
    anti = form2(e13=1, e24=-1)
    assert anti_invariant_part(torus2, anti) == anti


def test_anti_invariant_part_is_projector(torus2):
    """Idempotent, and its kernel is exactly the J-invariant forms."""
    rng = random.Random(21)
    for _ in range(30):
        omega = random_form2(rng)
        anti = anti_invariant_part(torus2, omega)
        assert anti_invariant_part(torus2, anti) == anti
        invariant = omega + j_pullback2(torus2, omega)
        assert anti_invariant_part(torus2, invariant).is_zero()
        assert j_pullback2(torus2, invariant) == invariant


def test_hodge_projection_examples(torus2):
    """Re part of e2*^e3* is 1/4 at (e2,e3) and at (e1,e4); (1,1) forms project to zero."""
    e = [basis_vector(4, i) for i in range(4)]
    image = hodge_projection(torus2, form2(e23=1))
    assert image.re(e[1], e[2]) == Fraction(1, 4)
    assert image.re(e[0], e[3]) == Fraction(1, 4)
    assert hodge_projection(torus2, form2(e12=1, e34=2)).is_zero()
    assert hodge_projection(torus2, AltForm2.zero(4)).is_zero()


def test_hodge_matches_formula(torus2):
    """omega^H(x,y) = (1/4)(omega(x,y) - omega(Jx,Jy) + i omega(Jx,y) + i omega(x,Jy))."""
    rng = random.Random(2)
    omega = random_form2(rng)
    image = hodge_projection(torus2, omega)
    for a, b in combinations(range(4), 2):
        x, y = basis_vector(4, a), basis_vector(4, b)
        jx, jy = torus2.apply(x), torus2.apply(y)
        value = image(x, y)
        assert value.re == Fraction(1, 4) * (omega(x, y) - omega(jx, jy))
        assert value.im == Fraction(1, 4) * (omega(jx, y) + omega(x, jy))


def test_hodge_kernel_equals_anti_invariant_kernel(torus2):
    """Fifty random forms, half of them built to be of type (1,1)."""
    rng = random.Random(50)
    for k in range(50):
        omega = random_form2(rng)
        if k % 2:
            omega = omega + j_pullback2(torus2, omega)
        assert hodge_projection(torus2, omega).is_zero() == anti_invariant_part(torus2, omega).is_zero()
        assert hodge_projection(torus2, omega).re == Fraction(1, 2) * anti_invariant_part(torus2, omega)


def test_integral_plus_type_one_one(torus2):
    """Integer forms and (1,1) forms are in; (1/3)e2*^e3* is not."""
    assert in_integral_plus_type_one_one(torus2, form2(e23=1))
    assert in_integral_plus_type_one_one(torus2, form2(e13=Fraction(1, 2), e24=Fraction(1, 2)))
    assert in_integral_plus_type_one_one(torus2, form2(e23=Fraction(1, 2), e14=Fraction(-1, 2)))
    assert not in_integral_plus_type_one_one(torus2, form2(e23=Fraction(1, 3)))


def test_skew_symmetrize_alternating_and_symmetric(e123):
    """Alternating trilinear gives 6 f; symmetric bilinear gives 0."""
    E = e123()
    args = [basis_vector(4, i) for i in range(3)]
    assert skew_symmetrize(E, args) == 6 * E(*args)
    assert skew_symmetrize(lambda a, b: a[0] * b[0] + a[1] * b[1], [(1, 2), (3, 4)]) == 0


def test_skew_symmetrize_two_term_sum():
    """f(a,b) = a1 b2 on (e1, e2) gives 1 - 0."""
    assert skew_symmetrize(lambda a, b: a[0] * b[1], [(1, 0), (0, 1)]) == 1


def test_skew_symmetrize_arity():
    """Only two or three arguments are supported."""
    with pytest.raises(ValueError):
        skew_symmetrize(lambda a: a, [(1,)])


def test_contract3_agrees_with_evaluation():
    """The contraction built from coefficients matches E(w, x, y) on random forms in dimension 6."""
    rng = random.Random(31)
    for _ in range(10):
        E = AltForm3.from_terms(6, {t: rng.randint(-3, 3) for t in combinations(range(6), 3)})
        w = tuple(Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(6))
        x = tuple(rng.randint(-2, 2) for _ in range(6))
        y = tuple(rng.randint(-2, 2) for _ in range(6))
        assert contract3(E, w)(x, y) == E(w, x, y)


def test_altform3_covector():
    """E(x, y, z) = c . x with c the covector of (y, z)."""
    rng = random.Random(32)
    for _ in range(10):
        E = AltForm3.from_terms(4, {t: rng.randint(-3, 3) for t in combinations(range(4), 3)})
        x, y, z = (tuple(Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(4)) for _ in range(3))
        assert sum(a * b for a, b in zip(E.covector(y, z), x)) == E(x, y, z)


def test_anti_invariant_lattice_cached_per_torus(torus2):
    """Equal tori share one reduction."""
    assert anti_invariant_lattice(torus2) is anti_invariant_lattice(standard_torus(2))
