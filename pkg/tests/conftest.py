import os
import sys
from fractions import Fraction
from itertools import combinations

import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../src')))

from gerbe import GerbeData
from torus import AltForm2, AltForm3, standard_torus


@pytest.fixture
def torus2():
    """n = 2 torus with J: e1 -> e2, e2 -> -e1, e3 -> e4, e4 -> -e3."""
    return standard_torus(2)


@pytest.fixture
def e123():
    """Factory for scale * e1*^e2*^e3* on Z^4."""
    def _make(scale=1):
        return AltForm3.from_terms(4, {(0, 1, 2): scale})
    return _make


@pytest.fixture
def make_gerbe(torus2):
    def _make(E, B=None):
        return GerbeData(torus2, B if B is not None else AltForm2.zero(4), E)
    return _make


@pytest.fixture
def integral_sampler(torus2):
    """
    Factory: rng, count -> (gerbe, vectors). E = 2 * E0 with E0 entries in {-1, 0, 1},
    so every vector of (1/2)Z^4 contracts integrally.
    """
    def _make(rng, count):
        E = AltForm3.from_terms(4, {t: 2 * rng.randint(-1, 1) for t in combinations(range(4), 3)})
        B = AltForm2.from_terms(4, {p: Fraction(rng.randint(-3, 3), rng.randint(1, 4))
                                    for p in combinations(range(4), 2)})
        vectors = [tuple(Fraction(rng.randint(-2, 2), 2) for _ in range(4)) for _ in range(count)]
        return GerbeData(torus2, B, E), vectors
    return _make


@pytest.fixture
def oneone_sampler(torus2):
    """
    Factory: rng, count -> (gerbe, vectors). E = e1*^e2*^(a e3* + b e4*); vectors in
    span(e3, e4) contract to multiples of e1*^e2*, which is of type (1,1).
    """
    def _make(rng, count):
        a, b = rng.randint(-2, 2), rng.randint(-2, 2)
        E = AltForm3.from_terms(4, {(0, 1, 2): a, (0, 1, 3): b})
        vectors = [(Fraction(0), Fraction(0),
                    Fraction(rng.randint(-3, 3), rng.randint(1, 3)),
                    Fraction(rng.randint(-3, 3), rng.randint(1, 3))) for _ in range(count)]
        return GerbeData(torus2, AltForm2.zero(4), E), vectors
    return _make


@pytest.fixture
def oneone_n3():
    """
    Factory: rng, count -> (gerbe, vectors) on the n = 3 torus with
    E = e1*^e3*^e5* - e2*^e4*^e5* + e1*^e4*^e6* + e2*^e3*^e6*, the real part of
    dz1^dz2^dzbar3. Every w in span(e1..e4) contracts to a (1,1) form, and
    E(w1, w2, .) picks up e5*, e6* components.
    """
    T = standard_torus(3)
    E = AltForm3.from_terms(6, {(0, 2, 4): 1, (1, 3, 4): -1, (0, 3, 5): 1, (1, 2, 5): 1})
    gerbe = GerbeData(T, AltForm2.zero(6), E)

    def _make(rng, count):
        vectors = [tuple(Fraction(rng.randint(-3, 3), rng.randint(1, 4)) for _ in range(4))
                   + (Fraction(0), Fraction(0)) for _ in range(count)]
        return gerbe, vectors
    return _make
