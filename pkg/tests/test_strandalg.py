from __future__ import annotations

import random
from itertools import product

import pytest

from strandhf.errors import ChordOutOfRange, WrongSize
from strandhf.pmc import pmc_reverse, pmc_standard
from strandhf.strandalg import (algebra, algebra_homology, chord_elem, format_laurent,
                                idempotent, idempotent_of_pairs, opposite,
                                opposite_isomorphism, poincare, strands_algebra)
from strandhf.zoo import TORUS_RELATIONS, torus_algebra

from .oracles import compose_strands, homology_dim

TORUS = pmc_standard("torus")


def elem(A, text):
    return A.elem(text)


def test_strands_algebra_small():
    A = strands_algebra(2, 1)
    assert A.dim == 3
    assert sorted(A.diagrams) == [((1, 1),), ((1, 2),), ((2, 2),)]


def test_strands_products_match_oracle():
    A = strands_algebra(4, 2)
    for i, j in product(range(A.dim), repeat=2):
        c = compose_strands(A.diagrams[i], A.diagrams[j])
        want = frozenset() if c is None else frozenset({A.diagrams.index(c)})
        assert A.mul(i, j) == want


def test_strands_chord_composition():
    A = strands_algebra(3, 1)
    ix = {dg: i for i, dg in enumerate(A.diagrams)}
    a12, a23, a13 = ix[((1, 2),)], ix[((2, 3),)], ix[((1, 3),)]
    assert A.mul(a12, a23) == {a13}
    assert A.mul(a23, a12) == frozenset()


@pytest.mark.parametrize("nk", [(4, 2), (5, 2), (5, 3)])
def test_strands_algebra_invariants(nk):
    A = strands_algebra(*nk)
    A.verify(exhaustive_limit=200)
    for i in range(A.dim):
        assert not A.d_elem(A.d(i))


def test_torus_algebra_table():
    A = algebra(TORUS, 0)
    assert A.dim == 8
    for a, b, c in TORUS_RELATIONS:
        assert A.mul(A.index(a), A.index(b)) == elem(A, c), (a, b)
    assert all(not A.d(i) for i in range(A.dim))
    assert torus_algebra() is A


def test_torus_chords():
    A = algebra(TORUS, 0)
    rho = {(1, 2): "rho1", (2, 3): "rho2", (3, 4): "rho3",
           (1, 3): "rho12", (2, 4): "rho23", (1, 4): "rho123"}
    for (p, q), nm in rho.items():
        assert chord_elem(A, p, q) == elem(A, nm)
    r1 = A.index("rho1")
    i0, i1 = A.index("i0"), A.index("i1")
    assert A.mul(i0, r1) == {r1} and A.mul(r1, i1) == {r1}
    assert A.mul_elem(chord_elem(A, 2, 3), chord_elem(A, 1, 2)) == frozenset()
    assert A.mul_elem(chord_elem(A, 1, 2), chord_elem(A, 2, 3)) == chord_elem(A, 1, 3)
    with pytest.raises(ChordOutOfRange):
        chord_elem(A, 0, 2)


def test_idempotents():
    A = algebra(TORUS, 0)
    i0 = idempotent_of_pairs(A, [(1, 3)])
    assert i0 == elem(A, "i0")
    assert A.mul_elem(i0, i0) == i0
    assert A.mul_elem(i0, elem(A, "i1")) == frozenset()
    total = frozenset()
    for s in A.pair_sets:
        total ^= idempotent(A, s)
    assert total == A.unit()
    with pytest.raises(WrongSize):
        idempotent(A, [0, 1])


@pytest.mark.parametrize("name", ["torus", "split(2)", "antipodal(2)", "genus3_Z1", "genus3_Z2"])
def test_dimension_laws(name):
    Z = pmc_standard(name)
    assert algebra(Z, -Z.k).dim == 1
    assert algebra(Z, -Z.k + 1).dim == 8 * Z.k ** 2


@pytest.mark.parametrize("name,i", [("split(2)", 0), ("antipodal(2)", 0), ("split(2)", 2),
                                    ("antipodal(2)", -1)])
def test_homology_matches_dense_oracle(name, i):
    A = algebra(pmc_standard(name), i)
    A.verify()
    assert A.homology_dim() == homology_dim(A.dim, [A.d(j) for j in range(A.dim)])


def test_generated_span_is_closed():
    A = algebra(pmc_standard("split(2)"), 0)
    rng = random.Random(3)
    for _ in range(500):
        a, b = rng.randrange(A.dim), rng.randrange(A.dim)
        A.mul(a, b)  # raises on escape from the span
    with pytest.raises(ValueError):
        algebra(TORUS, 2)


def test_opposite():
    A = algebra(TORUS, 0)
    op = opposite(A)
    r1, r2, r12 = (A.index(n) for n in ("rho1", "rho2", "rho12"))
    assert op.mul(r1, r2) == frozenset()
    assert op.mul(r2, r1) == {r12}
    assert opposite(op) is A
    phi = opposite_isomorphism(A)
    assert sorted(phi) == list(range(A.dim))


def test_opposite_iso_genus2():
    Z = pmc_standard("antipodal(2)")
    A = algebra(Z, 0)
    opposite_isomorphism(A)
    assert A.homology_dim() == algebra(pmc_reverse(Z), 0).homology_dim()


def test_torus_poincare():
    assert algebra_homology(TORUS) == {-1: 1, 0: 8, 1: 1}
    assert poincare(TORUS) == "T^-1 + 8 + T"


def test_format_laurent():
    assert format_laurent({-2: 1, -1: 32, 0: 98, 1: 32, 2: 1}) == "T^-2 + 32*T^-1 + 98 + 32*T + T^2"
    assert format_laurent({0: 0}) == "0"


def test_genus2_polynomials():
    assert poincare(pmc_standard("split(2)")) == "T^-2 + 32*T^-1 + 98 + 32*T + T^2"
    assert poincare(pmc_standard("antipodal(2)")) == "T^-2 + 32*T^-1 + 70 + 32*T + T^2"


def test_threads_do_not_change_results():
    Z = pmc_standard("antipodal(2)")
    assert algebra_homology(Z, threads=2) == algebra_homology(Z, threads=1)
