from __future__ import annotations

import pytest

from strandhf.errors import DegreeBoundTooSmall
from strandhf.modcat import check_structure, find_isomorphism
from strandhf.pmc import pmc_standard
from strandhf.zoo import (QuadraticPresentation, cfd_solid_torus, cfd_trefoil_m2,
                          cobar_koszul, dd_half_identity_torus, dd_identity,
                          dd_identity_torus_hand, quadratic_algebra, quadratic_koszul,
                          torus_algebra)


def degree_dims(A):
    out = {}
    for d in A.word_degree:
        out[d] = out.get(d, 0) + 1
    return out


def test_torus_objects():
    A = torus_algebra()
    assert A.dim == 8
    s = cfd_solid_torus("infty")
    assert s.names == ["s"] and A.idem_names[s.idems[0][0]] == "i1"
    t = cfd_solid_torus("zero")
    assert t.names == ["t"] and A.idem_names[t.idems[0][0]] == "i0"
    tre = cfd_trefoil_m2()
    assert len(tre) == 5 and len(tre.entries()) == 5
    with pytest.raises(ValueError):
        cfd_solid_torus("one")


def test_identity_matches_hand_form():
    K, H = dd_identity(), dd_identity_torus_hand()
    iso = find_isomorphism(K, H)
    assert iso is not None
    assert [H.names[iso[j]] for j in range(2)] == ["x", "y"]
    assert K.names == ["i0|i1", "i1|i0"]


def test_identity_genus2():
    K = dd_identity(pmc_standard("split(2)"))
    assert len(K) == 6
    assert check_structure(K).ok
    K1 = dd_identity(pmc_standard("torus"), 1)
    assert len(K1) == 1 and check_structure(K1).ok


def test_half_identity():
    K = dd_half_identity_torus()
    assert len(K) == 2 and len(K.entries()) == 3
    assert check_structure(K).ok


def test_dual_numbers():
    P = QuadraticPresentation(["x"], [[("x", "x")]])
    A, Ad, K = quadratic_koszul(P)
    assert A.names == ["1", "x"]
    assert Ad.names == ["1", "x*", "x*.x*", "x*.x*.x*", "x*.x*.x*.x*", "x*.x*.x*.x*.x*",
                        "x*.x*.x*.x*.x*.x*", "x*.x*.x*.x*.x*.x*.x*", "x*.x*.x*.x*.x*.x*.x*.x*"]
    assert check_structure(K).ok


def test_dual_is_involutive():
    P = QuadraticPresentation(["x", "y"], [[("x", "y"), ("y", "x")]])
    PP = P.dual().dual()
    assert PP.generators == ["x**", "y**"]
    assert [sorted(r) for r in PP.relations_echelon] == [
        sorted((a + "**", b + "**") for a, b in r) for r in P.relations_echelon]


@pytest.mark.parametrize("gens,rels", [
    (["x", "y"], [[("x", "y"), ("y", "x")]]),
    (["x", "y"], [[("x", "x")], [("y", "y")]]),
    (["x", "y"], [[("x", "y")]]),
    (["x", "y", "z"], [[("x", "y"), ("y", "x")], [("y", "z"), ("z", "y")], [("x", "z"), ("z", "x")]]),
])
def test_hilbert_series_relation(gens, rels):
    # Koszul algebras satisfy H_A(t) H_{A!}(-t) = 1, checked degree by degree
    P = QuadraticPresentation(gens, rels, degree_bound=6)
    A, Ad, K = quadratic_koszul(P)
    a, b = degree_dims(A), degree_dims(Ad)
    for n in range(1, 7):
        assert sum((-1) ** i * b.get(i, 0) * a.get(n - i, 0) for i in range(n + 1)) == 0


def test_polynomial_dual():
    P = QuadraticPresentation(["x"], [], degree_bound=5)
    A = quadratic_algebra(P)
    assert A.dim == 6
    assert quadratic_algebra(P.dual()).names == ["1", "x*"]


def test_presentation_errors():
    with pytest.raises(DegreeBoundTooSmall):
        QuadraticPresentation(["x"], [], degree_bound=1)
    with pytest.raises(ValueError):
        QuadraticPresentation(["x"], [[("x", "w")]])


def test_cobar_of_torus():
    A = torus_algebra()
    Cob, K, L = cobar_koszul(A, length_bound=4)
    Cob.verify()
    assert check_structure(K).ok
    assert check_structure(L, arity_limit=5).ok
    assert len(K) == 2
    # the dual of rho12 has differential [rho2*|rho1*]
    c = Cob.index("[rho12*]")
    assert Cob.fmt(Cob.d(c)) == "[rho2*|rho1*]"


def test_cobar_of_dual_numbers():
    A = quadratic_algebra(QuadraticPresentation(["x"], [[("x", "x")]]))
    Cob, K, L = cobar_koszul(A, length_bound=3)
    assert Cob.names == ["1", "[x*]", "[x*|x*]", "[x*|x*|x*]"]
    assert all(not Cob.d(i) for i in range(Cob.dim))

