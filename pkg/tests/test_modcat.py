from __future__ import annotations

import pytest

from strandhf.errors import AlgebraMismatch, ArityCap, ShapeMismatch, SlotMismatch
from strandhf.f2chain import homology_rank
from strandhf.modcat import (algebra_bimodule, bar_small, box, check_structure, dual,
                             find_isomorphism, from_json, identity_da, is_bounded,
                             left_module, modulify, modulify_object, reduce, right_module,
                             to_json, to_opposite_side, type_d, zero_type_d)
from strandhf.pmc import pmc_standard
from strandhf.strandalg import algebra
from strandhf.zoo import (cfd_solid_torus, cfd_trefoil_m2, dd_half_identity_torus,
                          dd_identity, torus_algebra)

from .oracles import homology_dim, typeD_square


def objects():
    return [cfd_solid_torus("infty"), cfd_solid_torus("zero"), cfd_trefoil_m2(),
            dd_identity(), dd_half_identity_torus()]


@pytest.mark.parametrize("M", objects(), ids=lambda M: M.label)
def test_structure_equation_holds(M):
    assert check_structure(M).ok
    assert not typeD_square(M)


def test_broken_delta_names_the_term():
    A = torus_algebra()
    bad = type_d(A, [("t", "i0"), ("s", "i1")], [("t", "rho1", "s"), ("s", "rho2", "t")])
    rep = check_structure(bad)
    assert not rep.ok
    assert rep.message == "structure equation fails at (t) -> rho12 (x) t"
    assert typeD_square(bad)


def test_idempotent_mismatch():
    A = torus_algebra()
    rep = check_structure(type_d(A, [("t", "i0")], [("t", "rho1", "t")]))
    assert not rep.ok and "idempotent mismatch" in rep.message


def test_algebra_as_modules():
    A = torus_algebra()
    for M in (algebra_bimodule(A), left_module(A), right_module(A), identity_da(A)):
        assert check_structure(M).ok
    assert len(identity_da(A)) == 2


def test_modulified_solid_tori():
    A = torus_algebra()
    inf = modulify(cfd_solid_torus("infty"))
    assert sorted(inf.labels) == sorted(["i1|s", "rho1|s", "rho3|s", "rho123|s", "rho23|s"])
    assert homology_rank(inf) == 1
    zero = modulify(cfd_solid_torus("zero"))
    assert len(zero) == 3 and homology_rank(zero) == 1
    free = modulify(zero_type_d(A, "i0"))
    assert sorted(free.labels) == sorted(["i0|g", "rho2|g", "rho12|g"])
    assert homology_rank(free) == 3


def test_modulified_identity_dd():
    C = modulify(dd_identity())
    assert len(C) == 34
    assert homology_rank(C) == 16 == homology_dim(len(C), C.d)


def test_dual_of_dual():
    for M in objects():
        D = dual(dual(M))
        assert D.flavor == M.flavor
        assert find_isomorphism(D, M) is not None


def test_box_unit_law():
    A = torus_algebra()
    for M in (cfd_trefoil_m2(), cfd_solid_torus("zero")):
        X = box(identity_da(A), M)
        assert find_isomorphism(X, M) is not None
    K = dd_identity()
    assert find_isomorphism(box(identity_da(A), K), K) is not None


def test_box_slot_errors():
    with pytest.raises(SlotMismatch):
        box(cfd_solid_torus("zero"), cfd_solid_torus("infty"))


def test_opposite_side():
    M = to_opposite_side(cfd_trefoil_m2())
    assert M.left is None and M.right.kind == "D"
    assert check_structure(M).ok


def test_transfer_cfd_h0():
    M = modulify_object(cfd_solid_torus("zero"))
    N, R, F = reduce(M, arity_cap=8)
    assert len(N) == 1 and N.truncated_at == 8
    alg = N.left.alg
    words = sorted(tuple(alg.names[a] for a in lin) for (_, lin, _) in N.ops)
    assert words == sorted(("rho2",) + ("rho12",) * j + ("rho1",) for j in range(7))
    assert check_structure(N).ok
    with pytest.raises(ArityCap):
        reduce(M, arity_cap=6, strict=True)


def test_bar_small():
    A = torus_algebra()
    B = bar_small(A)
    assert len(B) == 8
    assert check_structure(B).ok
    assert is_bounded(B)
    assert not is_bounded(cfd_solid_torus("zero"))
    red, _, _ = reduce(box(B, algebra_bimodule(A)))
    assert red.truncated_at is None
    assert check_structure(red).ok
    assert find_isomorphism(red, identity_da(A)) is not None
    with pytest.raises(AlgebraMismatch):
        bar_small(algebra(pmc_standard("torus"), 1))


def test_bar_small_genus2():
    B = bar_small(algebra(pmc_standard("split(2)"), 0))
    assert len(B) == 238
    assert check_structure(B).ok


@pytest.mark.parametrize("M", objects() + [identity_da(torus_algebra())], ids=lambda M: M.label)
def test_serialization_round_trip(M):
    text = to_json(M)
    N = from_json(text)
    assert N.ops == M.ops and N.idems == M.idems and N.names == M.names
    assert to_json(N) == text


def test_serialize_truncated_object():
    N, _, _ = reduce(modulify_object(cfd_solid_torus("zero")), arity_cap=5)
    back = from_json(to_json(N))
    assert back.truncated_at == 5 and back.ops == N.ops


def test_malformed_module_text():
    with pytest.raises(ShapeMismatch):
        from_json("{")
    with pytest.raises(ShapeMismatch):
        from_json('{"algebra": "torus", "slots": [{"side": "left", "kind": "D"}],'
                  ' "generators": [{"name": "s", "idem": ["i9"]}], "delta": []}')
    with pytest.raises(ShapeMismatch):
        from_json('{"algebra": "klein", "slots": [], "generators": []}')
