from __future__ import annotations

import random

import pytest

from strandhf.errors import NotAComplex, ShapeMismatch
from strandhf.f2chain import (ChainComplex, canonical_homology, complex_homology,
                              homology_coordinates, homology_rank, identity_retract,
                              is_boundary, reduce_retract)
from strandhf.modcat import modulify, reduce
from strandhf.zoo import cfd_solid_torus, dd_identity

from .oracles import homology_dim


def random_complex(rng, n_pairs, n_free):
    """Conjugate a split complex (pairs a -> b plus free cycles) by a random
    unitriangular change of basis, so d^2 = 0 and the homology is n_free."""
    n = 2 * n_pairs + n_free
    order = list(range(n))
    rng.shuffle(order)
    base = [set() for _ in range(n)]
    for p in range(n_pairs):
        base[order[2 * p]] = {order[2 * p + 1]}
    # P: new basis e'_i = e_i + sum_{j>i} c_ij e_j (invertible)
    P = [{i} | {j for j in range(i + 1, n) if rng.random() < 0.3} for i in range(n)]
    # invert P by back substitution: P^-1 as rows
    inv = [None] * n
    for i in reversed(range(n)):
        row = {i}
        for j in P[i] - {i}:
            row ^= inv[j]
        inv[i] = row

    def apply(table, vec):
        out = set()
        for v in vec:
            out ^= table[v]
        return out

    # d' = P^-1 d P, written in the new basis
    d = [apply(inv, apply(base, P[i])) for i in range(n)]
    return ChainComplex([f"g{i}" for i in range(n)], d)


def test_acyclic_pair():
    C = ChainComplex(["a", "b"], [{1}, set()])
    assert homology_rank(C) == 0
    R = reduce_retract(C)
    assert len(R.small) == 0
    R.check()


def test_not_a_complex():
    with pytest.raises(NotAComplex):
        ChainComplex(["a", "b", "c"], [{1}, {2}, set()])
    with pytest.raises(ShapeMismatch):
        ChainComplex(["a"], [set(), set()])


def test_random_complexes_against_dense_oracle():
    rng = random.Random(11)
    for trial in range(60):
        C = random_complex(rng, rng.randint(0, 8), rng.randint(0, 5))
        want = homology_dim(len(C), C.d)
        assert homology_rank(C) == want
        R = reduce_retract(C)
        R.check()
        assert len(R.small) == want
        assert all(not row for row in R.small.d)
        rank, reps = complex_homology(C)
        assert rank == want
        for r in reps:
            assert not C.apply(r)


def test_rank_invariant_under_permutation():
    rng = random.Random(5)
    C = random_complex(rng, 6, 3)
    perm = list(range(len(C)))
    rng.shuffle(perm)
    where = {p: j for j, p in enumerate(perm)}
    D = ChainComplex([C.labels[p] for p in perm], [{where[t] for t in C.d[p]} for p in perm])
    assert homology_rank(D) == homology_rank(C) == 3


def test_identity_retract():
    C = ChainComplex(["a", "b"], [set(), set()])
    R = identity_retract(C)
    R.check()
    assert R.f == R.g
    with pytest.raises(ShapeMismatch):
        identity_retract(ChainComplex(["a", "b"], [{1}, set()]))


def test_cfd_h0_complex():
    C = modulify(cfd_solid_torus("zero"))
    assert sorted(C.labels) == sorted(["i0|t", "rho2|t", "rho12|t"])
    rank, reps = complex_homology(C)
    assert rank == 1
    assert [C.fmt(r) for r in reps] == ["rho2|t"]


def test_cfdd_identity_homology():
    C = modulify(dd_identity())
    assert len(C) == 34
    assert homology_rank(C) == 16 == homology_dim(len(C), C.d)


def test_canonical_homology_and_coordinates():
    rng = random.Random(2)
    for _ in range(20):
        C = random_complex(rng, 5, 4)
        basis = canonical_homology(C)
        assert len(basis) == 4
        assert canonical_homology(C) == basis
        for k, b in enumerate(basis):
            assert homology_coordinates(C, basis, b) == {k}
        s = basis[0] ^ basis[1]
        assert homology_coordinates(C, basis, s) == {0, 1}
        bd = set()
        for i in range(len(C)):
            if C.d[i]:
                bd = set(C.d[i])
                break
        if bd:
            assert is_boundary(C, bd)
            assert homology_coordinates(C, basis, bd) == frozenset()
    C = ChainComplex(["a", "b"], [{1}, set()])
    assert homology_coordinates(C, [], {0}) is None


def test_transfer_zero_differential_is_identity():
    from strandhf.modcat import left_module
    from strandhf.zoo import torus_algebra
    M = left_module(torus_algebra())
    N, R, F = reduce(M)
    assert len(N) == len(M)
    assert N.ops == M.ops
