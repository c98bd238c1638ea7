"""Morphism complexes, Ext, Hochschild cohomology and Koszul checks."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .errors import AlgebraMismatch, SizeLimit, SlotMismatch
from .f2chain import (ChainComplex, canonical_homology, homology_coordinates,
                      homology_rank)
from .modcat import (_same_alg, algebra_bimodule, as_complex, bar_small, box,
                     box_chain, dual, left_module, right_module, underlying_complex)


# ---------------------------------------------------------------------------
# Mor between D-only objects

class MorComplex(ChainComplex):
    """Chain complex of maps x -> a (x) y (x) b, with composition.

    ``gens[i]`` is ``(x, a, y, b)`` with ``a`` / ``b`` None on a side
    without a slot.
    """

    def __init__(self, M, N, gens, d):
        labels = [_mor_label(M, N, g) for g in gens]
        super().__init__(labels, d, check=False)
        self.source, self.target = M, N
        self.gens = gens
        self.position = {g: i for i, g in enumerate(gens)}

    def identity(self):
        """The identity map of the source (only when source is target)."""
        if self.source is not self.target:
            raise SlotMismatch("identity needs Mor(M, M)")
        M = self.source
        out = set()
        for x in range(len(M)):
            a = M.idem_elem(x, "L") if M.left else None
            b = M.idem_elem(x, "R") if M.right else None
            out.add(self.position[(x, a, x, b)])
        return frozenset(out)

    def find(self, x, a, y, b=None):
        """Index of the generator named by source/target names and algebra names."""
        M, N = self.source, self.target
        xi, yi = M.index(x), N.index(y)
        ai = _pick(M.left, a, M.idem_elem(xi, "L") if M.left else None)
        bi = _pick(M.right, b, M.idem_elem(xi, "R") if M.right else None)
        if M.left and a is None:
            ai = N.idem_elem(yi, "L")
        if M.right and b is None:
            bi = N.idem_elem(yi, "R")
        return self.position[(xi, ai, yi, bi)]


def _pick(slot, name, default):
    if slot is None:
        return None
    if name is None:
        return default
    return slot.alg.index(name)


def _mor_label(M, N, g) -> str:
    x, a, y, b = g
    parts = []
    if a is not None and not M.left.alg.is_idem(a):
        parts.append(M.left.alg.names[a])
    parts.append(N.names[y])
    if b is not None and not M.right.alg.is_idem(b):
        parts.append(M.right.alg.names[b])
    return f"{M.names[x]} -> {' (x) '.join(parts)}"


def _check_d_only(M, N):
    for side in ("left", "right"):
        sm, sn = getattr(M, side), getattr(N, side)
        if (sm is None) != (sn is None):
            raise SlotMismatch(f"{side} slots differ")
        if sm is None:
            continue
        if sm.kind != "D" or sn.kind != "D":
            raise SlotMismatch("Mor is implemented for type D sides")
        if not _same_alg(sm.alg, sn.alg):
            raise AlgebraMismatch(f"{side} algebras differ")


def mor(M, N, max_generators: int = 200000) -> MorComplex:
    """Mor(M, N) for two type D structures or two DD structures.

    A generator sends x to ``a (x) y (x) b`` with ``a`` in ``I_x A I_y``
    and ``b`` in ``I_y B I_x``.  The differential differentiates a and b,
    post-composes with the differential of N and pre-composes with that
    of M.
    """
    _check_d_only(M, N)
    A = M.left.alg if M.left else None
    B = M.right.alg if M.right else None

    def choices(alg, src_idem, tgt_idem):
        if alg is None:
            return [None]
        return alg.block(src_idem, tgt_idem)

    gens = []
    for x in range(len(M)):
        for y in range(len(N)):
            la = choices(A, M.idems[x][0], N.idems[y][0]) if A else [None]
            lb = choices(B, N.idems[y][1], M.idems[x][1]) if B else [None]
            for a in la:
                for b in lb:
                    gens.append((x, a, y, b))
                    if len(gens) > max_generators:
                        raise SizeLimit(f"Mor complex exceeds {max_generators} generators")
    pos = {g: i for i, g in enumerate(gens)}

    def free_ops(obj):
        tab = defaultdict(list)
        for (x, lin, rin), outs in obj.ops.items():
            if lin or rin:
                continue
            for lo, y, ro in outs:
                tab[x].append((lo, y, ro))
        return tab

    dN = free_ops(N)
    into = defaultdict(list)  # x -> [(x0, am, bm)] with delta_M(x0) containing am x bm
    for x0, outs in free_ops(M).items():
        for am, x, bm in outs:
            into[x].append((x0, am, bm))

    def mul(alg, u, v):
        return (None,) if alg is None else alg.mul(u, v)

    d = []
    for x, a, y, b in gens:
        acc = set()
        if A is not None:
            for t in A.d(a):
                acc ^= {pos[(x, t, y, b)]}
        if B is not None:
            for t in B.d(b):
                acc ^= {pos[(x, a, y, t)]}
        for a2, y2, b2 in dN.get(y, ()):
            for u in mul(A, a, a2):
                for v in mul(B, b2, b):
                    acc ^= {pos[(x, u, y2, v)]}
        for x0, am, bm in into.get(x, ()):
            for u in mul(A, am, a):
                for v in mul(B, b, bm):
                    acc ^= {pos[(x0, u, y, v)]}
        d.append(frozenset(acc))
    C = MorComplex(M, N, gens, d)
    C.check()
    return C


def mor_typeD(M, N) -> MorComplex:
    if M.right is not None or N.right is not None:
        raise SlotMismatch("mor_typeD expects left type D structures")
    return mor(M, N)


def mor_dd(M, N) -> MorComplex:
    if M.left is None or M.right is None:
        raise SlotMismatch("mor_dd expects DD structures")
    return mor(M, N)


def mor_model(M, N):
    """The box-product model dual(M) (x) A (x) N of Mor(M, N)."""
    _check_d_only(M, N)
    if M.right is not None:
        raise SlotMismatch("the box model is implemented for type D structures")
    return as_complex(box_chain(dual(M), algebra_bimodule(M.left.alg), N))


def compose(C12: MorComplex, C23: MorComplex, v1, v2):
    """Chain-level composite h2 o h1 as a vector in Mor(source1, target2)."""
    M, N = C12.source, C12.target
    if C23.source is not N:
        raise SlotMismatch("morphisms are not composable")
    A = M.left.alg if M.left else None
    B = M.right.alg if M.right else None
    P = C23.target
    if P is N:
        C13 = C12
    elif M is N:
        C13 = C23
    else:
        C13 = mor(M, P)
    by_src = defaultdict(list)
    for j in v2:
        y, a2, z, b2 = C23.gens[j]
        by_src[y].append((a2, z, b2))
    out = set()
    for i in v1:
        x, a, y, b = C12.gens[i]
        for a2, z, b2 in by_src.get(y, ()):
            us = A.mul(a, a2) if A else (None,)
            vs = B.mul(b2, b) if B else (None,)
            for u in us:
                for v in vs:
                    out ^= {C13.position[(x, u, z, v)]}
    return frozenset(out)


# ---------------------------------------------------------------------------
# Ext

@dataclass
class ExtResult:
    rank: int
    reps: list
    complex: ChainComplex = field(repr=False, default=None)

    def labelled(self):
        return [sorted(self.complex.labels[i] for i in r) for r in self.reps]


def ext_typeD(M, N) -> ExtResult:
    C = mor(M, N)
    reps = canonical_homology(C)
    return ExtResult(len(reps), reps, C)


def ext_ainf(M, N) -> int:
    """dim Ext between left A-infinity modules over A(Z,0).

    Computed as the homology of dual(M) (x) dual(bar) (x) N, with the small
    bar model standing in for the bar resolution; only the dimension is
    meaningful.
    """
    for obj in (M, N):
        if obj.left is None or obj.left.kind != "A" or obj.right is not None:
            raise SlotMismatch("ext_ainf expects left A-infinity modules")
    if not _same_alg(M.left.alg, N.left.alg):
        raise AlgebraMismatch("modules over different algebras")
    A = M.left.alg
    X = box_chain(dual(M), dual(bar_small(A)), N)
    return homology_rank(as_complex(X))


# ---------------------------------------------------------------------------
# Hochschild cohomology

@dataclass
class HHResult:
    rank: int
    complex: MorComplex = field(repr=False)
    reps: list = field(default_factory=list)
    table: dict = field(default_factory=dict)
    unit: frozenset = frozenset()


def hochschild_cohomology(A=None, max_generators: int = 20000) -> HHResult:
    """HH of A(Z,0) as the homology of Mor(CFDD(Id), CFDD(Id)).

    ``table[(i, j)]`` lists the basis classes in the class of rep_j o rep_i.
    """
    from .zoo import dd_identity
    from .strandalg import DgAlgebra
    if A is None:
        from .zoo import torus_algebra
        A = torus_algebra()
    if getattr(A, "pmc", None) is None:
        if isinstance(A, DgAlgebra) and A.dim == len(A.idems):
            # a product of copies of F2: HH is one class per idempotent
            return HHResult(len(A.idems), None, [], {}, frozenset())
        raise AlgebraMismatch("Hochschild cohomology is computed for strands algebras")
    K = dd_identity(A.pmc, A.i)
    C = mor(K, K, max_generators=max_generators)
    reps = canonical_homology(C)
    table = {}
    for i, r1 in enumerate(reps):
        for j, r2 in enumerate(reps):
            table[(i, j)] = sorted(homology_coordinates(C, reps, compose(C, C, r1, r2)))
    return HHResult(len(reps), C, reps, table, C.identity())


# ---------------------------------------------------------------------------
# quasi-inverses, Koszul and Serre checks

def quasi_inverse(K):
    """dual(B) (x) dual(K) (x) A for a DD structure K over (A, B)."""
    if K.left is None or K.right is None or K.left.kind != "D" or K.right.kind != "D":
        raise SlotMismatch("quasi_inverse expects a DD structure")
    A, B = K.left.alg, K.right.alg
    return box_chain(dual(algebra_bimodule(B)), dual(K), algebra_bimodule(A))


@dataclass
class KoszulReport:
    rank_one: bool
    augmented: bool
    resolution: bool
    dims: tuple = ()
    message: str = ""

    @property
    def ok(self):
        return self.rank_one and self.augmented and self.resolution

    def as_dict(self):
        return {"rank_one": self.rank_one, "augmented": self.augmented,
                "resolution": self.resolution, "resolution_dims": list(self.dims),
                "ok": self.ok, "message": self.message}


def koszul_check(K) -> KoszulReport:
    """Test the Koszul dualizing conditions on a DD structure K over (A, B)."""
    if K.left is None or K.right is None or K.left.kind != "D" or K.right.kind != "D":
        raise SlotMismatch("koszul_check expects a DD structure")
    A, B = K.left.alg, K.right.alg
    notes = []
    lefts = sorted(l for l, _ in K.idems)
    rights = sorted(r for _, r in K.idems)
    rank_one = lefts == list(range(len(A.idems))) and rights == list(range(len(B.idems)))
    if not rank_one:
        notes.append("generators are not one per idempotent on each side")
    augmented = True
    for (x, lin, rin), outs in K.ops.items():
        for lo, y, ro in outs:
            if A.is_idem(lo) or B.is_idem(ro):
                augmented = False
                notes.append(f"idempotent output: {K.describe_term((x, lin, rin, lo, y, ro))}")
                break
        if not augmented:
            break
    left_res = box_chain(algebra_bimodule(A), K, dual(right_module(B)))
    right_res = box_chain(dual(left_module(A)), K, algebra_bimodule(B))
    d1 = homology_rank(underlying_complex(left_res))
    d2 = homology_rank(underlying_complex(right_res))
    resolution = d1 == len(A.idems) and d2 == len(B.idems)
    if not resolution:
        notes.append(f"resolution homology {d1}, {d2}; expected {len(A.idems)}, {len(B.idems)}")
    return KoszulReport(rank_one, augmented, resolution, (d1, d2), "; ".join(notes))


def serre_kernel(A):
    """bar (x) dual(A): a DA bimodule inducing the Serre functor."""
    return box(bar_small(A), dual(algebra_bimodule(A)))


def serre_check(M, N):
    """Compare dim Ext(M, N) with dim Ext(N, S(M)).

    Returns ``(equal, dim Ext(M, N), dim Ext(N, S(M)))``.
    """
    if not _same_alg(M.left.alg, N.left.alg):
        raise AlgebraMismatch("modules over different algebras")
    SM = box(serre_kernel(M.left.alg), M)
    lhs = ext_typeD(M, N).rank
    rhs = ext_typeD(N, SM).rank
    return lhs == rhs, lhs, rhs
