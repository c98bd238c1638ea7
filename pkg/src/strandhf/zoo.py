"""Packaged algebras, modules and bimodules for the standard examples."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import product

from .errors import ClosureViolation, DegreeBoundTooSmall, SizeLimit
from .modcat import AInfObject, Slot, check_structure, dd_structure, type_d
from .pmc import chords, pmc_standard
from .strandalg import DgAlgebra, algebra, chord_elem

TORUS_RELATIONS = [
    ("i0", "rho1", "rho1"), ("rho1", "i1", "rho1"),
    ("i1", "rho2", "rho2"), ("rho2", "i0", "rho2"),
    ("i0", "rho3", "rho3"), ("rho3", "i1", "rho3"),
    ("rho1", "rho2", "rho12"), ("rho2", "rho3", "rho23"),
    ("rho1", "rho23", "rho123"), ("rho12", "rho3", "rho123"),
    ("rho3", "rho2", "0"), ("rho2", "rho1", "0"),
]


def torus_algebra() -> DgAlgebra:
    """A(T^2, 0) with the torus labels, checked against the product table."""
    A = algebra(pmc_standard("torus"), 0)
    for a, b, c in TORUS_RELATIONS:
        if A.mul(A.index(a), A.index(b)) != A.elem(c):
            raise ClosureViolation(f"{a}*{b} != {c}")
    if any(A.d(i) for i in range(A.dim)):
        raise ClosureViolation("the torus algebra should have no differential")
    return A


def cfd_solid_torus(framing: str = "infty") -> AInfObject:
    """CFD of the infinity- or zero-framed solid torus."""
    A = torus_algebra()
    if framing in ("infty", "inf", "infinity"):
        return type_d(A, [("s", "i1")], [("s", "rho23", "s")], "CFD(H_inf)")
    if framing in ("zero", "0"):
        return type_d(A, [("t", "i0")], [("t", "rho12", "t")], "CFD(H_0)")
    raise ValueError(f"unknown framing {framing!r}")


def cfd_trefoil_m2() -> AInfObject:
    """CFD of the -2 framed left-handed trefoil complement."""
    A = torus_algebra()
    gens = [("x1", "i0"), ("x2", "i0"), ("x3", "i0"), ("y1", "i1"), ("y2", "i1")]
    delta = [
        ("x3", "rho1", "y2"),
        ("x2", "rho123", "y2"),
        ("y1", "rho2", "x2"),
        ("x1", "rho3", "y1"),
        ("x1", "rho12", "x3"),
    ]
    return type_d(A, gens, delta, "CFD(trefoil,-2)")


# ---------------------------------------------------------------------------
# identity-type DD bimodules

def _complement_index(A, B):
    """Map idempotent positions of A to the complementary ones of B."""
    full = frozenset(range(2 * A.pmc.k))
    where = {s: j for j, s in enumerate(B.pair_sets)}
    return [where[full - s] for s in A.pair_sets]


def dd_identity(Z=None, i: int = 0, max_generators: int = 5000) -> AInfObject:
    """CFDD(Id): one generator per complementary pair of idempotents.

    The left algebra is A(Z,i) and the right one A(Z,-i), both with
    their usual product; the chord ``a(xi)`` appears on both sides, which
    is the left-left bimodule of the identity read with the second action
    turned into a right action.
    """
    if Z is None:
        Z = pmc_standard("torus")
    A = algebra(Z, i)
    B = algebra(Z, -i)
    comp = _complement_index(A, B)
    if len(A.idems) > max_generators:
        raise SizeLimit(f"{len(A.idems)} generators")
    names = [f"{A.idem_names[s]}|{B.idem_names[comp[s]]}" for s in range(len(A.idems))]
    gen_of_right = {comp[s]: s for s in range(len(A.idems))}
    ops = defaultdict(set)
    for ch in chords(Z):
        left_terms = chord_elem(A, ch.p, ch.q)
        right_terms = chord_elem(B, ch.p, ch.q)
        if not left_terms or not right_terms:
            continue
        by_idems = {(B.left[b], B.right[b]): b for b in right_terms}
        for a in left_terms:
            s, s2 = A.left[a], A.right[a]
            b = by_idems.get((comp[s2], comp[s]))
            if b is not None:
                ops[(s, (), ())] ^= {(a, gen_of_right[comp[s2]], b)}
    idems = [(s, comp[s]) for s in range(len(A.idems))]
    return AInfObject(Slot(A, "D"), Slot(B, "D"), names, idems, ops, "CFDD(Id)")


def dd_identity_torus_hand() -> AInfObject:
    """The two-generator torus CFDD(Id) typed in by hand.

    The right algebra A(-T^2) is identified with A(T^2) used on the right;
    under that identification sigma_3, sigma_1, sigma_123, sigma_2 become
    rho_1, rho_3, rho_123, rho_2.
    """
    A = torus_algebra()
    gens = [("x", "i0", "i1"), ("y", "i1", "i0")]
    delta = [
        ("x", "rho1", "y", "rho1"),
        ("x", "rho3", "y", "rho3"),
        ("x", "rho123", "y", "rho123"),
        ("y", "rho2", "x", "rho2"),
    ]
    return dd_structure(A, A, gens, delta, "CFDD(Id) torus")


def dd_half_identity_torus() -> AInfObject:
    """CFDD of the half-identity diagram for the torus."""
    A = torus_algebra()
    gens = [("x", "i0", "i1"), ("y", "i1", "i0")]
    delta = [
        ("x", "rho1", "y", "rho1"),
        ("x", "rho3", "y", "rho3"),
        ("y", "rho2", "x", "rho2"),
    ]
    return dd_structure(A, A, gens, delta, "CFDD(G) torus")


# ---------------------------------------------------------------------------
# quadratic algebras

@dataclass
class QuadraticPresentation:
    """Generators V (degree one) and relations R inside V (x) V.

    A relation is a list of pairs ``(v, w)`` standing for the sum of the
    words ``v w``.  Everything lives over the ground field F2.
    """
    generators: list
    relations: list = field(default_factory=list)
    degree_bound: int = 8

    def __post_init__(self):
        if self.degree_bound < 2:
            raise DegreeBoundTooSmall("quadratic relations need degree bound >= 2")
        gens = set(self.generators)
        rows = []
        for rel in self.relations:
            vec = set()
            for v, w in rel:
                if v not in gens or w not in gens:
                    raise ValueError(f"relation term {(v, w)} uses an unknown generator")
                vec ^= {(v, w)}
            rows.append(frozenset(vec))
        self.relations_echelon = _echelon(rows, key=lambda t: t)

    def dual(self) -> "QuadraticPresentation":
        """V* with relations R-perp, using the swap (V (x) V)* = V* (x) V*."""
        V = list(self.generators)
        star = [v + "*" for v in V]
        words = [(a, b) for a in V for b in V]
        # a functional on V (x) V is a set of words (v, w) it is 1 on;
        # the word (a*, b*) evaluates to 1 exactly on (b, a)
        R = self.relations_echelon
        perp_basis = _nullspace(words, R)
        rels = []
        for vec in perp_basis:
            rels.append([(b + "*", a + "*") for (a, b) in sorted(vec)])
        return QuadraticPresentation(star, rels, self.degree_bound)


def _echelon(rows, key):
    """Reduced row echelon form of F2 vectors given as sets."""
    pivots = {}
    for row in rows:
        v = set(row)
        for p in sorted(pivots, key=key):
            if p in v:
                v ^= pivots[p]
        if not v:
            continue
        p = min(v, key=key)
        for q in list(pivots):
            if p in pivots[q]:
                pivots[q] = pivots[q] ^ v
        pivots[p] = v
    return [frozenset(pivots[p]) for p in sorted(pivots, key=key)]


def _nullspace(coords, rows):
    """Vectors u (as sets of coords) with |u & row| even for every row."""
    coords = list(coords)
    pos = {c: j for j, c in enumerate(coords)}
    ech = _echelon(rows, key=lambda c: pos[c])
    pivot_of = {min(r, key=lambda c: pos[c]): r for r in ech}
    free = [c for c in coords if c not in pivot_of]
    out = []
    for f in free:
        u = {f}
        for p, r in pivot_of.items():
            if f in r:
                u.add(p)
        out.append(frozenset(u))
    return out


def _word_name(word, sep="."):
    return sep.join(word) if word else "1"


def quadratic_algebra(P: QuadraticPresentation, key=None) -> DgAlgebra:
    """T(V)/(R) truncated above the degree bound, with normal-word basis."""
    V = list(P.generators)
    order = {v: j for j, v in enumerate(V)}
    wkey = lambda w: tuple(order[c] for c in w)
    normal = {0: [()], 1: [(v,) for v in V]}
    reducers = {}
    for n in range(2, P.degree_bound + 1):
        rows = []
        for i in range(n - 1):
            for pre in product(V, repeat=i):
                for post in product(V, repeat=n - 2 - i):
                    for rel in P.relations_echelon:
                        rows.append(frozenset(pre + t + post for t in rel))
        if len(V) ** n > 200000:
            raise SizeLimit("quadratic algebra truncation is too large")
        ech = _echelon(rows, key=wkey)
        red = {min(r, key=wkey): r for r in ech}
        reducers[n] = red
        normal[n] = [w for w in sorted(product(V, repeat=n), key=wkey) if w not in red]
    basis = [w for n in range(P.degree_bound + 1) for w in normal[n]]
    index = {w: j for j, w in enumerate(basis)}

    def reduce_word(w):
        n = len(w)
        if n > P.degree_bound:
            return frozenset()
        red = reducers.get(n, {})
        if w not in red:
            return frozenset((index[w],))
        # pivot is the least word; its normal form is the sum of the rest
        return frozenset(index[u] for u in red[w] if u != w)

    def mul_fn(i, j):
        return reduce_word(basis[i] + basis[j])

    names = [_word_name(w) for w in basis]
    A = DgAlgebra(names, [0], [0] * len(basis), [0] * len(basis), mul_fn=mul_fn,
                  key=key or ("quadratic", tuple(V), tuple(P.relations_echelon), P.degree_bound))
    A.words = basis
    A.word_degree = [len(w) for w in basis]
    return A


def quadratic_koszul(P: QuadraticPresentation):
    """(A, A!, K) with delta(1) = sum v_i (x) 1 (x) v_i*."""
    A = quadratic_algebra(P)
    Pd = P.dual()
    Ad = quadratic_algebra(Pd)
    delta = [("1", v, "1", v + "*") for v in P.generators]
    K = dd_structure(A, Ad, [("1", 0, 0)], delta, "K(A)")
    rep = check_structure(K)
    if not rep.ok:
        raise ClosureViolation(rep.message)
    return A, Ad, K


# ---------------------------------------------------------------------------
# the cobar algebra

def cobar_koszul(A: DgAlgebra, length_bound: int = 6, max_dim: int = 200000):
    """(Cob, K, L) for an augmented dg algebra A.

    Cob is the tensor algebra on the dual of A_+, truncated above
    ``length_bound``; the dual of ``a`` in ``I_s A I_t`` sits in
    ``I_t Cob I_s``.  The differential is
    ``d(c*) = sum_{c in db} b* + sum_{c in a a'} [a'*|a*]``, extended by
    the Leibniz rule.  K is the rank one DD bimodule with
    ``delta(1) = sum_i a_i (x) 1 (x) a_i*`` and L the AA bimodule with
    ``m(<b1*|...|bn*>, 1, a1, ..., an) = b1*(an) ... bn*(a1) 1``.
    """
    plus = A.plus_basis()
    # letters: (left idem, right idem) of the dual element
    lidem = {a: A.right[a] for a in plus}
    ridem = {a: A.left[a] for a in plus}
    words = [((), s) for s in range(len(A.idems))]  # empty words, one per idempotent
    layer = [((a,), None) for a in plus]
    n = 1
    while layer and n <= length_bound:
        words += layer
        if len(words) > max_dim:
            raise SizeLimit(f"cobar algebra exceeds {max_dim} basis elements")
        nxt = []
        for w, _ in layer:
            for a in plus:
                if ridem[w[-1]] == lidem[a]:
                    nxt.append((w + (a,), None))
        layer = nxt
        n += 1
    index = {}
    names, left, right = [], [], []
    for w, s in words:
        index[(w, s) if not w else w] = len(names)
        if not w:
            names.append(A.idem_names[s])
            left.append(s)
            right.append(s)
        else:
            names.append("[" + "|".join(A.names[a] + "*" for a in w) + "]")
            left.append(lidem[w[0]])
            right.append(ridem[w[-1]])
    idems = [index[((), s)] for s in range(len(A.idems))]

    def lookup(w):
        if len(w) > length_bound:
            return None
        return index[w]

    def mul_fn(i, j):
        wi, wj = basis_words[i], basis_words[j]
        k = lookup(wi + wj)
        return () if k is None else (k,)

    # d on letters
    letter_d = defaultdict(set)
    for c in plus:
        for b in A.d_transpose(c):
            if b in lidem:
                letter_d[c] ^= {(b,)}
        for a, a2 in A.mul_transpose(c):
            letter_d[c] ^= {(a2, a)}
    basis_words = [w for w, _ in words]
    dlist = []
    for w in basis_words:
        out = set()
        for p, c in enumerate(w):
            for rep in letter_d.get(c, ()):
                k = lookup(w[:p] + rep + w[p + 1:])
                if k is not None:
                    out ^= {k}
        dlist.append(out)
    Cob = DgAlgebra(names, idems, left, right, d=dlist, mul_fn=mul_fn,
                    key=("cobar", A.key, length_bound), idem_names=list(A.idem_names))
    Cob.words = basis_words
    Cob.word_length = [len(w) for w in basis_words]

    # K: rank one, left A, right Cob
    ng = len(A.idems)
    kn = [f"1_{A.idem_names[s]}" for s in range(ng)]
    kops = defaultdict(set)
    for a in plus:
        kops[(A.left[a], (), ())] ^= {(a, A.right[a], index[(a,)])}
    K = AInfObject(Slot(A, "D"), Slot(Cob, "D"), kn, [(s, s) for s in range(ng)], kops, "K(cobar)")

    # L: left A over Cob, right A over A
    lops = defaultdict(set)
    for w in basis_words:
        if not w:
            continue
        rin = tuple(reversed(w))
        src = A.left[rin[0]]
        tgt = A.right[rin[-1]]
        lops[(src, (index[w],), rin)] ^= {(None, tgt, None)}
    L = AInfObject(Slot(Cob, "A"), Slot(A, "A"), kn, [(s, s) for s in range(ng)], lops, "L(cobar)")
    return Cob, K, L
