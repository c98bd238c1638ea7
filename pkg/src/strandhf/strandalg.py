"""Strand algebras A(n,k) and their matched-circle subalgebras A(Z,i).

A strand diagram is stored as a tuple of ``(s, t)`` pairs sorted by s,
with t >= s.  Sums of diagrams (elements of the ambient algebra) are
frozensets.  Basis elements of a ``DgAlgebra`` are addressed by index and
an algebra element is a frozenset of basis indices.
"""
from __future__ import annotations

import random
from collections import defaultdict
from itertools import combinations, product

from .errors import ChordOutOfRange, ClosureViolation, SizeLimit, WrongSize
from .pmc import PointedMatchedCircle, chords, pmc_reverse

DEFAULT_CAP = 2_000_000


# ---------------------------------------------------------------------------
# strand diagrams

def inversions(diag) -> int:
    ts = [t for _, t in diag]
    n = len(ts)
    return sum(1 for a in range(n) for b in range(a + 1, n) if ts[a] > ts[b])


def sources(diag):
    return frozenset(s for s, _ in diag)


def targets(diag):
    return frozenset(t for _, t in diag)


def compose(d1, d2):
    """Product of two diagrams, or None when it vanishes."""
    m2 = dict(d2)
    out = []
    for s, t in d1:
        u = m2.get(t)
        if u is None:
            return None
        out.append((s, u))
    if len(out) != len(d2):
        return None
    out = tuple(out)
    if inversions(out) != inversions(d1) + inversions(d2):
        return None
    return out


def diagram_d(diag):
    """Resolve each crossing; keep terms that lose exactly one inversion."""
    inv = inversions(diag)
    out = set()
    n = len(diag)
    for a in range(n):
        for b in range(a + 1, n):
            (s1, t1), (s2, t2) = diag[a], diag[b]
            if t1 > t2:
                new = list(diag)
                new[a] = (s1, t2)
                new[b] = (s2, t1)
                new = tuple(new)
                if inversions(new) == inv - 1:
                    out ^= {new}
    return out


def elem_mul(x, y):
    """Ambient product of two sums of diagrams."""
    by_src = defaultdict(list)
    for d2 in y:
        by_src[sources(d2)].append(d2)
    out = set()
    for d1 in x:
        for d2 in by_src.get(targets(d1), ()):
            c = compose(d1, d2)
            if c is not None:
                out ^= {c}
    return frozenset(out)


def elem_d(x):
    out = set()
    for diag in x:
        out ^= diagram_d(diag)
    return frozenset(out)


def diagram_name(diag) -> str:
    return "[" + ",".join(f"{s}" if s == t else f"{s}>{t}" for s, t in diag) + "]"


# ---------------------------------------------------------------------------
# generic finite-dimensional dg algebra

class DgAlgebra:
    """A finite-dimensional dg algebra over F2 with a distinguished basis.

    Basis elements are indices 0..dim-1.  Every basis element lies in a
    single block ``idems[left[i]] * A * idems[right[i]]``; the primitive
    idempotents are themselves basis elements.  Products may be supplied as
    a full table or computed on demand by ``mul_fn``.
    """

    def __init__(self, names, idems, left, right, d=None, table=None,
                 mul_fn=None, key=None, idem_names=None):
        self.names = list(names)
        self.idems = list(idems)
        self.left = list(left)
        self.right = list(right)
        self._d = [frozenset(x) for x in d] if d is not None else [frozenset()] * len(names)
        self._table = {} if table is None else {k: frozenset(v) for k, v in table.items()}
        self._full_table = table is not None and mul_fn is None
        self._mul_fn = mul_fn
        self.key = key if key is not None else ("anon", id(self))
        self._index = {nm: i for i, nm in enumerate(self.names)}
        self._is_idem = [False] * len(self.names)
        for e in self.idems:
            self._is_idem[e] = True
        self.idem_names = idem_names or [self.names[e] for e in self.idems]
        self._opp = None
        self._dT = None
        self._mulT = None

    # -- basic data
    @property
    def dim(self) -> int:
        return len(self.names)

    def __len__(self):
        return self.dim

    def __repr__(self):
        return f"DgAlgebra({self.key!r}, dim={self.dim})"

    def index(self, name: str) -> int:
        return self._index[name]

    def is_idem(self, i: int) -> bool:
        return self._is_idem[i]

    def plus_basis(self):
        """Basis of the augmentation ideal A_+."""
        return [i for i in range(self.dim) if not self._is_idem[i]]

    def unit(self):
        return frozenset(self.idems)

    def augmentation(self, x):
        return frozenset(i for i in x if self._is_idem[i])

    def elem(self, text: str):
        """Parse ``"rho1 + rho3"`` style sums of basis names."""
        out = set()
        for part in text.split("+"):
            part = part.strip()
            if part and part != "0":
                out ^= {self.index(part)}
        return frozenset(out)

    def fmt(self, x) -> str:
        if not x:
            return "0"
        return " + ".join(self.names[i] for i in sorted(x))

    # -- structure maps
    def d(self, i: int):
        return self._d[i]

    def d_elem(self, x):
        out = set()
        for i in x:
            out ^= self._d[i]
        return frozenset(out)

    def mul(self, i: int, j: int):
        if self.right[i] != self.left[j]:
            return frozenset()
        if self._is_idem[i]:
            return frozenset((j,))
        if self._is_idem[j]:
            return frozenset((i,))
        key = (i, j)
        hit = self._table.get(key)
        if hit is None:
            if self._full_table:
                return frozenset()
            hit = frozenset(self._mul_fn(i, j))
            self._table[key] = hit
        return hit

    def mul_elem(self, x, y):
        out = set()
        for i in x:
            for j in y:
                out ^= self.mul(i, j)
        return frozenset(out)

    def block(self, a: int, b: int):
        """Basis indices in idems[a] * A * idems[b]."""
        return [i for i in range(self.dim) if self.left[i] == a and self.right[i] == b]

    # -- transposes used by structure-equation checks
    def d_transpose(self, i: int):
        """Basis elements c with i appearing in d(c)."""
        if self._dT is None:
            dT = defaultdict(list)
            for c in range(self.dim):
                for t in self._d[c]:
                    dT[t].append(c)
            self._dT = dT
        return self._dT.get(i, ())

    def mul_transpose(self, i: int):
        """Pairs (c, c') of A_+ basis elements with i appearing in c*c'."""
        if self._mulT is None:
            mT = defaultdict(list)
            plus = self.plus_basis()
            by_left = defaultdict(list)
            for c in plus:
                by_left[self.left[c]].append(c)
            for c in plus:
                for c2 in by_left[self.right[c]]:
                    for t in self.mul(c, c2):
                        mT[t].append((c, c2))
            self._mulT = mT
        return self._mulT.get(i, ())

    # -- derived algebras
    def opposite(self) -> "DgAlgebra":
        if self._opp is None:
            base = self
            if self.key[0] == "op":
                raise AssertionError("opposite of opposite is cached on the base")
            opp = DgAlgebra(self.names, self.idems, self.right, self.left,
                            d=self._d, mul_fn=lambda i, j: base.mul(j, i),
                            key=("op", self.key), idem_names=self.idem_names)
            opp._opp = self
            self._opp = opp
        return self._opp

    # -- invariants
    def verify(self, exhaustive_limit: int = 80, samples: int = 4000, seed: int = 0):
        """Check d^2 = 0, Leibniz, associativity, idempotent sanity.

        Exhaustive up to ``exhaustive_limit`` basis elements, sampled above.
        Raises ClosureViolation on the first failure.
        """
        n = self.dim
        for i in range(n):
            if self.d_elem(self._d[i]):
                raise ClosureViolation(f"d^2 != 0 on {self.names[i]}")
            if self._is_idem[i] and self._d[i]:
                raise ClosureViolation(f"idempotent {self.names[i]} has nonzero d")
        for a, e in enumerate(self.idems):
            if self.left[e] != a or self.right[e] != a:
                raise ClosureViolation(f"idempotent {self.names[e]} mislabelled")
        if n <= exhaustive_limit:
            triples = product(range(n), repeat=3)
            pairs = product(range(n), repeat=2)
        else:
            rng = random.Random(seed)
            triples = [self._composable_triple(rng) for _ in range(samples)]
            pairs = [t[:2] for t in triples]
        for i, j in pairs:
            lhs = self.d_elem(self.mul(i, j))
            rhs = self.mul_elem(self._d[i], {j}) ^ self.mul_elem({i}, self._d[j])
            if lhs != rhs:
                raise ClosureViolation(
                    f"Leibniz fails on ({self.names[i]}, {self.names[j]})")
        for i, j, k in triples:
            if self.mul_elem(self.mul(i, j), {k}) != self.mul_elem({i}, self.mul(j, k)):
                raise ClosureViolation(
                    f"associativity fails on ({self.names[i]}, {self.names[j]}, {self.names[k]})")
        return True

    def _composable_triple(self, rng):
        by_left = defaultdict(list)
        for i in range(self.dim):
            by_left[self.left[i]].append(i)
        i = rng.randrange(self.dim)
        j = rng.choice(by_left[self.right[i]])
        k = rng.choice(by_left[self.right[j]])
        return i, j, k

    # -- homology
    def homology_dim(self) -> int:
        blocks = defaultdict(list)
        for i in range(self.dim):
            blocks[self._grading(i)].append(i)
        rank = 0
        for members in blocks.values():
            rank += _f2_rank([self._d[i] for i in members])
        return self.dim - 2 * rank

    def _grading(self, i):
        return (self.left[i], self.right[i])


def _f2_rank(rows) -> int:
    """Rank of a list of index sets over F2 (bitset elimination)."""
    pivots = {}
    rank = 0
    for row in rows:
        v = 0
        for c in row:
            v ^= 1 << c
        while v:
            top = v.bit_length() - 1
            p = pivots.get(top)
            if p is None:
                pivots[top] = v
                rank += 1
                break
            v ^= p
    return rank


# ---------------------------------------------------------------------------
# the raw strands algebra

def _all_diagrams(n: int, k: int, cap: int):
    out = []
    for S in combinations(range(1, n + 1), k):
        def rec(idx, used, acc):
            if idx == k:
                out.append(tuple(acc))
                if len(out) > cap:
                    raise SizeLimit(f"strands algebra exceeds {cap} elements")
                return
            s = S[idx]
            for t in range(s, n + 1):
                if t not in used:
                    used.add(t)
                    acc.append((s, t))
                    rec(idx + 1, used, acc)
                    acc.pop()
                    used.discard(t)
        rec(0, set(), [])
    return sorted(out)


def strands_algebra(n: int, k: int, cap: int = DEFAULT_CAP) -> DgAlgebra:
    """The algebra A(n,k) on its diagram basis."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    diags = _all_diagrams(n, k, cap)
    index = {dg: i for i, dg in enumerate(diags)}
    idem_sets = sorted(sources(dg) for dg in diags if all(s == t for s, t in dg))
    idem_sets = [tuple(sorted(s)) for s in idem_sets]
    idem_sets.sort()
    idem_pos = {frozenset(s): a for a, s in enumerate(idem_sets)}
    idems = [index[tuple((s, s) for s in S)] for S in idem_sets]
    left = [idem_pos[sources(dg)] for dg in diags]
    right = [idem_pos[targets(dg)] for dg in diags]
    dd = [frozenset(index[x] for x in diagram_d(dg)) for dg in diags]

    def mul_fn(i, j):
        c = compose(diags[i], diags[j])
        return () if c is None else (index[c],)

    alg = DgAlgebra([diagram_name(dg) for dg in diags], idems, left, right,
                    d=dd, mul_fn=mul_fn, key=("strands", n, k))
    alg.diagrams = diags
    return alg


# ---------------------------------------------------------------------------
# A(Z, i)

def section_diagrams(Z: PointedMatchedCircle, pair_set):
    """Identity diagrams over all sections of a set of matched pairs."""
    pairs = [Z.pairs[p] for p in sorted(pair_set)]
    out = []
    for choice in product(*pairs):
        out.append(tuple((s, s) for s in sorted(choice)))
    return frozenset(out)


def chord_sum(Z: PointedMatchedCircle, size: int, p: int, q: int):
    """a(xi) inside A(4k, size) as a sum of diagrams."""
    if not (1 <= p < q <= Z.n):
        raise ChordOutOfRange(f"chord ({p},{q}) outside 1..{Z.n}")
    banned = {Z.pair_of(p), Z.pair_of(q)}
    free = [j for j in range(len(Z.pairs)) if j not in banned]
    out = set()
    for U_pairs in combinations(free, size - 1):
        for choice in product(*(Z.pairs[j] for j in U_pairs)):
            strands = [(u, u) for u in choice] + [(p, q)]
            out.add(tuple(sorted(strands)))
    return frozenset(out)


def pair_signature(Z, points):
    return frozenset(Z.pair_of(p) for p in points)


class _Echelon:
    """Reduced row echelon store of F2 vectors over diagrams.

    Every stored vector has a pivot (its least diagram) that appears in no
    other stored vector.
    """

    def __init__(self, cap):
        self.rows = {}                 # pivot -> set of diagrams
        self.occurs = defaultdict(set)  # diagram -> pivots of rows containing it
        self.cap = cap

    def reduce(self, vec):
        v = set(vec)
        for dg in [dg for dg in vec if dg in self.rows]:
            v ^= self.rows[dg]
        return v

    def add(self, vec):
        """Insert vec if new; return the reduced vector or None."""
        r = self.reduce(vec)
        if not r:
            return None
        p = min(r)
        for piv in list(self.occurs.get(p, ())):
            row = self.rows[piv]
            for dg in r:
                if dg in row:
                    row.discard(dg)
                    self.occurs[dg].discard(piv)
                else:
                    row.add(dg)
                    self.occurs[dg].add(piv)
        self.rows[p] = set(r)
        for dg in r:
            self.occurs[dg].add(p)
        if len(self.rows) > self.cap:
            raise SizeLimit(f"algebra exceeds {self.cap} basis elements")
        return frozenset(r)


def _left_chord_products(Z, vec):
    """a(xi) * vec for every chord xi, split by the left pair signature."""
    out = defaultdict(set)
    for dg in vec:
        S = sources(dg)
        for q in S:
            rest = S - {q}
            rest_pairs = pair_signature(Z, rest)
            for p in range(1, q):
                if p in S:
                    continue
                if Z.pair_of(p) in rest_pairs or Z.pair_of(q) in rest_pairs:
                    continue
                left = tuple(sorted([(u, u) for u in rest] + [(p, q)]))
                c = compose(left, dg)
                if c is not None:
                    out[((p, q), pair_signature(Z, sources(c)))] ^= {c}
    return out


def _right_chord_products(Z, vec):
    out = defaultdict(set)
    for dg in vec:
        T = targets(dg)
        for p in T:
            rest = T - {p}
            rest_pairs = pair_signature(Z, rest)
            for q in range(p + 1, Z.n + 1):
                if q in T:
                    continue
                if Z.pair_of(p) in rest_pairs or Z.pair_of(q) in rest_pairs:
                    continue
                right = tuple(sorted([(u, u) for u in rest] + [(p, q)]))
                c = compose(dg, right)
                if c is not None:
                    out[((p, q), pair_signature(Z, targets(c)))] ^= {c}
    return out


def _element_name(Z, elem):
    """Readable name: moving strands plus the horizontal matched pairs."""
    moving = None
    horiz_pts = set()
    for dg in elem:
        mv = tuple((s, t) for s, t in dg if s != t)
        if moving is None:
            moving = mv
        elif moving != mv:
            return "~" + diagram_name(min(elem))
        horiz_pts |= {s for s, t in dg if s == t}
    hp = sorted({Z.pairs[Z.pair_of(s)] for s in horiz_pts})
    parts = [f"{s}>{t}" for s, t in moving]
    parts += [f"({a},{b})" for a, b in hp]
    return "[" + " ".join(parts) + "]"


_ALG_CACHE = {}


def algebra(Z: PointedMatchedCircle, i: int, cap: int = DEFAULT_CAP) -> DgAlgebra:
    """A(Z,i) built as the span-closure of idempotents and chord elements."""
    key = ("A", Z.matching, i)
    hit = _ALG_CACHE.get(key)
    if hit is not None:
        return hit
    k = Z.k
    if not -k <= i <= k:
        raise ValueError(f"i must lie in [{-k}, {k}]")
    size = k + i
    ech = _Echelon(cap)
    queue = []

    pair_sets = [frozenset(c) for c in combinations(range(2 * k), size)]
    for s in pair_sets:
        r = ech.add(section_diagrams(Z, s))
        if r is not None:
            queue.append(r)
    if size >= 1:
        for ch in chords(Z):
            total = chord_sum(Z, size, ch.p, ch.q)
            pieces = defaultdict(set)
            for dg in total:
                pieces[(pair_signature(Z, sources(dg)), pair_signature(Z, targets(dg)))].add(dg)
            for piece in pieces.values():
                r = ech.add(piece)
                if r is not None:
                    queue.append(r)

    head = 0
    while head < len(queue):
        vec = queue[head]
        head += 1
        cands = [elem_d(vec)]
        cands += list(_left_chord_products(Z, vec).values())
        cands += list(_right_chord_products(Z, vec).values())
        for c in cands:
            if c:
                r = ech.add(c)
                if r is not None:
                    queue.append(r)

    pivots = sorted(ech.rows)
    elems = [frozenset(ech.rows[p]) for p in pivots]
    alg = _wrap_span(Z, i, elems)
    _ALG_CACHE[key] = alg
    return alg


def _wrap_span(Z, i, elems):
    pivot_index = {min(e): n for n, e in enumerate(elems)}
    sigs = [(pair_signature(Z, sources(min(e))), pair_signature(Z, targets(min(e))))
            for e in elems]

    def express(vec, what):
        out = set()
        rest = set(vec)
        for dg in vec:
            n = pivot_index.get(dg)
            if n is not None:
                out.add(n)
                rest ^= elems[n]
        if rest:
            raise ClosureViolation(f"{what} leaves the span of A(Z,{i})")
        return frozenset(out)

    idem_list = []
    for n, e in enumerate(elems):
        if all(s == t for dg in e for s, t in dg):
            idem_list.append(n)
    idem_sig = {sigs[n][0]: a for a, n in enumerate(idem_list)}
    left = [idem_sig[s[0]] for s in sigs]
    right = [idem_sig[s[1]] for s in sigs]
    dd = [express(elem_d(e), "d") for e in elems]

    def mul_fn(a, b):
        return express(elem_mul(elems[a], elems[b]), "product")

    names = [_element_name(Z, e) for e in elems]
    alg = DgAlgebra(names, idem_list, left, right, d=dd, mul_fn=mul_fn,
                    key=("A", Z.matching, i))
    alg.pmc = Z
    alg.i = i
    alg.elements = elems
    alg.express = lambda vec: express(vec, "element")
    alg.pair_sets = [sigs[n][0] for n in idem_list]
    _multiplicity_grading(alg, Z)
    if Z.matching == ((1, 3), (2, 4)) and i == 0:
        _label_torus(alg)
    return alg


def _multiplicity_grading(alg, Z):
    """Record the coverage vector of each basis element (preserved by d)."""
    n = Z.n
    grading = []
    for e in alg.elements:
        dg = min(e)
        cover = [0] * (n - 1)
        for s, t in dg:
            for x in range(s, t):
                cover[x - 1] += 1
        grading.append((alg.left[len(grading)], alg.right[len(grading)], tuple(cover)))
    alg._grade = grading
    alg._grading = lambda j: grading[j]


TORUS_NAMES = {
    frozenset({((1, 1),), ((3, 3),)}): "i0",
    frozenset({((2, 2),), ((4, 4),)}): "i1",
    frozenset({((1, 2),)}): "rho1",
    frozenset({((2, 3),)}): "rho2",
    frozenset({((3, 4),)}): "rho3",
    frozenset({((1, 3),)}): "rho12",
    frozenset({((2, 4),)}): "rho23",
    frozenset({((1, 4),)}): "rho123",
}


def _label_torus(alg):
    names = [TORUS_NAMES[e] for e in alg.elements]
    alg.names = names
    alg._index = {nm: j for j, nm in enumerate(names)}
    alg.idem_names = [names[e] for e in alg.idems]


def chord_elem(A: DgAlgebra, p: int, q: int):
    """a(xi) for the chord from p to q, in the basis of A = A(Z,i)."""
    Z = A.pmc
    size = Z.k + A.i
    if size == 0:
        if not (1 <= p < q <= Z.n):
            raise ChordOutOfRange(f"chord ({p},{q}) outside 1..{Z.n}")
        return frozenset()
    return A.express(chord_sum(Z, size, p, q))


def idempotent(A: DgAlgebra, pair_set):
    """I(s) for a set of matched-pair indices s."""
    Z = A.pmc
    s = frozenset(pair_set)
    if len(s) != Z.k + A.i:
        raise WrongSize(f"need {Z.k + A.i} pairs, got {len(s)}")
    return A.express(section_diagrams(Z, s))


def idempotent_of_pairs(A: DgAlgebra, pairs):
    """I(s) where s is given as a list of point pairs, e.g. [(1,3)]."""
    Z = A.pmc
    idx = [Z.pairs.index(tuple(sorted(p))) for p in pairs]
    return idempotent(A, idx)


def opposite(A: DgAlgebra) -> DgAlgebra:
    return A.opposite()


def reverse_diagram(diag, n):
    return tuple(sorted((n + 1 - t, n + 1 - s) for s, t in diag))


def opposite_isomorphism(A: DgAlgebra, exhaustive_limit: int = 60, samples: int = 3000):
    """Basis bijection A(Z,i)^op -> A(-Z,i), verified on products and d.

    Returns the list ``phi`` with ``phi[j]`` the image of basis element j.
    """
    Z = A.pmc
    B = algebra(pmc_reverse(Z), A.i)
    where = {e: j for j, e in enumerate(B.elements)}
    phi = []
    for e in A.elements:
        img = frozenset(reverse_diagram(dg, Z.n) for dg in e)
        j = where.get(img)
        if j is None:
            raise ClosureViolation("reversed element is not a basis element")
        phi.append(j)
    if sorted(phi) != list(range(B.dim)):
        raise ClosureViolation("relabeling is not a bijection")
    op = A.opposite()
    n = A.dim
    if n <= exhaustive_limit:
        pairs = product(range(n), repeat=2)
    else:
        rng = random.Random(1)
        pairs = [(rng.randrange(n), rng.randrange(n)) for _ in range(samples)]
    for a, b in pairs:
        lhs = frozenset(phi[x] for x in op.mul(a, b))
        if lhs != B.mul(phi[a], phi[b]):
            raise ClosureViolation("relabeling does not intertwine products")
    for a in range(n):
        if frozenset(phi[x] for x in op.d(a)) != B.d(phi[a]):
            raise ClosureViolation("relabeling does not intertwine d")
    return phi


def summand_homology(Z: PointedMatchedCircle, i: int) -> int:
    return algebra(Z, i).homology_dim()


def algebra_homology(Z: PointedMatchedCircle, threads: int = 1):
    """Dict i -> dim H_*(A(Z,i)) for i in [-k, k]."""
    ks = list(range(-Z.k, Z.k + 1))
    if threads > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=threads) as ex:
            dims = list(ex.map(summand_homology, [Z] * len(ks), ks))
    else:
        dims = [summand_homology(Z, i) for i in ks]
    return dict(zip(ks, dims))


def format_laurent(coeffs) -> str:
    """Render {i: c} as e.g. ``T^-2 + 32*T^-1 + 98 + 32*T + T^2``."""
    parts = []
    for i in sorted(coeffs):
        c = coeffs[i]
        if c == 0:
            continue
        if i == 0:
            parts.append(str(c))
            continue
        mono = "T" if i == 1 else f"T^{i}"
        parts.append(mono if c == 1 else f"{c}*{mono}")
    return " + ".join(parts) if parts else "0"


def poincare(Z: PointedMatchedCircle, threads: int = 1) -> str:
    return format_laurent(algebra_homology(Z, threads))
