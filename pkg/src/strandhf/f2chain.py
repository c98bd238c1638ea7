"""F2 chain complexes, Gaussian cancellation, and A-infinity transfer."""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import NotAComplex, ShapeMismatch


class ChainComplex:
    """Generators with opaque labels and a sparse differential.

    ``d[i]`` is the frozenset of generator indices appearing in the
    boundary of generator i.
    """

    def __init__(self, labels, d, check=True):
        self.labels = list(labels)
        self.d = [frozenset(x) for x in d]
        if len(self.d) != len(self.labels):
            raise ShapeMismatch("one boundary per generator is required")
        if check:
            self.check()

    def __len__(self):
        return len(self.labels)

    def __repr__(self):
        return f"ChainComplex({len(self)} generators)"

    def check(self):
        for i, row in enumerate(self.d):
            acc = set()
            for j in row:
                acc ^= self.d[j]
            if acc:
                raise NotAComplex(f"d^2 != 0 on {self.labels[i]!r}")
        return True

    def apply(self, vec):
        out = set()
        for i in vec:
            out ^= self.d[i]
        return frozenset(out)

    def fmt(self, vec) -> str:
        if not vec:
            return "0"
        return " + ".join(str(self.labels[i]) for i in sorted(vec))

    def arrows(self):
        """All (source label, target label) pairs of the differential."""
        return [(self.labels[i], self.labels[j]) for i in range(len(self)) for j in sorted(self.d[i])]


def homology_rank(C: ChainComplex) -> int:
    """dim ker - dim im, by bitset elimination of the boundary rows."""
    pivots = {}
    rank = 0
    for row in C.d:
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
    return len(C) - 2 * rank


@dataclass
class RetractData:
    """Deformation retract of ``big`` onto ``small``.

    ``f[j]`` is the image in big of small generator j, ``g[i]`` the image
    in small of big generator i, ``T[i]`` the homotopy on big generator i.
    """
    big: ChainComplex
    small: ChainComplex
    f: list
    g: list
    T: list
    survivors: list = field(default_factory=list)

    def apply(self, which, vec):
        table = getattr(self, which)
        out = set()
        for i in vec:
            out ^= table[i]
        return frozenset(out)

    def check(self):
        big, small = self.big, self.small
        for j in range(len(small)):
            if self.apply("g", self.f[j]) != {j}:
                raise NotAComplex("g f != id")
            if self.apply("T", self.f[j]):
                raise NotAComplex("T f != 0")
            # f is a chain map
            if big.apply(self.f[j]) != self.apply("f", small.d[j]):
                raise NotAComplex("f is not a chain map")
        for i in range(len(big)):
            lhs = self.apply("f", self.g[i]) ^ {i}
            rhs = big.apply(self.T[i]) ^ self.apply("T", big.d[i])
            if lhs != rhs:
                raise NotAComplex(f"f g + id != dT + Td on {big.labels[i]!r}")
            if self.apply("g", self.T[i]):
                raise NotAComplex("g T != 0")
            if self.apply("T", self.T[i]):
                raise NotAComplex("T T != 0")
            if small.apply(self.g[i]) != self.apply("g", big.d[i]):
                raise NotAComplex("g is not a chain map")
        return True


def reduce_retract(C: ChainComplex, keep_zero_differential: bool = True) -> RetractData:
    """Cancel boundary pairs until the differential vanishes.

    Generators are visited in index order; a generator with nonzero
    boundary is cancelled against the least other generator in its boundary.
    This is the lexicographically least available pair at every step.
    """
    n = len(C)
    d = [set(r) for r in C.d]
    dT = [set() for _ in range(n)]
    for i in range(n):
        for j in d[i]:
            dT[j].add(i)
    alive = [True] * n
    F = [{i} for i in range(n)]          # current gen -> vector in big
    G = [{i} for i in range(n)]          # big gen -> vector in current gens
    Grev = [{i} for i in range(n)]       # current gen -> big gens whose G contains it
    T = [set() for _ in range(n)]

    for x in range(n):
        if not alive[x] or not d[x]:
            continue
        # x may occur in its own boundary (ungraded complexes); any other
        # generator with coefficient one is a valid cancellation partner
        others = d[x] - {x}
        if not others:
            raise NotAComplex(f"d^2 != 0: {C.labels[x]!r} is its own boundary")
        y = min(others)
        dx = set(d[x])
        # homotopy and projection bookkeeping
        Fx = set(F[x])
        for v0 in list(Grev[y]):
            T[v0] ^= Fx
        rest = dx - {y}
        for v0 in list(Grev[y]):
            G[v0].discard(y)
            for u in rest:
                if u in G[v0]:
                    G[v0].discard(u)
                    Grev[u].discard(v0)
                else:
                    G[v0].add(u)
                    Grev[u].add(v0)
        Grev[y] = set()
        for v0 in list(Grev[x]):
            G[v0].discard(x)
        Grev[x] = set()
        # update differential
        for w in list(dT[y]):
            if w == x:
                continue
            F[w] ^= Fx
            for u in dx:
                if u in d[w]:
                    d[w].discard(u)
                    dT[u].discard(w)
                else:
                    d[w].add(u)
                    dT[u].add(w)
        for gone in (x, y):
            alive[gone] = False
            for u in d[gone]:
                dT[u].discard(gone)
            d[gone] = set()
        for w in list(dT[x]):
            d[w].discard(x)
        dT[x] = set()
        dT[y] = set()

    survivors = [i for i in range(n) if alive[i]]
    pos = {s: j for j, s in enumerate(survivors)}
    small_d = [frozenset(pos[u] for u in d[s]) for s in survivors]
    small = ChainComplex([C.labels[s] for s in survivors], small_d, check=False)
    f = [frozenset(F[s]) for s in survivors]
    g = [frozenset(pos[u] for u in G[i]) for i in range(n)]
    return RetractData(C, small, f, g, [frozenset(t) for t in T], survivors)


def complex_homology(C: ChainComplex):
    """(rank, representatives) where representatives are cycles in C."""
    C.check()
    R = reduce_retract(C)
    reps = [R.f[j] for j in range(len(R.small))]
    return len(reps), reps


def identity_retract(C: ChainComplex) -> RetractData:
    n = len(C)
    for row in C.d:
        if row:
            raise ShapeMismatch("identity retract needs a zero differential")
    one = [frozenset({i}) for i in range(n)]
    return RetractData(C, C, one, one, [frozenset()] * n, list(range(n)))


def transfer_ainf(M, R: RetractData, arity_cap: int = 16, strict: bool = False):
    """Homological perturbation along R.

    M is a ``modcat.AInfObject`` whose underlying complex (its input-free
    operations with idempotent outputs) is ``R.big``.  Returns ``(N, F)``:
    the transferred object on ``R.small`` and the quasi-isomorphism data
    N -> M as a dict keyed like an operation table.
    """
    from .modcat import transfer_object
    return transfer_object(M, R, arity_cap=arity_cap, strict=strict)


# ---------------------------------------------------------------------------
# canonical homology bases

def _bits(vec) -> int:
    v = 0
    for i in vec:
        v |= 1 << i
    return v


def _unbits(v: int):
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return frozenset(out)


class _Reducer:
    """Fully reduced echelon basis of a subspace, pivot = highest index."""

    def __init__(self):
        self.rows = {}

    def reduce(self, v: int) -> int:
        # rows are fully reduced, so one pass over the pivots suffices
        for top, row in self.rows.items():
            if v >> top & 1:
                v ^= row
        return v

    def add(self, v: int) -> bool:
        v = self.reduce(v)
        if not v:
            return False
        top = v.bit_length() - 1
        for t in list(self.rows):
            if self.rows[t] >> top & 1:
                self.rows[t] ^= v
        self.rows[top] = v
        return True


def boundary_reducer(C: ChainComplex) -> _Reducer:
    red = _Reducer()
    for row in C.d:
        if row:
            red.add(_bits(row))
    return red


def canonical_homology(C: ChainComplex):
    """Canonical cycle representatives of a homology basis.

    Every representative is reduced modulo the boundaries (eliminating the
    highest-index generators first) and the representatives are put in
    reduced echelon form among themselves, so the output depends only on
    the complex and the generator order.
    """
    C.check()
    R = reduce_retract(C)
    B = boundary_reducer(C)
    reps = _Reducer()
    for j in range(len(R.small)):
        reps.add(B.reduce(_bits(R.f[j])))
    # re-reduce against the boundaries after echelon mixing
    out = []
    for top in sorted(reps.rows):
        out.append(_unbits(B.reduce(reps.rows[top])))
    return out


def homology_coordinates(C: ChainComplex, basis, vec):
    """Express the class of the cycle ``vec`` in a homology basis.

    Returns the set of basis positions, or None when ``vec`` is not a cycle.
    """
    if C.apply(vec):
        return None
    B = boundary_reducer(C)
    target = B.reduce(_bits(vec))
    # Gaussian elimination on the (reduced) basis vectors, tracking combos
    piv = {}
    for k, b in enumerate(basis):
        v = B.reduce(_bits(b))
        combo = 1 << k
        for top in sorted(piv, reverse=True):
            if v >> top & 1:
                v ^= piv[top][0]
                combo ^= piv[top][1]
        if v:
            piv[v.bit_length() - 1] = (v, combo)
    combo = 0
    for top in sorted(piv, reverse=True):
        if target >> top & 1:
            target ^= piv[top][0]
            combo ^= piv[top][1]
    if target:
        raise ShapeMismatch("vector is not in the span of the given homology basis")
    return _unbits(combo)


def is_boundary(C: ChainComplex, vec) -> bool:
    return boundary_reducer(C).reduce(_bits(vec)) == 0
