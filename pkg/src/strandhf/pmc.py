"""Pointed matched circles.

Points are labelled 1..4k in the order met when walking around the circle
from the basepoint, so the basepoint sits in the gap between 4k and 1 and
chords never wrap around it.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from itertools import combinations

from .errors import DisconnectedSurgery, MalformedMatching, UnknownName


@dataclass(frozen=True)
class Chord:
    p: int
    q: int

    def as_list(self):
        return [self.p, self.q]


@dataclass(frozen=True)
class PointedMatchedCircle:
    k: int
    matching: tuple  # canonical: sorted tuple of sorted pairs

    @property
    def n(self) -> int:
        return 4 * self.k

    @property
    def pairs(self):
        return self.matching

    def partner(self, p: int) -> int:
        return self._partner_map()[p]

    def pair_of(self, p: int) -> int:
        """Index (into ``pairs``) of the matched pair containing point p."""
        return self._pair_index()[p]

    def _partner_map(self):
        cache = self.__dict__.get("_pm")
        if cache is None:
            cache = {}
            for a, b in self.matching:
                cache[a] = b
                cache[b] = a
            object.__setattr__(self, "_pm", cache)
        return cache

    def _pair_index(self):
        cache = self.__dict__.get("_pi")
        if cache is None:
            cache = {}
            for idx, (a, b) in enumerate(self.matching):
                cache[a] = idx
                cache[b] = idx
            object.__setattr__(self, "_pi", cache)
        return cache

    def to_json(self) -> str:
        return json.dumps({"k": self.k, "matching": [list(p) for p in self.matching]})

    def __repr__(self):
        return f"PMC(k={self.k}, {[list(p) for p in self.matching]})"


def _canonical(pairs):
    return tuple(sorted(tuple(sorted(p)) for p in pairs))


def surgery_components(k: int, pairs) -> int:
    """Number of components of the circle after surgery on the matched pairs.

    The circle minus the 4k points is 4k arcs; arc j runs from point j to
    point j+1 (arc 4k contains the basepoint and returns to point 1).  Each
    point is an endpoint of two arcs.  Surgery removes a neighbourhood of
    both points of a pair and reconnects the four loose ends compatibly
    with the orientation, so the arc arriving at a continues into the arc
    leaving b and the arc arriving at b continues into the arc leaving a.
    """
    n = 4 * k
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    def incoming(p):  # arc ending at p
        return (p - 2) % n

    def outgoing(p):  # arc starting at p
        return p - 1

    for a, b in pairs:
        union(incoming(a), outgoing(b))
        union(incoming(b), outgoing(a))
    return len({find(x) for x in range(n)})


def pmc_new(k: int, matching) -> PointedMatchedCircle:
    """Validate and canonicalize a matching of {1..4k}."""
    if not isinstance(k, int) or k < 1:
        raise MalformedMatching(f"genus must be a positive integer, got {k!r}")
    pairs = []
    for pr in matching:
        pr = list(pr)
        if len(pr) != 2:
            raise MalformedMatching(f"pair {pr} does not have two points")
        a, b = int(pr[0]), int(pr[1])
        if a == b:
            raise MalformedMatching(f"point {a} matched to itself")
        pairs.append((a, b))
    seen = [p for pr in pairs for p in pr]
    if sorted(seen) != list(range(1, 4 * k + 1)):
        raise MalformedMatching(
            f"pairs must cover 1..{4 * k} exactly once, got {sorted(seen)}")
    if surgery_components(k, pairs) != 1:
        raise DisconnectedSurgery(f"surgery on {pairs} is disconnected")
    return PointedMatchedCircle(k, _canonical(pairs))


def pmc_reverse(Z: PointedMatchedCircle) -> PointedMatchedCircle:
    """Orientation reversal: point i goes to 4k+1-i."""
    m = Z.n + 1
    return pmc_new(Z.k, [(m - a, m - b) for a, b in Z.matching])


def chords(Z: PointedMatchedCircle):
    return [Chord(p, q) for p, q in combinations(range(1, Z.n + 1), 2)]


def split(k: int) -> PointedMatchedCircle:
    pairs = []
    for j in range(k):
        pairs += [(4 * j + 1, 4 * j + 3), (4 * j + 2, 4 * j + 4)]
    return pmc_new(k, pairs)


def antipodal(k: int) -> PointedMatchedCircle:
    return pmc_new(k, [(i, i + 2 * k) for i in range(1, 2 * k + 1)])


TORUS = ((1, 3), (2, 4))
GENUS3_Z1 = ((1, 7), (2, 9), (3, 5), (4, 6), (8, 11), (10, 12))
GENUS3_Z2 = ((1, 10), (2, 4), (3, 12), (5, 11), (6, 8), (7, 9))

# circles whose Koszul-dual partner is known from a table
DUAL_TABLE = {
    TORUS: TORUS,
    GENUS3_Z1: GENUS3_Z2,
    GENUS3_Z2: GENUS3_Z1,
}


def pmc_standard(name: str) -> PointedMatchedCircle:
    """Look up a named circle: torus, split<k>, antipodal<k>, genus3_Z1/Z2.

    ``split(2)`` and ``split2`` are both accepted; ``genus3_Z2_as_dual`` is
    an alias for ``genus3_Z2``.
    """
    key = name.strip().replace(" ", "")
    if key == "torus":
        return pmc_new(1, TORUS)
    if key == "genus3_Z1":
        return pmc_new(3, GENUS3_Z1)
    if key in ("genus3_Z2", "genus3_Z2_as_dual"):
        return pmc_new(3, GENUS3_Z2)
    m = re.fullmatch(r"(split|antipodal)\(?(\d+)\)?", key)
    if m:
        k = int(m.group(2))
        if k < 1:
            raise UnknownName(name)
        return split(k) if m.group(1) == "split" else antipodal(k)
    raise UnknownName(name)


def table_dual(Z: PointedMatchedCircle):
    """Tabulated dual circle, or None when no table entry exists."""
    other = DUAL_TABLE.get(Z.matching)
    return None if other is None else pmc_new(Z.k, other)


def pmc_from_json(text: str) -> PointedMatchedCircle:
    data = json.loads(text)
    return pmc_new(int(data["k"]), data["matching"])


def load_pmc(ref: str) -> PointedMatchedCircle:
    """Resolve a CLI argument that is either a standard name or a JSON file."""
    try:
        return pmc_standard(ref)
    except UnknownName:
        pass
    try:
        with open(ref) as fh:
            return pmc_from_json(fh.read())
    except FileNotFoundError:
        raise UnknownName(ref) from None
