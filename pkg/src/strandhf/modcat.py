"""Type D structures, A-infinity modules and bimodules, and the box product.

Every object is an ``AInfObject`` with at most one algebra slot on each
side.  A slot has a flavor: ``D`` (the object emits algebra elements on
that side) or ``A`` (the object consumes a sequence of algebra inputs on
that side).  An operation table maps

    (source, left inputs, right inputs) -> set of (left out, target, right out)

with inputs drawn from the augmentation ideal (strict unitality is
implicit) and ``None`` standing for an absent output.

Conventions, fixed once and checked by ``check_structure``:

* a left D output ``a`` from x to y lies in ``I_x A I_y``; a right D
  output ``b`` from x to y lies in ``I_y B I_x``;
* composing two operations, left D outputs multiply as ``a1 * a2`` and
  right D outputs as ``b2 * b1`` (first operation innermost);
* on a left A slot the first operation consumes the inputs nearest the
  generator (the suffix), on a right A slot the prefix.

For a DD structure this gives the differential
``d(a x b) = da x b + a x db + sum (a a') y (b' b)`` on ``A (x) X (x) B``.
"""
from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass

from .errors import AlgebraMismatch, ArityCap, ConvergenceRisk, ShapeMismatch, SlotMismatch
from .f2chain import ChainComplex, reduce_retract


@dataclass(frozen=True)
class Slot:
    alg: object
    kind: str  # "A" or "D"

    def flipped(self):
        return Slot(self.alg.opposite(), self.kind)


def _same_alg(a, b) -> bool:
    return a is b or a.key == b.key


class AInfObject:
    def __init__(self, left, right, names, idems, ops, label=""):
        self.left = left
        self.right = right
        self.names = list(names)
        self.idems = [tuple(x) for x in idems]
        clean = {}
        for key, outs in ops.items():
            outs = frozenset(outs)
            if outs:
                clean[(key[0], tuple(key[1]), tuple(key[2]))] = outs
        self.ops = clean
        self.label = label
        self.truncated_at = None
        self._by_src = None
        self._index = {nm: i for i, nm in enumerate(self.names)}

    # -- bookkeeping
    def __len__(self):
        return len(self.names)

    def __repr__(self):
        return f"AInfObject({self.flavor or 'complex'}, {len(self)} generators{', ' + self.label if self.label else ''})"

    @property
    def flavor(self) -> str:
        return (self.left.kind if self.left else "") + (self.right.kind if self.right else "")

    def index(self, name):
        return self._index[name]

    def by_src(self):
        if self._by_src is None:
            tab = defaultdict(list)
            for (x, lin, rin), outs in sorted(self.ops.items(), key=_op_sort_key):
                tab[x].append((lin, rin, outs))
            self._by_src = tab
        return self._by_src

    def entries(self):
        """Flat sorted list of (src, lin, rin, lout, tgt, rout)."""
        out = []
        for (x, lin, rin), outs in self.ops.items():
            for lo, y, ro in outs:
                out.append((x, lin, rin, lo, y, ro))
        out.sort(key=_entry_sort_key)
        return out

    def max_arity(self):
        return max((len(l) + len(r) for (_, l, r) in self.ops), default=0)

    def idem_elem(self, gen, side):
        """Basis index of the idempotent of ``gen`` on a side."""
        slot = self.left if side == "L" else self.right
        pos = self.idems[gen][0 if side == "L" else 1]
        return slot.alg.idems[pos]

    def describe_term(self, key) -> str:
        x, lin, rin, lo, y, ro = key
        parts = []
        if self.left is not None and self.left.kind == "A":
            parts += [self.left.alg.names[a] for a in lin]
        parts.append(self.names[x])
        if self.right is not None and self.right.kind == "A":
            parts += [self.right.alg.names[b] for b in rin]
        src = "(" + ", ".join(parts) + ")"
        out = []
        if lo is not None:
            out.append(self.left.alg.names[lo])
        out.append(self.names[y])
        if ro is not None:
            out.append(self.right.alg.names[ro])
        return f"{src} -> {' (x) '.join(out)}"

    def fmt_ops(self):
        return [self.describe_term(e) for e in self.entries()]


def _op_sort_key(item):
    (x, lin, rin), _ = item
    return (x, len(lin) + len(rin), lin, rin)


def _none_key(v):
    return -1 if v is None else v


def _entry_sort_key(e):
    x, lin, rin, lo, y, ro = e
    return (x, len(lin) + len(rin), lin, rin, _none_key(lo), y, _none_key(ro))


# ---------------------------------------------------------------------------
# constructors

def _resolve(alg, a):
    if isinstance(a, str):
        return alg.elem(a)
    if isinstance(a, int):
        return frozenset((a,))
    return frozenset(a)


def _idem_pos(alg, idem):
    if isinstance(idem, str):
        if idem in alg.idem_names:
            return alg.idem_names.index(idem)
        return alg.idems.index(alg.index(idem))
    return int(idem)


def type_d(alg, gens, delta, label="") -> AInfObject:
    """Left type D structure.

    ``gens`` is a list of ``(name, idempotent)``; ``delta`` a list of
    ``(source, algebra element, target)`` where the element is a basis
    name, a ``"a + b"`` string or a set of basis indices.
    """
    names = [g for g, _ in gens]
    idems = [(_idem_pos(alg, i), None) for _, i in gens]
    pos = {nm: j for j, nm in enumerate(names)}
    ops = defaultdict(Counter)
    for src, a, tgt in delta:
        for t in _resolve(alg, a):
            ops[(pos[src], (), ())][(t, pos[tgt], None)] += 1
    return AInfObject(Slot(alg, "D"), None, names, idems, _odd(ops), label)


def dd_structure(A, B, gens, delta, label="") -> AInfObject:
    """DD structure: left D over A, right D over B.

    ``gens``: ``(name, idem of A, idem of B)``; ``delta``:
    ``(source, a, target, b)``.
    """
    names = [g[0] for g in gens]
    idems = [(_idem_pos(A, g[1]), _idem_pos(B, g[2])) for g in gens]
    pos = {nm: j for j, nm in enumerate(names)}
    ops = defaultdict(Counter)
    for src, a, tgt, b in delta:
        for s in _resolve(A, a):
            for t in _resolve(B, b):
                ops[(pos[src], (), ())][(s, pos[tgt], t)] += 1
    return AInfObject(Slot(A, "D"), Slot(B, "D"), names, idems, _odd(ops), label)


def _odd(ops):
    out = {}
    for key, cnt in ops.items():
        keep = frozenset(o for o, c in cnt.items() if c % 2)
        if keep:
            out[key] = keep
    return out


def algebra_bimodule(A) -> AInfObject:
    """A as an AA bimodule over itself."""
    names = list(A.names)
    idems = [(A.left[i], A.right[i]) for i in range(A.dim)]
    plus = A.plus_basis()
    by_left = defaultdict(list)
    by_right = defaultdict(list)
    for c in plus:
        by_left[A.left[c]].append(c)
        by_right[A.right[c]].append(c)
    ops = {}
    for a in range(A.dim):
        if A.d(a):
            ops[(a, (), ())] = frozenset((None, t, None) for t in A.d(a))
        for c in by_right[A.left[a]]:
            prod = A.mul(c, a)
            if prod:
                ops[(a, (c,), ())] = frozenset((None, t, None) for t in prod)
        for c in by_left[A.right[a]]:
            prod = A.mul(a, c)
            if prod:
                ops[(a, (), (c,))] = frozenset((None, t, None) for t in prod)
    return AInfObject(Slot(A, "A"), Slot(A, "A"), names, idems, ops, f"A_AA")


def left_module(A) -> AInfObject:
    """A as a left module over itself (right action forgotten)."""
    M = algebra_bimodule(A)
    ops = {k: v for k, v in M.ops.items() if not k[2]}
    return AInfObject(M.left, None, M.names, [(l, None) for l, _ in M.idems], ops, "A_A left")


def right_module(A) -> AInfObject:
    M = algebra_bimodule(A)
    ops = {k: v for k, v in M.ops.items() if not k[1]}
    return AInfObject(None, M.right, M.names, [(None, r) for _, r in M.idems], ops, "A_A right")


def identity_da(A) -> AInfObject:
    """[Id]: one generator per idempotent, delta(x, a) = a (x) y."""
    names = [f"x_{nm}" for nm in A.idem_names]
    idems = [(j, j) for j in range(len(A.idems))]
    ops = {}
    for a in A.plus_basis():
        ops[(A.left[a], (), (a,))] = frozenset({(a, A.right[a], None)})
    return AInfObject(Slot(A, "D"), Slot(A, "A"), names, idems, ops, "[Id]")


def zero_type_d(alg, idem, name="g") -> AInfObject:
    return type_d(alg, [(name, idem)], [])


# ---------------------------------------------------------------------------
# structure equation

@dataclass
class Report:
    ok: bool
    terms: list
    message: str = ""

    def __bool__(self):
        return self.ok


def _products(alg, x, y):
    if x is None:
        return (None,)
    return tuple(alg.mul(x, y))


def structure_terms(M: AInfObject, arity_limit=None) -> Counter:
    """All terms of the structure equation, counted with multiplicity."""
    acc = Counter()
    L, R = M.left, M.right
    lD = L is not None and L.kind == "D"
    rD = R is not None and R.kind == "D"
    lA = L is not None and L.kind == "A"
    rA = R is not None and R.kind == "A"
    by_src = M.by_src()

    def add(key):
        if arity_limit is not None and len(key[1]) + len(key[2]) > arity_limit:
            return
        acc[key] += 1

    for x, lst in list(by_src.items()):
        for lin1, rin1, outs1 in lst:
            for lo1, y, ro1 in outs1:
                # composition with a second operation at y
                for lin2, rin2, outs2 in by_src.get(y, ()):
                    lin = lin2 + lin1
                    rin = rin1 + rin2
                    for lo2, z, ro2 in outs2:
                        los = M.left.alg.mul(lo1, lo2) if lD else (None,)
                        if not los:
                            continue
                        ros = M.right.alg.mul(ro2, ro1) if rD else (None,)
                        for lo in los:
                            for ro in ros:
                                add((x, lin, rin, lo, z, ro))
                # differential of an output
                if lD:
                    for t in M.left.alg.d(lo1):
                        add((x, lin1, rin1, t, y, ro1))
                if rD:
                    for t in M.right.alg.d(ro1):
                        add((x, lin1, rin1, lo1, y, t))
                # differential and products of inputs
                for slot_is_a, side in ((lA, 0), (rA, 1)):
                    if not slot_is_a:
                        continue
                    alg = (L if side == 0 else R).alg
                    word = lin1 if side == 0 else rin1
                    for p, a in enumerate(word):
                        for c in alg.d_transpose(a):
                            w2 = word[:p] + (c,) + word[p + 1:]
                            add((x, w2, rin1, lo1, y, ro1) if side == 0 else (x, lin1, w2, lo1, y, ro1))
                        for c, c2 in alg.mul_transpose(a):
                            w2 = word[:p] + (c, c2) + word[p + 1:]
                            add((x, w2, rin1, lo1, y, ro1) if side == 0 else (x, lin1, w2, lo1, y, ro1))
    return acc


def check_structure(M: AInfObject, arity_limit=None) -> Report:
    """Expand the structure equation; ok iff every term cancels."""
    if arity_limit is None and M.truncated_at is not None:
        arity_limit = M.truncated_at
    idem_err = check_idempotents(M)
    if idem_err:
        return Report(False, [], idem_err)
    acc = structure_terms(M, arity_limit)
    bad = sorted((k for k, c in acc.items() if c % 2), key=_entry_sort_key)
    if not bad:
        return Report(True, [])
    msg = "structure equation fails at " + M.describe_term(bad[0])
    return Report(False, bad, msg)


def check_idempotents(M: AInfObject) -> str:
    """Return an error string if some entry breaks idempotent rules."""
    for (x, lin, rin), outs in M.ops.items():
        for lo, y, ro in outs:
            for side, slot, word, out in (("L", M.left, lin, lo), ("R", M.right, rin, ro)):
                if slot is None:
                    continue
                alg = slot.alg
                sx = M.idems[x][0 if side == "L" else 1]
                sy = M.idems[y][0 if side == "L" else 1]
                if slot.kind == "D":
                    if word:
                        return f"inputs on a D slot at {M.names[x]}"
                    if side == "L":
                        good = alg.left[out] == sx and alg.right[out] == sy
                    else:
                        good = alg.left[out] == sy and alg.right[out] == sx
                    if not good:
                        return f"idempotent mismatch: {M.describe_term((x, lin, rin, lo, y, ro))}"
                else:
                    if out is not None:
                        return "output on an A slot"
                    if not word:
                        if sx != sy:
                            return f"idempotent mismatch: {M.describe_term((x, lin, rin, lo, y, ro))}"
                        continue
                    for a in word:
                        if alg.is_idem(a):
                            return f"idempotent input at {M.names[x]}"
                    chain = all(alg.right[word[j]] == alg.left[word[j + 1]] for j in range(len(word) - 1))
                    if side == "L":
                        ends = alg.left[word[0]] == sy and alg.right[word[-1]] == sx
                    else:
                        ends = alg.left[word[0]] == sx and alg.right[word[-1]] == sy
                    if not (chain and ends):
                        return f"idempotent mismatch: {M.describe_term((x, lin, rin, lo, y, ro))}"
    return ""


def is_bounded(M: AInfObject) -> bool:
    """True when the graph of input-free operations has no cycle."""
    graph = defaultdict(set)
    for (x, lin, rin), outs in M.ops.items():
        if not lin and not rin:
            for _, y, _ in outs:
                graph[x].add(y)
    color = {}
    for start in range(len(M)):
        if start in color:
            continue
        stack = [(start, iter(graph[start]))]
        color[start] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = 2
                stack.pop()
                continue
            c = color.get(nxt)
            if c == 1:
                return False
            if c is None:
                color[nxt] = 1
                stack.append((nxt, iter(graph[nxt])))
    return True


# ---------------------------------------------------------------------------
# re-housing and duals

def to_opposite_side(M: AInfObject) -> AInfObject:
    """Swap sides, replacing each algebra by its opposite."""
    left = M.right.flipped() if M.right else None
    right = M.left.flipped() if M.left else None
    ops = {}
    for (x, lin, rin), outs in M.ops.items():
        key = (x, tuple(reversed(rin)), tuple(reversed(lin)))
        ops[key] = frozenset((ro, y, lo) for lo, y, ro in outs)
    idems = [(r, l) for l, r in M.idems]
    out = AInfObject(left, right, M.names, idems, ops, M.label)
    out.truncated_at = M.truncated_at
    return out


def dual(M: AInfObject, suffix="*") -> AInfObject:
    """Transpose every operation and flip the side of every slot."""
    names = [nm + suffix if not nm.endswith(suffix) else nm[: -len(suffix)] for nm in M.names]
    ops = defaultdict(set)
    for (x, lin, rin), outs in M.ops.items():
        for lo, y, ro in outs:
            ops[(y, rin, lin)].add((ro, x, lo))
    idems = [(r, l) for l, r in M.idems]
    out = AInfObject(M.right, M.left, names, idems, ops, f"dual({M.label})")
    out.truncated_at = M.truncated_at
    return out


def relabel(M: AInfObject, order, names=None) -> AInfObject:
    """Reorder generators: new generator j is old generator order[j]."""
    inv = {old: new for new, old in enumerate(order)}
    ops = {}
    for (x, lin, rin), outs in M.ops.items():
        ops[(inv[x], lin, rin)] = frozenset((lo, inv[y], ro) for lo, y, ro in outs)
    nm = names if names is not None else [M.names[o] for o in order]
    out = AInfObject(M.left, M.right, nm, [M.idems[o] for o in order], ops, M.label)
    out.truncated_at = M.truncated_at
    return out


# ---------------------------------------------------------------------------
# box tensor product

def box(P: AInfObject, Q: AInfObject, sep="|") -> AInfObject:
    """P (x) Q pairing P's right slot with Q's left slot."""
    if P.right is None or Q.left is None:
        raise SlotMismatch("box needs a right slot on P and a left slot on Q")
    if not _same_alg(P.right.alg, Q.left.alg):
        raise SlotMismatch(f"algebras differ: {P.right.alg.key} vs {Q.left.alg.key}")
    kinds = (P.right.kind, Q.left.kind)
    if kinds == ("A", "D"):
        if P.truncated_at is not None and not is_bounded(Q):
            raise ConvergenceRisk("truncated A side against an unbounded D side")
        return _box_ad(P, Q, sep)
    if kinds == ("D", "A"):
        if Q.truncated_at is not None and not is_bounded(P):
            raise ConvergenceRisk("truncated A side against an unbounded D side")
        mirrored = _box_ad(to_opposite_side(Q), to_opposite_side(P), sep)
        back = to_opposite_side(mirrored)
        # generators come out as (q, p); put them in (p, q) order
        qp = mirrored._pairs
        order = sorted(range(len(back)), key=lambda j: qp[j][::-1])
        names = [P.names[qp[j][1]] + sep + Q.names[qp[j][0]] for j in order]
        out = relabel(back, order, names)
        out.label = f"{P.label}(x){Q.label}"
        out._pairs = [qp[j][::-1] for j in order]
        return out
    raise SlotMismatch(f"cannot pair a {kinds[0]} slot with a {kinds[1]} slot")


def _box_ad(P, Q, sep):
    """P's right slot is A, Q's left slot is D."""
    alg = Q.left.alg
    pairs = [(p, q) for p in range(len(P)) for q in range(len(Q))
             if P.idems[p][1] == Q.idems[q][0]]
    index = {pq: j for j, pq in enumerate(pairs)}
    names = [P.names[p] + sep + Q.names[q] for p, q in pairs]
    idems = [(P.idems[p][0], Q.idems[q][1]) for p, q in pairs]
    lD = P.left is not None and P.left.kind == "D"
    rD = Q.right is not None and Q.right.kind == "D"
    Palg_l = P.left.alg if lD else None
    Qalg_r = Q.right.alg if rD else None

    q_by_out = defaultdict(list)   # (src, left output) -> [(rin, tgt, right out)]
    q_idem_ops = defaultdict(list)  # src -> [(rin, lo, tgt, ro)] with idempotent lo
    for (q, lin, rin), outs in Q.ops.items():
        for lo, q2, ro in outs:
            if alg.is_idem(lo):
                q_idem_ops[q].append((rin, q2, ro))
            else:
                q_by_out[(q, lo)].append((rin, q2, ro))

    def chains(q, bs, i, rin_acc, ro_acc):
        if i == len(bs):
            yield q, rin_acc, ro_acc
            return
        for rin, q2, ro in q_by_out.get((q, bs[i]), ()):
            if rD:
                for r in Qalg_r.mul(ro, ro_acc):
                    yield from chains(q2, bs, i + 1, rin_acc + rin, r)
            else:
                yield from chains(q2, bs, i + 1, rin_acc + rin, None)

    ops = defaultdict(Counter)
    p_by_src = P.by_src()
    for (p, q), j in index.items():
        q_idem_r = Q.idem_elem(q, "R") if rD else None
        p_idem_l = P.idem_elem(p, "L") if lD else None
        for lin, rin, outs in p_by_src.get(p, ()):
            if not rin:
                for lo, p2, _ in outs:
                    ops[(j, lin, ())][(lo, index[(p2, q)], q_idem_r)] += 1
                continue
            for q_end, rin_q, ro in chains(q, rin, 0, (), q_idem_r):
                for lo, p2, _ in outs:
                    t = index.get((p2, q_end))
                    if t is not None:
                        ops[(j, lin, rin_q)][(lo, t, ro)] += 1
        for rin, q2, ro in q_idem_ops.get(q, ()):
            ops[(j, (), rin)][(p_idem_l, index[(p, q2)], ro)] += 1
    out = AInfObject(P.left, Q.right, names, idems, _odd(ops), f"{P.label}(x){Q.label}")
    out._pairs = pairs
    if P.truncated_at is not None or Q.truncated_at is not None:
        out.truncated_at = min(t for t in (P.truncated_at, Q.truncated_at) if t is not None)
    return out


def box_chain(*objs, sep="|"):
    out = objs[0]
    for nxt in objs[1:]:
        out = box(out, nxt, sep)
    return out


# ---------------------------------------------------------------------------
# complexes and modulification

def underlying_complex(M: AInfObject) -> ChainComplex:
    """Input-free operations whose D outputs are all idempotents."""
    d = [set() for _ in range(len(M))]
    for (x, lin, rin), outs in M.ops.items():
        if lin or rin:
            continue
        for lo, y, ro in outs:
            if lo is not None and not M.left.alg.is_idem(lo):
                continue
            if ro is not None and not M.right.alg.is_idem(ro):
                continue
            d[x] ^= {y}
    return ChainComplex(M.names, d, check=False)


def modulify_object(M: AInfObject) -> AInfObject:
    out = M
    if out.left is not None and out.left.kind == "D":
        out = box(algebra_bimodule(out.left.alg), out)
    if out.right is not None and out.right.kind == "D":
        out = box(out, algebra_bimodule(out.right.alg))
    return out


def modulify(M: AInfObject) -> ChainComplex:
    """The chain complex A (x) X (x) B of a type D or DD structure."""
    mod = modulify_object(M)
    C = underlying_complex(mod)
    C.check()
    C.module = mod
    return C


def as_complex(M: AInfObject) -> ChainComplex:
    """Underlying complex of a slot-free object (e.g. a full box product)."""
    if M.left is not None or M.right is not None:
        raise SlotMismatch("object still has algebra slots")
    C = underlying_complex(M)
    C.check()
    return C


# ---------------------------------------------------------------------------
# homological perturbation along a retract of the underlying complex

def _is_plain(M, lin, rin, lo, ro):
    if lin or rin:
        return False
    if lo is not None and not M.left.alg.is_idem(lo):
        return False
    if ro is not None and not M.right.alg.is_idem(ro):
        return False
    return True


def transfer_object(M: AInfObject, R, arity_cap: int = 16, strict: bool = False,
                    depth_cap: int = 200):
    """Zigzag transfer g m (T m)* f along the retract R of M's complex.

    Returns ``(N, F)`` where F maps ``(small gen, lin, rin)`` to the set of
    ``(left out, big gen, right out)`` terms of the quasi-isomorphism N -> M.
    """
    if R.big.labels != M.names:
        from .errors import ShapeMismatch
        raise ShapeMismatch("retract does not match the object's generators")
    lD = M.left is not None and M.left.kind == "D"
    rD = M.right is not None and M.right.kind == "D"
    higher = defaultdict(list)
    for (x, lin, rin), outs in M.ops.items():
        for lo, y, ro in outs:
            if not _is_plain(M, lin, rin, lo, ro):
                higher[x].append((lin, rin, lo, y, ro))
    for x in higher:
        higher[x].sort(key=lambda e: (len(e[0]) + len(e[1]), e[0], e[1], _none_key(e[2]), e[3], _none_key(e[4])))

    small = R.small
    ops = defaultdict(Counter)
    Fm = defaultdict(Counter)
    truncated = False

    def walk(j, v, lin_acc, rin_acc, lo_acc, ro_acc, depth):
        nonlocal truncated
        if depth > depth_cap:
            raise ArityCap("zigzag did not terminate; object may be unbounded")
        for lin, rin, lo, y, ro in higher.get(v, ()):
            nl = lin + lin_acc
            nr = rin_acc + rin
            if len(nl) + len(nr) > arity_cap:
                if strict:
                    raise ArityCap(f"transferred operation exceeds arity {arity_cap}")
                truncated = True
                continue
            los = M.left.alg.mul(lo_acc, lo) if lD else (None,)
            if not los:
                continue
            ros = M.right.alg.mul(ro, ro_acc) if rD else (None,)
            if not ros:
                continue
            for a in los:
                for b in ros:
                    for u in R.g[y]:
                        ops[(j, nl, nr)][(a, u, b)] += 1
                    for w in R.T[y]:
                        Fm[(j, nl, nr)][(a, w, b)] += 1
                        walk(j, w, nl, nr, a, b, depth + 1)

    small_idems = [M.idems[s] for s in R.survivors]
    for j in range(len(small)):
        lo0 = M.left.alg.idems[small_idems[j][0]] if lD else None
        ro0 = M.right.alg.idems[small_idems[j][1]] if rD else None
        for u in small.d[j]:
            ops[(j, (), ())][(lo0, u, ro0)] += 1
        for v in sorted(R.f[j]):
            Fm[(j, (), ())][(lo0, v, ro0)] += 1
            walk(j, v, (), (), lo0, ro0, 0)

    N = AInfObject(M.left, M.right, small.labels, small_idems, _odd(ops), f"reduced({M.label})")
    if truncated:
        N.truncated_at = arity_cap
    elif M.truncated_at is not None:
        N.truncated_at = M.truncated_at
    return N, _odd(Fm)


def reduce(M: AInfObject, arity_cap: int = 16, strict: bool = False):
    """Cancel the underlying complex of M and transfer its operations."""
    C = underlying_complex(M)
    C.check()
    R = reduce_retract(C)
    N, F = transfer_object(M, R, arity_cap=arity_cap, strict=strict)
    return N, R, F


# ---------------------------------------------------------------------------
# comparison helpers

def isomorphic_by_names(M: AInfObject, N: AInfObject, mapping=None) -> bool:
    """Equality of operation tables after matching generators by name."""
    if len(M) != len(N) or M.flavor != N.flavor:
        return False
    if mapping is None:
        mapping = {i: N.index(nm) for i, nm in enumerate(M.names) if nm in N._index}
        if len(mapping) != len(M):
            return False
    ops = {}
    for (x, lin, rin), outs in M.ops.items():
        ops[(mapping[x], lin, rin)] = frozenset((lo, mapping[y], ro) for lo, y, ro in outs)
    return ops == N.ops and all(M.idems[i] == N.idems[mapping[i]] for i in mapping)


def find_isomorphism(M: AInfObject, N: AInfObject):
    """Search for a generator bijection carrying M's table onto N's.

    Exhaustive backtracking with idempotent and degree pruning; intended
    for small objects.  Returns the mapping or None.
    """
    if len(M) != len(N) or M.flavor != N.flavor:
        return None

    def signature(X, i):
        outdeg = Counter()
        indeg = Counter()
        for (x, lin, rin), outs in X.ops.items():
            for lo, y, ro in outs:
                if x == i:
                    outdeg[(lin, rin, lo, ro)] += 1
                if y == i:
                    indeg[(lin, rin, lo, ro)] += 1
        return (X.idems[i], tuple(sorted(outdeg.items(), key=repr)), tuple(sorted(indeg.items(), key=repr)))

    sm = [signature(M, i) for i in range(len(M))]
    sn = [signature(N, i) for i in range(len(N))]
    cands = [[j for j in range(len(N)) if sn[j] == sm[i]] for i in range(len(M))]
    order = sorted(range(len(M)), key=lambda i: len(cands[i]))
    mapping = {}
    used = set()

    def consistent(i):
        return True

    def rec(pos):
        if pos == len(order):
            return isomorphic_by_names(M, N, dict(mapping))
        i = order[pos]
        for j in cands[i]:
            if j in used:
                continue
            mapping[i] = j
            used.add(j)
            if consistent(i) and rec(pos + 1):
                return True
            used.discard(j)
            del mapping[i]
        return False

    return dict(mapping) if rec(0) else None


# ---------------------------------------------------------------------------
# the small bar bimodule

def bar_small(A) -> AInfObject:
    """Finite model of the bar resolution on the dual basis of A = A(Z,0).

    For b in I(s) A I(t) the generator ``b*`` sits at the complementary
    idempotents (I(-t), I(-s)).  Besides the dual differential, a chord
    xi contributes ``a(xi) (x) c* (x) 1`` for each c with b in c*a(xi)
    and ``1 (x) c* (x) a(xi)`` for each c with b in a(xi)*c, i.e. the
    usual left and right actions on the linear dual.  Terms whose
    idempotents do not match vanish in the tensor product over the
    idempotent ring and are dropped.
    """
    from .strandalg import chord_elem
    from .pmc import chords

    if A.i != 0:
        raise AlgebraMismatch("the bar model is built for the middle summand A(Z,0)")
    full = frozenset(range(2 * A.pmc.k))
    where = {s: j for j, s in enumerate(A.pair_sets)}
    comp = [where[full - s] for s in A.pair_sets]
    names = [nm + "*" for nm in A.names]
    idems = [(comp[A.right[b]], comp[A.left[b]]) for b in range(A.dim)]
    ops = defaultdict(Counter)
    for c in range(A.dim):
        for b in A.d(c):
            ops[(b, (), ())][(A.idems[idems[b][0]], c, A.idems[idems[b][1]])] += 1
    terms = set()
    for ch in chords(A.pmc):
        terms |= chord_elem(A, ch.p, ch.q)
    for alpha in sorted(terms):
        for c in range(A.dim):
            for b in A.mul(c, alpha):
                if (A.left[alpha], A.right[alpha]) == (idems[b][0], idems[c][0]):
                    ops[(b, (), ())][(alpha, c, A.idems[idems[b][1]])] += 1
            for b in A.mul(alpha, c):
                if (A.left[alpha], A.right[alpha]) == (idems[c][1], idems[b][1]):
                    ops[(b, (), ())][(A.idems[idems[b][0]], c, alpha)] += 1
    return AInfObject(Slot(A, "D"), Slot(A, "D"), names, idems, _odd(ops), "bar")


# ---------------------------------------------------------------------------
# text serialization

def algebra_ref(alg):
    """JSON-able reference to a strand algebra (or its opposite)."""
    key = alg.key
    if key[0] == "op":
        return {"opposite": algebra_ref(alg.opposite())}
    if key[0] != "A":
        raise ShapeMismatch(f"algebra {key!r} has no text form")
    _, matching, i = key
    from .pmc import TORUS
    if matching == TORUS and i == 0:
        return "torus"
    k = len(matching) // 2
    return {"pmc": {"k": k, "matching": [list(p) for p in matching]}, "i": i}


def resolve_algebra(ref):
    """Inverse of ``algebra_ref``; also accepts ``{"pmc": "<name>", "i": n}``."""
    from .pmc import pmc_new, pmc_standard
    from .strandalg import algebra
    if isinstance(ref, str):
        if ref == "torus":
            return algebra(pmc_standard("torus"), 0)
        raise ShapeMismatch(f"unknown algebra name {ref!r}")
    if not isinstance(ref, dict):
        raise ShapeMismatch("algebra must be a name or an object")
    if "opposite" in ref:
        return resolve_algebra(ref["opposite"]).opposite()
    Z = ref.get("pmc")
    if isinstance(Z, str):
        Z = pmc_standard(Z)
    elif isinstance(Z, dict):
        Z = pmc_new(int(Z["k"]), Z["matching"])
    else:
        raise ShapeMismatch("algebra object needs a 'pmc' field")
    return algebra(Z, int(ref.get("i", 0)))


def _slot_list(M):
    out = []
    for side, slot in (("left", M.left), ("right", M.right)):
        if slot is not None:
            out.append((side, slot))
    return out


def to_data(M: AInfObject) -> dict:
    """Plain-data form of an object: algebra, slots, generators, delta/ops."""
    slots = _slot_list(M)
    if not slots:
        raise ShapeMismatch("an object without slots is a chain complex")
    first = slots[0][1].alg
    data = {"algebra": algebra_ref(first), "slots": []}
    for side, slot in slots:
        entry = {"side": side, "kind": slot.kind}
        if not _same_alg(slot.alg, first):
            entry["algebra"] = algebra_ref(slot.alg)
        data["slots"].append(entry)
    gens = []
    for g, nm in enumerate(M.names):
        idem = []
        for side, slot in slots:
            pos = M.idems[g][0 if side == "left" else 1]
            idem.append(slot.alg.idem_names[pos])
        gens.append({"name": nm, "idem": idem})
    data["generators"] = gens

    def alg_name(slot, a):
        return None if a is None else slot.alg.names[a]

    plain = all(not lin and not rin for (_, lin, rin) in M.ops) and all(s.kind == "D" for _, s in slots)
    rows = []
    for x, lin, rin, lo, y, ro in M.entries():
        if plain:
            row = [M.names[x]]
            if M.left is not None:
                row.append(alg_name(M.left, lo))
            row.append(M.names[y])
            if M.right is not None:
                row.append(alg_name(M.right, ro))
        else:
            row = [M.names[x],
                   [M.left.alg.names[a] for a in lin] if M.left else [],
                   [M.right.alg.names[b] for b in rin] if M.right else [],
                   alg_name(M.left, lo) if M.left else None,
                   M.names[y],
                   alg_name(M.right, ro) if M.right else None]
        rows.append(row)
    data["delta" if plain else "ops"] = rows
    if M.truncated_at is not None:
        data["truncated_at"] = M.truncated_at
    if M.label:
        data["label"] = M.label
    return data


def from_data(data: dict) -> AInfObject:
    try:
        base = resolve_algebra(data["algebra"])
        left = right = None
        for entry in data["slots"]:
            alg = resolve_algebra(entry["algebra"]) if "algebra" in entry else base
            kind = entry["kind"]
            if kind not in ("A", "D"):
                raise ShapeMismatch(f"slot kind must be A or D, not {kind!r}")
            if entry["side"] == "left":
                left = Slot(alg, kind)
            elif entry["side"] == "right":
                right = Slot(alg, kind)
            else:
                raise ShapeMismatch(f"bad slot side {entry['side']!r}")
        sides = [s for s, slot in (("left", left), ("right", right)) if slot is not None]
        names, idems = [], []
        for g in data["generators"]:
            names.append(g["name"])
            pair = [None, None]
            if len(g["idem"]) != len(sides):
                raise ShapeMismatch(f"generator {g['name']!r} needs one idempotent per slot")
            for side, nm in zip(sides, g["idem"]):
                slot = left if side == "left" else right
                pair[0 if side == "left" else 1] = _idem_pos(slot.alg, nm)
            idems.append(tuple(pair))
        pos = {nm: j for j, nm in enumerate(names)}

        def idx(slot, nm):
            return None if nm is None else slot.alg.index(nm)

        ops = defaultdict(Counter)
        if "delta" in data:
            for row in data["delta"]:
                row = list(row)
                x = pos[row.pop(0)]
                lo = idx(left, row.pop(0)) if left is not None else None
                y = pos[row.pop(0)]
                ro = idx(right, row.pop(0)) if right is not None else None
                if row:
                    raise ShapeMismatch("delta row has extra fields")
                ops[(x, (), ())][(lo, y, ro)] += 1
        for row in data.get("ops", []):
            x, lin, rin, lo, y, ro = row
            key = (pos[x],
                   tuple(left.alg.index(a) for a in lin),
                   tuple(right.alg.index(b) for b in rin))
            ops[key][(idx(left, lo) if left else None, pos[y], idx(right, ro) if right else None)] += 1
    except (KeyError, ValueError, TypeError) as exc:
        raise ShapeMismatch(f"malformed module description: {exc!r}") from None
    M = AInfObject(left, right, names, idems, _odd(ops), data.get("label", ""))
    M.truncated_at = data.get("truncated_at")
    return M


def to_json(M: AInfObject) -> str:
    """Serialized object, one generator or operation per line."""
    data = to_data(M)
    lines = []
    for key, val in data.items():
        if isinstance(val, list) and val:
            body = ",\n".join("  " + json.dumps(v) for v in val)
            lines.append(f" {json.dumps(key)}: [\n{body}\n ]")
        else:
            lines.append(f" {json.dumps(key)}: {json.dumps(val)}")
    return "{\n" + ",\n".join(lines) + "\n}\n"


def from_json(text: str) -> AInfObject:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ShapeMismatch(f"not JSON: {exc}") from None
    return from_data(data)
