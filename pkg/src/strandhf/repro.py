"""Recompute the worked examples and report expected against computed values."""
from __future__ import annotations

from .f2chain import homology_rank
from .modcat import (algebra_bimodule, bar_small, box, find_isomorphism, identity_da,
                     modulify, modulify_object, reduce)
from .pairing import (ext_ainf, ext_typeD, hochschild_cohomology, koszul_check, mor,
                      quasi_inverse, serre_check)
from .pmc import pmc_standard
from .strandalg import algebra, poincare
from .zoo import (cfd_solid_torus, cfd_trefoil_m2, dd_half_identity_torus, dd_identity,
                  torus_algebra)

SOLID = {"inf": "infty", "0": "zero"}


def solid(name):
    return cfd_solid_torus(SOLID[name])


def transfer_family(N, limit=8):
    """Input words of the nonzero operations of arity at most ``limit``."""
    alg = N.left.alg
    words = []
    for (x, lin, rin), outs in N.ops.items():
        if 0 < len(lin) + 1 <= limit:
            words.append(tuple(alg.names[a] for a in lin))
    return sorted(words, key=lambda w: (len(w), w))


def expected_family(limit=8):
    return [("rho2",) + ("rho12",) * j + ("rho1",) for j in range(limit - 2)]


def higher_terms(N):
    """``f(a1, ..., an) -> b`` for the DA operations with two or more inputs."""
    out = []
    for x, lin, rin, lo, y, ro in N.entries():
        if len(rin) >= 2:
            ins = ", ".join(N.right.alg.names[b] for b in rin)
            out.append(f"f({ins}) -> {N.left.alg.names[lo]}")
    return out


def rows(full: bool = False):
    """List of (item, expected, computed) triples; values are strings."""
    out = []
    A = torus_algebra()
    out.append(("dim A(T^2,0)", "8", str(A.dim)))
    names = ["split(2)", "antipodal(2)"] + (["genus3_Z1", "genus3_Z2"] if full else [])
    polys = {
        "split(2)": "T^-2 + 32*T^-1 + 98 + 32*T + T^2",
        "antipodal(2)": "T^-2 + 32*T^-1 + 70 + 32*T + T^2",
        "genus3_Z1": "T^-3 + 72*T^-2 + 600*T^-1 + 1224 + 616*T + 72*T^2 + T^3",
        "genus3_Z2": "T^-3 + 72*T^-2 + 616*T^-1 + 1224 + 600*T + 72*T^2 + T^3",
    }
    for nm in names:
        Z = pmc_standard(nm)
        out.append((f"dim A({nm},-k+1)", str(8 * Z.k ** 2), str(algebra(Z, -Z.k + 1).dim)))
        out.append((f"Poincare {nm}", polys[nm], poincare(Z)))
    for a, b, want in (("inf", "inf", 2), ("0", "inf", 1), ("0", "0", 2), ("inf", "0", 1)):
        out.append((f"Ext({a},{b})", str(want), str(ext_typeD(solid(a), solid(b)).rank)))
    C = mor(solid("0"), solid("inf"))
    out.append(("Mor(0,inf) generators/arrows", "3/2", f"{len(C)}/{len(C.arrows())}"))
    N, _, _ = reduce(modulify_object(solid("0")), arity_cap=8)
    fam = transfer_family(N)
    out.append(("transfer of CFD(H_0): homology", "1", str(len(N))))
    out.append(("transfer of CFD(H_0): m_k up to arity 8", "rho2 rho12^j rho1, j=0..5",
                "rho2 rho12^j rho1, j=0..5" if fam == expected_family() else repr(fam)))
    M = modulify(dd_identity())
    out.append(("CFDD(Id) modulified generators/homology", "34/16", f"{len(M)}/{homology_rank(M)}"))
    hh = hochschild_cohomology(A)
    out.append(("HH generators/rank", "18/4", f"{len(hh.complex)}/{hh.rank}"))
    out.append(("Ext(H_0, trefoil -2)", "2", str(ext_typeD(solid("0"), cfd_trefoil_m2()).rank)))
    for nm, K in (("CFDD(Id) torus", dd_identity()),
                  ("CFDD(Id) split(2)", dd_identity(pmc_standard("split(2)"))),
                  ("half identity", dd_half_identity_torus())):
        rep = koszul_check(K)
        out.append((f"Koszul check {nm}", "ok", "ok" if rep.ok else rep.message))
    red, _, _ = reduce(box(bar_small(A), algebra_bimodule(A)))
    iso = find_isomorphism(red, identity_da(A)) is not None
    out.append(("bar (x) A ~ [Id]", "yes", "yes" if iso else "no"))
    agree = all(
        ext_ainf(reduce(modulify_object(solid(a)))[0], reduce(modulify_object(solid(b)))[0])
        == ext_typeD(solid(a), solid(b)).rank
        for a in SOLID for b in SOLID)
    out.append(("ext_ainf = ext_typeD on solid tori", "yes", "yes" if agree else "no"))
    serre = all(serre_check(solid(a), solid(b))[0] for a in SOLID for b in SOLID)
    out.append(("Serre property on solid tori", "yes", "yes" if serre else "no"))
    f, _, _ = reduce(box(dd_identity(), quasi_inverse(dd_half_identity_torus())))
    out.append(("automorphism: generators", "2", str(len(f))))
    out.append(("automorphism: higher terms", "f(rho3, rho2, rho1) -> rho123",
                "; ".join(higher_terms(f)) or "none"))
    return out


def render(table) -> str:
    w0 = max(len(r[0]) for r in table)
    w1 = max(len(r[1]) for r in table)
    lines = []
    for item, want, got in table:
        mark = "ok" if want == got else "MISMATCH"
        lines.append(f"{item:<{w0}}  {want:<{w1}}  {got}  [{mark}]")
    return "\n".join(lines)
