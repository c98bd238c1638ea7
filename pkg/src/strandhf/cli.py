"""Command-line front end: ``strandhf <command> ...``."""
from __future__ import annotations

import argparse
import json
import re
import sys

from . import modcat, pairing, repro, zoo
from .errors import SizeLimit, StrandError, UnknownName
from .f2chain import ChainComplex, canonical_homology
from .pmc import load_pmc
from .strandalg import algebra, algebra_homology, format_laurent

NAMED = {
    "cfd.inf": lambda: zoo.cfd_solid_torus("infty"),
    "cfd.zero": lambda: zoo.cfd_solid_torus("zero"),
    "cfd.trefoil-2": zoo.cfd_trefoil_m2,
    "dd.halfid.torus": zoo.dd_half_identity_torus,
}


def load_object(ref: str):
    """A named module/bimodule, or a module file."""
    ref = ref.strip()
    if ref in NAMED:
        return NAMED[ref]()
    m = re.fullmatch(r"dd\.id\((.+)\)", ref)
    if m:
        return zoo.dd_identity(load_pmc(m.group(1)))
    m = re.fullmatch(r"bar\((.+),\s*(-?\d+)\)", ref)
    if m:
        return modcat.bar_small(algebra(load_pmc(m.group(1)), int(m.group(2))))
    try:
        with open(ref) as fh:
            text = fh.read()
    except OSError:
        raise UnknownName(ref) from None
    return modcat.from_json(text)


def complex_of(M) -> ChainComplex:
    """Chain complex of an object: modulified along D slots, else m_1."""
    if any(s is not None and s.kind == "D" for s in (M.left, M.right)):
        return modcat.modulify(M)
    return modcat.underlying_complex(M)


def load_complex(ref: str) -> ChainComplex:
    """A complex file ``{"generators": [...], "differential": [[a, b], ...]}``.

    A module file or a named object is accepted too.
    """
    try:
        with open(ref) as fh:
            data = json.loads(fh.read())
    except OSError:
        return complex_of(load_object(ref))
    except json.JSONDecodeError as exc:
        raise modcat.ShapeMismatch(f"not JSON: {exc}") from None
    if "slots" in data:
        return complex_of(modcat.from_data(data))
    try:
        names = list(data["generators"])
        pos = {nm: j for j, nm in enumerate(names)}
        d = [set() for _ in names]
        for a, b in data.get("differential", []):
            d[pos[a]] ^= {pos[b]}
    except (KeyError, TypeError, ValueError) as exc:
        raise modcat.ShapeMismatch(f"malformed complex description: {exc!r}") from None
    return ChainComplex(names, d)


def _table(pairs) -> str:
    width = max(len(k) for k, _ in pairs)
    return "\n".join(f"{k:<{width}}  {v}" for k, v in pairs)


def emit(args, report: dict, human: str):
    if args.format == "json":
        print(json.dumps(report, indent=1, sort_keys=True))
    else:
        print(human)


# ---------------------------------------------------------------------------
# commands

def cmd_algebra(args):
    Z = load_pmc(args.pmc)
    A = algebra(Z, args.i)
    report = {"pmc": [list(p) for p in Z.matching], "i": args.i,
              "dimension": A.dim, "homology": A.homology_dim()}
    lines = [("dimension", str(A.dim)), ("homology dimension", str(report["homology"]))]
    human = _table(lines)
    if args.tables:
        prods, diffs = [], []
        for a in range(A.dim):
            if A.d(a):
                diffs.append(f"d({A.names[a]}) = {A.fmt(A.d(a))}")
            for b in range(A.dim):
                if A.right[a] == A.left[b] and not A.is_idem(a) and not A.is_idem(b):
                    p = A.mul(a, b)
                    if p:
                        prods.append(f"{A.names[a]} * {A.names[b]} = {A.fmt(p)}")
        report["products"] = prods
        report["differential"] = diffs
        human += "\n\nproducts:\n" + "\n".join(prods) + "\n\ndifferential:\n" + ("\n".join(diffs) or "0")
    emit(args, report, human)
    return 0


def cmd_poincare(args):
    Z = load_pmc(args.pmc)
    dims = algebra_homology(Z, threads=args.threads)
    poly = format_laurent(dims)
    emit(args, {"pmc": [list(p) for p in Z.matching], "poincare": poly,
                "dims": {str(i): c for i, c in sorted(dims.items())}}, poly)
    return 0


def cmd_ext(args):
    M, N = load_object(args.source), load_object(args.target)
    res = pairing.ext_typeD(M, N)
    reps = [" + ".join(r) for r in res.labelled()]
    report = {"from": args.source, "to": args.target, "rank": res.rank,
              "mor_generators": len(res.complex), "representatives": reps}
    human = f"Ext rank: {res.rank}\nMor complex: {len(res.complex)} generators\n"
    human += "\n".join(f"  [{r}]" for r in reps)
    emit(args, report, human.rstrip())
    return 0


def cmd_hh(args):
    Z = load_pmc(args.pmc)
    A = algebra(Z, args.i)
    hh = pairing.hochschild_cohomology(A)
    C = hh.complex
    reps = [C.fmt(r) for r in hh.reps]
    table = {f"{i},{j}": v for (i, j), v in sorted(hh.table.items())}
    report = {"rank": hh.rank, "generators": len(C) if C else 0,
              "representatives": reps, "products": table}
    lines = [f"HH rank: {hh.rank}", f"Mor complex: {report['generators']} generators"]
    lines += [f"  c{j} = [{r}]" for j, r in enumerate(reps)]
    for (i, j), v in sorted(hh.table.items()):
        lines.append(f"  c{j} o c{i} = " + (" + ".join(f"c{k}" for k in v) or "0"))
    emit(args, report, "\n".join(lines))
    return 0


def cmd_koszul(args):
    rep = pairing.koszul_check(load_object(args.source))
    human = _table([("rank one", str(rep.rank_one)), ("augmented", str(rep.augmented)),
                    ("resolution", f"{rep.resolution} {rep.dims}"), ("ok", str(rep.ok))])
    if rep.message:
        human += f"\n{rep.message}"
    emit(args, rep.as_dict(), human)
    return 0 if rep.ok else 1


def cmd_serre(args):
    M, N = load_object(args.source), load_object(args.target)
    ok, lhs, rhs = pairing.serre_check(M, N)
    report = {"from": args.source, "to": args.target, "ext": lhs, "ext_serre": rhs, "ok": ok}
    human = _table([("dim Ext(M,N)", str(lhs)), ("dim Ext(N,S(M))", str(rhs)), ("ok", str(ok))])
    emit(args, report, human)
    return 0 if ok else 1


def cmd_reduce(args):
    M = load_object(args.source)
    if any(s is not None and s.kind == "D" for s in (M.left, M.right)) and (M.left is None or M.right is None):
        M = modcat.modulify_object(M)
    N, _, _ = modcat.reduce(M, arity_cap=args.bound)
    sys.stdout.write(modcat.to_json(N))
    return 0


def cmd_box(args):
    P, Q = load_object(args.left), load_object(args.right)
    X = modcat.box(P, Q)
    if X.left is None and X.right is None:
        C = modcat.underlying_complex(X)
        reps = [C.fmt(r) for r in canonical_homology(C)]
        emit(args, {"generators": len(C), "rank": len(reps), "representatives": reps},
             f"complex with {len(C)} generators\nhomology rank: {len(reps)}")
        return 0
    sys.stdout.write(modcat.to_json(X))
    return 0


def cmd_check(args):
    M = load_object(args.source)
    rep = modcat.check_structure(M)
    report = {"ok": rep.ok, "message": rep.message,
              "failing_terms": [M.describe_term(t) for t in rep.terms[:20]]}
    human = "structure equation holds" if rep.ok else rep.message
    emit(args, report, human)
    return 0 if rep.ok else 1


def cmd_homology(args):
    C = load_complex(args.source)
    reps = [C.fmt(r) for r in canonical_homology(C)]
    human = f"rank: {len(reps)}\n" + "\n".join(f"  [{r}]" for r in reps)
    emit(args, {"rank": len(reps), "representatives": reps}, human.rstrip())
    return 0


def cmd_repro(args):
    table = repro.rows(full=args.full)
    ok = all(w == g for _, w, g in table)
    report = {"ok": ok, "rows": [{"item": i, "expected": w, "computed": g} for i, w, g in table]}
    emit(args, report, repro.render(table))
    return 0 if ok else 1


def build_parser():
    p = argparse.ArgumentParser(prog="strandhf", description="Bordered Floer algebra over F2.")
    p.add_argument("--format", choices=("table", "json"), default="table")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--format", choices=("table", "json"), default=argparse.SUPPRESS)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("algebra", cmd_algebra, "dimension and homology of A(Z,i)")
    sp.add_argument("--pmc", required=True)
    sp.add_argument("--i", type=int, default=0)
    sp.add_argument("--tables", action="store_true", help="print products and differential")
    sp = add("poincare", cmd_poincare, "sum of dim H(A(Z,i)) T^i")
    sp.add_argument("--pmc", required=True)
    sp.add_argument("--threads", type=int, default=1)
    for name, fn, text in (("ext", cmd_ext, "Ext between type D structures"),
                           ("serre", cmd_serre, "compare Ext(M,N) with Ext(N,S(M))")):
        sp = add(name, fn, text)
        sp.add_argument("--from", dest="source", required=True)
        sp.add_argument("--to", dest="target", required=True)
    sp = add("hh", cmd_hh, "Hochschild cohomology of A(Z,0)")
    sp.add_argument("--pmc", default="torus")
    sp.add_argument("--i", type=int, default=0)
    sp = add("koszul-check", cmd_koszul, "test a DD bimodule for Koszul dualizing")
    sp.add_argument("--in", dest="source", required=True)
    sp = add("reduce", cmd_reduce, "transfer to homology (modulifies type D input)")
    sp.add_argument("--in", dest="source", required=True)
    sp.add_argument("--bound", type=int, default=16, help="maximum number of algebra inputs of a transferred operation")
    sp = add("box", cmd_box, "box tensor product")
    sp.add_argument("--left", required=True)
    sp.add_argument("--right", required=True)
    sp = add("check", cmd_check, "check the structure equation")
    sp.add_argument("--in", dest="source", required=True)
    sp = add("homology", cmd_homology, "homology of a complex file")
    sp.add_argument("--in", dest="source", required=True)
    sp = add("repro", cmd_repro, "recompute the worked examples")
    sp.add_argument("--full", action="store_true", help="include the genus-3 polynomials")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SizeLimit as exc:
        print(json.dumps({"error": "SizeLimit", "message": str(exc)}), file=sys.stderr)
        return 2
    except (StrandError, ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
