from __future__ import annotations

import json
import subprocess
import sys

import pytest

from strandhf import cli
from strandhf.errors import SizeLimit
from strandhf.modcat import from_json, to_json, type_d
from strandhf.zoo import torus_algebra


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_ext_rank_line(capsys):
    code, out, _ = run(capsys, "ext", "--from", "cfd.zero", "--to", "cfd.inf")
    assert code == 0
    assert out.splitlines()[0] == "Ext rank: 1"


def test_ext_json(capsys):
    code, out, _ = run(capsys, "--format", "json", "ext", "--from", "cfd.zero", "--to", "cfd.trefoil-2")
    data = json.loads(out)
    assert data["rank"] == 2 and data["mor_generators"] == 12


def test_poincare(capsys):
    code, out, _ = run(capsys, "poincare", "--pmc", "antipodal2")
    assert out == "T^-2 + 32*T^-1 + 70 + 32*T + T^2\n"
    code, out2, _ = run(capsys, "poincare", "--pmc", "antipodal2", "--threads", "2")
    assert out2 == out


def test_algebra(capsys):
    code, out, _ = run(capsys, "algebra", "--pmc", "split(2)", "--i", "-1")
    assert code == 0
    assert "dimension           32" in out
    code, out, _ = run(capsys, "algebra", "--pmc", "torus", "--tables", "--format", "json")
    data = json.loads(out)
    assert data["dimension"] == 8 and "rho1 * rho2 = rho12" in data["products"]


def test_hh(capsys):
    code, out, _ = run(capsys, "hh", "--pmc", "torus")
    assert code == 0 and out.startswith("HH rank: 4\nMor complex: 18 generators")


def test_koszul_and_serre(capsys):
    code, out, _ = run(capsys, "koszul-check", "--in", "dd.id(torus)", "--format", "json")
    assert code == 0 and json.loads(out)["ok"] is True
    code, out, _ = run(capsys, "koszul-check", "--in", "dd.halfid.torus")
    assert code == 0
    code, out, _ = run(capsys, "serre", "--from", "cfd.inf", "--to", "cfd.zero", "--format", "json")
    assert code == 0 and json.loads(out) == {"ext": 1, "ext_serre": 1, "from": "cfd.inf",
                                              "ok": True, "to": "cfd.zero"}


def test_check_broken_delta(capsys, tmp_path):
    A = torus_algebra()
    bad = type_d(A, [("t", "i0"), ("s", "i1")], [("t", "rho1", "s"), ("s", "rho2", "t")])
    path = tmp_path / "bad.json"
    path.write_text(to_json(bad))
    code, out, _ = run(capsys, "check", "--in", str(path))
    assert code == 1
    assert "(t) -> rho12 (x) t" in out
    code, out, _ = run(capsys, "check", "--in", "cfd.trefoil-2")
    assert code == 0


def test_parse_failure_is_structured(capsys, tmp_path):
    path = tmp_path / "junk.json"
    path.write_text("{not json")
    code, out, err = run(capsys, "check", "--in", str(path))
    assert code == 1
    assert json.loads(err)["error"] == "ShapeMismatch"
    code, out, err = run(capsys, "ext", "--from", "nowhere", "--to", "cfd.inf")
    assert code == 1 and json.loads(err)["error"] == "UnknownName"


def test_size_limit_exit_code(capsys, monkeypatch):
    def boom(*a, **k):
        raise SizeLimit("too big")
    monkeypatch.setattr(cli, "algebra", boom)
    code, _, err = run(capsys, "algebra", "--pmc", "torus")
    assert code == 2 and json.loads(err) == {"error": "SizeLimit", "message": "too big"}


def test_reduce_emits_module(capsys):
    code, out, _ = run(capsys, "reduce", "--in", "cfd.zero", "--bound", "5")
    N = from_json(out)
    assert len(N) == 1 and N.truncated_at == 5
    # operations with at most five algebra inputs: rho2 rho12^j rho1, j = 0..3
    assert len(N.ops) == 4


def test_box_and_homology(capsys, tmp_path):
    code, out, _ = run(capsys, "box", "--left", "dd.id(torus)", "--right", "cfd.inf")
    assert code == 1  # two D slots cannot be paired
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"generators": ["a", "b", "c"], "differential": [["a", "b"]]}))
    code, out, _ = run(capsys, "homology", "--in", str(path))
    assert code == 0 and out == "rank: 1\n  [c]\n"
    code, out, _ = run(capsys, "homology", "--in", "cfd.zero")
    assert out == "rank: 1\n  [rho2|t]\n"


def test_box_da_with_d(capsys, tmp_path):
    from strandhf.modcat import identity_da
    path = tmp_path / "id.json"
    path.write_text(to_json(identity_da(torus_algebra())))
    code, out, _ = run(capsys, "box", "--left", str(path), "--right", "cfd.trefoil-2")
    assert code == 0 and len(from_json(out)) == 5


def test_named_bar(capsys):
    code, out, _ = run(capsys, "check", "--in", "bar(torus,0)")
    assert code == 0


def test_repro(capsys):
    code, out, _ = run(capsys, "repro")
    assert code == 0 and "MISMATCH" not in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "strandhf", "ext", "--from", "cfd.inf", "--to", "cfd.inf"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("Ext rank: 2")


def test_output_is_deterministic(capsys):
    outs = set()
    for threads in ("1", "2", "3"):
        _, out, _ = run(capsys, "poincare", "--pmc", "split(2)", "--threads", threads, "--format", "json")
        outs.add(out)
    assert len(outs) == 1
