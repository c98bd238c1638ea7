from __future__ import annotations

import json
import random

import pytest

from strandhf.errors import DisconnectedSurgery, MalformedMatching, UnknownName
from strandhf.pmc import (chords, load_pmc, pmc_from_json, pmc_new, pmc_reverse,
                          pmc_standard, surgery_components, table_dual)

from .oracles import surgery_components_walk

ZOO = ["torus", "split(2)", "antipodal(2)", "split(3)", "antipodal(3)", "genus3_Z1", "genus3_Z2"]


def test_torus_is_valid():
    Z = pmc_new(1, [[1, 3], [2, 4]])
    assert Z.k == 1 and Z.matching == ((1, 3), (2, 4))


def test_disconnected_torus_matching():
    assert surgery_components_walk(1, [(1, 2), (3, 4)]) > 1
    with pytest.raises(DisconnectedSurgery):
        pmc_new(1, [[1, 2], [3, 4]])


@pytest.mark.parametrize("matching", [
    [[1, 3], [2, 4], [1, 4]],
    [[1, 3], [2, 2]],
    [[1, 3]],
    [[1, 3, 4], [2, 5]],
])
def test_malformed(matching):
    with pytest.raises(MalformedMatching):
        pmc_new(1, matching)


def test_genus3_circles():
    Z1 = pmc_new(3, [[1, 7], [2, 9], [3, 5], [4, 6], [8, 11], [10, 12]])
    assert Z1 == pmc_standard("genus3_Z1")
    assert pmc_standard("genus3_Z2").matching == ((1, 10), (2, 4), (3, 12), (5, 11), (6, 8), (7, 9))
    assert table_dual(Z1) == pmc_standard("genus3_Z2")
    assert table_dual(pmc_standard("split(2)")) is None


def test_standard_conventions():
    assert pmc_standard("split(2)").matching == ((1, 3), (2, 4), (5, 7), (6, 8))
    assert pmc_standard("antipodal(2)").matching == ((1, 5), (2, 6), (3, 7), (4, 8))
    assert pmc_standard("split2") == pmc_standard("split(2)")
    assert pmc_standard("genus3_Z2_as_dual") == pmc_standard("genus3_Z2")
    with pytest.raises(UnknownName):
        pmc_standard("klein")


@pytest.mark.parametrize("name", ZOO)
def test_reverse_is_involution(name):
    Z = pmc_standard(name)
    assert pmc_reverse(pmc_reverse(Z)) == Z


def test_reverse_examples():
    assert pmc_reverse(pmc_standard("torus")) == pmc_standard("torus")
    Z1 = pmc_standard("genus3_Z1")
    want = sorted(tuple(sorted((13 - a, 13 - b))) for a, b in Z1.matching)
    assert list(pmc_reverse(Z1).matching) == want


def test_chords():
    names = [(c.p, c.q) for c in chords(pmc_standard("torus"))]
    assert sorted(names) == [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
    for k in (1, 2, 3):
        Z = pmc_standard(f"split({k})")
        cs = chords(Z)
        assert len(cs) == (4 * k) * (4 * k - 1) // 2
        assert all(c.p < c.q for c in cs)
        assert [(c.p, c.q) for c in cs] == sorted((c.p, c.q) for c in cs)


def test_surgery_matches_walk_oracle():
    rng = random.Random(7)
    valid = 0
    for _ in range(400):
        k = rng.randint(1, 3)
        pts = list(range(1, 4 * k + 1))
        rng.shuffle(pts)
        pairs = [tuple(pts[i:i + 2]) for i in range(0, len(pts), 2)]
        want = surgery_components_walk(k, pairs)
        assert surgery_components(k, pairs) == want
        if want == 1:
            valid += 1
            pmc_new(k, pairs)
        else:
            with pytest.raises(DisconnectedSurgery):
                pmc_new(k, pairs)
    assert valid > 20


def test_json_round_trip(tmp_path):
    Z = pmc_standard("genus3_Z1")
    assert pmc_from_json(Z.to_json()) == Z
    path = tmp_path / "z.json"
    path.write_text(json.dumps({"k": 1, "matching": [[2, 4], [1, 3]]}))
    assert load_pmc(str(path)) == pmc_standard("torus")
    with pytest.raises(UnknownName):
        load_pmc(str(tmp_path / "missing.json"))
