from __future__ import annotations

import json

import pytest

from fusionmetric.exceptions import FusionAxiomError
from fusionmetric.fusion_ring import verify_axioms
from fusionmetric.rings import PRESETS, build_ring, group_ring, rep_ring


def test_s3_rep_ring_from_character_table():
    r = rep_ring([[1, 1, 1], [1, 1, -1], [2, -1, 0]], [1, 2, 3], names=["triv", "sgn", "std"])
    std = r.label("std")
    assert {r.name(c): n for c, n in r.fuse(std, std).items()} == {"triv": 1, "sgn": 1, "std": 1}
    assert r.dim(std) == 2
    assert verify_axioms(r, r.basis).passed


def test_rep_ring_complex_characters():
    # Z_3 with omega = exp(2 pi i / 3) given as floats
    w = complex(-0.5, 3 ** 0.5 / 2)
    r = rep_ring([[1, 1, 1], [1, w, w.conjugate()], [1, w.conjugate(), w]], [1, 1, 1])
    assert r.conj(1) == 2
    assert dict(r.fuse(1, 1)) == {2: 1}


def test_rep_ring_exact_gaussian_rationals():
    r = rep_ring([[1, 1], [1, "-1"]], [1, 1], names=["a", "b"])
    assert dict(r.fuse(1, 1)) == {0: 1}


def test_rep_ring_rejects_non_integral_table():
    with pytest.raises(FusionAxiomError):
        rep_ring([[1, 1], [1, 0.5]], [1, 1])


def test_group_ring_from_table():
    r = group_ring([[0, 1], [1, 0]], names=["e", "s"])
    s = r.label("s")
    assert r.fuse(s, s) == {r.unit: 1}
    assert r.conj(s) == s and r.dim(s) == 1


def test_group_ring_rejects_non_group():
    with pytest.raises(ValueError):
        group_ring([[0, 1], [1, 1]])


@pytest.mark.parametrize("spec", list(PRESETS) + ["z5", "cyclic:4", "free:3", "zk:3", "rep:d4", "group:q8"])
def test_build_ring_specs(spec):
    r = build_ring(spec)
    assert r.dim(r.unit) == 1


def test_build_ring_from_file(tmp_path):
    path = tmp_path / "ring.json"
    path.write_text(build_ring("q8").to_json())
    r = build_ring(f"file:{path}")
    assert sorted(r.name(a) for a in r.basis) == sorted(json.loads(path.read_text())["basis"])
    assert build_ring(str(path)).name_ == r.name_


def test_build_ring_unknown():
    with pytest.raises(ValueError):
        build_ring("sl3")


def test_free_abelian_names():
    r = build_ring("zk:2")
    assert r.label("(2,1)") == (2, 1)
    assert r.label("e1") == (1, 0) and r.label("-e2") == (0, -1)
    assert r.fuse((1, 2), (0, -2)) == {(1, 0): 1}


def test_o2plus_and_s4plus_rules():
    o = build_ring("o2plus")
    assert dict(o.fuse(1, 1)) == {0: 1, 2: 1}
    s = build_ring("s4plus")
    assert dict(s.fuse(1, 1)) == {0: 1, 1: 1, 2: 1}
    assert s.dim(2) == 5
