from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fusionmetric.exceptions import FusionAxiomError, MaterializationError, UnknownLabelError
from fusionmetric.fusion_ring import (
    FusionRing,
    FusionElement,
    explicit_ring,
    inner_product,
    involute,
    load_ring,
    multiply,
    save_ring,
    trace,
    verify_axioms,
)
from fusionmetric.rings import build_ring, cyclic_group_ring, free_group_ring, su2

import oracles


def test_su2_small_products():
    r = su2()
    assert r.fuse(2, 3) == {1: 1, 3: 1, 5: 1}
    assert r.fuse(0, 7) == {7: 1}
    assert r.N(2, 3, 3) == 1 and r.N(2, 3, 2) == 0


@pytest.mark.parametrize("spec, oracle", [("su2", oracles.su2_fuse), ("so3", oracles.so3_fuse)])
def test_fusion_matches_laurent_oracle(spec, oracle):
    r = build_ring(spec)
    for k in range(12):
        for n in range(12):
            assert dict(r.fuse(k, n)) == oracle(k, n)


def test_recursive_and_laurent_oracles_agree():
    for k in range(8):
        for n in range(8):
            assert oracles.su2_recursive(k, n) == oracles.su2_fuse(k, n)


@pytest.mark.parametrize("spec", ["su2", "so3", "o2plus", "s4plus", "z4", "f2", "free:3", "zk:2", "s3", "d4", "q8",
                                  "group:s3"])
def test_axioms_hold_on_presets(spec):
    r = build_ring(spec)
    window = list(r.basis) if r.is_finite else r.enumerate_labels(12)
    rep = verify_axioms(r, window)
    assert rep.passed, rep.failures()


def test_element_algebra():
    r = su2()
    x = r.element({1: 2.0, 2: 1j})
    y = r[1]
    z = x * y
    assert z.coeffs == {0: 2.0, 2: 2.0, 1: 1j, 3: 1j}
    assert multiply(x, y).coeffs == z.coeffs
    assert involute(x).coeffs == {1: 2.0, 2: -1j}
    assert trace(r.one()) == 1 and trace(x) == 0
    assert inner_product(x, x) == pytest.approx(5.0)
    assert (x - x).coeffs == {}
    assert (3 * y).coeffs == {1: 3}


def test_free_group_is_noncommutative():
    f = free_group_ring(2)
    a, b = f.label("a"), f.label("b")
    assert f.fuse(a, b) == {f.label("ab"): 1}
    assert f.fuse(b, a) == {f.label("ba"): 1}
    assert f.fuse(a, f.label("A")) == {f.unit: 1}
    assert f.name(f.conj(f.label("ab"))) == "BA"


def test_cyclic_names():
    r = cyclic_group_ring(3)
    assert [r.name(a) for a in r.basis] == ["e", "g", "g2"]
    assert r.fuse(r.label("g"), r.label("g2")) == {r.unit: 1}


def test_unknown_label():
    r = su2()
    with pytest.raises(UnknownLabelError):
        r.label("v3")
    with pytest.raises(UnknownLabelError):
        r.fuse(-1, 2)


def test_fuse_budget():
    r = FusionRing("tiny", 0, oracles.su2_fuse, lambda a: a, lambda a: a + 1,
                   contains=lambda a: isinstance(a, int) and a >= 0, budget=3)
    for k in range(3):
        r.fuse(k, k)
    with pytest.raises(MaterializationError):
        r.fuse(5, 5)


def test_explicit_ring_roundtrip(tmp_path):
    r = build_ring("s3")
    path = save_ring(r, tmp_path / "s3.json")
    again = load_ring(path)
    assert [again.name(a) for a in again.basis] == ["triv", "sgn", "std"]
    for a in r.basis:
        for b in r.basis:
            out = again.fuse(again.label(r.name(a)), again.label(r.name(b)))
            assert {again.name(c): n for c, n in out.items()} == {r.name(c): n for c, n in r.fuse(a, b).items()}


def test_explicit_ring_rejects_bad_rules():
    data = json.loads(build_ring("z2").to_json())
    explicit_ring(data)
    for entry in data["fusion"]:
        if entry["a"] == entry["b"] == "g":
            entry["out"] = {"g": 1}
    with pytest.raises(FusionAxiomError):
        explicit_ring(data)
    del data["dims"]
    with pytest.raises(ValueError):
        explicit_ring(data)


def test_infinite_export_is_truncated():
    d = json.loads(su2().to_json(window=range(5)))
    assert d["truncated"] is True


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 25), st.integers(0, 25), st.integers(0, 25))
def test_su2_associativity_and_dimensions(a, b, c):
    r = su2()
    x = (r[a] * r[b]) * r[c]
    y = r[a] * (r[b] * r[c])
    assert x.coeffs == y.coeffs
    assert sum(n.real * r.dim(g) for g, n in x.coeffs.items()) == r.dim(a) * r.dim(b) * r.dim(c)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 30), st.integers(0, 30), st.integers(0, 30))
def test_frobenius_reciprocity_so3(a, b, c):
    r = build_ring("so3")
    assert r.N(a, b, c) == r.N(r.conj(a), c, b) == r.N(c, r.conj(b), a)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=4, max_size=4),
       st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=4, max_size=4))
def test_trace_is_tracial_on_free_group(cx, cy):
    f = free_group_ring(2)
    labels = [f.label(w) for w in ("a", "b", "ab", "Ba")]
    x = FusionElement(f, dict(zip(labels, cx)))
    y = FusionElement(f, dict(zip(labels, cy)))
    assert np.isclose(trace(x * y), trace(y * x), atol=1e-9)
    assert np.isclose(inner_product(x, y), trace(involute(x) * y), atol=1e-9)


def test_truncated_file_roundtrip(tmp_path):
    from fusionmetric.fusion_ring import verify_truncated

    path = save_ring(su2(), tmp_path / "su2.json", window=range(4))
    r = load_ring(path)
    assert [r.name(a) for a in r.window] == ["u0", "u1", "u2", "u3"]
    assert {r.name(c) for c in r.fuse("u2", "u3")} == {"u1", "u3", "u5"}
    assert verify_truncated(r).passed
    with pytest.raises(MaterializationError):
        r.fuse("u4", "u1")
