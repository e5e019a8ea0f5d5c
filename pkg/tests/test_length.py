from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fusionmetric.exceptions import NotGeneratedError
from fusionmetric.length import LengthFunction, verify_length_axioms, word_length
from fusionmetric.rings import build_ring, free_group_ring, group_ring

import oracles


@pytest.mark.parametrize("spec, fuse", [("su2", oracles.su2_fuse), ("so3", oracles.so3_fuse)])
def test_word_length_matches_support_oracle(spec, fuse):
    r = build_ring(spec)
    L = word_length(r, [1])
    for n in range(16):
        assert L(n) == oracles.support_word_length(fuse, [1], n) == n


def test_balls_and_spheres():
    L = word_length(build_ring("su2"), ["u1"])
    assert L.ball(3) == [0, 1, 2, 3]
    assert L.sphere(0) == [0] and L.sphere(4) == [4]


def _free_mul(u, v):
    w = list(u)
    for s in v:
        if w and w[-1] == -s:
            w.pop()
        else:
            w.append(s)
    return tuple(w)


def test_free_group_length_matches_cayley_bfs():
    f = free_group_ring(2)
    gens = [(1,), (-1,), (2,), (-2,)]
    L = word_length(f, gens)
    dist = oracles.cayley_bfs(gens, _free_mul, (), 4)
    assert sorted(L.ball(4), key=lambda w: (len(w), w)) == sorted(dist, key=lambda w: (len(w), w))
    assert all(L(w) == d for w, d in dist.items())
    assert [len(L.sphere(m)) for m in range(5)] == [1, 4, 12, 36, 108]


def test_free_abelian_length_is_l1():
    r = build_ring("zk:2")
    L = word_length(r, ["e1", "-e1", "e2", "-e2"])
    assert L((3, -2)) == 5
    assert len(L.sphere(3)) == 12


def test_generating_set_validation():
    r = build_ring("su2")
    with pytest.raises(ValueError):
        word_length(r, [])
    with pytest.raises(ValueError):
        word_length(r, [0, 1])
    f = free_group_ring(2)
    with pytest.raises(ValueError):
        word_length(f, ["a", "A", "b"])


def test_not_generated():
    # {e, s} inside Z_2 x Z_2 does not reach t
    r = group_ring([[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]], names=["e", "s", "t", "st"])
    L = word_length(r, ["s"])
    assert L(r.label("s")) == 1
    with pytest.raises(NotGeneratedError):
        L(r.label("t"))


def test_axioms_pass_for_word_lengths():
    for spec in ("su2", "so3", "s4plus"):
        rep = verify_length_axioms(word_length(build_ring(spec), [1]), 8)
        assert rep.passed, rep.failures()
        assert rep.data["sphere_sizes"] == [1] * 9


def test_modified_length_breaks_subadditivity():
    L = word_length(build_ring("su2"), [1])
    bad = LengthFunction.modified(L, {"u4": 9})
    rep = verify_length_axioms(bad, 6)
    assert not rep["subadditivity"].passed
    assert rep["subadditivity"].detail["witnesses"]


def test_explicit_length_roundtrip():
    r = build_ring("s3")
    L = LengthFunction.explicit(r, {"triv": 0, "sgn": 1, "std": 1})
    assert verify_length_axioms(L, 1).passed
    again = LengthFunction.from_dict(r, L.to_dict())
    assert [again(a) for a in r.basis] == [0, 1, 1]
    with pytest.raises(ValueError):
        LengthFunction.explicit(r, {"triv": 0, "sgn": -1, "std": 1})


def test_zero_length_is_not_proper():
    r = build_ring("s3")
    L = LengthFunction.explicit(r, {"triv": 0, "sgn": 0, "std": 1})
    assert not verify_length_axioms(L, 1)["properness"].passed


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 40), st.integers(0, 40))
def test_su2_subadditivity_property(a, b):
    r = build_ring("su2")
    L = word_length(r, [1])
    assert all(L(c) <= L(a) + L(b) for c in r.fuse(a, b))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.sampled_from([1, -1, 2, -2]), max_size=8))
def test_free_group_length_is_reduced_word_length(word):
    f = free_group_ring(2)
    L = word_length(f, ["a", "A", "b", "B"])
    w = ()
    for s in word:
        w = _free_mul(w, (s,))
    assert L(w) == len(w)
