"""Acceptance suite: one group of tests per criterion, each at its stated
tolerance and time budget. The terminal summary prints one PASS/FAIL line
per criterion (see conftest.py)."""

from __future__ import annotations

import os
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from fusionmetric.classical.model import (
    bundled_model,
    centrality_check,
    commutation_check,
    contraction_check,
    cross_validate_central,
    default_length,
    identity_residuals,
)
from fusionmetric.gns import TruncatedRep, haagerup_check, lip_norm_bounds
from fusionmetric.length import word_length
from fusionmetric.metric import MKProblem, berezin_defect_check, diameter_estimate, mk_distance
from fusionmetric.rings import build_ring
from fusionmetric.states import counit_state, foelner_multiplier, foelner_weights, haar_state

import oracles

crit = pytest.mark.criterion


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def _su2(R=None):
    r = build_ring("su2")
    L = word_length(r, [1])
    return (r, L) if R is None else (r, L, TruncatedRep(r, L, R))


# -- 1 -----------------------------------------------------------------------

@crit(1, "fusion rules of su2 and so3 against recursive oracles, k, n <= 30")
def test_fusion_rules():
    with Timer() as t:
        su2, so3 = build_ring("su2"), build_ring("so3")
        got_su2 = {(k, n): dict(su2.fuse(k, n)) for k in range(31) for n in range(31)}
        got_so3 = {(k, n): dict(so3.fuse(k, n)) for k in range(31) for n in range(31)}
    assert t.elapsed < 1.0
    for (k, n), out in got_su2.items():
        assert out == oracles.su2_recursive(k, n), (k, n)
    for (k, n), out in got_so3.items():
        assert out == oracles.so3_fuse(k, n), (k, n)


# -- 2 -----------------------------------------------------------------------

@crit(2, "word length l(u^n) = n on su2 and so3, n <= 30")
@pytest.mark.parametrize("spec, fuse", [("su2", oracles.su2_fuse), ("so3", oracles.so3_fuse)])
def test_word_length(spec, fuse):
    with Timer() as t:
        r = build_ring(spec)
        L = word_length(r, [1])
        got = [L(n) for n in range(31)]
    assert t.elapsed < 1.0
    assert got == list(range(31))
    assert got == [oracles.support_word_length(fuse, [1], n) for n in range(31)]


# -- 3 -----------------------------------------------------------------------

@crit(3, "block norm bound with C = 1 over k, m, n <= 40")
@pytest.mark.parametrize("spec", ["su2", "so3"])
def test_haagerup(spec):
    with Timer() as t:
        r = build_ring(spec)
        rep = TruncatedRep(r, word_length(r, [1]), 40)
        out = haagerup_check(rep, C=1.0, window=40, n_random=1000, seed=0)
    assert t.elapsed < 30.0
    basis = out["basis elements"].detail["max_ratio"]
    rand = out["random sphere elements"].detail["max_ratio"]
    assert basis == 1.0
    assert out["random sphere elements"].detail["samples"] == 1000
    assert rand <= 1 + 1e-9


# -- 4 -----------------------------------------------------------------------

@crit(4, "Lip-norm bounds of u1: closed-form lower bound, upper = 2, gap < 1e-3 at R = 60")
@pytest.mark.parametrize("R", [10, 20, 40, 60])
def test_lip_closed_form(R):
    _, _, rep = _su2(R)
    with Timer() as t:
        b = lip_norm_bounds(rep, 1)
    assert t.elapsed < 5.0
    N = b.certified_size
    assert abs(b.lower - 2 * np.cos(np.pi / (N + 1))) <= 1e-9
    assert b.upper == 2.0


@crit(4, "Lip-norm bounds of u1: closed-form lower bound, upper = 2, gap < 1e-3 at R = 60")
def test_lip_gap_at_60():
    # The compressed lower bound is 2 cos(pi / 61) here, a gap of about 2.65e-3.
    _, _, rep = _su2(60)
    b = lip_norm_bounds(rep, 1)
    assert b.upper - b.lower < 1e-3, f"gap {b.upper - b.lower:.6g}"


# -- 5 -----------------------------------------------------------------------

@crit(5, "Foelner multipliers on su2")
def test_foelner():
    r, L = _su2()
    with Timer() as t:
        omegas = {n: foelner_multiplier(r, L, n) for n in range(1, 16)}
    assert t.elapsed < 60.0
    w1 = omegas[1]
    assert w1 == oracles.su2_foelner(1)
    assert [w1.get(g, 0) for g in range(5)] == [1, Fraction(2, 5), Fraction(4, 15), 0, 0]
    assert all(omegas[n][0] == 1 for n in range(1, 11))
    u1 = [omegas[n][1] for n in range(1, 16)]
    assert all(a <= b for a, b in zip(u1, u1[1:]))
    assert u1[-1] > Fraction(9, 10)


# -- 6 -----------------------------------------------------------------------

@crit(6, "Monge-Kantorovich distance sanity")
def test_mk_z2():
    r = build_ring("z2")
    p = MKProblem(counit_state(r), haar_state(r), word_length(r, ["g"]), 1)
    K = np.linalg.norm(p.K[0], 2)
    grid = np.linspace(-3, 3, 600_001)
    brute = float(np.max(np.abs(grid * p.g[0])[np.abs(grid) * K <= 1]))
    assert abs(mk_distance(p).value - 1.0) <= 1e-6
    assert abs(brute - 1.0) <= 1e-5


@crit(6, "Monge-Kantorovich distance sanity")
def test_mk_random_search():
    r, L = _su2()
    p = MKProblem(counit_state(r), haar_state(r), L, 3)
    oracle = oracles.su2_mk_random_search(p.g, 3, n_dirs=100_000)
    assert abs(mk_distance(p).value - oracle) <= 1e-3


@crit(6, "Monge-Kantorovich distance sanity")
def test_mk_metric_axioms():
    r, L = _su2()
    R = 6
    rep = TruncatedRep(r, L, R)
    states = {"eps": counit_state(r), "h": haar_state(r),
              "chi1": foelner_weights(r, L, 1)[1], "chi2": foelner_weights(r, L, 2)[1]}
    with Timer() as t:
        d = {(a, b): mk_distance(MKProblem(states[a], states[b], L, R, rep=rep)).value
             for a in states for b in states}
    assert t.elapsed < 120.0
    for a in states:
        assert d[a, a] == 0.0
        for b in states:
            assert abs(d[a, b] - d[b, a]) <= 1e-6
            for c in states:
                assert d[a, c] <= d[a, b] + d[b, c] + 1e-6


# -- 7 -----------------------------------------------------------------------

@crit(7, "Berezin estimate on su2 at R = 20")
def test_berezin():
    r, L, rep = _su2(20)
    eps = counit_state(r)
    support = L.ball(4)
    rng = np.random.default_rng(0)
    with Timer() as t:
        worst = -np.inf
        for n in range(1, 7):
            _, chi = foelner_weights(r, L, n)
            d = mk_distance(MKProblem(eps, chi, L, 20, rep=rep)).value
            for _ in range(50):
                c = rng.standard_normal(len(support)) + 1j * rng.standard_normal(len(support))
                chk = berezin_defect_check(rep, chi, r.element(dict(zip(support, c))), distance=d)
                det = chk["defect bound"].detail
                worst = max(worst, det["lhs_lower"] - det["rhs"])
                assert det["lhs_lower"] <= det["rhs"] + 1e-6, (n, det)
    assert t.elapsed < 300.0


# -- 8 -----------------------------------------------------------------------

@crit(8, "finite diameter spot check on su2 at R = 10")
def test_diameter():
    from fusionmetric.reports import Report

    _, _, rep = _su2(10)
    report = Report("diameter")
    with Timer() as t:
        d = diameter_estimate(rep, samples=100, seed=0, tol=1e-8, report=report)
    assert t.elapsed < 60.0
    assert np.isfinite(d) and d > 0
    assert report.passed, report.failures()


# -- 9 -----------------------------------------------------------------------

@crit(9, "classical model identity suite")
@pytest.mark.parametrize("name", ["z2", "z3", "s3", "d4", "q8"])
def test_classical_identities(name):
    with Timer() as t:
        m = bundled_model(name)
        res = identity_residuals(m)
        D = m.dirac_L2(default_length(m))
        comm = commutation_check(m, D)
        contr = contraction_check(m, D, samples=200, seed=0)
        rng = np.random.default_rng(0)
        diffs = []
        for (k, i, j) in m.coeff_labels:
            rho = m.irreps[k]
            target = (i == j) * rho.character() / rho.dim
            diffs.append(np.abs(m.cond_expectation(m.coefficient(k, i, j)) - target).max())
        avg, sand = [], []
        for _ in range(50):
            a = rng.standard_normal(m.n) + 1j * rng.standard_normal(m.n)
            Ea = m.cond_expectation(a)
            avg.append(np.abs(Ea - m.conjugation_average(a)).max())
            sand.append(np.abs(Ea - m.sandwich_expectation(a)).max())
        cent = [centrality_check(m, np.eye(m.n)[x]) for x in range(m.n)]
    assert t.elapsed < 120.0
    assert res["pentagon"] < 1e-10
    assert res["implementation W"] < 1e-10 and res["implementation V"] < 1e-10
    assert max(avg) < 1e-10 and max(sand) < 1e-10
    assert max(diffs) < 1e-10
    assert all(c.detail["residual"] < 1e-9 for c in comm.checks)
    assert contr.passed and contr["contraction"].detail["samples"] == 200
    assert all(c.agree for c in cent)


# -- 10 ----------------------------------------------------------------------

@crit(10, "cross-validation of the L2(G) and fusion models on central elements")
@pytest.mark.parametrize("name", ["s3", "d4"])
def test_cross_validation(name):
    with Timer() as t:
        m = bundled_model(name)
        out = cross_validate_central(m, default_length(m), samples=100, seed=0,
                                     tol_equal=1e-9, tol_ineq=1e-9)
    assert t.elapsed < 60.0
    assert out["commutators agree"].passed
    assert out["commutators agree"].detail["samples"] == 100
    assert out["fusion norm bounded by L2 norm"].passed
    assert out.passed


# -- 11 ----------------------------------------------------------------------

SUITE = [
    ["verify", "--ring", "su2", "--radius", "10"],
    ["verify", "--ring", "f2", "--radius", "3"],
    ["haagerup", "--ring", "so3", "--window", "12", "--samples", "100"],
    ["metric", "--ring", "su2", "--radius", "6", "--foelner", "1..3"],
    ["diameter", "--ring", "su2", "--radius", "4", "--samples", "10"],
    ["berezin", "--ring", "su2", "--radius", "12", "--foelner", "1,2", "--samples", "5"],
    ["classical", "--samples", "50"],
]

_DRIVER = """
import sys
from fusionmetric.cli import run
out = sys.argv[1]
for i, argv in enumerate(%r):
    run(argv + ["--quiet", "--output", f"{out}/{i}.json"])
""" % (SUITE,)


@crit(11, "byte-identical JSON reports across runs")
def test_determinism(tmp_path):
    outputs = []
    for k, hashseed in enumerate(("1", "2")):
        out = tmp_path / f"run{k}"
        out.mkdir()
        env = dict(os.environ, PYTHONHASHSEED=hashseed)
        subprocess.run([sys.executable, "-c", _DRIVER, str(out)], check=True, env=env, timeout=600)
        outputs.append([(out / f"{i}.json").read_bytes() for i in range(len(SUITE))])
    for i, (a, b) in enumerate(zip(*outputs)):
        assert a == b, SUITE[i]
