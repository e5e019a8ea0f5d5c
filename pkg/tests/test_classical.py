from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fusionmetric.classical.groups import BUNDLED, FiniteGroup, Irrep, cyclic_group, load_group
from fusionmetric.classical.model import (
    bundled_model,
    build_model,
    centrality_check,
    commutation_check,
    contraction_check,
    cross_validate_central,
    default_length,
    expectation_report,
    identity_report,
    identity_residuals,
    left_invariance_check,
)
from fusionmetric.exceptions import ModelValidationError

GROUPS = list(BUNDLED)


@pytest.fixture(scope="module", params=GROUPS)
def model(request):
    return bundled_model(request.param)


def _class_average(group, a):
    # mean of a over each conjugacy class, computed straight from the table
    out = np.zeros(group.order, dtype=complex)
    T, inv = group.table, group.inverse
    for x in range(group.order):
        cls = {T[T[g, x], inv[g]] for g in range(group.order)}
        out[x] = np.mean([a[c] for c in cls])
    return out


def test_groups_load_with_expected_orders():
    assert [load_group(g).order for g in GROUPS] == [2, 3, 6, 8, 8]
    assert [len(load_group(g).conjugacy_classes()) for g in GROUPS] == [2, 3, 3, 5, 5]


def test_identity_residuals(model):
    res = identity_residuals(model)
    assert max(res.values()) < 1e-10


def test_expectation_identities(model):
    rep = expectation_report(model)
    assert rep.passed, rep.failures()


def test_expectation_is_class_average(model):
    rng = np.random.default_rng(1)
    a = rng.standard_normal(model.n) + 1j * rng.standard_normal(model.n)
    assert np.allclose(model.cond_expectation(a), _class_average(model.group, a), atol=1e-12)


def test_expectation_on_matrix_units(model):
    for (k, i, j) in model.coeff_labels:
        rho = model.irreps[k]
        expect = (i == j) * rho.character() / rho.dim
        assert np.allclose(model.cond_expectation(model.coefficient(k, i, j)), expect, atol=1e-10)


def test_cond_expectation_rejects_operators(model):
    with pytest.raises(ValueError):
        model.cond_expectation(np.ones((model.n, model.n)))


def test_commutation_and_contraction(model):
    D = model.dirac_L2(default_length(model))
    assert commutation_check(model, D).passed
    assert contraction_check(model, D, samples=50).passed


def test_dirac_is_self_adjoint_with_expected_spectrum(model):
    L = default_length(model)
    D = model.dirac_L2(L)
    assert np.allclose(D, D.conj().T)
    assert np.allclose(np.sort(np.linalg.eigvalsh(D)), np.sort(model.dirac_spectrum(L)))


def test_left_invariance(model):
    D = model.dirac_L2(default_length(model))
    rng = np.random.default_rng(2)
    for _ in range(10):
        phi = rng.standard_normal(model.n)
        a = rng.standard_normal(model.n)
        assert left_invariance_check(model, D, phi, a).passed


def test_point_evaluations_centrality(model):
    group = model.group
    centre = {x for x in range(group.order)
              if all(group.mul(x, g) == group.mul(g, x) for g in range(group.order))}
    for x in range(group.order):
        res = centrality_check(model, np.eye(model.n)[x])
        assert res.agree
        assert res.central == (x in centre)


def test_full_report(model):
    assert identity_report(model, samples=20).passed


@pytest.mark.parametrize("name", ["s3", "d4", "q8"])
def test_cross_validation(name):
    m = bundled_model(name)
    assert cross_validate_central(m, default_length(m), samples=20).passed


def test_rejects_incomplete_irreps():
    g = load_group("s3")
    with pytest.raises(ModelValidationError):
        build_model(g, g.irreps[:2])


def test_rejects_non_homomorphism():
    g = cyclic_group(3)
    bad = Irrep("bad", np.array([1, 1j, -1]).reshape(3, 1, 1))
    with pytest.raises(ModelValidationError):
        build_model(g, [g.irreps[0], g.irreps[1], bad])


def test_rejects_non_group_table():
    with pytest.raises(ModelValidationError):
        FiniteGroup([[0, 1, 2], [1, 2, 0], [2, 1, 0]])


def test_data_dir_override(tmp_path, monkeypatch):
    data = {"name": "z2", "order": 2, "elements": ["1", "x"], "table": [[0, 1], [1, 0]],
            "irreps": [{"label": "triv", "matrices": [[["1"]], [["1"]]]},
                       {"label": "alt", "matrices": [[["1"]], [["-1"]]]}]}
    (tmp_path / "z2.json").write_text(json.dumps(data))
    monkeypatch.setenv("FUSIONMETRIC_DATA", str(tmp_path))
    assert load_group("z2").names == ["1", "x"]
    with pytest.raises(KeyError):
        load_group("a5")


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(GROUPS), st.integers(0, 2**31 - 1))
def test_expectation_is_idempotent_and_central(name, seed):
    m = bundled_model(name)
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(m.n) + 1j * rng.standard_normal(m.n)
    Ea = m.cond_expectation(a)
    assert np.allclose(m.cond_expectation(Ea), Ea, atol=1e-12)
    assert m.is_central(Ea)
    assert m.haar(Ea) == pytest.approx(m.haar(a))
