from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bayesreg.errors import (
    ConstantColumn,
    DimensionMismatch,
    NegativePenalty,
    SingularDesign,
    ValidationError,
    ZeroGradient,
)
from bayesreg.model_core import (
    Dataset,
    collinear_design,
    condition_number,
    condition_scan,
    kappa_closed_form,
    lasso_map_fit,
    ols_fit,
    ridge_fit,
    sensitivity_bound,
    standardize,
)


def test_standardize_single_column():
    d = standardize(np.array([[1.0], [2.0], [3.0]]), np.array([1.0, 2.0, 3.0]))
    np.testing.assert_allclose(d.x_std[:, 0], [-1.224744871391589, 0.0, 1.224744871391589], atol=1e-12)
    np.testing.assert_allclose(d.y_centered, [-1.0, 0.0, 1.0], atol=1e-15)
    assert d.y_mean == 2.0
    assert (d.n, d.p) == (3, 1)


def test_standardize_rejects_constant_column():
    x = np.column_stack([np.arange(5.0), np.full(5, 3.0)])
    with pytest.raises(ConstantColumn) as info:
        standardize(x, np.arange(5.0))
    assert info.value.index == 1


def test_standardize_rejects_length_mismatch():
    with pytest.raises(DimensionMismatch):
        standardize(np.ones((4, 2)), np.ones(3))


def test_standardize_uniform_design():
    gen = np.random.default_rng(0)
    x = gen.uniform(-1, 1, size=(100, 10))
    d = standardize(x, gen.normal(size=100))
    assert (d.n, d.p) == (100, 10)
    np.testing.assert_allclose(d.x_std.mean(axis=0), 0, atol=1e-12)
    np.testing.assert_allclose(d.x_std.std(axis=0), 1, atol=1e-12)
    assert abs(d.y_centered.sum()) < 1e-10


@settings(max_examples=50, deadline=None)
@given(
    arrays(np.float64, (12, 3), elements=st.floats(-100, 100)),
    arrays(np.float64, 12, elements=st.floats(-100, 100)),
)
def test_standardize_invariants_and_back_transform(x, y):
    if np.any(x.std(axis=0) < 1e-3):
        return
    d = standardize(x, y)
    np.testing.assert_allclose(d.x_std.mean(axis=0), 0, atol=1e-12)
    np.testing.assert_allclose(d.x_std.std(axis=0), 1, atol=1e-12)
    assert abs(d.y_centered.sum()) < 1e-10 * max(1.0, np.abs(y).sum())
    fit = ridge_fit(d, 0.5)
    std_pred = d.x_std @ fit.beta + d.y_mean
    np.testing.assert_allclose(fit.predict(x), std_pred, rtol=1e-8, atol=1e-8 * max(1.0, np.abs(std_pred).max()))


def test_ols_collinear_example():
    eps = delta = 1e-3
    d = Dataset.raw(collinear_design(eps), np.array([2.0, delta + 2.0]))
    np.testing.assert_allclose(ols_fit(d).beta, [2 - delta / eps, delta / eps], atol=1e-6)


def test_ols_collinear_example_zero_delta():
    d = Dataset.raw(collinear_design(1e-3), np.array([2.0, 2.0]))
    np.testing.assert_allclose(ols_fit(d).beta, [2.0, 0.0], atol=1e-8)


def test_ols_orthonormal_design():
    q, _ = np.linalg.qr(np.random.default_rng(3).normal(size=(8, 3)))
    y = np.random.default_rng(4).normal(size=8)
    fit = ols_fit(Dataset.raw(q, y))
    np.testing.assert_allclose(fit.beta, q.T @ y, atol=1e-12)


def test_ols_residual_orthogonal(small_data):
    fit = ols_fit(small_data)
    r = small_data.y_centered - small_data.x_std @ fit.beta
    np.testing.assert_allclose(small_data.x_std.T @ r, 0, atol=1e-8)
    assert fit.residual_variance == pytest.approx(r @ r / small_data.n)
    assert fit.method_tag == "ols"


def test_ols_refuses_singular_design():
    x = np.array([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]])
    with pytest.raises(SingularDesign):
        ols_fit(Dataset.raw(x, np.ones(3)))


def test_ridge_zero_matches_ols(small_data):
    np.testing.assert_allclose(ridge_fit(small_data, 0.0).beta, ols_fit(small_data).beta, atol=1e-10)


def test_ridge_total_shrinkage(small_data):
    assert np.linalg.norm(ridge_fit(small_data, 1e12).beta) < 1e-6


def test_ridge_rejects_negative_penalty(small_data):
    with pytest.raises(NegativePenalty):
        ridge_fit(small_data, -1.0)


def test_ridge_two_by_two_hand_solve():
    # exact Cramer's rule on (X'X + I) b = X'y in rational arithmetic
    e, lam = Fraction(1, 1000), 1
    x = [[Fraction(1), Fraction(1)], [Fraction(1), 1 + e]]
    y = [Fraction(2), 2 + e]
    xtx = [[sum(x[k][i] * x[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
    xty = [sum(x[k][i] * y[k] for k in range(2)) for i in range(2)]
    a = [[xtx[0][0] + lam, xtx[0][1]], [xtx[1][0], xtx[1][1] + lam]]
    det = a[0][0] * a[1][1] - a[0][1] * a[1][0]
    b0 = (xty[0] * a[1][1] - a[0][1] * xty[1]) / det
    b1 = (a[0][0] * xty[1] - xty[0] * a[1][0]) / det

    fit = ridge_fit(Dataset.raw(collinear_design(0.001), np.array([2.0, 2.001])), 1.0)
    np.testing.assert_allclose(fit.beta, [float(b0), float(b1)], rtol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.0, 100.0))
def test_ridge_normal_equations(seed, lam):
    gen = np.random.default_rng(seed)
    d = standardize(gen.normal(size=(20, 4)), gen.normal(size=20))
    fit = ridge_fit(d, lam)
    xtx, xty = d.x_std.T @ d.x_std, d.x_std.T @ d.y_centered
    resid = (xtx + lam * np.eye(4)) @ fit.beta - xty
    assert np.linalg.norm(resid) <= 1e-8 * np.linalg.norm(xty)


def test_lasso_map_kkt(small_data):
    lam = 5.0
    fit = lasso_map_fit(small_data, lam)
    x, y = small_data.x_std, small_data.y_centered
    grad = 2 * x.T @ (y - x @ fit.beta)
    active = fit.beta != 0
    np.testing.assert_allclose(grad[active], lam * np.sign(fit.beta[active]), atol=1e-8)
    assert np.all(np.abs(grad[~active]) <= lam + 1e-8)
    assert fit.method_tag == "map-lasso"


def test_condition_number_identity():
    rep = condition_number(np.eye(2))
    assert rep.kappa == 1.0
    assert rep.kappa_shifted == 1.0


@pytest.mark.parametrize("eps", [0.1, 2.0])
def test_closed_form_kappa_matches_eigensolver(eps):
    rep = condition_number(collinear_design(eps))
    assert rep.kappa == pytest.approx(float(kappa_closed_form(eps)), rel=1e-8)


def test_shift_identity():
    x = np.random.default_rng(1).normal(size=(7, 3))
    rep = condition_number(x, alpha=1.0)
    assert rep.kappa_shifted == pytest.approx((rep.lambda_max + 1) / (rep.lambda_min + 1), rel=1e-14)
    assert rep.kappa == pytest.approx(rep.lambda_max / rep.lambda_min, rel=1e-14)


def test_rank_deficient_kappa_is_infinite():
    rep = condition_number(np.array([[1.0, 1.0], [1.0, 1.0]]))
    assert rep.kappa == np.inf
    assert np.isfinite(condition_number(np.array([[1.0, 1.0], [1.0, 1.0]]), alpha=1.0).kappa_shifted)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.floats(1e-3, 100.0))
def test_spectrum_shift_reduces_kappa(seed, alpha):
    x = np.random.default_rng(seed).normal(size=(6, 3))
    rep = condition_number(x, alpha)
    if rep.kappa > 1:
        assert rep.kappa_shifted < rep.kappa


def test_sensitivity_full_rank():
    gen = np.random.default_rng(5)
    x, y, delta = gen.normal(size=(10, 3)), gen.normal(size=10), gen.normal(size=10) * 1e-3
    kappa = condition_number(x).kappa
    expected = kappa * np.linalg.norm(x.T @ delta) / np.linalg.norm(x.T @ y)
    assert sensitivity_bound(x, y, delta) == pytest.approx(expected, rel=1e-12)


def test_sensitivity_nearly_orthogonal_response():
    eps = 1e-4
    x = np.array([[1.0], [0.0]])
    y1, y2 = np.array([eps, 1.0]), np.array([-eps, 1.0])
    b1 = ols_fit(Dataset.raw(x, y1)).beta[0]
    b2 = ols_fit(Dataset.raw(x, y2)).beta[0]
    observed = abs(b1 - b2) / abs(b1)
    assert observed == pytest.approx(2.0)
    assert np.linalg.norm(y1 - y2) / np.linalg.norm(y1) == pytest.approx(2 * eps, rel=1e-6)
    assert sensitivity_bound(x, y1, y2 - y1) >= observed - 1e-12


def test_sensitivity_zero_perturbation():
    x = np.eye(3)
    assert sensitivity_bound(x, np.ones(3), np.zeros(3)) == 0.0


def test_sensitivity_zero_gradient():
    with pytest.raises(ZeroGradient):
        sensitivity_bound(np.array([[1.0], [0.0]]), np.array([0.0, 1.0]), np.array([1.0, 0.0]))


def test_condition_scan_rows():
    grid = np.geomspace(1e-3, 10, 50)
    rows = condition_scan(grid, alpha=1.0)
    assert rows.shape == (50, 3)
    # kappa falls until the columns stop merging, then rises as their norms diverge
    turn = int(np.argmin(rows[:, 1]))
    assert 1.0 < rows[turn, 0] < 3.0
    assert np.all(np.diff(rows[: turn + 1, 1]) < 0)
    assert np.all(np.diff(rows[turn:, 1]) > 0)
    assert np.all(rows[:, 2] <= rows[:, 1])
    # shifted kappa stays finite where kappa blows up: (4 + 1) / (0 + 1) in the limit
    tiny = condition_scan([1e-6, 1e-9, 1e-12], alpha=1.0)
    np.testing.assert_allclose(tiny[:, 2], 5.0, rtol=1e-5)


def test_condition_scan_closed_form_at_two():
    row = condition_scan([2.0], alpha=0.0)[0]
    assert row[1] == pytest.approx(float(kappa_closed_form(2.0)), rel=1e-8)
    assert row[2] == row[1]


def test_condition_scan_diverges_as_eps_vanishes():
    rows = condition_scan([1e-2, 1e-4, 1e-6, 1e-9], alpha=0.0)
    assert np.all(np.diff(rows[:, 1]) > 0)
    assert rows[-1, 1] == np.inf


def test_condition_scan_rejects_nonpositive_eps():
    with pytest.raises(ValidationError):
        condition_scan([0.0, 1.0])
