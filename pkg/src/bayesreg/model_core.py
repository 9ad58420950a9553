"""Data handling, least squares, ridge and conditioning diagnostics."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import (
    ConstantColumn,
    DimensionMismatch,
    NegativePenalty,
    SingularDesign,
    ValidationError,
    ZeroGradient,
)

# OLS refuses when lambda_min / lambda_max falls to this level.
SINGULAR_RTOL = 1e-12


class LinearMoments(NamedTuple):
    """Sufficient statistics of a Gaussian linear model.

    The samplers only ever touch the data through these, which also lets them
    run with ``n = 0`` (prior-only chains).
    """

    xtx: np.ndarray
    xty: np.ndarray
    yty: float
    n: int

    @property
    def p(self) -> int:
        return self.xtx.shape[0]

    @classmethod
    def empty(cls, p: int) -> "LinearMoments":
        return cls(np.zeros((p, p)), np.zeros(p), 0.0, 0)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Standardized design and centered response, plus what is needed to undo both.

    Column standard deviations use the population convention (divisor ``n``).
    """

    x_raw: np.ndarray
    y_raw: np.ndarray
    x_std: np.ndarray
    y_centered: np.ndarray
    col_means: np.ndarray
    col_sds: np.ndarray
    y_mean: float

    @property
    def n(self) -> int:
        return self.x_std.shape[0]

    @property
    def p(self) -> int:
        return self.x_std.shape[1]

    @cached_property
    def moments(self) -> LinearMoments:
        x, y = self.x_std, self.y_centered
        return LinearMoments(x.T @ x, x.T @ y, float(y @ y), self.n)

    @classmethod
    def raw(cls, x, y) -> "Dataset":
        """Wrap a design as-is: no centering, no scaling, no intercept.

        For worked linear-algebra examples such as the 2 x 2 systems; the
        standardization invariants do not hold for such a dataset.
        """
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2 or y.shape != (x.shape[0],):
            raise DimensionMismatch("x must be n x p and y a length-n vector")
        p = x.shape[1]
        return cls(x, y, x, y, np.zeros(p), np.ones(p), 0.0)

    def to_raw(self, beta: np.ndarray) -> tuple[np.ndarray, float]:
        """Map standardized-scale coefficients to (raw slopes, intercept)."""
        beta = np.asarray(beta, dtype=float)
        slopes = beta / self.col_sds
        intercept = self.y_mean - float(self.col_means @ slopes)
        return slopes, intercept


def standardize(x_raw, y_raw) -> Dataset:
    x = np.asarray(x_raw, dtype=float)
    y = np.asarray(y_raw, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or y.ndim != 1:
        raise DimensionMismatch("x_raw must be n x p and y_raw a vector")
    if x.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"x_raw has {x.shape[0]} rows but y_raw has {y.shape[0]} entries")
    n, p = x.shape
    if n < 2:
        raise ValidationError("need at least two observations")
    if p < 1:
        raise ValidationError("need at least one column")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValidationError("data contain non-finite values")

    means = x.mean(axis=0)
    centered = x - means
    sds = np.sqrt(np.mean(centered**2, axis=0))
    for j in range(p):
        # relative test: a column like (c, c, c) can leave round-off residue
        if sds[j] <= 1e-14 * max(1.0, abs(means[j])):
            raise ConstantColumn(j)
    x_std = centered / sds
    y_mean = float(y.mean())
    return Dataset(
        x_raw=x.copy(),
        y_raw=y.copy(),
        x_std=x_std,
        y_centered=y - y_mean,
        col_means=means,
        col_sds=sds,
        y_mean=y_mean,
    )


@dataclass(frozen=True, eq=False)
class LinearFit:
    beta: np.ndarray
    beta_raw: np.ndarray
    intercept: float
    residual_variance: float
    method_tag: str

    def predict(self, x_raw) -> np.ndarray:
        return np.asarray(x_raw, dtype=float) @ self.beta_raw + self.intercept


def _make_fit(d: Dataset, beta: np.ndarray, tag: str) -> LinearFit:
    r = d.y_centered - d.x_std @ beta
    slopes, intercept = d.to_raw(beta)
    return LinearFit(
        beta=beta,
        beta_raw=slopes,
        intercept=intercept,
        residual_variance=float(r @ r) / d.n,
        method_tag=tag,
    )


def _spd_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    import scipy.linalg

    return scipy.linalg.solve(a, b, assume_a="pos")


def ols_fit(d: Dataset) -> LinearFit:
    xtx, xty, _, _ = d.moments
    evals = np.linalg.eigvalsh(xtx)
    if evals[0] <= SINGULAR_RTOL * evals[-1]:
        raise SingularDesign(
            f"X'X is numerically singular (lambda_min/lambda_max = {evals[0] / evals[-1]:.3g})"
        )
    return _make_fit(d, _spd_solve(xtx, xty), "ols")


def ridge_fit(d: Dataset, lam: float) -> LinearFit:
    """Minimize ``||y - X b||^2 + lam ||b||^2`` on the standardized scale."""
    if not lam >= 0:
        raise NegativePenalty(f"ridge penalty must be >= 0, got {lam}")
    if lam == 0:
        fit = ols_fit(d)
        return _make_fit(d, fit.beta, "ridge")
    xtx, xty, _, _ = d.moments
    beta = _spd_solve(xtx + lam * np.eye(d.p), xty)
    return _make_fit(d, beta, "ridge")


def soft_threshold(z, t):
    return np.sign(z) * np.maximum(np.abs(z) - t, 0.0)


def lasso_map_fit(d: Dataset, lam: float, *, tol: float = 1e-12, max_iter: int = 10_000) -> LinearFit:
    """Lasso MAP ``argmin ||y - X b||^2 + lam ||b||_1`` by cyclic coordinate descent."""
    if not lam >= 0:
        raise NegativePenalty(f"lasso penalty must be >= 0, got {lam}")
    xtx, xty, _, _ = d.moments
    beta = np.zeros(d.p)
    diag = np.diag(xtx)
    for _ in range(max_iter):
        largest = 0.0
        for j in range(d.p):
            rho = xty[j] - xtx[j] @ beta + diag[j] * beta[j]
            new = float(soft_threshold(rho, lam / 2.0)) / diag[j]
            largest = max(largest, abs(new - beta[j]))
            beta[j] = new
        if largest <= tol * max(1.0, float(np.max(np.abs(beta)))):
            break
    return _make_fit(d, beta, "map-lasso")


@dataclass(frozen=True)
class ConditioningReport:
    kappa: float
    kappa_shifted: float
    alpha: float
    lambda_min: float
    lambda_max: float


def _kappa(lmin: float, lmax: float, p: int) -> float:
    # eigenvalues at round-off level of lmax count as zero
    if lmin <= lmax * p * np.finfo(float).eps:
        return float("inf")
    return lmax / lmin


def condition_number(x, alpha: float = 0.0) -> ConditioningReport:
    """Condition number of ``X'X`` and of ``X'X + alpha I`` from a symmetric eigensolve."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.size == 0:
        raise ValidationError("x must be nonempty")
    if alpha < 0:
        raise NegativePenalty(f"alpha must be >= 0, got {alpha}")
    evals = np.linalg.eigvalsh(x.T @ x)
    lmin, lmax = float(evals[0]), float(evals[-1])
    p = x.shape[1]
    kappa = _kappa(lmin, lmax, p)
    if alpha == 0:
        shifted = kappa
    else:
        shifted = _kappa(lmin + alpha, lmax + alpha, p)
    return ConditioningReport(kappa=kappa, kappa_shifted=shifted, alpha=alpha, lambda_min=lmin, lambda_max=lmax)


def collinear_design(eps: float) -> np.ndarray:
    """The 2 x 2 design ((1, 1), (1, 1 + eps)) whose columns merge as eps -> 0."""
    return np.array([[1.0, 1.0], [1.0, 1.0 + eps]])


def kappa_closed_form(eps):
    """Closed-form condition number of X'X for :func:`collinear_design`."""
    eps = np.asarray(eps, dtype=float)
    root = (eps + 2) * np.sqrt(eps**2 + 4)
    base = eps**2 + 2 * eps + 4
    # (base + root) / (base - root) with base^2 - root^2 = 4 eps^2, free of cancellation
    return (base + root) ** 2 / (4 * eps**2)


def condition_scan(eps_grid, alpha: float = 1.0) -> np.ndarray:
    """Rows of (eps, kappa, kappa_shifted) over the collinear 2 x 2 family."""
    eps_grid = np.asarray(eps_grid, dtype=float)
    if np.any(eps_grid <= 0):
        raise ValidationError("eps values must be > 0")
    rows = np.empty((eps_grid.size, 3))
    for i, eps in enumerate(eps_grid):
        rep = condition_number(collinear_design(eps), alpha)
        rows[i] = (eps, rep.kappa, rep.kappa_shifted)
    return rows


def sensitivity_bound(x, y, delta_rhs) -> float:
    """Upper bound on ||d beta|| / ||beta|| for a perturbation ``delta_rhs`` of y.

    Returns ``kappa(X'X) / cos(theta) * ||X' delta|| / ||X' y||`` with theta the
    angle between X'y and range(X'X). Euclidean norms throughout.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    y = np.asarray(y, dtype=float)
    delta = np.asarray(delta_rhs, dtype=float)
    if y.shape != (x.shape[0],) or delta.shape != y.shape:
        raise DimensionMismatch("y and delta_rhs must have one entry per row of x")
    xty = x.T @ y
    norm_xty = float(np.linalg.norm(xty))
    if norm_xty == 0:
        raise ZeroGradient("X'y is zero")
    norm_dxty = float(np.linalg.norm(x.T @ delta))
    if norm_dxty == 0:
        return 0.0
    evals, evecs = np.linalg.eigh(x.T @ x)
    keep = evals > evals[-1] * x.shape[1] * np.finfo(float).eps
    basis = evecs[:, keep]
    cos_theta = float(np.linalg.norm(basis.T @ xty)) / norm_xty
    kappa = _kappa(float(evals[0]), float(evals[-1]), x.shape[1])
    if cos_theta == 0:
        return float("inf")
    return kappa / cos_theta * norm_dxty / norm_xty
