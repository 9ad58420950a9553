from __future__ import annotations

import numpy as np
import scipy.linalg

from ..errors import NumericalBreakdown

_JITTERS = (0.0, 1e-10, 1e-8, 1e-6)


def cholesky_with_jitter(a: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor of ``a``, adding diagonal jitter 1e-10 .. 1e-6 on failure."""
    for jitter in _JITTERS:
        try:
            m = a if jitter == 0 else a + jitter * np.eye(a.shape[0])
            return scipy.linalg.cholesky(m, lower=True, check_finite=True)
        except (np.linalg.LinAlgError, ValueError):
            continue
    raise NumericalBreakdown("precision matrix is not positive definite even after jitter")


def draw_gaussian_posterior(gen: np.random.Generator, precision: np.ndarray, xty: np.ndarray, sigma2: float) -> np.ndarray:
    """Draw from N(A^{-1} b, sigma2 A^{-1}) given the precision-like matrix A."""
    chol = cholesky_with_jitter(precision)
    mean = scipy.linalg.cho_solve((chol, True), xty)
    z = gen.standard_normal(xty.shape[0])
    return mean + np.sqrt(sigma2) * scipy.linalg.solve_triangular(chol.T, z, lower=False)
