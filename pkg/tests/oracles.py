"""Independent reference computations shared by the unit and acceptance tests."""

import itertools
import math

import numpy as np
from scipy import integrate
from scipy.special import gammaln


def conjugate_posterior(xtx, xty, prior_var, sigma2):
    """Mean and covariance of beta under y ~ N(X beta, sigma2), beta ~ N(0, sigma2 diag(prior_var))."""
    a = xtx + np.diag(1.0 / np.asarray(prior_var, dtype=float))
    mean = np.linalg.solve(a, xty)
    cov = sigma2 * np.linalg.inv(a)
    return mean, cov


def _log_marginal_fixed(x_sel, y, s2, s2e):
    n = y.size
    cov = s2e * np.eye(n) + s2 * x_sel @ x_sel.T
    sign, logdet = np.linalg.slogdet(cov)
    return -0.5 * (n * math.log(2 * math.pi) + logdet + y @ np.linalg.solve(cov, y))


def _log_marginal_integrated(x_sel, y, s2):
    # p(y | gamma) with p(s2e) ~ 1/s2e, integrated over t = log s2e
    evals, evecs = np.linalg.eigh(s2 * x_sel @ x_sel.T) if x_sel.shape[1] else (np.zeros(y.size), np.eye(y.size))
    evals = np.maximum(evals, 0.0)
    z2 = (evecs.T @ y) ** 2
    n = y.size

    def logf(t):
        v = math.exp(t) + evals
        return -0.5 * (n * math.log(2 * math.pi) + np.sum(np.log(v)) + np.sum(z2 / v))

    grid = np.linspace(-20, 20, 4001)
    vals = np.array([logf(t) for t in grid])
    peak = grid[np.argmax(vals)]
    top = vals.max()
    val, _ = integrate.quad(lambda t: math.exp(logf(t) - top), peak - 40, peak + 40, points=[peak], limit=400, epsabs=0, epsrel=1e-11)
    return top + math.log(val)


def spike_slab_enumeration(x, y, theta, s2, s2e=None):
    """Exact posterior over inclusion patterns by enumerating all 2^p of them.

    Returns (patterns, probabilities, conditional means of beta per pattern).
    With ``s2e=None`` the noise variance carries the 1/s2e prior and is
    integrated out by quadrature.
    """
    n, p = x.shape
    patterns = np.array(list(itertools.product((0, 1), repeat=p)), dtype=float)
    logp = []
    means = []
    for g in patterns:
        sel = g.astype(bool)
        xs = x[:, sel]
        k = int(sel.sum())
        prior = k * math.log(theta) + (p - k) * math.log(1 - theta)
        if s2e is None:
            logp.append(prior + _log_marginal_integrated(xs, y, s2))
            means.append(None)
        else:
            logp.append(prior + _log_marginal_fixed(xs, y, s2, s2e))
            m = np.zeros(p)
            if k:
                m[sel] = np.linalg.solve(xs.T @ xs / s2e + np.eye(k) / s2, xs.T @ y / s2e)
            means.append(m)
    logp = np.array(logp)
    prob = np.exp(logp - logp.max())
    return patterns, prob / prob.sum(), means


def laplace_cdf(x, rate):
    x = np.asarray(x, dtype=float)
    return np.where(x < 0, 0.5 * np.exp(rate * x), 1 - 0.5 * np.exp(-rate * x))


def batch_means_se(x, batches=50):
    """Monte Carlo standard error of a chain mean by non-overlapping batch means."""
    x = np.asarray(x, dtype=float)
    m = x.size // batches
    means = x[: m * batches].reshape(batches, m).mean(axis=1)
    return means.std(ddof=1) / math.sqrt(batches)


GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def ig_pdf(x, mu, lam):
    return np.sqrt(lam / (2 * np.pi * x**3)) * np.exp(-lam * (x - mu) ** 2 / (2 * mu**2 * x))


def invgamma_pdf(x, a, b):
    return np.exp(a * np.log(b) - gammaln(a) - (a + 1) * np.log(x) - b / x)


def quadrature_cdf(pdf, points, lower=0.0):
    """CDF at sorted ``points`` by Gauss-Legendre on each gap, summed left to right."""
    edges = np.concatenate([[lower], points])
    a, b = edges[:-1], edges[1:]
    half = (b - a)[:, None] / 2
    x = (a + b)[:, None] / 2 + half * GL_NODES[None, :]
    pieces = (half * GL_WEIGHTS[None, :] * pdf(x)).sum(axis=1)
    return np.cumsum(pieces)


def ks_statistic(sorted_draws, cdf_values):
    n = sorted_draws.size
    i = np.arange(1, n + 1)
    return max(np.max(i / n - cdf_values), np.max(cdf_values - (i - 1) / n))
