"""Horseshoe Gibbs sampler through the inverse-gamma decomposition of the half-Cauchy.

A half-Cauchy C+(0, 1) scale ``s`` has ``s^2 | a ~ InvGamma(1/2, 1/a)`` with
``a ~ InvGamma(1/2, 1)``, which makes every full conditional inverse-gamma or
normal::

    beta     ~ N(A^{-1} X'y, sigma2 A^{-1}),     A = X'X + (tau2 Lambda)^{-1}
    sigma2   ~ IG((n + p)/2, rss/2 + beta'(tau2 Lambda)^{-1} beta / 2)
    lambda2_i~ IG(1, 1/nu_i + beta_i^2 / (2 tau2 sigma2))
    nu_i     ~ IG(1, 1 + 1/lambda2_i)
    tau2     ~ IG((p + 1)/2, 1/xi + sum(beta_i^2 / lambda2_i) / (2 sigma2))
    xi       ~ IG(1, 1 + 1/tau2)

updated in that order.
"""

from __future__ import annotations

import time

import numpy as np

from ..model_core import Dataset, LinearMoments
from ..priors import PriorSpec
from ._linalg import draw_gaussian_posterior
from .rng import as_generator, sample_inverse_gamma
from .state import ChainState, PosteriorSamples, data_moments, residual_ss, run_chain


def horseshoe_gibbs_init(data: Dataset | LinearMoments) -> ChainState:
    m = data_moments(data)
    p = m.p
    beta = np.linalg.solve(m.xtx + np.eye(p), m.xty)
    sigma2 = residual_ss(m, beta) / m.n if m.n > 0 else 1.0
    return ChainState(
        beta=beta,
        sigma2=max(sigma2, 1e-8),
        lambda2=np.ones(p),
        tau2_global=1.0,
        nu=np.ones(p),
        xi=1.0,
    )


def horseshoe_gibbs_step(
    gen: np.random.Generator,
    state: ChainState,
    data: Dataset | LinearMoments,
    *,
    freeze: frozenset[str] = frozenset(),
) -> ChainState:
    """One sweep. ``freeze`` may hold ``sigma2``, ``lambda2`` (with nu) or ``tau2`` (with xi) fixed."""
    m = data_moments(data)
    p = m.p
    sigma2 = state.sigma2
    lambda2, nu = state.lambda2, state.nu
    tau2, xi = state.tau2_global, state.xi

    prior_prec = 1.0 / (tau2 * lambda2)
    beta = draw_gaussian_posterior(gen, m.xtx + np.diag(prior_prec), m.xty, sigma2)
    b2 = beta * beta

    if "sigma2" not in freeze:
        rate = residual_ss(m, beta) / 2 + float(b2 @ prior_prec) / 2
        sigma2 = sample_inverse_gamma(gen, (m.n + p) / 2, rate)

    if "lambda2" not in freeze:
        lambda2 = sample_inverse_gamma(gen, np.ones(p), 1.0 / nu + b2 / (2 * tau2 * sigma2))
        nu = sample_inverse_gamma(gen, np.ones(p), 1.0 + 1.0 / lambda2)

    if "tau2" not in freeze:
        tau2 = sample_inverse_gamma(gen, (p + 1) / 2, 1.0 / xi + float(np.sum(b2 / lambda2)) / (2 * sigma2))
        xi = sample_inverse_gamma(gen, 1.0, 1.0 + 1.0 / tau2)

    return ChainState(beta=beta, sigma2=sigma2, lambda2=lambda2, tau2_global=tau2, nu=nu, xi=xi)


def horseshoe_gibbs_run(
    rng,
    data: Dataset | LinearMoments,
    iters: int = 10_000,
    burn_in: int = 2_000,
    thin: int = 1,
    *,
    init: ChainState | None = None,
    freeze: frozenset[str] = frozenset(),
) -> PosteriorSamples:
    gen = as_generator(rng)
    start = time.perf_counter()
    if init is None:
        init = horseshoe_gibbs_init(data)

    def step(g, s):
        return horseshoe_gibbs_step(g, s, data, freeze=freeze)

    states = run_chain(step, init, gen, iters, burn_in, thin)
    return PosteriorSamples(
        states=states,
        burn_in=burn_in,
        thin=thin,
        seed=rng if not isinstance(rng, np.random.Generator) else None,
        prior=PriorSpec.horseshoe(1.0),
        method="horseshoe",
        elapsed=time.perf_counter() - start,
        col_sds=getattr(data, "col_sds", None),
    )
