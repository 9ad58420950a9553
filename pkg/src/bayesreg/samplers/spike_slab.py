"""Point-mass spike-and-slab Gibbs sampler.

beta_i = gamma_i alpha_i with gamma_i ~ Bernoulli(theta) and
alpha_i ~ N(0, sigma2_slab); noise y ~ N(X beta, sigma2_e I) with
p(sigma2_e) ~ 1/sigma2_e unless sigma2_e is held fixed.

Each coordinate draws gamma_i with alpha_i integrated out of its odds, then
alpha_i from its normal conditional (or 0 when excluded). Sampling gamma_i
given alpha_i instead would make the chain reducible: once gamma_i = 0 the
likelihood no longer informs alpha_i.
"""

from __future__ import annotations

import math
import time

import numpy as np

from ..errors import ValidationError
from ..model_core import Dataset, LinearMoments
from ..priors import PriorSpec
from .rng import as_generator, sample_inverse_gamma
from .state import ChainState, PosteriorSamples, data_moments, residual_ss, run_chain


def _log_odds(xr: float, xx: float, sigma2_e: float, sigma2_slab: float, prior_logit: float) -> tuple[float, float, float]:
    # conditional posterior of alpha_i given inclusion: N(mean, var)
    var = 1.0 / (xx / sigma2_e + 1.0 / sigma2_slab)
    mean = var * xr / sigma2_e
    lo = prior_logit + 0.5 * math.log(var / sigma2_slab) + mean * mean / (2 * var)
    return lo, mean, var


def spike_slab_gibbs_init(data: Dataset | LinearMoments, sigma2_e: float | None = None) -> ChainState:
    m = data_moments(data)
    p = m.p
    beta = np.linalg.solve(m.xtx + np.eye(p), m.xty)
    if sigma2_e is None:
        sigma2_e = residual_ss(m, beta) / m.n if m.n > 0 else 1.0
    return ChainState(
        beta=beta.copy(),
        sigma2=max(sigma2_e, 1e-8),
        gamma=np.ones(p),
        alpha_coef=beta.copy(),
    )


def spike_slab_gibbs_step(
    gen: np.random.Generator,
    state: ChainState,
    data: Dataset | LinearMoments,
    theta: float,
    sigma2_slab: float,
    *,
    fix_sigma2_e: bool = False,
    fix_gamma: bool = False,
) -> ChainState:
    """One sweep over the coordinates, then sigma2_e.

    ``fix_gamma`` keeps the inclusion pattern and only refreshes the included
    alpha_i, which reduces the sampler to a conjugate normal model.
    """
    m = data_moments(data)
    p = m.p
    beta = state.beta.copy()
    gamma = state.gamma.copy()
    alpha = state.alpha_coef.copy()
    sigma2_e = state.sigma2
    prior_logit = math.log(theta / (1 - theta))
    for i in range(p):
        # x_i' (y - sum_{j != i} x_j beta_j)
        xr = m.xty[i] - float(m.xtx[i] @ beta) + m.xtx[i, i] * beta[i]
        lo, mean, var = _log_odds(xr, m.xtx[i, i], sigma2_e, sigma2_slab, prior_logit)
        if fix_gamma:
            include = gamma[i] == 1
        else:
            prob = 1.0 / (1.0 + math.exp(-lo)) if lo > -700 else 0.0
            include = gen.random() < prob
        if include:
            gamma[i] = 1.0
            alpha[i] = mean + math.sqrt(var) * gen.standard_normal()
        else:
            gamma[i] = 0.0
            alpha[i] = 0.0
        beta[i] = alpha[i]
    if not fix_sigma2_e:
        sigma2_e = sample_inverse_gamma(gen, m.n / 2, residual_ss(m, beta) / 2)
    return ChainState(beta=beta, sigma2=sigma2_e, gamma=gamma, alpha_coef=alpha)


def spike_slab_gibbs_run(
    rng,
    data: Dataset | LinearMoments,
    theta: float = 0.5,
    sigma2_slab: float = 1.0,
    iters: int = 10_000,
    burn_in: int = 2_000,
    thin: int = 1,
    *,
    sigma2_e: float | None = None,
    init: ChainState | None = None,
    fix_gamma: bool = False,
) -> PosteriorSamples:
    """Run the sampler; passing ``sigma2_e`` holds the noise variance at that value.

    With ``fix_gamma`` the inclusion pattern of ``init`` (all ones by default)
    is held fixed.
    """
    if not 0 < theta < 1:
        raise ValidationError(f"theta must lie in (0, 1), got {theta}")
    if not sigma2_slab > 0:
        raise ValidationError(f"slab variance must be > 0, got {sigma2_slab}")
    if sigma2_e is not None and not sigma2_e > 0:
        raise ValidationError("fixed noise variance must be > 0")
    gen = as_generator(rng)
    start = time.perf_counter()
    if init is None:
        init = spike_slab_gibbs_init(data, sigma2_e)
    fixed = sigma2_e is not None

    def step(g, s):
        return spike_slab_gibbs_step(g, s, data, theta, sigma2_slab, fix_sigma2_e=fixed, fix_gamma=fix_gamma)

    states = run_chain(step, init, gen, iters, burn_in, thin)
    return PosteriorSamples(
        states=states,
        burn_in=burn_in,
        thin=thin,
        seed=rng if not isinstance(rng, np.random.Generator) else None,
        prior=PriorSpec.spike_slab(theta, sigma2_slab),
        method="spike-slab",
        elapsed=time.perf_counter() - start,
        col_sds=getattr(data, "col_sds", None),
    )


def inclusion_probabilities(samples: PosteriorSamples) -> np.ndarray:
    return samples.field("gamma").mean(axis=0)
