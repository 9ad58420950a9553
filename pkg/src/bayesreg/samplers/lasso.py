"""Bayesian lasso Gibbs sampler (Laplace prior as a normal scale mixture).

Model on standardized data::

    y | beta, sigma2       ~ N(X beta, sigma2 I)
    beta | sigma2, tau2    ~ N(0, sigma2 diag(tau2))
    tau2_j | lam           ~ Exp(rate lam^2 / 2)
    p(sigma2)              ~ 1 / sigma2

Sweep order: beta -> sigma2 -> tau2 -> lam (the last only in hyper mode,
lam^2 ~ Gamma(p + a, rate sum(tau2)/2 + b)).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from ..model_core import Dataset, LinearMoments
from ..priors import PriorSpec
from ._linalg import draw_gaussian_posterior
from .rng import as_generator, sample_inverse_gamma, sample_inverse_gaussian
from .state import ChainState, PosteriorSamples, data_moments, residual_ss, run_chain

BETA_FLOOR = 1e-12
ZERO_PERTURB = 1e-8


@dataclass(frozen=True)
class LambdaMode:
    """``fixed`` keeps lam at ``value``; ``hyper`` refreshes lam^2 from its Gamma(a, b) conditional."""

    kind: str = "hyper"
    value: float | None = None
    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        if self.kind not in ("fixed", "hyper"):
            raise ValidationError(f"lambda mode must be fixed or hyper, got {self.kind!r}")
        if self.kind == "fixed" and not (self.value is not None and self.value > 0):
            raise ValidationError("fixed lambda mode needs a value > 0")
        if not (self.a > 0 and self.b > 0):
            raise ValidationError("hyperprior a, b must be > 0")

    @classmethod
    def parse(cls, text: str) -> "LambdaMode":
        """Parse ``hyper`` or ``fixed:<value>``."""
        if text == "hyper":
            return cls("hyper")
        if text.startswith("fixed:"):
            try:
                return cls("fixed", float(text[len("fixed:"):]))
            except ValueError:
                pass
        raise ValidationError(f"bad lambda mode {text!r}; use 'hyper' or 'fixed:<v>'")


def lasso_gibbs_init(data: Dataset | LinearMoments) -> ChainState:
    """Empirical starting point: ridge(1) coefficients, their squares as local variances."""
    m = data_moments(data)
    p = m.p
    beta = np.linalg.solve(m.xtx + np.eye(p), m.xty)
    beta = np.where(beta == 0.0, ZERO_PERTURB, beta)
    sigma2 = residual_ss(m, beta) / m.n if m.n > 0 else 1.0
    if sigma2 <= 0:
        sigma2 = ZERO_PERTURB
    tau2 = beta * beta
    lam = p * math.sqrt(sigma2) / float(np.sum(np.abs(beta)))
    return ChainState(beta=beta, sigma2=sigma2, tau2=tau2, lambda_shrink=lam)


def lasso_gibbs_step(
    gen: np.random.Generator,
    state: ChainState,
    data: Dataset | LinearMoments,
    *,
    lambda_mode: LambdaMode = LambdaMode(),
    freeze: frozenset[str] = frozenset(),
) -> ChainState:
    """One full sweep. ``freeze`` may name any of ``tau2``, ``sigma2``, ``lambda`` to hold them fixed."""
    m = data_moments(data)
    p = m.p
    tau2 = state.tau2
    sigma2 = state.sigma2
    lam = state.lambda_shrink

    inv_tau2 = 1.0 / tau2
    beta = draw_gaussian_posterior(gen, m.xtx + np.diag(inv_tau2), m.xty, sigma2)

    if "sigma2" not in freeze:
        shape = (m.n - 1) / 2 + p / 2
        rate = residual_ss(m, beta) / 2 + float(beta * beta @ inv_tau2) / 2
        sigma2 = sample_inverse_gamma(gen, shape, rate)

    if "tau2" not in freeze:
        b2 = np.maximum(beta * beta, BETA_FLOOR**2)
        inv = sample_inverse_gaussian(gen, np.sqrt(lam * lam * sigma2 / b2), np.full(p, lam * lam))
        tau2 = 1.0 / inv

    if lambda_mode.kind == "fixed":
        lam = lambda_mode.value
    elif "lambda" not in freeze:
        lam2 = gen.gamma(p + lambda_mode.a, 1.0 / (float(np.sum(tau2)) / 2 + lambda_mode.b))
        lam = math.sqrt(lam2)

    return ChainState(beta=beta, sigma2=sigma2, tau2=tau2, lambda_shrink=lam)


def lasso_gibbs_run(
    rng,
    data: Dataset | LinearMoments,
    iters: int = 10_000,
    burn_in: int = 2_000,
    thin: int = 1,
    lambda_mode: LambdaMode = LambdaMode(),
    *,
    init: ChainState | None = None,
    freeze: frozenset[str] = frozenset(),
) -> PosteriorSamples:
    gen = as_generator(rng)
    start = time.perf_counter()
    if init is None:
        init = lasso_gibbs_init(data)
        if lambda_mode.kind == "fixed":
            init = ChainState(beta=init.beta, sigma2=init.sigma2, tau2=init.tau2, lambda_shrink=lambda_mode.value)

    def step(g, s):
        return lasso_gibbs_step(g, s, data, lambda_mode=lambda_mode, freeze=freeze)

    states = run_chain(step, init, gen, iters, burn_in, thin)
    return PosteriorSamples(
        states=states,
        burn_in=burn_in,
        thin=thin,
        seed=rng if not isinstance(rng, np.random.Generator) else None,
        prior=PriorSpec.lasso(1.0 / init.lambda_shrink),
        method="lasso",
        elapsed=time.perf_counter() - start,
        col_sds=getattr(data, "col_sds", None),
    )
