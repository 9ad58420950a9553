"""Seeded random primitives, Gibbs samplers and chain summaries."""

from .horseshoe import horseshoe_gibbs_init, horseshoe_gibbs_run, horseshoe_gibbs_step
from .lasso import LambdaMode, lasso_gibbs_init, lasso_gibbs_run, lasso_gibbs_step
from .rng import RngStream, as_generator, sample_inverse_gamma, sample_inverse_gaussian
from .spike_slab import inclusion_probabilities, spike_slab_gibbs_init, spike_slab_gibbs_run, spike_slab_gibbs_step
from .state import ChainState, PosteriorSamples
from .summary import SummaryReport, effective_sample_size, kde_mode, summarize

__all__ = [
    "ChainState",
    "LambdaMode",
    "PosteriorSamples",
    "RngStream",
    "SummaryReport",
    "as_generator",
    "effective_sample_size",
    "horseshoe_gibbs_init",
    "horseshoe_gibbs_run",
    "horseshoe_gibbs_step",
    "inclusion_probabilities",
    "kde_mode",
    "lasso_gibbs_init",
    "lasso_gibbs_run",
    "lasso_gibbs_step",
    "sample_inverse_gamma",
    "sample_inverse_gaussian",
    "spike_slab_gibbs_init",
    "spike_slab_gibbs_run",
    "spike_slab_gibbs_step",
    "summarize",
]
