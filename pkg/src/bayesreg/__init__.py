"""Bayesian regularization for linear regression.

Ridge, lasso, Cauchy, horseshoe and spike-and-slab priors; Gibbs samplers for
the lasso, horseshoe and spike-and-slab models; conditioning diagnostics; and
a Monte Carlo risk lab for James-Stein and thresholding rules.
"""

__version__ = "0.1.0"
