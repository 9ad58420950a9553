"""Prior densities, penalty functions and the scale-mixture identities.

Each prior has a penalty ``phi(beta) = -log p(beta | tau) + const``, so that the
MAP estimate is ``argmin ||y - X beta||^2 + phi(beta)``:

=========  ==================================  =============================
prior      density                             penalty
=========  ==================================  =============================
ridge      N(0, tau^2)                         beta^2 / (2 tau^2)
lasso      Laplace(0, scale=tau)               |beta| / tau
cauchy     Cauchy(0, tau)                      log(tau^2 + beta^2)
horseshoe  no closed form; bounded above by    -log log(1 + 2 tau^2/beta^2)
           a multiple of log(1 + 2tau^2/b^2)
=========  ==================================  =============================
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DimensionMismatch, QuadratureFailure, UndefinedAtZero, ValidationError
from .model_core import Dataset

KINDS = ("ridge", "lasso", "cauchy", "horseshoe", "spike-slab")

# Multiplier commonly quoted for the horseshoe upper envelope.
HORSESHOE_QUOTED_CONSTANT = math.pi * math.sqrt(math.pi / 2)
# Scale of the horseshoe density bounds, K = 1/sqrt(2 pi^3), at tau = 1.
HORSESHOE_K = 1.0 / math.sqrt(2 * math.pi**3)


@dataclass(frozen=True)
class PriorSpec:
    """One prior from the catalogue.

    ``tau`` is the scale for ridge/lasso/cauchy/horseshoe. Spike-and-slab uses
    ``theta`` (inclusion probability) and ``sigma2``, the slab variance.
    """

    kind: str
    tau: float = 1.0
    theta: float = 0.5
    sigma2: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown prior {self.kind!r}; expected one of {KINDS}")
        if self.kind == "spike-slab":
            if not 0 < self.theta < 1:
                raise ValidationError(f"theta must lie in (0, 1), got {self.theta}")
            if not self.sigma2 > 0:
                raise ValidationError(f"slab variance must be > 0, got {self.sigma2}")
        elif not self.tau > 0:
            raise ValidationError(f"tau must be > 0, got {self.tau}")

    @classmethod
    def ridge(cls, tau: float = 1.0) -> "PriorSpec":
        return cls("ridge", tau=tau)

    @classmethod
    def lasso(cls, tau: float = 1.0) -> "PriorSpec":
        return cls("lasso", tau=tau)

    @classmethod
    def cauchy(cls, tau: float = 1.0) -> "PriorSpec":
        return cls("cauchy", tau=tau)

    @classmethod
    def horseshoe(cls, tau: float = 1.0) -> "PriorSpec":
        return cls("horseshoe", tau=tau)

    @classmethod
    def spike_slab(cls, theta: float = 0.5, sigma2: float = 1.0) -> "PriorSpec":
        return cls("spike-slab", theta=theta, sigma2=sigma2)

    def as_dict(self) -> dict:
        if self.kind == "spike-slab":
            return {"kind": self.kind, "theta": self.theta, "sigma2": self.sigma2}
        return {"kind": self.kind, "tau": self.tau}


# Laplace parametrizations. With noise variance sigma2 the lasso posterior mode
# solves ||y - X b||^2 + lam ||b||_1 with lam = 2 sigma2 / b for Laplace scale b;
# the normal scale mixture with exponential rate alpha^2/2 on the variance
# multiplier gives a Laplace with rate alpha / sigma.


def lasso_weight_from_scale(b: float, sigma2: float) -> float:
    return 2.0 * sigma2 / b


def laplace_scale_from_weight(lam: float, sigma2: float) -> float:
    return 2.0 * sigma2 / lam


def laplace_rate_from_mixture(alpha: float, sigma: float) -> float:
    return alpha / sigma


def log_prior(prior: PriorSpec, beta: float) -> float:
    """Log prior density of one coefficient.

    Horseshoe returns the log of the envelope, ``log log(1 + 2 tau^2 / beta^2)``,
    i.e. minus :func:`horseshoe_penalty`. Spike-and-slab returns the log of the
    slab part ``log(theta) + log N(beta; 0, sigma2)`` off zero; at zero both
    report ``+inf`` (infinite spike / point mass).
    """
    beta = float(beta)
    kind, tau = prior.kind, prior.tau
    if kind == "ridge":
        return -0.5 * math.log(2 * math.pi) - math.log(tau) - beta**2 / (2 * tau**2)
    if kind == "lasso":
        return -math.log(2 * tau) - abs(beta) / tau
    if kind == "cauchy":
        return math.log(tau) - math.log(math.pi) - math.log(tau**2 + beta**2)
    if beta == 0:
        return math.inf
    if kind == "horseshoe":
        return -horseshoe_penalty(tau, beta)
    return math.log(prior.theta) - 0.5 * math.log(2 * math.pi * prior.sigma2) - beta**2 / (2 * prior.sigma2)


def penalty(prior: PriorSpec, beta: float) -> float:
    beta = float(beta)
    kind, tau = prior.kind, prior.tau
    if kind == "ridge":
        return beta**2 / (2 * tau**2)
    if kind == "lasso":
        return abs(beta) / tau
    if kind == "cauchy":
        return math.log(tau**2 + beta**2)
    if kind == "horseshoe":
        return horseshoe_penalty(tau, beta)
    if beta == 0:
        return 0.0
    return beta**2 / (2 * prior.sigma2) + math.log((1 - prior.theta) / prior.theta)


def horseshoe_penalty(tau: float, beta: float) -> float:
    """``-log log(1 + 2 tau^2 / beta^2)``; a lower bound on the horseshoe's -log density."""
    if beta == 0:
        raise UndefinedAtZero("horseshoe penalty is undefined at beta = 0")
    if not tau > 0:
        raise ValidationError(f"tau must be > 0, got {tau}")
    r = math.sqrt(2) * tau / abs(beta)
    if r > 1e150:
        # log1p(r^2) = 2 log r to double precision; avoids overflow for tiny beta
        return -math.log(2 * math.log(r)) if math.isfinite(r) else -math.inf
    return -math.log(math.log1p(r * r))


def _check_quad(value: float, abserr: float, tol: float, what: str) -> None:
    if not np.isfinite(value) or abserr > tol * max(abs(value), 1e-300) * 10:
        raise QuadratureFailure(f"{what}: estimate {value:.6g} with error {abserr:.3g} misses tol {tol:g}")


def horseshoe_density_quadrature(tau: float, beta: float, tol: float = 1e-8, *, scheme: str = "lambda") -> float:
    """Horseshoe density of ``beta`` by integrating out the half-Cauchy local scale.

    ``scheme="lambda"`` integrates N(beta; 0, tau^2 lam^2) 2/(pi (1 + lam^2)) over
    lam in [0, inf), split at the peak lam = |beta|/tau. ``scheme="angle"``
    substitutes lam = tan(u), giving a finite range [0, pi/2) with constant
    mixing weight 2/pi.
    """
    if not tol > 0:
        raise ValidationError("tol must be > 0")
    if not tau > 0:
        raise ValidationError(f"tau must be > 0, got {tau}")
    b2 = float(beta) ** 2
    if b2 == 0:
        return math.inf
    peak = math.sqrt(b2) / tau
    c = 1.0 / (math.sqrt(2 * math.pi) * tau)

    if scheme == "lambda":

        def f(lam):
            if lam == 0:
                return 0.0
            return c / lam * math.exp(-b2 / (2 * tau**2 * lam**2)) * (2 / math.pi) / (1 + lam**2)

        pieces = [(0.0, peak), (peak, math.inf)]
    elif scheme == "angle":

        def f(u):
            t = math.tan(u)
            if t == 0:
                return 0.0
            return c / t * math.exp(-b2 / (2 * tau**2 * t**2)) * (2 / math.pi)

        mid = math.atan(peak)
        pieces = [(0.0, mid), (mid, math.pi / 2)]
    else:
        raise ValidationError(f"unknown quadrature scheme {scheme!r}")

    total = 0.0
    err = 0.0
    for lo, hi in pieces:
        val, e = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=tol, limit=200)
        total += val
        err += e
    _check_quad(total, err, tol, "horseshoe density")
    return total


def horseshoe_normalization(tau: float = 1.0, tol: float = 1e-8) -> float:
    """Integral of the quadrature horseshoe density over the real line."""

    def dens(b):
        return horseshoe_density_quadrature(tau, b, tol)

    total = 0.0
    err = 0.0
    # logarithmic spike at 0, 1/beta^2 tail
    for lo, hi in [(0.0, tau), (tau, math.inf)]:
        val, e = integrate.quad(dens, lo, hi, epsabs=0.0, epsrel=tol * 10, limit=200)
        total += val
        err += e
    return 2.0 * total


def laplace_mixture_check(alpha: float, sigma: float, beta: float, tol: float = 1e-10) -> tuple[float, float]:
    """Integrate the normal / exponential scale mixture and return it with the Laplace closed form.

    Mixture: N(beta; 0, sigma^2 t) with t ~ Exp(rate alpha^2/2). Closed form:
    (alpha / (2 sigma)) exp(-alpha |beta| / sigma).
    """
    if not (alpha > 0 and sigma > 0):
        raise ValidationError("alpha and sigma must be > 0")
    b2 = float(beta) ** 2
    s2 = sigma**2
    a2 = alpha**2

    # t = s^2 removes the 1/sqrt(t) singularity at the origin
    def f(s):
        if s == 0:
            return 0.0 if b2 > 0 else a2 / math.sqrt(2 * math.pi * s2)
        return (2 / math.sqrt(2 * math.pi * s2)) * math.exp(-b2 / (2 * s2 * s * s)) * (a2 / 2) * math.exp(-a2 * s * s / 2)

    peak = max((b2 / (s2 * a2)) ** 0.25, 1e-3)
    mixture = 0.0
    err = 0.0
    for lo, hi in [(0.0, peak), (peak, math.inf)]:
        val, e = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=tol, limit=200)
        mixture += val
        err += e
    _check_quad(mixture, err, tol, "laplace mixture")
    closed = alpha / (2 * sigma) * math.exp(-alpha / sigma * abs(beta))
    return mixture, closed


def spike_slab_neg_log_posterior(gamma, alpha_coef, theta: float, sigma2: float, sigma2_e: float, d: Dataset) -> float:
    """``||y - X_g a_g||^2 / (2 s2e) + ||a||^2 / (2 s2) + log((1-theta)/theta) sum(g)``.

    ``sigma2`` is the slab variance; ``sigma2_e`` the noise variance.
    """
    gamma = np.asarray(gamma)
    alpha_coef = np.asarray(alpha_coef, dtype=float)
    if gamma.shape != (d.p,) or alpha_coef.shape != (d.p,):
        raise DimensionMismatch(f"gamma and alpha_coef must have length p = {d.p}")
    if not np.all((gamma == 0) | (gamma == 1)):
        raise ValidationError("gamma entries must be 0 or 1")
    if not (sigma2 > 0 and sigma2_e > 0):
        raise ValidationError("variances must be > 0")
    if not 0 < theta < 1:
        raise ValidationError("theta must lie in (0, 1)")
    sel = gamma.astype(bool)
    r = d.y_centered - d.x_std[:, sel] @ alpha_coef[sel]
    return (
        float(r @ r) / (2 * sigma2_e)
        + float(alpha_coef @ alpha_coef) / (2 * sigma2)
        + math.log((1 - theta) / theta) * float(gamma.sum())
    )


@dataclass(frozen=True, eq=False)
class PenaltyGrid:
    """Total penalty phi(b1) + phi(b2) on a square grid.

    ``values[i, j]`` belongs to ``(beta_grid[i], beta_grid[j])``. ``budget`` is
    the level through (1/2, 1/2); ``inside`` marks the constraint region
    ``phi(b1) + phi(b2) <= budget``. Horseshoe axes carry ``-inf``.
    """

    beta_grid: np.ndarray
    values: np.ndarray
    prior: PriorSpec
    budget: float

    @property
    def inside(self) -> np.ndarray:
        return self.values <= self.budget

    def to_csv(self, header_lines: tuple[str, ...] = ()) -> str:
        buf = io.StringIO()
        for line in header_lines:
            buf.write(f"# {line}\n")
        buf.write(f"# prior={self.prior.as_dict()} budget={float(self.budget)!r}\n")
        buf.write("beta1,beta2,value\n")
        for i, b1 in enumerate(self.beta_grid):
            for j, b2 in enumerate(self.beta_grid):
                buf.write(f"{float(b1)!r},{float(b2)!r},{float(self.values[i, j])!r}\n")
        return buf.getvalue()


def _penalty_or_sentinel(prior: PriorSpec, beta: float) -> float:
    if prior.kind == "horseshoe" and beta == 0:
        return -math.inf
    return penalty(prior, beta)


def penalty_contours(prior: PriorSpec, lim: float = 2.0, points: int = 101) -> PenaltyGrid:
    if not (np.isfinite(lim) and lim > 0):
        raise ValidationError("grid limit must be finite and > 0")
    if points < 2:
        raise ValidationError("need at least two grid points")
    grid = np.linspace(-lim, lim, points)
    phi = np.array([_penalty_or_sentinel(prior, b) for b in grid])
    values = phi[:, None] + phi[None, :]
    budget = 2 * penalty(prior, 0.5)
    return PenaltyGrid(beta_grid=grid, values=values, prior=prior, budget=budget)


@dataclass(frozen=True)
class HorseshoeBoundCheck:
    """Numerical check of the horseshoe envelope on a beta grid.

    ``upper_ratio`` is ``max p(beta) / log(1 + 2 tau^2 / beta^2)``, the tightest
    constant C with ``p <= C log(1 + 2 tau^2 / beta^2)`` on the grid.
    ``lower_ratio`` is ``min p(beta) / ((K / (2 tau)) log(1 + 4 tau^2 / beta^2))``
    for the matching lower envelope; it should be >= 1.
    """

    tau: float
    upper_ratio: float
    lower_ratio: float
    quoted_constant: float = HORSESHOE_QUOTED_CONSTANT

    @property
    def quoted_bound_holds(self) -> bool:
        return self.upper_ratio <= self.quoted_constant

    @property
    def lower_bound_holds(self) -> bool:
        return self.lower_ratio >= 1.0


def horseshoe_bound_check(tau: float, beta_grid, tol: float = 1e-10) -> HorseshoeBoundCheck:
    betas = np.abs(np.asarray(beta_grid, dtype=float))
    if betas.size == 0 or np.any(betas == 0):
        raise UndefinedAtZero("the envelope is undefined at beta = 0")
    dens = np.array([horseshoe_density_quadrature(tau, b, tol) for b in betas])
    upper_env = np.log1p(2 * tau**2 / betas**2)
    lower_env = HORSESHOE_K / (2 * tau) * np.log1p(4 * tau**2 / betas**2)
    return HorseshoeBoundCheck(
        tau=float(tau),
        upper_ratio=float(np.max(dens / upper_env)),
        lower_ratio=float(np.min(dens / lower_env)),
    )
