from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from ..errors import ValidationError
from ..model_core import Dataset, LinearMoments
from ..priors import PriorSpec
from .rng import RngStream


@dataclass(frozen=True, eq=False)
class ChainState:
    """Full parameter state after one Gibbs sweep.

    ``beta`` and ``sigma2`` (noise variance) are always present. The remaining
    fields belong to one sampler each:

    * lasso: ``tau2`` (local variances), ``lambda_shrink`` (global rate)
    * horseshoe: ``lambda2`` (local), ``tau2_global``, auxiliaries ``nu``, ``xi``
    * spike-and-slab: ``gamma`` (0/1 inclusion), ``alpha_coef``
    """

    beta: np.ndarray
    sigma2: float
    tau2: np.ndarray | None = None
    lambda_shrink: float | None = None
    lambda2: np.ndarray | None = None
    tau2_global: float | None = None
    nu: np.ndarray | None = None
    xi: float | None = None
    gamma: np.ndarray | None = None
    alpha_coef: np.ndarray | None = None

    def columns(self) -> list[tuple[str, float]]:
        p = self.beta.shape[0]
        out = [(f"beta_{j + 1}", self.beta[j]) for j in range(p)]
        out.append(("sigma2", self.sigma2))
        for name in ("tau2", "lambda2", "nu", "gamma", "alpha_coef"):
            vec = getattr(self, name)
            if vec is not None:
                label = "alpha" if name == "alpha_coef" else name
                out.extend((f"{label}_{j + 1}", vec[j]) for j in range(p))
        for name in ("lambda_shrink", "tau2_global", "xi"):
            val = getattr(self, name)
            if val is not None:
                out.append((name, val))
        return out


def data_moments(data: Dataset | LinearMoments) -> LinearMoments:
    if isinstance(data, LinearMoments):
        return data
    return data.moments


def residual_ss(m: LinearMoments, beta: np.ndarray) -> float:
    """||y - X beta||^2 from the moments; clamped at zero against round-off."""
    rss = m.yty - 2.0 * float(beta @ m.xty) + float(beta @ m.xtx @ beta)
    return max(rss, 0.0)


@dataclass(eq=False)
class PosteriorSamples:
    """Retained Gibbs states plus the metadata needed to reproduce them.

    ``col_sds`` maps standardized coefficients back to the raw scale
    (raw = beta / col_sds); it is ``None`` for chains run on bare moments.
    """

    states: list[ChainState]
    burn_in: int
    thin: int
    seed: RngStream | None
    prior: PriorSpec
    method: str
    elapsed: float = 0.0
    col_sds: np.ndarray | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.states)

    @property
    def p(self) -> int:
        return self.states[0].beta.shape[0]

    def beta(self, scale: str = "standardized") -> np.ndarray:
        """Retained coefficients as an (m, p) array."""
        b = np.array([s.beta for s in self.states])
        if scale == "standardized":
            return b
        if scale == "raw":
            if self.col_sds is None:
                raise ValueError("raw scale needs the dataset column sds")
            return b / self.col_sds
        raise ValueError(f"unknown scale {scale!r}")

    def field(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.states])

    def to_csv(self, header_lines: tuple[str, ...] = (), *, chain: int | None = None, include_header: bool = True) -> str:
        """One row per retained state, standardized-scale coefficients."""
        buf = io.StringIO()
        for line in header_lines:
            buf.write(f"# {line}\n")
        cols = self.states[0].columns()
        names = [c for c, _ in cols]
        prefix = ["method", "chain", "draw"]
        if include_header:
            buf.write(",".join(prefix + names) + "\n")
        tag = "" if chain is None else str(chain)
        for k, state in enumerate(self.states):
            vals = [repr(float(v)) for _, v in state.columns()]
            buf.write(",".join([self.method, tag, str(k)] + vals) + "\n")
        return buf.getvalue()


def run_chain(step, init: ChainState, gen, iters: int, burn_in: int, thin: int) -> list[ChainState]:
    if not iters > burn_in >= 0:
        raise ValidationError("need iters > burn_in >= 0")
    if thin < 1:
        raise ValidationError("thin must be >= 1")
    state = init
    kept = []
    for k in range(iters):
        state = step(gen, state)
        if k >= burn_in and (k - burn_in) % thin == 0:
            kept.append(state)
    return kept
