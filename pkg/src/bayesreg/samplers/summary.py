from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..errors import InsufficientSamples
from .state import PosteriorSamples

MIN_RETAINED = 100
MODE_GRID = 512


def autocorrelation(x: np.ndarray) -> np.ndarray:
    """Normalized autocorrelation at lags 0..n-1 via zero-padded FFT."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    centered = x - x.mean()
    size = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(centered, size)
    acov = np.fft.irfft(f * np.conj(f), size)[:n] / n
    if acov[0] <= 0:
        return np.ones(n)
    return acov / acov[0]


def effective_sample_size(x) -> float:
    """ESS with Geyer's initial positive sequence truncation.

    Sums of adjacent autocorrelation pairs are accumulated until the first
    non-positive pair. A constant chain reports its own length. The result is
    clipped to (0, n].
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if n < 2 or np.ptp(x) == 0:
        return float(n)
    rho = autocorrelation(x)
    tau = -1.0
    for k in range(0, n - 1, 2):
        pair = rho[k] + rho[k + 1]
        if pair <= 0:
            break
        tau += 2.0 * pair
    ess = n / tau if tau > 0 else float(n)
    return float(min(max(ess, 1e-12), n))


def kde_mode(x) -> float:
    """Argmax of a Silverman-bandwidth Gaussian KDE on a 512-point grid over the sample range."""
    x = np.asarray(x, dtype=float)
    lo, hi = float(x.min()), float(x.max())
    if hi == lo:
        return lo
    kde = stats.gaussian_kde(x, bw_method="silverman")
    grid = np.linspace(lo, hi, MODE_GRID)
    return float(grid[np.argmax(kde(grid))])


@dataclass(frozen=True, eq=False)
class SummaryReport:
    method: str
    scale: str
    mean: np.ndarray
    median: np.ndarray
    mode: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    ess: np.ndarray
    retained: int

    def coefficients(self) -> list[dict]:
        return [
            {
                "name": f"beta_{j + 1}",
                "mean": float(self.mean[j]),
                "median": float(self.median[j]),
                "mode": float(self.mode[j]),
                "lower_95": float(self.lower[j]),
                "upper_95": float(self.upper[j]),
                "ess": float(self.ess[j]),
            }
            for j in range(self.mean.shape[0])
        ]

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "scale": self.scale,
            "retained": self.retained,
            "coefficients": self.coefficients(),
        }


def summarize(samples: PosteriorSamples, scale: str | None = None) -> SummaryReport:
    """Per-coefficient posterior summaries.

    ``scale`` defaults to ``"raw"`` when the chain knows the column sds, else
    ``"standardized"``.
    """
    if len(samples) < MIN_RETAINED:
        raise InsufficientSamples(f"need at least {MIN_RETAINED} retained states, got {len(samples)}")
    if scale is None:
        scale = "raw" if samples.col_sds is not None else "standardized"
    b = samples.beta(scale)
    lower, median, upper = np.percentile(b, [2.5, 50.0, 97.5], axis=0)
    return SummaryReport(
        method=samples.method,
        scale=scale,
        mean=np.array([math.fsum(col) / col.size for col in b.T]),
        median=median,
        mode=np.array([kde_mode(col) for col in b.T]),
        lower=lower,
        upper=upper,
        ess=np.array([effective_sample_size(col) for col in b.T]),
        retained=len(samples),
    )
