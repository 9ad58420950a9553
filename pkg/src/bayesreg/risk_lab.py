"""James-Stein and thresholding estimators, and their Monte Carlo risk on r-spike signals.

Observations are ``y = theta + eps`` with ``eps ~ N(0, noise_sd^2 I)``; risk is
squared error ``E ||theta_hat - theta||^2``.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import DimensionTooSmall, ValidationError, ZeroVector
from .samplers.rng import RngStream

MIN_REPLICATIONS = 1000
BLOCK = 10_000


@dataclass(frozen=True, eq=False)
class SpikeSignal:
    """First ``r`` of ``p`` entries equal sqrt(d / p), the rest zero."""

    p: int
    r: int
    total_energy: float

    def __post_init__(self):
        if self.p < 1 or not 0 <= self.r <= self.p:
            raise ValidationError(f"need 0 <= r <= p and p >= 1, got p={self.p}, r={self.r}")
        if not self.total_energy >= 0:
            raise ValidationError("total energy d must be >= 0")

    @classmethod
    def default(cls, p: int, r: int) -> "SpikeSignal":
        # d = r unless given
        return cls(p, r, float(r))

    @classmethod
    def with_magnitude(cls, p: int, r: int, magnitude: float) -> "SpikeSignal":
        """Spikes of height ``magnitude``, i.e. d = p * magnitude^2."""
        return cls(p, r, p * float(magnitude) ** 2)

    @property
    def theta(self) -> np.ndarray:
        out = np.zeros(self.p)
        out[: self.r] = math.sqrt(self.total_energy / self.p)
        return out

    @property
    def norm2(self) -> float:
        return self.r * self.total_energy / self.p


def james_stein(y, *, positive_part: bool = False) -> np.ndarray:
    """``(1 - (p - 2) / ||y||^2) y`` along the last axis."""
    y = np.asarray(y, dtype=float)
    p = y.shape[-1]
    if p < 3:
        raise DimensionTooSmall(f"James-Stein needs p >= 3, got {p}")
    norm2 = np.sum(y * y, axis=-1, keepdims=True)
    if np.any(norm2 == 0):
        raise ZeroVector("James-Stein is undefined at y = 0")
    factor = 1.0 - (p - 2) / norm2
    if positive_part:
        factor = np.maximum(factor, 0.0)
    return factor * y


def threshold_estimator(y, t: float, mode: str = "hard") -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if not t >= 0:
        raise ValidationError(f"threshold must be >= 0, got {t}")
    if mode == "hard":
        return np.where(np.abs(y) > t, y, 0.0)
    if mode == "soft":
        return np.sign(y) * np.maximum(np.abs(y) - t, 0.0)
    raise ValidationError(f"threshold mode must be hard or soft, got {mode!r}")


def universal_threshold(p: int) -> float:
    return math.sqrt(2.0 * math.log(p))


class JSBounds(NamedTuple):
    lower: float
    upper: float
    consistent: bool


def js_bounds(signal: SpikeSignal) -> JSBounds:
    """``p|t|^2 / (p + |t|^2) <= R <= 2 + p|t|^2 / (d + |t|^2)`` evaluated as written.

    ``consistent`` is False when the printed lower bound exceeds the upper one,
    which the free parameter d allows.
    """
    p, d, e = signal.p, signal.total_energy, signal.norm2
    lower = p * e / (p + e)
    upper = 2.0 if e == 0 else 2.0 + p * e / (d + e)
    return JSBounds(lower, upper, lower <= upper)


@dataclass(frozen=True)
class RiskReport:
    estimator: str
    mc_risk: float
    mc_se: float
    lower_bound: float
    upper_bound: float
    replications: int


def estimator_registry(p: int, *, threshold: float | None = None, positive_part: bool = False) -> dict[str, Callable]:
    t = universal_threshold(p) if threshold is None else threshold
    return {
        "mle": lambda y: y,
        "james-stein": lambda y: james_stein(y, positive_part=positive_part),
        "hard-threshold": lambda y: threshold_estimator(y, t, "hard"),
        "soft-threshold": lambda y: threshold_estimator(y, t, "soft"),
    }


def mc_risk(
    rng: RngStream,
    estimator: str | Callable,
    signal: SpikeSignal,
    replications: int = 10_000,
    *,
    noise_sd: float = 1.0,
    threshold: float | None = None,
    positive_part: bool = False,
    workers: int = 1,
) -> RiskReport:
    """Monte Carlo estimate of the squared-error risk.

    Replications run in blocks of 10 000, each from its own sub-stream of
    ``rng``, so the result does not depend on ``workers``. Bounds are filled for
    the James-Stein estimator and NaN otherwise.
    """
    if replications < MIN_REPLICATIONS:
        raise ValidationError(f"need at least {MIN_REPLICATIONS} replications")
    if isinstance(estimator, str):
        registry = estimator_registry(signal.p, threshold=threshold, positive_part=positive_part)
        if estimator not in registry:
            raise ValidationError(f"unknown estimator {estimator!r}; choose from {sorted(registry)}")
        label, fn = estimator, registry[estimator]
    else:
        label, fn = getattr(estimator, "__name__", "custom"), estimator
    theta = signal.theta

    def block(k: int) -> np.ndarray:
        size = min(BLOCK, replications - k * BLOCK)
        gen = rng.generator(k)
        y = theta + noise_sd * gen.standard_normal((size, signal.p))
        err = fn(y) - theta
        return np.sum(err * err, axis=1)

    n_blocks = -(-replications // BLOCK)
    if workers > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            losses = np.concatenate(list(pool.map(block, range(n_blocks))))
    else:
        losses = np.concatenate([block(k) for k in range(n_blocks)])

    mean = math.fsum(losses) / replications
    var = math.fsum((losses - mean) ** 2) / (replications - 1)
    if label == "james-stein":
        lo, hi, _ = js_bounds(signal)
    else:
        lo = hi = math.nan
    return RiskReport(
        estimator=label,
        mc_risk=mean,
        mc_se=math.sqrt(var / replications),
        lower_bound=lo,
        upper_bound=hi,
        replications=replications,
    )


def js_vs_threshold_experiment(
    rng: RngStream,
    p: int,
    r: int,
    d: float | None = None,
    replications: int = 10_000,
    *,
    threshold: float | None = None,
    positive_part: bool = False,
    noise_sd: float = 1.0,
    workers: int = 1,
) -> list[RiskReport]:
    """Risk of MLE, James-Stein and hard/soft thresholding on one signal, sorted by risk."""
    if p < 3:
        raise DimensionTooSmall(f"James-Stein needs p >= 3, got {p}")
    signal = SpikeSignal(p, r, float(r) if d is None else float(d))
    reports = []
    for k, name in enumerate(("mle", "james-stein", "hard-threshold", "soft-threshold")):
        reports.append(
            mc_risk(
                rng.child(rng.stream_id * 16 + k),
                name,
                signal,
                replications,
                noise_sd=noise_sd,
                threshold=threshold,
                positive_part=positive_part,
                workers=workers,
            )
        )
    return sorted(reports, key=lambda rep: rep.mc_risk)


def _cell(x: float) -> str:
    return "" if math.isnan(x) else repr(float(x))


def risk_table_csv(reports: list[RiskReport], header_lines: tuple[str, ...] = ()) -> str:
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    buf.write("estimator,risk,se,lower,upper\n")
    for rep in reports:
        buf.write(f"{rep.estimator},{float(rep.mc_risk)!r},{float(rep.mc_se)!r},{_cell(rep.lower_bound)},{_cell(rep.upper_bound)}\n")
    return buf.getvalue()
