"""Seeded random streams and the inverse-Gaussian / inverse-gamma primitives."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream identified by ``(seed, stream_id)``.

    Distinct stream ids give statistically independent generators derived from
    one master seed; extra keys passed to :meth:`generator` address
    sub-streams (e.g. one per Monte Carlo block).
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.stream_id < 0:
            raise ValueError("stream_id must be >= 0")

    def generator(self, *subkeys: int) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, *subkeys))
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, stream_id: int) -> "RngStream":
        return RngStream(self.seed, stream_id)


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def sample_inverse_gaussian(rng, mu, lam, size=None):
    """Inverse Gaussian draws with mean ``mu`` and shape ``lam``.

    Transformation with one rejection step (Michael, Schucany & Haas): the
    smaller root ``x1`` of the chi-square(1) transform is kept with probability
    mu / (mu + x1), otherwise mu^2 / x1 is returned. ``x1`` is evaluated in the
    cancellation-free form mu / (1 + w + sqrt(w (2 + w))), w = mu v / (2 lam).
    """
    gen = as_generator(rng)
    mu = np.asarray(mu, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if np.any(~(mu > 0)) or np.any(~(lam > 0)):
        raise ValueError("inverse Gaussian needs mu > 0 and lam > 0")
    if size is None:
        size = np.broadcast_shapes(mu.shape, lam.shape)
    v = gen.standard_normal(size) ** 2
    u = gen.random(size)
    w = mu * v / (2 * lam)
    x1 = mu / (1 + w + np.sqrt(w * (2 + w)))
    out = np.where(u <= mu / (mu + x1), x1, mu * mu / x1)
    if out.ndim == 0:
        return float(out)
    return out


def sample_inverse_gamma(rng, shape, rate, size=None):
    """Inverse gamma draws: ``rate / Gamma(shape, 1)``; mean rate / (shape - 1)."""
    gen = as_generator(rng)
    shape = np.asarray(shape, dtype=float)
    rate = np.asarray(rate, dtype=float)
    if np.any(~(shape > 0)) or np.any(~(rate > 0)):
        raise ValueError("inverse gamma needs shape > 0 and rate > 0")
    if size is None:
        size = np.broadcast_shapes(shape.shape, rate.shape)
    out = rate / gen.standard_gamma(shape, size)
    if out.ndim == 0:
        return float(out)
    return out
