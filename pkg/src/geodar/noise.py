"""Unbiased noise maps for the three spaces, with Monte Carlo probes.

Each noise family separates drawing its random parameters from applying
them, so that coupled runs can share draws. Setting a dispersion
parameter to zero yields the degenerate (identity) map, which the
diagnostics rely on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Space, frechet_mean
from .rng import RngStream
from .spaces import QuantileFunction, SpdPoint, factor_to_point, point_to_factor


def apply_multiplicative(x: float, sigma: float, stream: RngStream) -> float:
    """Scale x by (1 + eta) with eta ~ N(0, sigma^2)."""
    return (1.0 + sigma * float(stream.normal())) * x


def sample_transport_frequency(stream: RngStream, max_freq: int = 4) -> int:
    """Uniform draw from {-max_freq, ..., max_freq} without zero."""
    if max_freq < 1:
        raise ValueError("max_freq must be at least 1")
    k = int(stream.integers(0, 2 * max_freq)) - max_freq
    return k + 1 if k >= 0 else k


def transport_map(x, k: int):
    """The transport eta(x) = x - sin(pi k x)/|pi k| on [0, 1].

    Non-decreasing with fixed endpoints eta(0)=0, eta(1)=1, and
    |eta(x) - x| <= 1/(pi |k|).
    """
    if k == 0:
        raise ValueError("frequency must be nonzero")
    return x - np.sin(np.pi * k * np.asarray(x, dtype=float)) / abs(np.pi * k)


def apply_transport(q: QuantileFunction, k: int) -> QuantileFunction:
    """Push a distribution forward by quantile composition with the map."""
    tol = 1e-9
    if q.support_lo < -tol or q.support_hi > 1.0 + tol:
        raise ValueError("transport noise requires support inside [0, 1]")
    return QuantileFunction(transport_map(q.values, k), q.support_lo, q.support_hi)


def apply_congruence(
    x: SpdPoint, sigma_lower: float, sigma_log_diag: float, stream: RngStream
) -> SpdPoint:
    """Congruence X -> L_eps X L_eps^T with a random triangular L_eps.

    The strictly lower entries of L_eps are N(0, sigma_lower^2), the log
    diagonal entries N(0, sigma_log_diag^2). The result's factor is the
    triangular product L_eps L, computed in factor coordinates.
    """
    noise = CongruenceNoise(x.dim, sigma_lower, sigma_log_diag)
    return noise.apply_drawn(x, noise.draw(stream))


@dataclass(frozen=True)
class MultiplicativeNoise:
    """x -> (1 + eta) x with eta ~ N(0, sigma^2); unbiased at every x."""

    sigma: float = 0.25

    def __post_init__(self):
        if self.sigma < 0.0:
            raise ValueError("sigma must be nonnegative")

    def draw(self, stream: RngStream) -> float:
        return self.sigma * float(stream.normal())

    def apply_drawn(self, x: float, eta: float) -> float:
        return (1.0 + eta) * x

    def apply(self, x: float, stream: RngStream) -> float:
        return self.apply_drawn(x, self.draw(stream))


@dataclass(frozen=True)
class TransportNoise:
    """Random quantile-composition transport with symmetric frequencies."""

    max_freq: int = 4

    def __post_init__(self):
        if self.max_freq < 1:
            raise ValueError("max_freq must be at least 1")

    def draw(self, stream: RngStream) -> int:
        return sample_transport_frequency(stream, self.max_freq)

    def apply_drawn(self, q: QuantileFunction, k: int) -> QuantileFunction:
        return apply_transport(q, k)

    def apply(self, q: QuantileFunction, stream: RngStream) -> QuantileFunction:
        return self.apply_drawn(q, self.draw(stream))


@dataclass(frozen=True)
class CongruenceNoise:
    """Random congruence by a lower-triangular factor; unbiased at the identity."""

    dim: int
    sigma_lower: float = 0.5
    sigma_log_diag: float = 0.2

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        if self.sigma_lower < 0.0 or self.sigma_log_diag < 0.0:
            raise ValueError("dispersions must be nonnegative")

    def draw(self, stream: RngStream) -> np.ndarray:
        # fixed draw order: strictly lower block, then log-diagonal block
        n_lower = self.dim * (self.dim - 1) // 2
        lower = self.sigma_lower * stream.normal(size=n_lower)
        log_diag = self.sigma_log_diag * stream.normal(size=self.dim)
        return np.concatenate([lower, log_diag])

    def apply_drawn(self, x: SpdPoint, params: np.ndarray) -> SpdPoint:
        n_lower = self.dim * (self.dim - 1) // 2
        factor_point = SpdPoint(params[:n_lower], params[n_lower:])
        return factor_to_point(point_to_factor(factor_point) @ point_to_factor(x))

    def apply(self, x: SpdPoint, stream: RngStream) -> SpdPoint:
        return self.apply_drawn(x, self.draw(stream))


NoiseModel = MultiplicativeNoise | TransportNoise | CongruenceNoise


def estimate_noise_bias(space: Space, noise, w, n: int, stream: RngStream) -> float:
    """Distance from the Fréchet mean of n noisy copies of w back to w.

    A Monte Carlo estimate of the noise bias at w; for an unbiased map it
    shrinks like the Monte Carlo error.
    """
    if n < 100:
        raise ValueError("need at least 100 replicates")
    space.validate(w)
    draws = [noise.apply(w, stream) for _ in range(n)]
    return space.distance(frechet_mean(space, draws), w)


def monotonicity_probe(
    space: Space, noise, x, y, z, n: int, stream: RngStream
) -> tuple[float, float]:
    """Monte Carlo second moments (E d(eps(x), z)^2, E d(eps(y), z)^2).

    Requires d(x, z) <= d(y, z); callers assert the strict ordering of the
    returned means with a Monte Carlo margin.
    """
    if n < 1000:
        raise ValueError("need at least 1000 replicates")
    for p in (x, y, z):
        space.validate(p)
    if space.distance(x, z) > space.distance(y, z):
        raise ValueError("requires d(x, z) <= d(y, z)")
    lhs = float(np.mean([space.distance(noise.apply(x, stream), z) ** 2 for _ in range(n)]))
    rhs = float(np.mean([space.distance(noise.apply(y, stream), z) ** 2 for _ in range(n)]))
    return lhs, rhs
