"""First-order geodesic autoregression: simulation and contraction probes.

One step of the process pulls the current state a fraction ``concentration``
of the way along the geodesic from the mean, then applies an unbiased noise
map. Simulation starts at the mean and discards a burn-in prefix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Space
from .rng import RngStream


@dataclass
class GarConfig:
    """Everything needed to simulate one trajectory deterministically."""

    space: Space
    mean: object
    concentration: float
    noise: object
    length: int
    stream: RngStream
    burn_in: int = 100

    def __post_init__(self):
        if not 0.0 <= self.concentration <= 1.0:
            raise ValueError("concentration must be in [0, 1]")
        if self.length < 2:
            raise ValueError("length must be at least 2")
        if self.burn_in < 0:
            raise ValueError("burn_in must be nonnegative")
        self.space.validate(self.mean)


@dataclass
class Trajectory:
    """An ordered sample of points with generation metadata."""

    space_name: str
    points: list
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, idx):
        return self.points[idx]


def iterate_once(space: Space, noise, mean, concentration: float, current, stream: RngStream):
    """One transition: noise applied to the geodesic pull toward the mean."""
    return noise.apply(space.geodesic_point(mean, current, concentration), stream)


def simulate(config: GarConfig) -> Trajectory:
    """Run the recursion from the mean and keep the last ``length`` points.

    The stream is restarted from its ``(seed, stream_id)`` identity, so the
    result is a pure function of the config: the same config simulates the
    same trajectory, bit for bit.
    """
    stream = config.stream.fresh()
    space, noise = config.space, config.noise
    x = config.mean
    kept = []
    total = config.burn_in + config.length
    for step in range(total):
        x = iterate_once(space, noise, config.mean, config.concentration, x, stream)
        if step >= config.burn_in:
            kept.append(x)
    meta = {
        "space": space.name,
        "phi": config.concentration,
        "T": config.length,
        "burn_in": config.burn_in,
        "seed": config.stream.seed,
        "stream_id": config.stream.stream_id,
    }
    return Trajectory(space.name, kept, meta)


def contraction_diagnostic(
    space: Space,
    noise,
    mean,
    concentration: float,
    x,
    x0,
    t_max: int,
    reps: int,
    moment: float = 2.0,
    stream: RngStream | None = None,
) -> np.ndarray:
    """Monte Carlo decay of E d(X_t(x), X_t(x0))^moment for t = 1..t_max.

    Two runs share every noise draw and differ only in the start point, so
    the estimates isolate the contraction of the iteration maps.
    """
    if t_max < 1:
        raise ValueError("t_max must be at least 1")
    if reps < 1:
        raise ValueError("reps must be at least 1")
    if moment < 1.0:
        raise ValueError("moment order must be at least 1")
    if space.distance(x, x0) == 0.0:
        raise ValueError("start points must differ")
    if stream is None:
        stream = RngStream(0)
    local = stream.fresh()
    acc = np.zeros(t_max)
    for _ in range(reps):
        a, b = x, x0
        for t in range(t_max):
            params = noise.draw(local)
            a = noise.apply_drawn(space.geodesic_point(mean, a, concentration), params)
            b = noise.apply_drawn(space.geodesic_point(mean, b, concentration), params)
            acc[t] += space.distance(a, b) ** moment
    return acc / reps


def geometric_decay_rate(estimates) -> float:
    """Least-squares geometric rate of a positive decaying sequence.

    Fits log(estimate) against t = 1..n and returns exp(slope). Returns
    0.0 when any estimate is nonpositive (complete collapse).
    """
    est = np.asarray(estimates, dtype=float)
    if est.size < 2:
        raise ValueError("need at least two estimates")
    if np.any(est <= 0.0):
        return 0.0
    t = np.arange(1, est.size + 1, dtype=float)
    slope = np.polyfit(t, np.log(est), 1)[0]
    return math.exp(slope)
