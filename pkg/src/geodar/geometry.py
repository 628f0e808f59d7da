"""Hadamard-space interface and curvature comparison checks.

Every space shipped with this package is isometric to a closed convex
subset of a Euclidean space through an explicit coordinate chart, so
distances, geodesics and Fréchet means all have closed forms in
coordinates; no iterative mean solver is needed or provided. The check
functions at the bottom evaluate the comparison inequalities that
characterise non-positively curved spaces and return the two sides, so
callers (chiefly the test suite) can assert non-negative slack.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass

import numpy as np


class Space(abc.ABC):
    """Geometry of one Hadamard space.

    Subclasses supply the coordinate chart (``to_coords``/``from_coords``),
    a point validator, and ``coord_scale``, the constant multiplying the
    Euclidean coordinate distance. Points are immutable values; all
    operations are pure and safe for concurrent use.
    """

    name: str = ""
    coord_scale: float = 1.0

    @abc.abstractmethod
    def to_coords(self, point) -> np.ndarray:
        """Flat coordinates of a point. Raises on incompatible points."""

    @abc.abstractmethod
    def from_coords(self, coords: np.ndarray):
        """Rebuild a point from flat coordinates."""

    @abc.abstractmethod
    def validate(self, point) -> None:
        """Raise ``ValueError`` if the point is not a member of the space."""

    def distance(self, x, y) -> float:
        diff = self.to_coords(x) - self.to_coords(y)
        return self.coord_scale * float(np.linalg.norm(diff))

    def geodesic_point(self, x, y, t: float):
        """Point a fraction ``t`` of the way along the geodesic from x to y."""
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"geodesic parameter must be in [0, 1], got {t}")
        cx, cy = self.to_coords(x), self.to_coords(y)
        return self.from_coords((1.0 - t) * cx + t * cy)

    def frechet_mean(self, points):
        """Minimizer of the mean squared distance, in closed form."""
        return self.from_coords(self.coords_matrix(points).mean(axis=0))

    def coords_matrix(self, points) -> np.ndarray:
        """Stack points into an (n, k) coordinate matrix."""
        rows = [self.to_coords(p) for p in points]
        if not rows:
            raise ValueError("need at least one point")
        return np.asarray(rows, dtype=float)

    def points_equal(self, x, y, tol: float = 1e-12) -> bool:
        """Representation-level equality: distance below tol * (1 + scale)."""
        cx, cy = self.to_coords(x), self.to_coords(y)
        scale = max(np.max(np.abs(cx)), np.max(np.abs(cy)), 0.0)
        return self.coord_scale * float(np.linalg.norm(cx - cy)) <= tol * (1.0 + scale)


@dataclass(frozen=True)
class InequalityResidual:
    """Two sides of a comparison inequality, asserted as ``lhs <= rhs``."""

    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def holds(self, rel_tol: float = 1e-9) -> bool:
        return self.slack >= -rel_tol * (1.0 + abs(self.rhs))


def check_npc(space: Space, z, x0, x1, t: float) -> InequalityResidual:
    """Non-positive-curvature inequality along the geodesic from x0 to x1.

    lhs = d(z, g(t))^2,
    rhs = (1-t) d(z,x0)^2 + t d(z,x1)^2 - t(1-t) d(x0,x1)^2.

    Equality in flat spaces; slack is strictly positive where triangles
    are thinner than their Euclidean comparison triangles.
    """
    for p in (z, x0, x1):
        space.validate(p)
    g = space.geodesic_point(x0, x1, t)
    lhs = space.distance(z, g) ** 2
    rhs = (
        (1.0 - t) * space.distance(z, x0) ** 2
        + t * space.distance(z, x1) ** 2
        - t * (1.0 - t) * space.distance(x0, x1) ** 2
    )
    return InequalityResidual(lhs, rhs)


def check_quadruple_comparison(space: Space, x1, x2, x3, x4) -> InequalityResidual:
    """Reshetnyak's quadruple comparison for four points.

    lhs = d(x1,x3)^2 + d(x2,x4)^2,
    rhs = d(x2,x3)^2 + d(x4,x1)^2 + 2 d(x1,x2) d(x3,x4).
    """
    for p in (x1, x2, x3, x4):
        space.validate(p)
    lhs = space.distance(x1, x3) ** 2 + space.distance(x2, x4) ** 2
    rhs = (
        space.distance(x2, x3) ** 2
        + space.distance(x4, x1) ** 2
        + 2.0 * space.distance(x1, x2) * space.distance(x3, x4)
    )
    return InequalityResidual(lhs, rhs)


def check_geodesic_comparison(space: Space, g0, g1, h0, h1, t: float) -> InequalityResidual:
    """Comparison of two geodesics evaluated at the same parameter.

    lhs = d(g(t), h(t))^2,
    rhs = (1-t) d(g0,h0)^2 + t d(g1,h1)^2 - t(1-t) [d(g0,g1) - d(h0,h1)]^2.

    With a shared start point this yields the t-contraction of geodesic
    endpoints used by the autoregression's stability analysis.
    """
    for p in (g0, g1, h0, h1):
        space.validate(p)
    gt = space.geodesic_point(g0, g1, t)
    ht = space.geodesic_point(h0, h1, t)
    lhs = space.distance(gt, ht) ** 2
    rhs = (
        (1.0 - t) * space.distance(g0, h0) ** 2
        + t * space.distance(g1, h1) ** 2
        - t * (1.0 - t) * (space.distance(g0, g1) - space.distance(h0, h1)) ** 2
    )
    return InequalityResidual(lhs, rhs)


def frechet_objective(space: Space, points, candidate) -> float:
    """Mean squared distance from ``candidate`` to the sample points."""
    mat = space.coords_matrix(points)
    diff = mat - space.to_coords(candidate)
    return space.coord_scale**2 * float(np.mean(np.sum(diff * diff, axis=1)))


def frechet_mean(space: Space, points):
    """Exact minimizer of :func:`frechet_objective` over the space."""
    return space.frechet_mean(points)
