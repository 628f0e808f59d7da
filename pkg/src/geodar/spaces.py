"""Concrete Hadamard spaces: the real line, distributions on an interval
under the 2-Wasserstein distance, and SPD matrices under the log-Cholesky
metric.

Distributions are represented by their quantile function sampled on the
midpoint grid u_j = (j - 1/2)/m; the 2-Wasserstein distance is then the
L2[0,1] norm of the quantile difference, evaluated by midpoint quadrature.
SPD matrices are represented by their Cholesky factor, split into the
strictly lower triangle and the log of the diagonal; the metric is the
Frobenius distance in those coordinates, geodesics interpolate the lower
triangle linearly and the diagonal geometrically.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.special import ndtr, ndtri

from .errors import DegenerateInputError, GridMismatchError, NotPositiveDefiniteError
from .geometry import Space

#: Monotonicity violations below this size are treated as float noise.
MONOTONE_TOL = 1e-12


def isotonic_projection(values: np.ndarray) -> np.ndarray:
    """L2 projection onto non-decreasing sequences (pool adjacent violators)."""
    values = np.asarray(values, dtype=float)
    means: list[float] = []
    counts: list[int] = []
    for v in values:
        means.append(float(v))
        counts.append(1)
        while len(means) > 1 and means[-2] > means[-1]:
            m2, c2 = means.pop(), counts.pop()
            m1, c1 = means.pop(), counts.pop()
            means.append((m1 * c1 + m2 * c2) / (c1 + c2))
            counts.append(c1 + c2)
    return np.repeat(means, counts)


def grid_midpoints(m: int) -> np.ndarray:
    """Evaluation grid u_j = (j - 1/2)/m for j = 1..m."""
    return (np.arange(m) + 0.5) / m


@dataclass(frozen=True, eq=False)
class QuantileFunction:
    """A quantile function sampled on the m-point midpoint grid.

    Values are kept non-decreasing: violations beyond ``MONOTONE_TOL`` are
    repaired by isotonic projection at construction time (the projection is
    the metric projection onto the monotone cone, so the repaired grid is
    the closest valid point). Values must lie within the support interval.
    """

    values: np.ndarray
    support_lo: float = 0.0
    support_hi: float = 1.0

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or vals.size == 0:
            raise ValueError("quantile values must be a nonempty 1-d array")
        if not np.all(np.isfinite(vals)):
            raise ValueError("quantile values must be finite")
        if not self.support_lo < self.support_hi:
            raise ValueError("support interval must satisfy lo < hi")
        diffs = np.diff(vals)
        if diffs.size and diffs.min() < -MONOTONE_TOL:
            vals = isotonic_projection(vals)
        span_tol = 1e-9 * (self.support_hi - self.support_lo)
        if vals[0] < self.support_lo - span_tol or vals[-1] > self.support_hi + span_tol:
            raise ValueError("quantile values leave the support interval")
        np.clip(vals, self.support_lo, self.support_hi, out=vals)
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "support_lo", float(self.support_lo))
        object.__setattr__(self, "support_hi", float(self.support_hi))

    @property
    def m(self) -> int:
        return self.values.size


@dataclass(frozen=True, eq=False)
class SpdPoint:
    """An SPD matrix stored through its Cholesky factor.

    ``strict_lower`` holds the strictly lower triangular entries of the
    factor in row-major order, ``log_diag`` the logs of its diagonal. Any
    such pair reconstructs to a symmetric positive definite matrix.
    """

    strict_lower: np.ndarray
    log_diag: np.ndarray

    def __post_init__(self):
        low = np.atleast_1d(np.array(self.strict_lower, dtype=float))
        diag = np.atleast_1d(np.array(self.log_diag, dtype=float))
        p = diag.size
        if p < 1:
            raise ValueError("log_diag must hold at least one entry")
        if low.size != p * (p - 1) // 2:
            raise ValueError(
                f"strict_lower has {low.size} entries, expected {p * (p - 1) // 2} for p={p}"
            )
        if not (np.all(np.isfinite(low)) and np.all(np.isfinite(diag))):
            raise ValueError("SPD coordinates must be finite")
        low.flags.writeable = False
        diag.flags.writeable = False
        object.__setattr__(self, "strict_lower", low)
        object.__setattr__(self, "log_diag", diag)

    @property
    def dim(self) -> int:
        return self.log_diag.size


class ScalarLine(Space):
    """The real line with the usual distance."""

    name = "scalar"

    def to_coords(self, point) -> np.ndarray:
        return np.array([point], dtype=float)

    def from_coords(self, coords: np.ndarray) -> float:
        return float(coords[0])

    def validate(self, point) -> None:
        if not isinstance(point, numbers.Real) or not math.isfinite(float(point)):
            raise ValueError(f"not a finite scalar: {point!r}")

    def coords_matrix(self, points) -> np.ndarray:
        mat = np.asarray(list(points), dtype=float).reshape(-1, 1)
        if mat.size == 0:
            raise ValueError("need at least one point")
        return mat


class WassersteinGrid(Space):
    """Distributions on [lo, hi] under the 2-Wasserstein distance.

    The instance fixes the grid size and support; all points handled by it
    must match both (a mismatch raises :class:`GridMismatchError`).
    """

    name = "wasserstein"

    def __init__(self, m: int = 512, support: tuple[float, float] = (0.0, 1.0)):
        if m < 1:
            raise ValueError("grid size must be positive")
        lo, hi = float(support[0]), float(support[1])
        if not lo < hi:
            raise ValueError("support interval must satisfy lo < hi")
        self.m = int(m)
        self.support_lo = lo
        self.support_hi = hi
        self.coord_scale = m**-0.5

    def point(self, values) -> QuantileFunction:
        """Build a grid point carrying this space's support."""
        return QuantileFunction(values, self.support_lo, self.support_hi)

    def _check_compat(self, point: QuantileFunction) -> None:
        if not isinstance(point, QuantileFunction):
            raise ValueError(f"expected a QuantileFunction, got {type(point).__name__}")
        if point.m != self.m:
            raise GridMismatchError(f"grid size {point.m} != {self.m}")
        if (point.support_lo, point.support_hi) != (self.support_lo, self.support_hi):
            raise GridMismatchError(
                f"support ({point.support_lo}, {point.support_hi}) != "
                f"({self.support_lo}, {self.support_hi})"
            )

    def to_coords(self, point: QuantileFunction) -> np.ndarray:
        self._check_compat(point)
        return point.values

    def from_coords(self, coords: np.ndarray) -> QuantileFunction:
        return QuantileFunction(coords, self.support_lo, self.support_hi)

    def validate(self, point) -> None:
        self._check_compat(point)
        if np.diff(point.values).size and np.diff(point.values).min() < -MONOTONE_TOL:
            raise ValueError("quantile values are not non-decreasing")


class LogCholeskySpd(Space):
    """SPD matrices of a fixed dimension under the log-Cholesky metric."""

    name = "spd"

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("dimension must be positive")
        self.dim = int(dim)
        self.n_lower = dim * (dim - 1) // 2

    def _check_compat(self, point: SpdPoint) -> None:
        if not isinstance(point, SpdPoint):
            raise ValueError(f"expected an SpdPoint, got {type(point).__name__}")
        if point.dim != self.dim:
            raise GridMismatchError(f"dimension {point.dim} != {self.dim}")

    def to_coords(self, point: SpdPoint) -> np.ndarray:
        self._check_compat(point)
        return np.concatenate([point.strict_lower, point.log_diag])

    def from_coords(self, coords: np.ndarray) -> SpdPoint:
        return SpdPoint(coords[: self.n_lower], coords[self.n_lower :])

    def validate(self, point) -> None:
        self._check_compat(point)

    def identity(self) -> SpdPoint:
        return SpdPoint(np.zeros(self.n_lower), np.zeros(self.dim))


def spd_identity(dim: int) -> SpdPoint:
    return LogCholeskySpd(dim).identity()


def point_to_factor(point: SpdPoint) -> np.ndarray:
    """Dense lower-triangular Cholesky factor of the stored matrix."""
    p = point.dim
    L = np.zeros((p, p))
    L[np.tril_indices(p, -1)] = point.strict_lower
    L[np.diag_indices(p)] = np.exp(point.log_diag)
    return L


def factor_to_point(L: np.ndarray) -> SpdPoint:
    """Coordinates of a lower-triangular factor with positive diagonal."""
    L = np.asarray(L, dtype=float)
    diag = np.diag(L)
    if np.any(diag <= 0.0):
        raise ValueError("factor diagonal must be strictly positive")
    return SpdPoint(L[np.tril_indices(L.shape[0], -1)], np.log(diag))


def _cholesky_lower(M: np.ndarray) -> np.ndarray:
    """Cholesky factor with a scale-invariant positivity check.

    A pivot at or below 1e-12 * trace(M)/p marks the matrix as not
    positive definite.
    """
    p = M.shape[0]
    threshold = 1e-12 * max(float(np.trace(M)), 0.0) / p
    L = np.zeros((p, p))
    for j in range(p):
        pivot = M[j, j] - L[j, :j] @ L[j, :j]
        if pivot <= threshold:
            raise NotPositiveDefiniteError(
                f"pivot {pivot:.3e} at column {j} is below threshold {threshold:.3e}"
            )
        L[j, j] = math.sqrt(pivot)
        if j + 1 < p:
            L[j + 1 :, j] = (M[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L


def spd_from_matrix(matrix: np.ndarray, sym_tol: float = 1e-10) -> SpdPoint:
    """Factor a dense symmetric positive definite matrix into coordinates."""
    M = np.asarray(matrix, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    scale = 1.0 + float(np.max(np.abs(M)))
    if float(np.max(np.abs(M - M.T))) > sym_tol * scale:
        raise ValueError("matrix is not symmetric")
    return factor_to_point(_cholesky_lower(0.5 * (M + M.T)))


def spd_to_matrix(point: SpdPoint) -> np.ndarray:
    L = point_to_factor(point)
    return L @ L.T


def truncated_normal_quantile(u: float) -> float:
    """Quantile of the standard normal truncated to [0, 1]."""
    if not 0.0 < u < 1.0:
        raise ValueError(f"quantile level must be in (0, 1), got {u}")
    lo, hi = ndtr(0.0), ndtr(1.0)
    return float(ndtri(lo + u * (hi - lo)))


def truncated_normal_grid(m: int = 512) -> QuantileFunction:
    """Quantile grid of the standard normal truncated to [0, 1]."""
    lo, hi = ndtr(0.0), ndtr(1.0)
    return QuantileFunction(ndtri(lo + grid_midpoints(m) * (hi - lo)), 0.0, 1.0)


def truncated_gaussian_kde(
    samples, support: tuple[float, float], n_grid: int, bandwidth: float
):
    """Gaussian KDE truncated to the support and renormalized.

    Returns ``(grid, density)`` where the density integrates to one over
    the support (trapezoid rule on the returned grid).
    """
    samples = np.asarray(samples, dtype=float)
    lo, hi = float(support[0]), float(support[1])
    grid = np.linspace(lo, hi, n_grid)
    z = (grid[:, None] - samples[None, :]) / bandwidth
    density = np.exp(-0.5 * z * z).mean(axis=1) / (bandwidth * math.sqrt(2.0 * math.pi))
    mass = np.trapezoid(density, grid)
    if mass <= 1e-300:
        raise DegenerateInputError("no kernel mass inside the support interval")
    return grid, density / mass


def density_to_quantile(
    samples,
    support: tuple[float, float],
    m: int = 512,
    bandwidth_scale: float = 1.0,
) -> QuantileFunction:
    """Smooth samples into a quantile grid point.

    The density is a Gaussian KDE with bandwidth
    ``bandwidth_scale * sd(samples) * n**(-1/5)`` (sd with one delta
    degree of freedom), truncated to the support and renormalized. The CDF
    is accumulated by the trapezoid rule on a 4m-point grid and inverted by
    monotone interpolation at the midpoints u_j.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 1 or samples.size < 2:
        raise DegenerateInputError("need at least two samples")
    if not np.all(np.isfinite(samples)):
        raise ValueError("samples must be finite")
    lo, hi = float(support[0]), float(support[1])
    if not lo < hi:
        raise ValueError("support interval must satisfy lo < hi")
    sd = float(samples.std(ddof=1))
    if sd <= 0.0:
        raise DegenerateInputError("samples have zero variance")
    bandwidth = bandwidth_scale * sd * samples.size ** (-0.2)
    grid, density = truncated_gaussian_kde(samples, (lo, hi), 4 * m, bandwidth)
    cdf = cumulative_trapezoid(density, grid, initial=0.0)
    cdf /= cdf[-1]
    quantiles = np.interp(grid_midpoints(m), cdf, grid)
    return QuantileFunction(quantiles, lo, hi)


def space_for(tag: str, m: int = 512, support=(0.0, 1.0), dim: int = 10) -> Space:
    """Build a space instance from its tag."""
    if tag == "scalar":
        return ScalarLine()
    if tag == "wasserstein":
        return WassersteinGrid(m, support)
    if tag == "spd":
        return LogCholeskySpd(dim)
    raise ValueError(f"unknown space tag: {tag!r}")
