"""Estimators, the serial-dependence permutation test, and fit diagnostics.

The mean estimator minimizes the empirical Fréchet objective; the
concentration estimator minimizes the empirical one-step prediction risk

    risk(u) = (1/(T-1)) sum_t d(X_{t+1}, g_{mean}^{X_t}(u))^2

over u in [0, 1] by golden-section search (the risk is strictly convex).
On the real line the minimizer is available in closed form as the lag-1
sample autocorrelation clipped to [0, 1], which serves as an independent
oracle for the search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError
from .geometry import Space
from .rng import RngStream

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0

#: Tags for the two permutation-test statistics.
VARIANT_DISTANCE = "distance"
VARIANT_CONCENTRATION = "concentration"


@dataclass
class FitResult:
    """Fitted mean and concentration with search diagnostics."""

    mean: object
    concentration: float
    risk_curve: list[tuple[float, float]]
    r_squared: float
    iterations: int


@dataclass
class TestResult:
    """Outcome of a permutation test at level alpha."""

    statistic: float
    permuted: np.ndarray
    p_value: float
    alpha: float
    reject: bool
    variant: str

    @property
    def n_permutations(self) -> int:
        return self.permuted.size


@dataclass
class NullMoments:
    """Permutation estimates of the null mean and variance of the statistic."""

    mean: float
    variance: float


@dataclass
class ResidualReport:
    """Squared one-step residuals under the fitted model and the null model."""

    model_residuals: np.ndarray
    null_residuals: np.ndarray


def fit_mean(space: Space, points):
    """Empirical Fréchet mean of the trajectory."""
    return space.frechet_mean(points)


def _risk_terms(space: Space, points, mean):
    """Coordinate residuals P = X[1:] - mean, Q = X[:-1] - mean."""
    mat = space.coords_matrix(points)
    if mat.shape[0] < 2:
        raise ValueError("need at least two points")
    center = space.to_coords(mean)
    return mat[1:] - center, mat[:-1] - center


def prediction_risk(space: Space, points, mean, concentration: float) -> float:
    """Mean squared one-step prediction error at pull strength ``concentration``.

    The prediction for X_{t+1} is the geodesic point a fraction
    ``concentration`` from ``mean`` toward X_t.
    """
    if not 0.0 <= concentration <= 1.0:
        raise ValueError("concentration must be in [0, 1]")
    P, Q = _risk_terms(space, points, mean)
    diff = P - concentration * Q
    return space.coord_scale**2 * float(np.mean(np.sum(diff * diff, axis=1)))


def _golden_section(f, tol: float) -> tuple[float, dict, int]:
    """Minimize a convex f on [0, 1]; returns (midpoint, probes, iterations)."""
    probes: dict[float, float] = {}

    def eval_at(u: float) -> float:
        if u not in probes:
            probes[u] = f(u)
        return probes[u]

    a, b = 0.0, 1.0
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = eval_at(c), eval_at(d)
    iterations = 0
    while b - a > tol:
        iterations += 1
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = eval_at(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = eval_at(d)
    return 0.5 * (a + b), probes, iterations


def fit_concentration(space: Space, points, mean, tol: float = 1e-8) -> float:
    """Concentration estimate: golden-section minimizer of the prediction risk."""
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    P, Q = _risk_terms(space, points, mean)
    scale_sq = space.coord_scale**2

    def risk(u: float) -> float:
        diff = P - u * Q
        return scale_sq * float(np.mean(np.sum(diff * diff, axis=1)))

    u_hat, _, _ = _golden_section(risk, tol)
    return u_hat


def fit_concentration_closed_form(values) -> float:
    """Closed-form scalar estimate: lag-1 autocorrelation clipped below at 0.

    Uses the full-sample mean for centering and the first T-1 terms in the
    denominator, matching the minimizer of the scalar prediction risk.
    """
    x = np.asarray(list(values), dtype=float)
    if x.size < 2:
        raise ValueError("need at least two points")
    centered = x - x.mean()
    denom = float(np.sum(centered[:-1] ** 2))
    if denom <= 0.0:
        raise DegenerateInputError("zero variance over the first T-1 points")
    return max(0.0, float(np.sum(centered[1:] * centered[:-1])) / denom)


def fit(space: Space, points, tol: float = 1e-8) -> FitResult:
    """Full fit: mean, concentration, probed risk curve, and R-squared."""
    mean = fit_mean(space, points)
    P, Q = _risk_terms(space, points, mean)
    scale_sq = space.coord_scale**2

    def risk(u: float) -> float:
        diff = P - u * Q
        return scale_sq * float(np.mean(np.sum(diff * diff, axis=1)))

    concentration, probes, iterations = _golden_section(risk, tol)
    curve = sorted(probes.items())
    r2 = r_squared(space, points, mean, concentration)
    return FitResult(mean, concentration, curve, r2, iterations)


def dependence_statistic(space: Space, points) -> float:
    """Mean squared distance between consecutive observations."""
    mat = space.coords_matrix(points)
    if mat.shape[0] < 2:
        raise ValueError("need at least two points")
    steps = np.diff(mat, axis=0)
    return space.coord_scale**2 * float(np.mean(np.sum(steps * steps, axis=1)))


def _pairwise_sq_distances(space: Space, points) -> np.ndarray:
    mat = space.coords_matrix(points)
    sq_norms = np.sum(mat * mat, axis=1)
    gram = mat @ mat.T
    d2 = sq_norms[:, None] + sq_norms[None, :] - 2.0 * gram
    np.maximum(d2, 0.0, out=d2)
    return space.coord_scale**2 * d2


def permutation_test(
    space: Space,
    points,
    n_permutations: int,
    alpha: float,
    stream: RngStream,
    variant: str = VARIANT_DISTANCE,
    exact: bool = False,
) -> TestResult:
    """Permutation test of serial independence.

    ``distance`` uses the mean squared consecutive distance (small under
    strong dependence; the p-value counts permutations with a statistic at
    most the observed one). ``concentration`` refits the concentration on
    each permuted ordering (the mean is permutation invariant and reused)
    and counts permutations with an estimate at least the observed one.
    ``exact`` switches to the (1 + count)/(1 + B) convention that includes
    the identity permutation.
    """
    T = len(points)
    if T < 3:
        raise ValueError("need at least three points")
    if n_permutations < 1:
        raise ValueError("need at least one permutation")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    if variant not in (VARIANT_DISTANCE, VARIANT_CONCENTRATION):
        raise ValueError(f"unknown variant: {variant!r}")

    local = stream.fresh()
    perms = [local.permutation(T) for _ in range(n_permutations)]
    permuted = np.empty(n_permutations)

    if variant == VARIANT_DISTANCE:
        d2 = _pairwise_sq_distances(space, points)
        observed = float(np.mean(np.diag(d2, k=1)))
        for b, perm in enumerate(perms):
            permuted[b] = d2[perm[:-1], perm[1:]].mean()
        count = int(np.sum(observed >= permuted))
    else:
        mean = fit_mean(space, points)
        mat = space.coords_matrix(points)
        center = space.to_coords(mean)
        scale_sq = space.coord_scale**2

        def refit(order: np.ndarray) -> float:
            rows = mat[order] - center
            P, Q = rows[1:], rows[:-1]

            def risk(u: float) -> float:
                diff = P - u * Q
                return scale_sq * float(np.mean(np.sum(diff * diff, axis=1)))

            u_hat, _, _ = _golden_section(risk, 1e-8)
            return u_hat

        observed = refit(np.arange(T))
        for b, perm in enumerate(perms):
            permuted[b] = refit(perm)
        count = int(np.sum(observed <= permuted))

    if exact:
        p_value = (1.0 + count) / (1.0 + n_permutations)
    else:
        p_value = count / n_permutations
    return TestResult(observed, permuted, p_value, alpha, p_value <= alpha, variant)


def permutation_null_moments(
    space: Space, points, n_permutations: int, stream: RngStream
) -> NullMoments:
    """Mean and variance of the dependence statistic over random relabelings.

    The variance divides by the number of permutations (population form).
    """
    if n_permutations < 2:
        raise ValueError("need at least two permutations")
    T = len(points)
    if T < 2:
        raise ValueError("need at least two points")
    local = stream.fresh()
    d2 = _pairwise_sq_distances(space, points)
    values = np.empty(n_permutations)
    for b in range(n_permutations):
        perm = local.permutation(T)
        values[b] = d2[perm[:-1], perm[1:]].mean()
    return NullMoments(float(values.mean()), float(values.var()))


def null_moments_from_sample(permuted) -> NullMoments:
    """Moments of an already computed permuted-statistic sample."""
    values = np.asarray(permuted, dtype=float)
    if values.size < 2:
        raise ValueError("need at least two permuted values")
    return NullMoments(float(values.mean()), float(values.var()))


def r_squared(space: Space, points, mean, concentration: float) -> float:
    """Share of dispersion explained by the one-step geodesic predictions.

    One minus the ratio of the summed squared prediction residuals to the
    summed squared distances d(X_t, mean)^2 over t = 1..T-1.
    """
    P, Q = _risk_terms(space, points, mean)
    numerator = float(np.sum((P - concentration * Q) ** 2))
    denominator = float(np.sum(Q * Q))
    if denominator <= 0.0:
        raise DegenerateInputError("trajectory has zero dispersion around the mean")
    return 1.0 - numerator / denominator


def residual_report(space: Space, points, mean, concentration: float) -> ResidualReport:
    """Squared residual series of the fitted model and of the null model.

    The fitted model predicts X_{t+1} by the geodesic pull from the mean
    toward X_t; the null model predicts the mean itself. Both series have
    length T-1.
    """
    P, Q = _risk_terms(space, points, mean)
    scale_sq = space.coord_scale**2
    diff = P - concentration * Q
    model = scale_sq * np.sum(diff * diff, axis=1)
    null = scale_sq * np.sum(P * P, axis=1)
    return ResidualReport(model, null)
