"""Concrete-space behavior: quantile grids, SPD coordinates, KDE ingestion."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import simpson
from sklearn.isotonic import IsotonicRegression

from geodar import (
    DegenerateInputError,
    GridMismatchError,
    LogCholeskySpd,
    NotPositiveDefiniteError,
    QuantileFunction,
    SpdPoint,
    WassersteinGrid,
    density_to_quantile,
    frechet_objective,
    grid_midpoints,
    isotonic_projection,
    space_for,
    spd_from_matrix,
    spd_identity,
    spd_to_matrix,
    truncated_normal_grid,
    truncated_normal_quantile,
)
from geodar.spaces import truncated_gaussian_kde


# ---------------------------------------------------------------- quantile grid


def test_quantile_ctor_projects_violations():
    q = QuantileFunction([0.3, 0.1, 0.2], 0.0, 1.0)
    assert np.all(np.diff(q.values) >= 0.0)
    # projection is the closest monotone grid: PAVA of (.3,.1,.2) pools all three
    assert q.values == pytest.approx([0.2, 0.2, 0.2])


def test_quantile_values_read_only():
    q = QuantileFunction(np.linspace(0.1, 0.9, 8))
    with pytest.raises(ValueError):
        q.values[0] = 5.0


def test_quantile_support_violation():
    with pytest.raises(ValueError):
        QuantileFunction([0.5, 1.5], 0.0, 1.0)
    with pytest.raises(ValueError):
        QuantileFunction([0.5], 1.0, 0.0)


def test_isotonic_projection_matches_sklearn():
    gen = np.random.default_rng(21)
    iso = IsotonicRegression()
    for _ in range(50):
        v = gen.normal(size=int(gen.integers(2, 40)))
        ours = isotonic_projection(v)
        ref = iso.fit_transform(np.arange(v.size), v)
        assert ours == pytest.approx(ref, abs=1e-10)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=1, max_size=30))
def test_isotonic_projection_properties(values):
    proj = isotonic_projection(np.array(values))
    assert np.all(np.diff(proj) >= -1e-12)
    # idempotent and mean preserving
    assert isotonic_projection(proj) == pytest.approx(proj)
    assert proj.mean() == pytest.approx(np.mean(values), abs=1e-9)


def test_wasserstein_distance_zero_and_symmetry():
    space = WassersteinGrid(64)
    u = space.point(grid_midpoints(64))
    assert space.distance(u, u) == 0.0


def test_wasserstein_distance_analytic_value():
    # quantiles u and u^2 on [0,1]: exact L2 distance is 1/sqrt(30)
    space = WassersteinGrid(512)
    u = grid_midpoints(512)
    p, q = space.point(u), space.point(u**2)
    assert space.distance(p, q) == pytest.approx(1.0 / math.sqrt(30.0), abs=1e-4)


def test_wasserstein_distance_translation():
    space = WassersteinGrid(128, (0.0, 10.0))
    gen = np.random.default_rng(22)
    base = np.sort(gen.random(128)) * 5.0
    c = 2.5
    p, q = space.point(base), space.point(base + c)
    assert space.distance(p, q) == pytest.approx(c, rel=1e-12)


def test_wasserstein_distance_convergence_rate():
    # grid error vs the analytic value decays at least like 1/m
    exact = 1.0 / math.sqrt(30.0)
    errors = {}
    for m in (64, 256, 1024):
        space = WassersteinGrid(m)
        u = grid_midpoints(m)
        errors[m] = abs(space.distance(space.point(u), space.point(u**2)) - exact)
    assert errors[256] <= errors[64] * (64 / 256) * 1.5
    assert errors[1024] <= errors[64] * (64 / 1024) * 1.5


def test_wasserstein_grid_mismatch():
    a = WassersteinGrid(32)
    b = WassersteinGrid(64)
    p = a.point(np.sort(np.random.default_rng(23).random(32)))
    q = b.point(np.sort(np.random.default_rng(24).random(64)))
    with pytest.raises(GridMismatchError):
        a.distance(p, q)
    with pytest.raises(GridMismatchError):
        WassersteinGrid(32, (0.0, 2.0)).distance(p, p)


def test_wasserstein_geodesic_midpoint_and_linearity():
    space = WassersteinGrid(256)
    u = grid_midpoints(256)
    p, q = space.point(u), space.point(u**2)
    mid = space.geodesic_point(p, q, 0.5)
    assert mid.values == pytest.approx((u + u**2) / 2.0, rel=1e-15)
    gen = np.random.default_rng(25)
    for _ in range(50):
        t = float(gen.random())
        g = space.geodesic_point(p, q, t)
        assert space.distance(g, p) == pytest.approx(t * space.distance(p, q), abs=1e-12)
        assert np.all(np.diff(g.values) >= 0.0)


def test_wasserstein_mean():
    space = WassersteinGrid(128)
    u = grid_midpoints(128)
    p, q = space.point(u), space.point(u**2)
    assert space.frechet_mean([p]).values == pytest.approx(p.values)
    mean = space.frechet_mean([p, q])
    assert mean.values == pytest.approx((u + u**2) / 2.0)


# ------------------------------------------------------------------------- spd


def test_spd_point_shape_checks():
    with pytest.raises(ValueError):
        SpdPoint(np.zeros(2), np.zeros(2))  # needs 1 strict-lower entry
    with pytest.raises(ValueError):
        SpdPoint(np.array([np.inf]), np.zeros(2))


def test_spd_distance_examples():
    space = LogCholeskySpd(3)
    eye = space.identity()
    assert space.distance(eye, eye) == 0.0
    other = SpdPoint(np.zeros(3), np.array([1.0, 0.0, 0.0]))
    assert space.distance(eye, other) == pytest.approx(1.0)
    recon = spd_to_matrix(other)
    assert recon == pytest.approx(np.diag([math.e**2, 1.0, 1.0]))
    assert space.distance(other, eye) == space.distance(eye, other)


def test_spd_geodesic_geometric_diagonal():
    space = LogCholeskySpd(2)
    a = space.identity()
    b = spd_from_matrix(np.diag([4.0, 1.0]))
    mid = space.geodesic_point(a, b, 0.5)
    assert spd_to_matrix(mid) == pytest.approx(np.diag([2.0, 1.0]))
    gen = np.random.default_rng(26)
    for _ in range(50):
        t = float(gen.random())
        g = space.geodesic_point(a, b, t)
        assert space.distance(g, a) == pytest.approx(t * space.distance(a, b), abs=1e-12)


def test_spd_mean_geometric_diagonal():
    space = LogCholeskySpd(2)
    pts = [spd_from_matrix(np.diag([4.0, 1.0])), spd_from_matrix(np.diag([1.0, 4.0]))]
    assert spd_to_matrix(space.frechet_mean(pts)) == pytest.approx(np.diag([2.0, 2.0]))
    single = space.frechet_mean([pts[0]])
    assert space.points_equal(single, pts[0])


def test_spd_mean_beats_perturbations():
    space = LogCholeskySpd(3)
    gen = np.random.default_rng(27)
    pts = [
        SpdPoint(gen.normal(size=3), gen.normal(size=3)) for _ in range(12)
    ]
    mean = space.frechet_mean(pts)
    best = frechet_objective(space, pts, mean)
    for _ in range(100):
        other = SpdPoint(gen.normal(size=3), gen.normal(size=3))
        moved = space.geodesic_point(mean, other, 0.01 + 0.5 * gen.random())
        assert best <= frechet_objective(space, pts, moved) + 1e-12


def test_spd_from_matrix_hand_case():
    point = spd_from_matrix(np.array([[4.0, 2.0], [2.0, 5.0]]))
    assert point.strict_lower == pytest.approx([1.0])
    assert point.log_diag == pytest.approx([math.log(2.0), math.log(2.0)])


def test_spd_identity_roundtrip():
    point = spd_from_matrix(np.eye(4))
    assert point.strict_lower == pytest.approx(np.zeros(6))
    assert point.log_diag == pytest.approx(np.zeros(4))
    assert spd_to_matrix(point) == pytest.approx(np.eye(4))
    assert spd_to_matrix(spd_identity(4)) == pytest.approx(np.eye(4))


def test_spd_roundtrip_random_conditioned():
    gen = np.random.default_rng(28)
    for p in (2, 5, 10):
        for _ in range(20):
            # condition number up to 1e6 via controlled eigenvalues
            q, _ = np.linalg.qr(gen.normal(size=(p, p)))
            eigs = np.exp(gen.uniform(0.0, math.log(1e6), size=p))
            M = (q * eigs) @ q.T
            M = 0.5 * (M + M.T)
            rebuilt = spd_to_matrix(spd_from_matrix(M))
            rel = np.linalg.norm(rebuilt - M) / np.linalg.norm(M)
            assert rel <= 1e-10


def test_spd_from_matrix_rejects_bad_input():
    with pytest.raises(ValueError):
        spd_from_matrix(np.array([[1.0, 0.5], [0.0, 1.0]]))  # not symmetric
    with pytest.raises(NotPositiveDefiniteError):
        spd_from_matrix(np.array([[1.0, 1.0], [1.0, 1.0]]))  # singular
    with pytest.raises(NotPositiveDefiniteError):
        spd_from_matrix(np.array([[0.0, 0.0], [0.0, -1.0]]))


# ------------------------------------------------- truncated normal and the KDE


def test_truncated_normal_quantile_bounds_and_monotone():
    us = np.linspace(1e-6, 1.0 - 1e-6, 200)
    vals = np.array([truncated_normal_quantile(u) for u in us])
    assert np.all((vals > 0.0) & (vals < 1.0))
    assert np.all(np.diff(vals) > 0.0)
    assert truncated_normal_quantile(1e-9) < 1e-6
    assert truncated_normal_quantile(1.0 - 1e-9) > 1.0 - 1e-6


def test_truncated_normal_quantile_inverts_definition():
    from scipy.special import ndtr

    u_half = (ndtr(0.5) - ndtr(0.0)) / (ndtr(1.0) - ndtr(0.0))
    assert truncated_normal_quantile(u_half) == pytest.approx(0.5, abs=1e-9)
    with pytest.raises(ValueError):
        truncated_normal_quantile(0.0)
    with pytest.raises(ValueError):
        truncated_normal_quantile(1.0)


def test_truncated_normal_grid_is_valid_point():
    q = truncated_normal_grid(256)
    assert q.m == 256
    assert np.all(np.diff(q.values) > 0.0)
    assert 0.0 < q.values[0] and q.values[-1] < 1.0


def test_kde_mass_conservation():
    gen = np.random.default_rng(29)
    samples = gen.normal(2.0, 3.0, size=200)
    grid, density = truncated_gaussian_kde(samples, (-36.0, 36.0), 2048, 1.0)
    assert simpson(density, x=grid) == pytest.approx(1.0, abs=1e-6)


def test_density_to_quantile_symmetric_median():
    gen = np.random.default_rng(30)
    center = 4.0
    draws = gen.normal(0.0, 2.0, size=5001)
    samples = center + np.concatenate([draws, -draws])  # exactly symmetric
    q = density_to_quantile(samples, (-36.0, 36.0), m=512)
    median = q.values[q.m // 2 - 1 : q.m // 2 + 1].mean()
    assert median == pytest.approx(center, abs=1e-3 * 72.0)


def test_density_to_quantile_monotone_within_support():
    gen = np.random.default_rng(31)
    q = density_to_quantile(gen.normal(0, 5, size=150), (-36.0, 36.0), m=128)
    assert np.all(np.diff(q.values) >= 0.0)
    assert q.values[0] >= -36.0 and q.values[-1] <= 36.0


def test_density_to_quantile_degenerate_inputs():
    with pytest.raises(DegenerateInputError):
        density_to_quantile([1.0], (0.0, 1.0))
    with pytest.raises(DegenerateInputError):
        density_to_quantile([2.0, 2.0, 2.0], (0.0, 10.0))


def test_space_for_dispatch():
    assert space_for("scalar").name == "scalar"
    assert space_for("wasserstein", m=32).m == 32
    assert space_for("spd", dim=3).dim == 3
    with pytest.raises(ValueError):
        space_for("hyperbolic")
