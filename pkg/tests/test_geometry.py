"""Metric axioms, geodesic laws, and the comparison-inequality suite."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geodar import (
    ScalarLine,
    check_geodesic_comparison,
    check_npc,
    check_quadruple_comparison,
    frechet_mean,
    frechet_objective,
    spd_from_matrix,
    spd_to_matrix,
)

from conftest import random_point

N_RANDOM = 2000


def _rel_ok(residual, tol=1e-9):
    return residual.slack >= -tol * (1.0 + abs(residual.rhs))


def test_metric_axioms(any_space):
    gen = np.random.default_rng(101)
    for _ in range(10_000):
        x, y, z = (random_point(any_space, gen) for _ in range(3))
        dxy = any_space.distance(x, y)
        assert dxy >= 0.0
        assert any_space.distance(x, x) == 0.0
        assert any_space.distance(y, x) == dxy
        assert dxy <= any_space.distance(x, z) + any_space.distance(z, y) + 1e-12


def test_distance_zero_means_equal(any_space):
    gen = np.random.default_rng(102)
    x, y = random_point(any_space, gen), random_point(any_space, gen)
    assert any_space.points_equal(x, x)
    assert any_space.distance(x, y) > 0.0


def test_geodesic_endpoints_and_proportionality(any_space):
    gen = np.random.default_rng(103)
    for _ in range(200):
        x, y = random_point(any_space, gen), random_point(any_space, gen)
        assert any_space.points_equal(any_space.geodesic_point(x, y, 0.0), x)
        assert any_space.points_equal(any_space.geodesic_point(x, y, 1.0), y)
        s, t = sorted(gen.random(2))
        d_st = any_space.distance(
            any_space.geodesic_point(x, y, s), any_space.geodesic_point(x, y, t)
        )
        assert d_st == pytest.approx((t - s) * any_space.distance(x, y), rel=1e-9, abs=1e-12)


def test_geodesic_reparameterization(any_space):
    gen = np.random.default_rng(104)
    for _ in range(200):
        x, y = random_point(any_space, gen), random_point(any_space, gen)
        t = float(gen.random())
        fwd = any_space.geodesic_point(x, y, t)
        bwd = any_space.geodesic_point(y, x, 1.0 - t)
        assert any_space.points_equal(fwd, bwd)


def test_geodesic_parameter_range(any_space):
    gen = np.random.default_rng(105)
    x, y = random_point(any_space, gen), random_point(any_space, gen)
    with pytest.raises(ValueError):
        any_space.geodesic_point(x, y, -0.1)
    with pytest.raises(ValueError):
        any_space.geodesic_point(x, y, 1.1)


def test_npc_random_slack(any_space):
    gen = np.random.default_rng(106)
    for _ in range(N_RANDOM):
        z, x0, x1 = (random_point(any_space, gen) for _ in range(3))
        assert _rel_ok(check_npc(any_space, z, x0, x1, float(gen.random())))


def test_npc_scalar_equality():
    space = ScalarLine()
    gen = np.random.default_rng(107)
    for _ in range(1000):
        z, x0, x1 = (random_point(space, gen) for _ in range(3))
        res = check_npc(space, z, x0, x1, float(gen.random()))
        assert abs(res.slack) <= 1e-12 * (1.0 + abs(res.rhs))


@settings(max_examples=200, deadline=None)
@given(
    st.floats(-50, 50),
    st.floats(-50, 50),
    st.floats(-50, 50),
    st.floats(0, 1),
)
def test_npc_scalar_equality_hypothesis(z, x0, x1, t):
    res = check_npc(ScalarLine(), z, x0, x1, t)
    assert abs(res.slack) <= 1e-9 * (1.0 + abs(res.rhs))


def test_npc_endpoint(any_space):
    gen = np.random.default_rng(108)
    z, x0, x1 = (random_point(any_space, gen) for _ in range(3))
    res = check_npc(any_space, z, x0, x1, 0.0)
    assert res.lhs == pytest.approx(any_space.distance(z, x0) ** 2, rel=1e-12)
    assert res.slack == pytest.approx(0.0, abs=1e-9 * (1 + abs(res.rhs)))


def test_quadruple_degenerate(any_space):
    gen = np.random.default_rng(109)
    x, y = random_point(any_space, gen), random_point(any_space, gen)
    res = check_quadruple_comparison(any_space, x, x, y, y)
    assert res.slack == pytest.approx(0.0, abs=1e-9 * (1 + abs(res.rhs)))


def test_quadruple_scalar_hand_case():
    # (0, 1, 2, 3): lhs = 4 + 4, rhs = 1 + 9 + 2*1*1
    res = check_quadruple_comparison(ScalarLine(), 0.0, 1.0, 2.0, 3.0)
    assert res.lhs == pytest.approx(8.0)
    assert res.rhs == pytest.approx(12.0)
    assert res.slack == pytest.approx(4.0)


def test_quadruple_random_slack(any_space):
    gen = np.random.default_rng(110)
    for _ in range(N_RANDOM):
        pts = [random_point(any_space, gen) for _ in range(4)]
        assert _rel_ok(check_quadruple_comparison(any_space, *pts))


def test_geodesic_comparison_identical_geodesics(any_space):
    gen = np.random.default_rng(111)
    x, y = random_point(any_space, gen), random_point(any_space, gen)
    res = check_geodesic_comparison(any_space, x, y, x, y, 0.4)
    assert res.lhs == 0.0
    assert res.rhs >= -1e-12


def test_geodesic_comparison_scalar_hand_case():
    # geodesics 0 -> 2 and 1 -> 1 at t = 1/2: both sides vanish
    res = check_geodesic_comparison(ScalarLine(), 0.0, 2.0, 1.0, 1.0, 0.5)
    assert res.lhs == pytest.approx(0.0, abs=1e-15)
    assert res.rhs == pytest.approx(0.0, abs=1e-15)


def test_geodesic_comparison_random_slack(any_space):
    gen = np.random.default_rng(112)
    for _ in range(N_RANDOM):
        pts = [random_point(any_space, gen) for _ in range(4)]
        assert _rel_ok(check_geodesic_comparison(any_space, *pts, float(gen.random())))


def test_shared_start_contraction(any_space):
    # d(g_mu^x(t), g_mu^y(t)) <= t d(x, y); the step-contraction of the model
    gen = np.random.default_rng(113)
    mu = random_point(any_space, gen)
    for _ in range(N_RANDOM):
        x, y = random_point(any_space, gen), random_point(any_space, gen)
        t = float(gen.random())
        lhs = any_space.distance(
            any_space.geodesic_point(mu, x, t), any_space.geodesic_point(mu, y, t)
        )
        assert lhs <= t * any_space.distance(x, y) + 1e-9


def test_g_lipschitz_property(any_space):
    # |[d(x,w)^2 - d(x,w0)^2] - [d(x',w)^2 - d(x',w0)^2]| <= 2 d(w,w0) d(x,x')
    gen = np.random.default_rng(114)
    for _ in range(N_RANDOM):
        w, w0, x, xp = (random_point(any_space, gen) for _ in range(4))
        g_x = any_space.distance(x, w) ** 2 - any_space.distance(x, w0) ** 2
        g_xp = any_space.distance(xp, w) ** 2 - any_space.distance(xp, w0) ** 2
        bound = 2.0 * any_space.distance(w, w0) * any_space.distance(x, xp)
        assert abs(g_x - g_xp) <= bound + 1e-9 * (1.0 + bound)


def test_frechet_objective_values():
    space = ScalarLine()
    assert frechet_objective(space, [1.5], 1.5) == 0.0
    assert frechet_objective(space, [0.0, 2.0], 1.0) == pytest.approx(1.0)
    assert frechet_objective(space, [0.0, 2.0], 0.0) == pytest.approx(2.0)


def test_frechet_objective_empty_list(any_space):
    gen = np.random.default_rng(115)
    w = random_point(any_space, gen)
    with pytest.raises(ValueError):
        frechet_objective(any_space, [], w)


def test_frechet_mean_single_point(any_space):
    gen = np.random.default_rng(116)
    p = random_point(any_space, gen)
    assert any_space.points_equal(frechet_mean(any_space, [p]), p)


def test_frechet_mean_scalar_pair():
    assert frechet_mean(ScalarLine(), [1.0, 3.0]) == pytest.approx(2.0)


def test_frechet_mean_permutation_invariant(any_space):
    gen = np.random.default_rng(117)
    points = [random_point(any_space, gen) for _ in range(9)]
    mean = frechet_mean(any_space, points)
    shuffled = [points[i] for i in gen.permutation(len(points))]
    assert any_space.points_equal(frechet_mean(any_space, shuffled), mean)


def test_frechet_mean_beats_perturbations(any_space):
    gen = np.random.default_rng(118)
    points = [random_point(any_space, gen) for _ in range(15)]
    mean = frechet_mean(any_space, points)
    best = frechet_objective(any_space, points, mean)
    for _ in range(100):
        target = random_point(any_space, gen)
        moved = any_space.geodesic_point(mean, target, 0.01 + 0.4 * gen.random())
        assert best <= frechet_objective(any_space, points, moved) + 1e-12 * (1 + best)


def test_spd_mean_matches_grid_search():
    # mean of diag(4,1) and diag(1,4) is diag(2,2); grid search over diag(a,b)
    from geodar import LogCholeskySpd

    space = LogCholeskySpd(2)
    pts = [spd_from_matrix(np.diag([4.0, 1.0])), spd_from_matrix(np.diag([1.0, 4.0]))]
    mean = frechet_mean(space, pts)
    assert spd_to_matrix(mean) == pytest.approx(np.diag([2.0, 2.0]), rel=1e-12)

    best_val, best_ab = math.inf, None
    grid = np.exp(np.linspace(math.log(0.5), math.log(8.0), 120))
    for a in grid:
        for b in grid:
            val = frechet_objective(space, pts, spd_from_matrix(np.diag([a, b])))
            if val < best_val:
                best_val, best_ab = val, (a, b)
    assert best_ab[0] == pytest.approx(2.0, rel=0.05)
    assert best_ab[1] == pytest.approx(2.0, rel=0.05)
    assert frechet_objective(space, pts, mean) <= best_val
