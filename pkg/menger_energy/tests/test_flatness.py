"""Tests for the menger_energy.flatness module."""
import argparse
import math

import numpy as np
import pytest

from menger_energy import flatness, generators
from menger_energy.errors import EmptyBall, InsufficientPairs, InvalidParameter, MultiSheet
from menger_energy.flatness import GraphPatch
from menger_energy.flatness.beta import max_distance
from menger_energy.generators.graph import cusp_height, quadratic_height
from menger_energy.grassmann import grass_distance, Subspace
from menger_energy.pointcloud import PointCloud

FAST_BETA = flatness.BetaSolver(argparse.Namespace(beta_restarts=2, beta_max_iters=100))
FAST_THETA = flatness.ThetaSolver(argparse.Namespace(theta_max_iters=50))


@pytest.fixture(scope="module")
def circle():
    return generators.generate("sphere", argparse.Namespace(m=1, num_points=4000, seed=0))


@pytest.fixture(scope="module")
def segment():
    return generators.generate("half_segment", argparse.Namespace(num_points=2000, seed=0))


@pytest.mark.parametrize("r", [0.05, 0.2])
def test_beta_of_circle(circle, r):
    """On the unit circle β̄(x, r) = r/2."""
    result = flatness.beta_number(circle, circle.points[0], r, FAST_BETA)
    assert result.beta_bar == pytest.approx(0.5 * r, rel=0.05)
    assert result.beta_open <= result.beta_bar + 1e-12


def test_beta_of_flat_segment(segment):
    """A segment lies in its own line."""
    result = flatness.beta_number(segment, segment.points[1000], 0.1, FAST_BETA)
    assert result.beta_bar == pytest.approx(0.0, abs=1e-12)


def test_beta_needs_points(circle):
    """A ball missing the cloud has no β number."""
    with pytest.raises(EmptyBall):
        flatness.beta_number(circle, np.array([5.0, 5.0]), 0.1)


def test_open_numbers_stay_below_closed(circle):
    """β <= β̄ and θ <= 3θ̄ on sampled balls."""
    rng = np.random.default_rng(1)
    for _ in range(5):
        i, r = int(rng.integers(len(circle))), float(rng.uniform(0.05, 0.4))
        result = flatness.flatness_at(circle, circle.points[i], r, FAST_BETA, FAST_THETA)
        assert result.beta_open <= result.beta_bar + 1e-9
        assert result.theta_open <= 3 * result.theta_bar + 1e-9


def test_open_numbers_are_minimized_over_the_open_ball():
    """A point on the boundary sphere drives the closed optimum but is invisible to the open ball."""
    t = np.linspace(-0.9, 0.9, 41)
    points = np.vstack([np.column_stack([t, np.zeros_like(t)]), [[0.0, 1.0]]])
    cloud = PointCloud(points, np.full(len(points), 0.045), 1)
    beta = flatness.beta_number(cloud, np.zeros(2), 1.0, FAST_BETA)
    assert beta.beta_bar > 0.5
    assert beta.beta_open < 1e-6
    theta = flatness.theta_number(cloud, np.zeros(2), 1.0, solver=FAST_THETA)
    assert theta.theta_bar > 0.9
    assert theta.theta_open < 0.2


def test_plane_net_is_a_fixed_grid_up_to_three_dimensions():
    """Nets for lines in R^2 and for lines and planes in R^3 are deterministic orthonormal grids."""
    for n, m in ((2, 1), (3, 1), (3, 2)):
        frames, kind = flatness.plane_net(n, m, 300)
        assert kind == "grid" and frames.shape == (300, m, n)
        assert np.allclose(frames @ frames.transpose(0, 2, 1), np.eye(m))
        assert np.array_equal(frames, flatness.plane_net(n, m, 300, rng=7)[0])
    assert flatness.plane_net(4, 2, 10, rng=0)[1] == "sampled"


def test_certified_beta_in_three_dimensions():
    """A certified fit names its net and is no worse than the best plane of that net."""
    offsets = np.random.default_rng(3).standard_normal((200, 3)) * np.array([1.0, 1.0, 0.1])
    args = argparse.Namespace(beta_restarts=1, beta_max_iters=20, certify=True, certify_net_size=500)
    solver = flatness.BetaSolver(args)
    fit = solver.fit(offsets, 2)
    assert fit.certificate == "grid" and fit.to_dict()["certificate"] == "grid"
    assert fit.certified_gap >= 0
    frames, _ = flatness.plane_net(3, 2, 500)
    net_best = min(max_distance(offsets, Subspace(frame)) for frame in frames)
    assert fit.value <= net_best + 1e-9


def test_theta_at_segment_endpoint(segment):
    """Any disk centered at an endpoint reaches r away from the segment on one side."""
    result = flatness.flatness_at(segment, segment.points[0], 0.5, FAST_BETA, FAST_THETA)
    assert result.theta_bar >= 0.9


def test_gap_scan_counts_unbounded_pairs(segment):
    """A flat ball ending in a rim is skipped and counted as unbounded."""
    scan = flatness.gap_ratio_scan(segment, [0.5], centers=[0], beta_solver=FAST_BETA, theta_solver=FAST_THETA)
    assert (scan.skipped, scan.unbounded, scan.max_ratio) == (1, 1, 0.0)
    assert math.isinf(scan.rows[0][4])


def test_tangent_plane_of_circle(circle):
    """The estimated tangent at a circle point is perpendicular to its position."""
    x = circle.points[0]
    estimate = flatness.tangent_plane(circle, x, flatness.radius_schedule(0.4, 4), FAST_BETA)
    expected = Subspace.from_span(np.array([[-x[1], x[0]]]))
    assert grass_distance(estimate.tangent, expected) < 0.01
    assert estimate.truncated_at is None
    assert len(estimate.distances) == 3


def test_mock_tangent_check(circle):
    """The tangent line leaves the normal cone empty; the normal line does not."""
    x = circle.points[0]
    tangent = Subspace.from_span(np.array([[-x[1], x[0]]]))
    normal = tangent.complement()
    assert all(flatness.mock_tangent_check(circle, x, tangent, 0.5, [0.05, 0.1]).holds)
    check = flatness.mock_tangent_check(circle, x, normal, 0.5, [0.05, 0.1])
    assert not any(check.holds)
    assert all(0 < fraction <= 1 for fraction in check.fractions)


def test_tangent_oscillation_needs_pairs(circle):
    """A separation window with no center pairs cannot be fitted."""
    with pytest.raises(InsufficientPairs):
        flatness.tangent_oscillation(circle, [0, 1, 2], 0.1, (5.0, 6.0), FAST_BETA)


@pytest.mark.slow
def test_graph_patch_of_circle():
    """Near the top of the unit circle F_x(u) = 1 − √(1 − u²) up to sign, with F(0) = 0 and DF(0) = 0."""
    cloud = generators.generate("sphere", argparse.Namespace(m=1, num_points=4000, seed=2))
    x = cloud.points[int(cloud.index.nearest(np.array([0.0, 1.0]))[1])]
    patch = flatness.graph_extract(cloud, x, 0.8, 0.02, solver=FAST_BETA)
    assert np.allclose(patch.values[0], 0.0) and np.allclose(patch.derivatives[0], 0.0)
    resolved = np.isfinite(patch.values[:, 0])
    u = patch.domain[resolved, 0]
    assert np.allclose(np.abs(patch.values[resolved, 0]), 1 - np.sqrt(1 - u**2), atol=0.04)
    check = flatness.check_derivative_angles(patch)
    assert check.pairs > 0


def test_graph_patch_detects_second_sheet():
    """Two parallel lines closer than the fiber threshold make a multi-sheeted patch."""
    t = np.linspace(-1.0, 1.0, 801)
    points = np.vstack([np.column_stack([t, np.zeros_like(t)]), np.column_stack([t, np.full_like(t, 0.05)])])
    cloud = PointCloud(points, np.full(len(points), 0.0025), 1)
    with pytest.raises(MultiSheet):
        flatness.graph_extract(cloud, np.zeros(2), 0.5, 0.01, tangent=Subspace.coordinate(2, [0]))


def test_graph_extract_validates_resolution(circle):
    """The lattice spacing must be positive and below R."""
    with pytest.raises(InvalidParameter):
        flatness.graph_extract(circle, circle.points[0], 0.1, 0.2)


def test_holder_exponent_of_quadratic_graph():
    """A quadratic height has a Lipschitz derivative; every pair lies on one line, so both fits agree."""
    height, jacobian = quadratic_height(0.5)
    patch = GraphPatch.from_function(height, jacobian, 2, 3, 1.0, 0.05)
    fit = flatness.holder_exponent(patch)
    assert fit.exponent == pytest.approx(1.0, abs=1e-6)
    assert fit.envelope_exponent == pytest.approx(1.0, abs=1e-6)
    assert fit.pairs > fit.bins
    with pytest.raises(InvalidParameter):
        flatness.check_derivative_angles(patch)


def test_holder_exponent_of_cusp():
    """|w|^{3/2} has a 1/2-Hölder derivative: the envelope finds 1/2 and the all-pairs fit is steeper."""
    height, jacobian = cusp_height(1.0)
    patch = GraphPatch.from_function(height, jacobian, 2, 3, 1.0, 0.05)
    fit = flatness.holder_exponent(patch)
    assert 0.4 <= fit.envelope_exponent <= 0.6
    assert 0.5 < fit.exponent < 1.5
