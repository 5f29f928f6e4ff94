"""Tests for the menger_energy.cones module."""
import math

import numpy as np
import pytest

from menger_energy.cones import (
    cap_points,
    cone_membership,
    cone_path,
    cone_ratio,
    ConeSpec,
    sphere_flatten,
    two_cones_check,
)
from menger_energy.errors import HypothesisViolated, IntersectionNotWitnessed, InvalidParameter, NotInCone
from menger_energy.grassmann import grass_distance, Subspace
from menger_energy.pointcloud import PointCloud

E1 = Subspace.coordinate(2, [0])


def test_cap_shell_is_open():
    """Points on the inner or outer sphere of a cap are outside it."""
    spec = ConeSpec(E1, 0.5, 1.0, 2.0)
    assert not cone_membership(spec, np.array([0.0, 1.0]))
    assert cone_membership(spec, np.array([0.0, 1.5]))
    assert not cone_membership(spec, np.array([0.0, 2.0]))


def test_cone_inequality_is_closed():
    """|Q_H(x)| = δ|x| is inside the cone."""
    assert cone_membership(ConeSpec(E1, 0.6), np.array([0.8, 0.6]))


def test_cone_spec_validation():
    """δ must lie in (0, 1) and cap radii must increase."""
    with pytest.raises(InvalidParameter):
        ConeSpec(E1, 1.0)
    with pytest.raises(InvalidParameter):
        ConeSpec(E1, 0.5, 2.0, 1.0)


def test_cone_ratio_at_apex():
    """The apex counts as inside every cone."""
    assert cone_ratio(E1, np.zeros(2)) == pytest.approx(1.0)


def test_cap_points_sorted_by_distance():
    """Only points of the vertical cap are returned, nearest first."""
    points = np.array([[0.0, 0.0], [0.0, 1.5], [0.0, 0.7], [1.0, 0.0], [0.1, 0.9], [0.0, 3.0]])
    cloud = PointCloud(points, np.ones(len(points)), 1)
    assert cap_points(cloud, np.zeros(2), E1, 0.5, 0.5, 2.0).tolist() == [2, 4, 1]


def test_two_cones_identical_planes():
    """With H0 = H1 the inclusion holds and the special case applies."""
    report = two_cones_check(E1, E1, 0.1, 0.1, 0.1, samples=2000, seed=1)
    assert report.violations == 0
    assert report.threshold == pytest.approx(0.2 / math.sqrt(0.99))
    assert report.special_case_applicable and report.special_case_holds


def test_two_cones_hypothesis():
    """α + β must stay below √(1 − β²)."""
    with pytest.raises(HypothesisViolated):
        two_cones_check(E1, E1, 0.6, 0.6, 0.1)


def test_two_cones_without_common_plane():
    """Orthogonal lines with narrow cones share no line."""
    with pytest.raises(IntersectionNotWitnessed):
        two_cones_check(E1, Subspace.coordinate(2, [1]), 0.1, 0.1, 0.1)


def test_two_cones_on_nearby_lines():
    """A slightly rotated line passes with a small α."""
    angle = 0.05
    H1 = Subspace.from_span(np.array([[math.cos(angle), math.sin(angle), 0.0]]))
    H0 = Subspace.coordinate(3, [0])
    report = two_cones_check(H0, H1, grass_distance(H0, H1) + 0.01, 0.05, 0.05, samples=5000, seed=2)
    assert report.violations == 0


def test_cone_path_rotates_onto_complement():
    """A line inside C(δ, e_1) is rotated onto e_2 in one stage without leaving the cone."""
    angle = 1.2
    V = Subspace.from_span(np.array([[math.cos(angle), math.sin(angle)]]))
    path = cone_path(V, E1, 0.5)
    assert path.stages == 1
    assert grass_distance(path.subspaces[-1], Subspace.coordinate(2, [1])) == pytest.approx(0.0, abs=1e-9)
    assert path.min_ratio == pytest.approx(math.sin(angle))
    assert path.intersection_dims[-1] == 1


def test_cone_path_needs_cone_member():
    """A line outside the cone is rejected."""
    V = Subspace.from_span(np.array([[math.cos(0.2), math.sin(0.2)]]))
    with pytest.raises(NotInCone):
        cone_path(V, E1, 0.5)


def test_sphere_flatten_reaches_centered_sphere():
    """At t = 1 the sphere is centered at the origin with radius √(r² + |x|²)."""
    H = Subspace.coordinate(3, [0])
    x = np.array([0.5, 0.0, 0.0])
    result = sphere_flatten(x, 1.0, H, 1.0, samples=50, rng=0)
    assert result.radius == pytest.approx(math.sqrt(1.25))
    assert np.allclose(result.center, 0.0)
    assert result.ratio_monotone
    assert result.min_ratio == pytest.approx(1.0)


def test_sphere_flatten_needs_center_in_plane():
    """The sphere center must lie in H."""
    with pytest.raises(HypothesisViolated):
        sphere_flatten(np.array([0.0, 1.0, 0.0]), 1.0, Subspace.coordinate(3, [0]), 0.5)
