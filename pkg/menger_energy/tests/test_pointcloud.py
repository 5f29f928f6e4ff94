"""Tests for the menger_energy.pointcloud module."""
import numpy as np
import pytest

from menger_energy.errors import EmptySet, HeaderMismatch, InvalidParameter, ParseError, TooFewPoints
from menger_energy.pointcloud import (
    ahlfors_scan,
    ball_query,
    diameter,
    hausdorff_distance,
    knn_weights,
    load_cloud,
    PointCloud,
    save_cloud,
)

LINE = PointCloud(np.array([[0.0, 0.0], [0.5, 0.0], [1.0, 0.0], [2.0, 0.0]]), np.full(4, 0.5), 1)


def test_open_and_closed_balls():
    """Points at distance exactly r belong to the closed ball only."""
    x = np.zeros(2)
    assert LINE.ball(x, 1.0, "closed").tolist() == [0, 1, 2]
    assert LINE.ball(x, 1.0, "open").tolist() == [0, 1]
    assert LINE.measure_in_ball(x, 1.0) == pytest.approx(1.0)
    with pytest.raises(InvalidParameter):
        LINE.ball(x, 1.0, "half-open")


def test_closed_ball_tolerance():
    """The cloud tolerance pads closed balls only, and survives scaling and restriction."""
    padded = PointCloud(LINE.points, LINE.weights, 1, tol=0.5)
    x = np.zeros(2)
    assert padded.ball(x, 1.5, "closed").tolist() == [0, 1, 2, 3]
    assert padded.ball(x, 1.5, "open").tolist() == [0, 1, 2]
    assert LINE.ball(x, 1.5, "closed").tolist() == [0, 1, 2]
    assert ball_query(padded, x, 1.5, "closed", tol=0.0).tolist() == [0, 1, 2]
    assert padded.scaled(2.0).tol == padded.restrict([0, 1]).tol == 0.5
    with pytest.raises(InvalidParameter):
        PointCloud(LINE.points, LINE.weights, 1, tol=-1.0)


def test_scaled_cloud():
    """sΣ scales coordinates by s and masses by s^m."""
    scaled = LINE.scaled(3.0)
    assert np.allclose(scaled.points, 3.0 * LINE.points)
    assert scaled.total_mass == pytest.approx(3.0 * LINE.total_mass)
    assert scaled.diameter == pytest.approx(6.0)


def test_cloud_validation():
    """Weights must be positive and m must fit in the ambient space."""
    with pytest.raises(InvalidParameter):
        PointCloud(np.zeros((2, 2)), np.array([1.0, 0.0]), 1)
    with pytest.raises(InvalidParameter):
        PointCloud(np.zeros((2, 2)), np.ones(2), 3)
    with pytest.raises(InvalidParameter):
        PointCloud(np.zeros((2, 2)), np.ones(3), 1)


def test_diameter_sweep_on_large_circle():
    """The farthest-point sweep finds the diameter of a fine circle."""
    angle = np.linspace(0, 2 * np.pi, 5000, endpoint=False)
    points = np.column_stack([np.cos(angle), np.sin(angle)])
    assert diameter(points) == pytest.approx(2.0, abs=1e-6)


def test_hausdorff_distance_adds_both_deviations():
    """The sum form adds the two one-sided distances."""
    A = np.array([[0.0, 0.0], [1.0, 0.0]])
    B = np.array([[0.0, 0.0]])
    assert hausdorff_distance(A, B) == pytest.approx(1.0)
    with pytest.raises(EmptySet):
        hausdorff_distance(A, np.zeros((0, 2)))


def test_save_and_load(tmp_path):
    """A saved cloud is read back with its points, weights and dimensions."""
    path = tmp_path / "line.csv"
    save_cloud(LINE, path)
    cloud = load_cloud(path)
    assert (cloud.m, cloud.n, len(cloud)) == (1, 2, 4)
    assert np.array_equal(cloud.points, LINE.points)
    assert np.array_equal(cloud.weights, LINE.weights)


@pytest.mark.parametrize(
    "text,error",
    [
        ("", HeaderMismatch),
        ("m=1 n=2\n0,0,1\n", HeaderMismatch),
        ("#menger m=1 n=2\n0,0\n", ParseError),
        ("#menger m=1 n=2\n0,x,1\n", ParseError),
        ("#menger m=1 n=2\n0,0,-1\n", ParseError),
        ("#menger m=1 n=2\n0,nan,1\n", ParseError),
        ("#menger m=1 n=2\n", ParseError),
    ],
)
def test_load_rejects_malformed_files(tmp_path, text, error):
    """Bad headers, short rows, bad numbers and non-positive weights are rejected."""
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(error):
        load_cloud(path)


def test_parse_error_names_the_line(tmp_path):
    """The failing line number is carried by the error."""
    path = tmp_path / "bad.csv"
    path.write_text("#menger m=1 n=2\n0,0,1\n1,0,0\n")
    with pytest.raises(ParseError) as info:
        load_cloud(path)
    assert info.value.line == 3


def test_short_row_is_a_parse_error(tmp_path):
    """A row with the wrong column count fails on its own line, not on the header."""
    path = tmp_path / "short.csv"
    path.write_text("#menger m=1 n=2\n0,0,1\n\n1,1\n")
    with pytest.raises(ParseError) as info:
        load_cloud(path)
    assert info.value.line == 4
    assert not isinstance(info.value, HeaderMismatch)


def test_ahlfors_scan_on_segment():
    """A uniformly weighted segment has H^1(B(x, r))/r between 1 and 2 away from tiny radii."""
    count = 2001
    points = np.column_stack([np.linspace(0.0, 2.0, count), np.zeros(count)])
    cloud = PointCloud(points, np.full(count, 2.0 / count), 1)
    scan = ahlfors_scan(cloud, [0.1, 0.5], sample_centers=100, seed=0)
    assert np.all(scan.min_ratio >= 0.95)
    assert np.all(scan.min_ratio <= 2.05)
    with pytest.raises(InvalidParameter):
        ahlfors_scan(cloud, [0.0])


def test_knn_weights():
    """Neighbor-count weights approximate the length per point on a uniform segment."""
    points = np.column_stack([np.linspace(0.0, 1.0, 1001), np.zeros(1001)])
    weights = knn_weights(points, 1, k=4)
    assert np.median(weights) == pytest.approx(0.001, rel=0.01)
    with pytest.raises(TooFewPoints):
        knn_weights(points[:3], 1, k=4)
