"""Tests for the menger_energy.generators module."""
import argparse
import math

import numpy as np
import pytest

from menger_energy import generators
from menger_energy.errors import InvalidSpec
from menger_energy.generators import GapSquare, Graph, Koch, Sphere, Torus, UnionSpheres


def _args(**kwargs) -> argparse.Namespace:
    return argparse.Namespace(**kwargs)


@pytest.mark.parametrize("m,radius,expected", [(1, 1.0, 2 * math.pi), (2, 2.0, 16 * math.pi)])
def test_sphere_mass_and_radius(m, radius, expected):
    """Sphere points lie on the sphere and carry its whole area."""
    cloud = Sphere(_args(m=m, radius=radius, num_points=1000)).generate()
    assert cloud.total_mass == pytest.approx(expected)
    assert np.allclose(np.linalg.norm(cloud.points, axis=1), radius)
    assert cloud.provenance["reach"] == radius


def test_torus_area():
    """The torus carries about 4π^2 R r of area."""
    cloud = Torus(_args(num_points=4000)).generate()
    assert cloud.total_mass == pytest.approx(4 * math.pi**2 * 1.0 * 0.4, rel=1e-2)
    assert cloud.provenance["reach"] == pytest.approx(0.4)


def test_graph_length_of_parabola():
    """y = x^2/2 on [-1, 1] has length √2 + asinh(1)."""
    cloud = Graph(_args(m=1, num_points=2000, amplitude=0.5)).generate()
    assert cloud.n == 2
    assert cloud.total_mass == pytest.approx(math.sqrt(2) + math.asinh(1), rel=1e-3)
    assert np.allclose(cloud.points[:, 1], 0.5 * cloud.points[:, 0] ** 2)


def test_graph_needs_both_callables():
    """A custom height without its Jacobian is rejected."""
    with pytest.raises(InvalidSpec):
        Graph(_args(m=1), height=lambda w: w)


def test_koch_length():
    """The level-L snowflake has length 3(4/3)^L."""
    cloud = Koch(_args(koch_level=3, num_points=500)).generate()
    assert cloud.total_mass == pytest.approx(3 * (4 / 3) ** 3)


def test_gap_square_skips_the_gap():
    """No point of the flat square falls strictly inside the removed piece."""
    generator = GapSquare(_args(bulge=0.0, gap_width=0.1, num_points=4000))
    cloud = generator.generate()
    x, y = cloud.points[:, 0], cloud.points[:, 1]
    assert not np.any((np.abs(y) < 1e-12) & (x > 0.45 + 1e-12) & (x < 0.55 - 1e-12))
    assert cloud.total_mass == pytest.approx(3.9)
    assert np.allclose(generator.gap_endpoints(), [[0.45, 0.0], [0.55, 0.0]])


def test_union_spheres_halves():
    """Half of the points sit on each sphere."""
    cloud = UnionSpheres(_args(m=1, num_points=400)).generate()
    left = np.linalg.norm(cloud.points[:200] + [0.5, 0.0], axis=1)
    right = np.linalg.norm(cloud.points[200:] - [0.5, 0.0], axis=1)
    assert np.allclose(left, 1.0) and np.allclose(right, 1.0)
    with pytest.raises(InvalidSpec):
        UnionSpheres(_args(offset=0.0)).generate()


def test_half_segment_endpoint():
    """Point 0 is the endpoint at the origin."""
    cloud = generators.generate("half_segment", _args(num_points=100, radius=0.5))
    assert np.allclose(cloud.points[0], 0.0)
    assert cloud.total_mass == pytest.approx(0.5)


@pytest.mark.parametrize(
    "kind,params",
    [
        ("sphere", {"m": 1, "n": 1}),
        ("torus", {"m": 1}),
        ("sphere", {"m": 2, "num_points": 10}),
        ("sphere", {"radius": -1.0}),
        ("spiral", {"t_min": 0.0}),
        ("gap_square", {"gap_width": 0.6}),
        ("no_such_kind", {}),
    ],
)
def test_invalid_specs(kind, params):
    """Unsupported dimensions, too few points and out-of-range parameters are rejected."""
    with pytest.raises(InvalidSpec):
        generators.generate(kind, _args(**params))


@pytest.mark.parametrize("kind", sorted(generators.GENERATORS))
def test_generation_is_seeded(kind):
    """The same seed gives the same cloud."""
    first = generators.generate(kind, _args(num_points=200, seed=3))
    second = generators.generate(kind, _args(num_points=200, seed=3))
    assert np.array_equal(first.points, second.points)
    assert np.array_equal(first.weights, second.weights)
    assert first.provenance["kind"] == kind
