"""Tests for the menger_energy.simplex module."""
import math

import numpy as np
import pytest

from menger_energy.errors import InvalidParameter, TooManyVertices, ZeroDiameter
from menger_energy.simplex import (
    check_hmin_estimates,
    curvature_lower_bound,
    enclosing_ball,
    menger_curvature,
    omega,
    omega_max,
    perturbation_constant,
    pseudo_distance,
    pseudo_distance_lower_bound,
    random_voluminous_simplex,
    Simplex,
    tuple_curvature,
    upsilon,
    varsigma,
    voluminous_classify,
    voluminous_eta,
)

RIGHT_TRIANGLE = Simplex([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
TETRAHEDRON = Simplex([[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]])


def test_curvature_of_right_triangle():
    """K of the unit right triangle is √2/8."""
    assert menger_curvature(RIGHT_TRIANGLE) == pytest.approx(math.sqrt(2) / 8, abs=1e-12)


def test_curvature_scaling():
    """K(αT)·α = K(T)."""
    for alpha in (0.01, 0.5, 3.0, 250.0):
        assert alpha * menger_curvature(RIGHT_TRIANGLE.scaled(alpha)) == pytest.approx(
            menger_curvature(RIGHT_TRIANGLE), rel=1e-9
        )


def test_regular_tetrahedron_variants():
    """K′ = K/√3 for the regular tetrahedron."""
    K = menger_curvature(TETRAHEDRON)
    assert menger_curvature(TETRAHEDRON, "K_prime") == pytest.approx(K / math.sqrt(3), rel=1e-9)


def test_curvature_of_degenerate_and_coincident_tuples():
    """Collinear triples have K = 0 and coincident vertices have no curvature."""
    assert menger_curvature(Simplex([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])) == 0.0
    with pytest.raises(ZeroDiameter):
        menger_curvature(Simplex([[1.0, 1.0]] * 3))
    with pytest.raises(InvalidParameter):
        menger_curvature(RIGHT_TRIANGLE, "K_triple_prime")


def test_tuple_curvature_matches_simplex_curvature():
    """The batched K agrees with the per-simplex K, and degenerate tuples get 0."""
    rng = np.random.default_rng(0)
    batch = rng.standard_normal((20, 4, 3))
    batch[0] = [[0.0, 0.0, 0.0]] * 4
    batch[1, 3] = batch[1, 2]
    expected = [0.0, 0.0] + [menger_curvature(Simplex(vertices)) for vertices in batch[2:]]
    assert np.allclose(tuple_curvature(batch), expected, rtol=1e-9, atol=1e-15)


def test_heights_of_right_triangle():
    """Heights over the legs are 1 and over the hypotenuse 1/√2."""
    assert np.allclose(RIGHT_TRIANGLE.heights, [1 / math.sqrt(2), 1.0, 1.0])
    assert RIGHT_TRIANGLE.hmin == pytest.approx(1 / math.sqrt(2))


def test_enclosing_ball():
    """The minimal ball of an obtuse triangle is centered on its longest edge."""
    center, radius = enclosing_ball(np.array([[-1.0, 0.0], [1.0, 0.0], [0.0, 0.2]]))
    assert np.allclose(center, [0.0, 0.0])
    assert radius == pytest.approx(1.0)


def test_voluminous_classification():
    """Membership needs a small enclosing ball, a big base and a tall last vertex."""
    assert voluminous_classify(RIGHT_TRIANGLE, 0.5, 1.0).member
    assert not voluminous_classify(RIGHT_TRIANGLE, 0.99, 1.2).member
    assert not voluminous_classify(RIGHT_TRIANGLE, 0.1, 0.5).member
    assert voluminous_eta(RIGHT_TRIANGLE, 2.0) == pytest.approx(0.5)
    assert voluminous_classify(RIGHT_TRIANGLE, 0.5, 2.0).member
    assert voluminous_eta(RIGHT_TRIANGLE, 0.5) == 0.0


def test_curvature_lower_bound_for_voluminous_simplices():
    """K(T) >= η^{m+1}/((m+1)2^{m+2}d) on random members of V_m(η, d)."""
    rng = np.random.default_rng(4)
    for _ in range(200):
        T, eta = random_voluminous_simplex(1, 3, d=1.0, min_eta=0.05, rng=rng)
        assert menger_curvature(T) >= curvature_lower_bound(1, eta, 1.0) * (1 - 1e-9)


def test_hmin_estimates_on_random_simplices():
    """The whole chain of hmin estimates holds on random voluminous simplices."""
    rng = np.random.default_rng(8)
    for _ in range(200):
        k = int(rng.integers(1, 4))
        T, eta = random_voluminous_simplex(k, k + 2, d=1.0, rng=rng)
        assert all(check_hmin_estimates(T, eta, 1.0).values())


def test_perturbation_stability():
    """Moving every vertex by at most ς_k(η)d keeps T in V_k(η/2, 3d/2)."""
    rng = np.random.default_rng(9)
    for _ in range(200):
        T, eta = random_voluminous_simplex(2, 3, d=1.0, min_eta=0.1, rng=rng)
        noise = rng.standard_normal(T.vertices.shape)
        noise *= varsigma(2, eta) / np.linalg.norm(noise, axis=1, keepdims=True)
        assert voluminous_classify(Simplex(T.vertices + noise), 0.5 * eta, 1.5).member


def test_perturbation_constant_golden_values():
    """ς_1(1/2) against direct evaluation, and its bracket."""
    constant = perturbation_constant(1, 0.5)
    expected = 0.5**4 / (2 * upsilon(1) * omega(1) ** 3)
    assert constant.varsigma == pytest.approx(expected)
    lower, upper = constant.bracket
    assert lower <= constant.varsigma <= upper * (1 + 1e-12)
    assert upsilon(1) == pytest.approx(20.8723368691, abs=1e-9)
    assert omega_max() == pytest.approx(8 * math.pi**2 / 15, abs=1e-12)


def test_pseudo_distance():
    """Relabeling the vertices costs nothing; the lower bound stays below."""
    shifted = Simplex(RIGHT_TRIANGLE.vertices[[2, 0, 1]] + 0.01)
    distance = pseudo_distance(RIGHT_TRIANGLE, shifted)
    assert distance == pytest.approx(0.01 * math.sqrt(2))
    assert pseudo_distance_lower_bound(RIGHT_TRIANGLE, shifted) <= distance + 1e-12
    with pytest.raises(TooManyVertices):
        big = Simplex(np.eye(10))
        pseudo_distance(big, big)
