"""Tests for the menger_energy.grassmann module."""
import numpy as np
import pytest

from menger_energy.errors import ConstantUndefined, DegenerateBasis, DimensionMismatch, InvalidParameter
from menger_energy.grassmann import (
    aligned_frame_gap,
    aligned_frames,
    check_close_bases,
    check_dist_ang,
    check_gs_red,
    frame_distance,
    grass_constants,
    grass_distance,
    inverse_projection,
    orthonormalize,
    project,
    random_pair,
    random_red_basis,
    Subspace,
    verify_perturbation_bounds,
)


def test_grass_distance_of_coordinate_planes():
    """Orthogonal lines sit at distance 1, a plane sits at distance 0 from itself."""
    e1, e2 = Subspace.coordinate(2, [0]), Subspace.coordinate(2, [1])
    assert grass_distance(e1, e2) == pytest.approx(1.0)
    assert grass_distance(e1, e1) == pytest.approx(0.0, abs=1e-12)


def test_grass_distance_of_rotated_line():
    """The distance between lines at angle φ is sin φ."""
    angle = 0.3
    line = Subspace.from_span(np.array([[np.cos(angle), np.sin(angle), 0.0]]))
    assert grass_distance(Subspace.coordinate(3, [0]), line) == pytest.approx(np.sin(angle))


def test_grass_distance_rejects_mixed_dimensions():
    """Planes of different dimensions are not comparable."""
    with pytest.raises(DimensionMismatch):
        grass_distance(Subspace.coordinate(3, [0]), Subspace.coordinate(3, [0, 1]))


def test_metric_axioms_on_random_planes():
    """Symmetry and the triangle inequality hold on random triples."""
    rng = np.random.default_rng(3)
    for _ in range(200):
        U, V, W = (Subspace.random(5, 2, rng) for _ in range(3))
        assert grass_distance(U, V) == pytest.approx(grass_distance(V, U), abs=1e-12)
        assert grass_distance(U, W) <= grass_distance(U, V) + grass_distance(V, W) + 1e-12


def test_orthonormalize_keeps_order_and_span():
    """Gram-Schmidt output is orthonormal and spans the input."""
    vectors = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0]])
    frame = orthonormalize(vectors)
    assert np.allclose(frame @ frame.T, np.eye(2))
    assert np.allclose(frame[0], vectors[0] / np.linalg.norm(vectors[0]))
    assert grass_distance(Subspace(frame), Subspace.from_span(vectors)) == pytest.approx(0.0, abs=1e-12)


def test_orthonormalize_scaled_mode():
    """Scaled mode returns vectors of length ρ."""
    frame = orthonormalize(np.array([[3.0, 0.0], [1.0, 2.0]]), mode="scaled", rho=2.0)
    assert np.allclose(np.linalg.norm(frame, axis=1), 2.0)


def test_orthonormalize_detects_dependence():
    """A repeated direction is a degenerate basis."""
    with pytest.raises(DegenerateBasis):
        orthonormalize(np.array([[1.0, 0.0], [2.0, 0.0]]))


def test_project_splits_vectors():
    """π_H(v) + Q_H(v) = v with the pieces orthogonal."""
    H = Subspace.coordinate(3, [0, 1])
    v = np.array([1.0, 2.0, 3.0])
    assert np.allclose(project(H, v), [1.0, 2.0, 0.0])
    assert np.allclose(project(H, v, "complement"), [0.0, 0.0, 3.0])


def test_frame_distance_vanishes_on_equal_planes():
    """Different frames of one plane are at frame distance 0."""
    U = Subspace.coordinate(3, [0, 1])
    V = Subspace(np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0]]))
    assert frame_distance(U, V) == pytest.approx(0.0, abs=1e-7)


def test_aligned_frames_realize_frame_distance():
    """The aligned frames attain the infimum, and their largest gap bounds the Grassmannian distance."""
    rng = np.random.default_rng(4)
    for _ in range(20):
        U, V = Subspace.random(6, 3, rng), Subspace.random(6, 3, rng)
        E, F = aligned_frames(U, V)
        gaps = np.linalg.norm(E - F, axis=1)
        assert np.allclose(E @ E.T, np.eye(3)) and np.allclose(F @ F.T, np.eye(3))
        assert float(np.sqrt(np.sum(gaps**2))) == pytest.approx(frame_distance(U, V), abs=1e-9)
        assert float(gaps.max()) == pytest.approx(aligned_frame_gap(U, V), abs=1e-9)
        assert grass_distance(U, V) <= 2 * 3 * aligned_frame_gap(U, V) + 1e-12


def test_grass_constants_golden_values():
    """A_m, B_m and C_dist-ang for lines and planes."""
    one, two = grass_constants(1), grass_constants(2)
    assert (one.c_gs_eps, one.c_gs_del, one.c_dist_ang) == (1.0, 0.0, 4.0)
    assert (two.c_gs_eps, two.c_gs_del, two.c_dist_ang) == (5.0, 2.0, 32.0)


def test_c_red_ang_undefined_for_large_parameters():
    """The red-ang constant needs C_dist-ang·(C_gs-eps·ε + C_gs-del·δ) < 1."""
    with pytest.raises(ConstantUndefined):
        grass_constants(2).c_red_ang(0.1, 0.1)
    assert grass_constants(1).c_red_ang(0.01, 0.01) == pytest.approx(4.0 / (1 - 0.04))


def test_perturbation_bounds_on_random_trials():
    """close-bases, gs-red and dist-ang hold on randomized trials."""
    rng = np.random.default_rng(11)
    for _ in range(100):
        U, V = random_pair(6, 3, 0.05, rng)
        E = U.frame
        F = orthonormalize(E + 0.01 * rng.standard_normal(E.shape))
        assert check_close_bases(E, F).satisfied
        vectors = random_red_basis(6, 3, 1.5, 0.02, 0.02, rng)
        assert check_gs_red(vectors, 1.5, 0.02, 0.02).satisfied
        assert check_dist_ang(U, V.frame).satisfied


def test_red_ang_through_dispatcher():
    """The dispatcher evaluates red-ang on a lightly perturbed ρεδ-basis."""
    rng = np.random.default_rng(5)
    vectors = random_red_basis(4, 2, 1.0, 1e-4, 1e-4, rng)
    others = vectors + 1e-3 * np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]])
    report = verify_perturbation_bounds("red-ang", vectors, others, rho=1.0, eps=1e-4, delta=1e-4)
    assert report.satisfied
    assert report.hypotheses["theta"] == pytest.approx(1e-3, rel=1e-6)


def test_verify_perturbation_bounds_unknown_bound():
    """Unknown bound names are rejected."""
    with pytest.raises(InvalidParameter):
        verify_perturbation_bounds("no-such-bound")


def test_inverse_projection_is_short():
    """The preimage in V of v in U has length at most 2|v| when dgras(U, V) <= 1/2."""
    rng = np.random.default_rng(2)
    for _ in range(50):
        U, V = random_pair(5, 2, 0.05, rng)
        if grass_distance(U, V) > 0.5:
            continue
        v = rng.standard_normal(2) @ U.frame
        w = inverse_projection(U, V, v)
        assert V.contains(w)
        assert np.allclose(U.project(w), v)
        assert np.linalg.norm(w) <= 2 * np.linalg.norm(v) + 1e-12
