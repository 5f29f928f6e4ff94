"""Tests for the menger_energy.energy module."""
import argparse
import math

import numpy as np
import pytest

from menger_energy import energy, generators
from menger_energy.energy.constants import FORMULAS
from menger_energy.energy.search import _axis_points
from menger_energy.errors import BudgetExceeded, InvalidParameter, MaxStagesExceeded, SubcriticalExponent
from menger_energy.grassmann import Subspace
from menger_energy.pointcloud import PointCloud

TRIANGLE = PointCloud(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), np.ones(3), 1)


@pytest.fixture(scope="module")
def small_circle():
    return generators.generate("sphere", argparse.Namespace(m=1, num_points=30, seed=0))


def test_brute_energy_of_three_points():
    """Six ordered nondegenerate triples with K^2 = 1/32 each."""
    estimate = energy.energy_brute(TRIANGLE, 2)
    assert estimate.value == pytest.approx(0.1875, abs=1e-12)
    assert estimate.samples == 27
    assert estimate.max_curvature_seen == pytest.approx(math.sqrt(2) / 8)


def test_brute_energy_in_a_ball():
    """Restricting to a ball that holds one point leaves only degenerate tuples."""
    assert energy.energy_brute(TRIANGLE, 2, restrict_ball=(np.zeros(2), 1.0)).value == pytest.approx(0.1875)
    assert energy.energy_brute(TRIANGLE, 2, restrict_ball=(np.zeros(2), 0.5)).value == 0.0


def test_brute_energy_budget(small_circle):
    """Enumerations above the tuple budget are refused."""
    with pytest.raises(BudgetExceeded):
        energy.energy_brute(small_circle, 4, max_tuples=1000)


def test_energy_scaling_law(small_circle):
    """E_p(sΣ) = s^{m(m+2) − p} E_p(Σ)."""
    s, p = 2.0, 4
    scaled = energy.energy_brute(small_circle.scaled(s), p).value
    assert scaled == pytest.approx(s ** (3 - p) * energy.energy_brute(small_circle, p).value, rel=1e-9)


@pytest.mark.parametrize("p", [2, 4])
def test_monte_carlo_agrees_with_brute_force(small_circle, p):
    """The Monte Carlo estimate lands within four standard errors of the exact sum."""
    for cloud in (TRIANGLE, small_circle):
        exact = energy.energy_brute(cloud, p).value
        estimate = energy.energy_mc(cloud, p, samples=20_000, seed=3)
        assert abs(estimate.value - exact) <= 4 * estimate.stderr + 1e-12
        assert estimate.method == "monte_carlo"


def test_monte_carlo_is_seeded():
    """The same seed gives the same estimate."""
    first = energy.energy_mc(TRIANGLE, 2, samples=5000, seed=9)
    second = energy.energy_mc(TRIANGLE, 2, samples=5000, seed=9)
    assert first.value == second.value and first.stderr == second.stderr


def test_estimator_validation():
    """The exponent must be positive and Monte Carlo needs enough samples."""
    with pytest.raises(InvalidParameter):
        energy.energy_brute(TRIANGLE, 0)
    with pytest.raises(InvalidParameter):
        energy.energy_mc(TRIANGLE, 2, samples=10)


def test_max_curvature_sample():
    """Uniform tuple draws find the largest curvature of a three-point set."""
    assert energy.max_curvature_sample(TRIANGLE, 2000, seed=0) == pytest.approx(math.sqrt(2) / 8)


def test_exponents():
    """λ, κ, τ and α for planes with p = 16, and the subcritical case."""
    e = energy.exponents(2, 16)
    assert (e.lam, e.kappa, e.alpha) == (8, 120, 0.5)
    assert e.tau == pytest.approx(1 / 15)
    with pytest.raises(SubcriticalExponent):
        energy.exponents(1, 3)


def test_h0_and_eta():
    """h₀ = 1/2 for small δ, and the cone inequality holds at h₀ for larger δ."""
    assert energy.h0(0.25) == 0.5
    delta = 0.5
    h = energy.h0(delta)
    t = 2 * h * delta
    assert 0 < h < 0.5
    assert delta + t <= (1 - t) * math.sqrt(1 - t * t) + 1e-9
    assert energy.eta(0.25, 1) == pytest.approx(0.0625)
    with pytest.raises(InvalidParameter):
        energy.h0(1.0)


def test_constants_ledger():
    """Every ledger entry is a positive finite number and the radii are ordered."""
    ledger = energy.constants_ledger(1.0, 2, 16, 0.25)
    rows = energy.ledger_rows(ledger)
    assert [name for name, _, _ in rows] == list(FORMULAS)
    assert all(math.isfinite(value) and value > 0 for _, value, _ in rows)
    assert ledger.R_sigma == min(ledger.R_uar, ledger.R_adm_fine)
    assert ledger.R_smooth <= 0.5 * ledger.R_graph
    assert ledger.Omega == pytest.approx(8 * math.pi**2 / 15)


def test_ledger_radii_scale_with_energy():
    """R_uar ∝ E^{-1/λ}."""
    one = energy.constants_ledger(1.0, 1, 4, 0.25)
    two = energy.constants_ledger(2.0, 1, 4, 0.25)
    assert two.R_uar / one.R_uar == pytest.approx(2 ** (-1 / one.lam))
    with pytest.raises(InvalidParameter):
        energy.constants_ledger(0.0, 1, 4, 0.25)


def test_balance_check():
    """The balance threshold scales like E^{-1/λ}; a stopping distance below it fails."""
    eta = energy.eta(0.25, 1)
    base = energy.balance_check(eta, 1.0, 1.0, 2.0, 1, 4).rhs
    # λ = 1 for m = 1, p = 4, so this energy puts the threshold at 10
    E = base / 10
    assert not energy.balance_check(eta, 1.0, E, 2.0, 1, 4).holds
    check = energy.balance_check(eta, 20.0, E, 2.0, 1, 4)
    assert check.holds and check.rhs == pytest.approx(10.0)
    with pytest.raises(InvalidParameter):
        energy.balance_check(0.0, 1.0, 1.0, 2.0, 1, 4)


@pytest.mark.slow
def test_voluminous_search_on_circle():
    """From a circle point with its exact tangent, the search closes a verified simplex."""
    cloud = generators.generate("sphere", argparse.Namespace(m=1, num_points=2000, seed=0))
    x0 = int(cloud.index.nearest(np.array([1.0, 0.0]))[1])
    x = cloud.points[x0]
    tangent = Subspace.from_span(np.array([[-x[1], x[0]]]))
    result = energy.voluminous_search(cloud, x0, delta=0.25, tangent=tangent)
    assert result.verified
    assert result.vertices[0] == x0 and len(result.vertices) == 3
    assert result.d == pytest.approx(1.0, rel=0.05)
    assert [stage.case for stage in result.stages] == ["A"]


def test_voluminous_search_fails_on_flat_segment():
    """A flat cloud never enters the cone around its tangent."""
    cloud = generators.generate("plane_disk", argparse.Namespace(m=1, n=2, num_points=1000, seed=0))
    x0 = int(cloud.index.nearest(np.zeros(2))[1])
    with pytest.raises(MaxStagesExceeded):
        energy.voluminous_search(cloud, x0, tangent=Subspace.coordinate(2, [0]))
    assert energy.big_projection_check(cloud, cloud.points[x0], 0.5, Subspace.coordinate(2, [0]), 0.25) == 1.0


def test_voluminous_search_needs_codimension():
    """A full-dimensional cloud has no cones to grow."""
    cloud = generators.generate("plane_disk", argparse.Namespace(m=2, n=2, num_points=200, seed=0))
    with pytest.raises(InvalidParameter):
        energy.voluminous_search(cloud, 0)


def test_axis_targets_are_fibers_over_the_plane():
    """A point is matched on its projection onto H; its offset normal to H is free."""
    H, radius = Subspace.coordinate(2, [0]), math.sqrt(1 - 0.25**2)
    lifted = PointCloud(np.array([[0.0, 0.0], [radius, 0.15]]), np.ones(2), 1)
    assert _axis_points(lifted, np.zeros(2), H, 1.0, radius, 0.1) == ([1], -1)
    short = PointCloud(np.array([[0.0, 0.0], [radius - 0.15, 0.0]]), np.ones(2), 1)
    assert _axis_points(short, np.zeros(2), H, 1.0, radius, 0.1) == (None, 0)
