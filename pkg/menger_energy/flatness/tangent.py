"""Tangent planes from best approximating planes over a shrinking radius schedule."""
from dataclasses import dataclass, field
import itertools
import logging
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.stats import linregress

from menger_energy.cones import cap_mask
from menger_energy.errors import InsufficientPairs, InsufficientPoints
from menger_energy.flatness.beta import BetaSolver
from menger_energy.grassmann import grass_distance, Subspace
import menger_energy.metadata.flatness as metadata

logger = logging.getLogger(__name__)


def min_points(m: int) -> int:
    """Smallest ball population a plane estimate is trusted on."""
    return max(3 * (m + 2), metadata.TANGENT_MIN_POINTS)


@dataclass
class TangentEstimate:
    tangent: Subspace
    radii: List[float]
    betas: List[float]
    distances: List[float]
    point_counts: List[int]
    truncated_at: Optional[float] = None
    non_cauchy: bool = False
    planes: List[Subspace] = field(default_factory=list, repr=False)

    def rows(self) -> List[List[float]]:
        distances = [float("nan")] + self.distances
        return [list(row) for row in zip(self.radii, self.point_counts, self.betas, distances)]

    def to_dict(self) -> Dict:
        return {
            "tangent": self.tangent,
            "radii": self.radii,
            "betas": self.betas,
            "distances": self.distances,
            "point_counts": self.point_counts,
            "truncated_at": self.truncated_at,
            "non_cauchy": self.non_cauchy,
        }


TANGENT_HEADER = ["radius", "point_count", "beta_bar", "dgras_to_previous"]


def radius_schedule(r0: float, levels: int = metadata.TANGENT_LEVELS) -> List[float]:
    """ρ_k = 2^-k r0 for k = 0, ..., levels - 1.

    >>> radius_schedule(1.0, 3)
    [1.0, 0.5, 0.25]
    """
    return [r0 * 2.0**-k for k in range(levels)]


def tangent_plane(
    cloud,
    x: np.ndarray,
    radii: Sequence[float],
    solver: Optional[BetaSolver] = None,
    tol: Optional[float] = None,
) -> TangentEstimate:
    """Best approximating planes along a decreasing radius schedule; the last reliable one is the tangent.

    The schedule stops at the first radius whose closed ball holds fewer than `min_points(m)` points.
    Consecutive planes should get closer; when a distance grows by more than `tol` the estimate is
    flagged non-Cauchy. `tol` defaults to the cloud tolerance.
    """
    solver = solver or BetaSolver()
    tol = cloud.tol if tol is None else tol
    x = np.asarray(x, dtype=float)
    radii = [float(r) for r in radii]
    if any(later >= earlier for earlier, later in zip(radii, radii[1:])):
        raise InsufficientPoints("The radius schedule must be strictly decreasing.")
    needed = min_points(cloud.m)
    planes: List[Subspace] = []
    betas, counts, used = [], [], []
    truncated_at = None
    for r in radii:
        indices = cloud.ball(x, r, "closed")
        if len(indices) < needed:
            truncated_at = r
            logger.info("Tangent schedule truncated at r=%.4g: %d < %d points", r, len(indices), needed)
            break
        fit = solver.fit(cloud.points[indices] - x, cloud.m, cloud.weights[indices])
        planes.append(fit.plane)
        betas.append(fit.value / r)
        counts.append(len(indices))
        used.append(r)
    if not planes:
        raise InsufficientPoints(f"Fewer than {needed} points within radius {radii[0]}.", radius=radii[0])
    distances = [grass_distance(a, b) for a, b in zip(planes, planes[1:])]
    non_cauchy = any(later > earlier + tol for earlier, later in zip(distances, distances[1:]))
    return TangentEstimate(
        tangent=planes[-1],
        radii=used,
        betas=betas,
        distances=distances,
        point_counts=counts,
        truncated_at=truncated_at,
        non_cauchy=non_cauchy,
        planes=planes,
    )


def local_jet(
    cloud, y: np.ndarray, radius: float, tangent: Subspace, normal: Subspace, center: Optional[np.ndarray] = None
) -> Optional[np.ndarray]:
    """Gradient at y of a least-squares quadratic fit of the normal coordinates over the tangent coordinates.

    Returns the (n-m, m) matrix G; the plane spanned by e_i + Σ_j G_ji f_j is the local tangent estimate.
    Falls back to a linear fit when the ball is too sparse for the quadratic terms; None when it is too
    sparse for that too.
    """
    center = y if center is None else center
    indices = cloud.ball(y, radius, "closed")
    offsets = cloud.points[indices] - center
    base = (y - center) @ tangent.frame.T
    u = offsets @ tangent.frame.T - base
    values = offsets @ normal.frame.T
    m = tangent.dim
    quadratic = [u[:, i] * u[:, j] for i, j in itertools.combinations_with_replacement(range(m), 2)]
    if len(indices) >= 2 * (1 + m + len(quadratic)):
        design = np.column_stack([np.ones(len(u)), u, *quadratic])
    elif len(indices) >= m + 2:
        design = np.column_stack([np.ones(len(u)), u])
    else:
        return None
    coefficients, *_ = np.linalg.lstsq(design, values, rcond=None)
    return coefficients[1 : m + 1].T


def jet_plane(gradient: np.ndarray, tangent: Subspace, normal: Subspace) -> Subspace:
    return Subspace.from_span(tangent.frame + gradient.T @ normal.frame)


@dataclass
class MockTangentCheck:
    radii: List[float]
    annulus_counts: List[int]
    cone_counts: List[int]

    @property
    def fractions(self) -> List[float]:
        return [c / a if a else 0.0 for c, a in zip(self.cone_counts, self.annulus_counts)]

    @property
    def holds(self) -> List[bool]:
        return [c == 0 for c in self.cone_counts]

    def to_dict(self) -> Dict:
        return {
            "radii": self.radii,
            "annulus_counts": self.annulus_counts,
            "cone_counts": self.cone_counts,
            "fractions": self.fractions,
            "holds": self.holds,
        }


def mock_tangent_check(cloud, x: np.ndarray, H: Subspace, delta: float, radii: Sequence[float]) -> MockTangentCheck:
    """Count cloud points of x + C(δ, H) ∩ A(r/2, 2r); H is a mock tangent plane at scale r when there are none."""
    x = np.asarray(x, dtype=float)
    annulus_counts, cone_counts = [], []
    for r in radii:
        indices = cloud.ball(x, 2 * r, "open")
        points = cloud.points[indices]
        norms = np.linalg.norm(points - x, axis=1)
        annulus_counts.append(int(np.sum(norms > 0.5 * r)))
        cone_counts.append(int(np.sum(cap_mask(points, x, H, delta, 0.5 * r, 2 * r))))
    return MockTangentCheck(radii=[float(r) for r in radii], annulus_counts=annulus_counts, cone_counts=cone_counts)


@dataclass
class OscillationFit:
    slope: float
    intercept: float
    pairs: int
    rvalue: float

    def to_dict(self) -> Dict:
        return {"slope": self.slope, "intercept": self.intercept, "pairs": self.pairs, "rvalue": self.rvalue}


def tangent_oscillation(
    cloud,
    centers: Sequence[int],
    radius: float,
    window: Sequence[float],
    solver: Optional[BetaSolver] = None,
) -> OscillationFit:
    """Log-log slope of dgras(T̂_x, T̂_y) against |x − y| over center pairs with |x − y| inside `window`.

    Tangents are the best approximating planes at the single given radius.
    """
    solver = solver or BetaSolver()
    lo, hi = window
    tangents = {}
    for i in centers:
        indices = cloud.ball(cloud.points[i], radius, "closed")
        if len(indices) >= min_points(cloud.m):
            plane_fit = solver.fit(cloud.points[indices] - cloud.points[i], cloud.m, cloud.weights[indices])
            tangents[int(i)] = plane_fit.plane
    separations, oscillations = [], []
    for i, j in itertools.combinations(sorted(tangents), 2):
        separation = float(np.linalg.norm(cloud.points[i] - cloud.points[j]))
        if lo <= separation <= hi:
            oscillation = grass_distance(tangents[i], tangents[j])
            if oscillation > 0:
                separations.append(separation)
                oscillations.append(oscillation)
    if len(separations) < 3:
        raise InsufficientPairs(f"Only {len(separations)} center pairs in the window [{lo}, {hi}].")
    fit = linregress(np.log(separations), np.log(oscillations))
    return OscillationFit(
        slope=float(fit.slope), intercept=float(fit.intercept), pairs=len(separations), rvalue=float(fit.rvalue)
    )
