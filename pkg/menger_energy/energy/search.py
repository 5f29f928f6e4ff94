"""Stage-wise search for a voluminous simplex rooted at a cloud point, and the big-projection coverage check.

At stage I the search holds a plane H_I and a radius ρ_I such that no cloud point of B(x₀, ρ_I) lies in
the cone x₀ + C(δ, H_I). Points projecting onto the axis targets r_I e_i of H_I span a plane P. Either
some point of the annulus A(ρ_I/2, 2ρ_I) stands at least h₀δρ_I off x₀ + P, which closes a voluminous
simplex at d = 2ρ_I, or P becomes the next plane and ρ grows to the next entry of the cloud into its cone.
"""
from dataclasses import dataclass, field
import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from menger_energy.cones import cap_points
from menger_energy.energy.constants import eta, h0
from menger_energy.errors import InvalidParameter, MaxStagesExceeded, TargetPointMissing
from menger_energy.flatness import BetaSolver, radius_schedule, tangent_plane
from menger_energy.grassmann import Subspace
import menger_energy.metadata.energy as metadata
from menger_energy.simplex import Simplex, voluminous_classify, VoluminousReport

logger = logging.getLogger(__name__)


@dataclass
class SearchStage:
    stage: int
    rho: float
    plane: Subspace
    case: str
    axis_points: List[int]
    apex: Optional[int] = None

    def to_dict(self) -> Dict:
        return {
            "stage": self.stage,
            "rho": self.rho,
            "plane": self.plane,
            "case": self.case,
            "axis_points": self.axis_points,
            "apex": self.apex,
        }


@dataclass
class SearchResult:
    simplex: Simplex
    d: float
    eta: float
    verification: VoluminousReport
    tangent: Subspace
    vertices: List[int]
    stages: List[SearchStage] = field(default_factory=list)

    @property
    def verified(self) -> bool:
        return self.verification.member

    def to_dict(self) -> Dict:
        return {
            "simplex": self.simplex,
            "vertex_indices": self.vertices,
            "d": self.d,
            "eta": self.eta,
            "verification_eta": 0.5 * self.eta,
            "verification": self.verification,
            "tangent": self.tangent,
            "stages": self.stages,
        }


SEARCH_HEADER = ["stage", "rho", "case", "apex"]


def _axis_frames(H: Subspace, trials: int) -> List[np.ndarray]:
    """Orthonormal frames of H to try: the stored one, its sign flip, and rotations in the first two axes."""
    frames = []
    angles = np.linspace(0.0, 0.5 * math.pi, trials, endpoint=False) if H.dim > 1 else [0.0]
    for angle in angles:
        frame = H.frame.copy()
        if H.dim > 1:
            c, s = math.cos(angle), math.sin(angle)
            frame[:2] = np.array([[c, s], [-s, c]]) @ H.frame[:2]
        frames.extend([frame, -frame])
    return frames


def _axis_points(
    cloud, x0: np.ndarray, H: Subspace, rho: float, radius: float, point_tol: float
) -> Tuple[Optional[List[int]], int]:
    """Cloud points of B(x₀, (1 + point_tol)ρ) whose projection onto x₀ + H lies within point_tol·ρ of
    x₀ + radius·e_i, one per axis of a frame of H.

    A target is the whole fiber x₀ + radius·e_i + H^⊥: the offset normal to H is bounded only by the
    candidate ball, at most √((1 + point_tol)² − (radius/ρ − point_tol)²)·ρ.

    Returns the points, or None with the axis the most successful frame got stuck on.
    """
    candidates = cloud.ball(x0, (1 + point_tol) * rho, "closed")
    coordinates = (cloud.points[candidates] - x0) @ H.frame.T
    stuck = 0
    for frame in _axis_frames(H, metadata.SEARCH_FRAME_TRIALS):
        chosen = []
        for axis in frame:
            target = radius * (H.frame @ axis)
            misses = np.linalg.norm(coordinates - target, axis=1)
            best = int(np.argmin(misses)) if len(misses) else -1
            if best < 0 or misses[best] > point_tol * rho:
                stuck = max(stuck, len(chosen))
                break
            chosen.append(int(candidates[best]))
        else:
            return chosen, -1
    return None, stuck


def voluminous_search(
    cloud,
    x0_index: int,
    delta: float = metadata.SEARCH_DELTA,
    point_tol: float = metadata.SEARCH_POINT_TOL,
    max_stages: int = metadata.SEARCH_MAX_STAGES,
    tangent: Optional[Subspace] = None,
    solver: Optional[BetaSolver] = None,
    tol: Optional[float] = None,
) -> SearchResult:
    """Grow cones from x₀ until a simplex in V_m(η, d) closes; see the module docstring.

    The tangent estimate at x₀ is the starting plane unless one is given. The returned simplex is
    (x₀, x_1, ..., x_m, z) and is classified against half of η(δ, m), the slack for hitting axis targets
    only up to point_tol. The classification slack `tol` defaults to the cloud tolerance.
    """
    if not 0 < delta < 1:
        raise InvalidParameter(f"δ must lie in (0, 1), got {delta}.")
    if not 0 < point_tol < 1:
        raise InvalidParameter(f"point_tol must lie in (0, 1), got {point_tol}.")
    m, n = cloud.m, cloud.n
    if m >= n:
        raise InvalidParameter(f"Cones need a proper plane; got m={m} in R^{n}.")
    tol = cloud.tol if tol is None else tol
    x0 = cloud.points[x0_index]
    if tangent is None:
        r0 = metadata.SEARCH_TANGENT_FRACTION * cloud.diameter
        tangent = tangent_plane(cloud, x0, radius_schedule(r0), solver, tol).tangent
    h, eta_value = h0(delta), eta(delta, m)
    horizon = 2 * cloud.diameter
    stages: List[SearchStage] = []

    entries = cap_points(cloud, x0, tangent, delta, 0.0, horizon)
    if not len(entries):
        logger.info("No cloud point in the cone at x₀; the cloud is flat around point %d", x0_index)
        raise MaxStagesExceeded(0, stages)
    H, rho = tangent, float(np.linalg.norm(cloud.points[entries[0]] - x0))
    for stage in range(1, max_stages + 1):
        radius = math.sqrt(1 - delta**2) * rho
        axis_points, stuck = _axis_points(cloud, x0, H, rho, radius, point_tol)
        if axis_points is None:
            stages.append(SearchStage(stage, rho, H, "missing", []))
            raise TargetPointMissing(stage, stuck, stages)
        P = Subspace.from_span(cloud.points[axis_points] - x0)

        hood = cloud.ball(x0, 2 * rho, "open")
        offsets = cloud.points[hood] - x0
        in_annulus = np.linalg.norm(offsets, axis=1) > 0.5 * rho
        heights = np.where(in_annulus, np.linalg.norm(P.reject(offsets), axis=1), -np.inf)
        top = int(np.argmax(heights)) if len(hood) else -1
        if top >= 0 and heights[top] >= h * delta * rho:
            apex = int(hood[top])
            stages.append(SearchStage(stage, rho, H, "A", axis_points, apex))
            vertices = [int(x0_index), *axis_points, apex]
            T = Simplex(cloud.points[vertices])
            d = 2 * rho
            verification = voluminous_classify(T, 0.5 * eta_value, d, tol)
            logger.info("Voluminous search stopped at stage %d with d=%.4g (member: %s)", stage, d, verification.member)
            return SearchResult(
                simplex=T,
                d=d,
                eta=eta_value,
                verification=verification,
                tangent=tangent,
                vertices=vertices,
                stages=stages,
            )

        stages.append(SearchStage(stage, rho, H, "B", axis_points))
        entries = cap_points(cloud, x0, P, delta, rho, horizon)
        if not len(entries):
            logger.info("The cone around the stage-%d plane stays empty up to the cloud diameter", stage)
            raise MaxStagesExceeded(stage, stages)
        H, rho = P, float(np.linalg.norm(cloud.points[entries[0]] - x0))
    raise MaxStagesExceeded(max_stages, stages)


def big_projection_check(
    cloud, x: np.ndarray, rho: float, H: Subspace, delta: float, grid: int = metadata.COVERAGE_GRID
) -> float:
    """Fraction of the disk (x + H) ∩ B(x, √(1 − δ²)ρ) covered by the projection of Σ ∩ B(x, ρ).

    The disk is discretized by `grid` nodes per axis; a node is covered when some projected point lies
    within one grid spacing of it.
    """
    if not rho > 0:
        raise InvalidParameter(f"ρ must be positive, got {rho}.")
    if grid < 2:
        raise InvalidParameter(f"The coverage grid needs at least 2 nodes per axis, got {grid}.")
    x = np.asarray(x, dtype=float)
    radius = math.sqrt(1 - delta**2) * rho
    axis = np.linspace(-radius, radius, grid)
    spacing = axis[1] - axis[0]
    nodes = np.stack(np.meshgrid(*([axis] * H.dim), indexing="ij"), axis=-1).reshape(-1, H.dim)
    nodes = nodes[np.linalg.norm(nodes, axis=1) <= radius * (1 + 1e-12)]
    indices = cloud.ball(x, rho, "closed")
    if not len(indices):
        return 0.0
    projected = (cloud.points[indices] - x) @ H.frame.T
    distances, _ = cKDTree(projected).query(nodes, distance_upper_bound=spacing * (1 + 1e-9))
    return float(np.mean(np.isfinite(distances)))
