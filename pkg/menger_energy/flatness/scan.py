"""β̄ and θ̄ at a point, and scans of the gap ratio θ̄/β̄ over centers and radii."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import logging
import math
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from menger_energy.flatness.beta import BetaSolver, beta_number, max_distance
from menger_energy.flatness.theta import ThetaSolver, theta_number
from menger_energy.grassmann import Subspace
import menger_energy.metadata.flatness as metadata
import menger_energy.metadata.shared as shared
from menger_energy.util import as_generator, progress

logger = logging.getLogger(__name__)


@dataclass
class FlatnessResult:
    center: np.ndarray
    radius: float
    beta_bar: float
    best_plane: Subspace
    point_count: int
    beta_open: float
    theta_bar: Optional[float] = None
    theta_open: Optional[float] = None
    diagnostics: Dict = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {
            "center": self.center,
            "radius": self.radius,
            "beta_bar": self.beta_bar,
            "beta_open": self.beta_open,
            "theta_bar": self.theta_bar,
            "theta_open": self.theta_open,
            "best_plane": self.best_plane,
            "point_count": self.point_count,
            "diagnostics": self.diagnostics,
        }


def beta_at(cloud, x: np.ndarray, r: float, solver: Optional[BetaSolver] = None) -> FlatnessResult:
    """FlatnessResult with the β part filled in."""
    x = np.asarray(x, dtype=float)
    beta = beta_number(cloud, x, r, solver)
    return FlatnessResult(
        center=x,
        radius=r,
        beta_bar=beta.beta_bar,
        best_plane=beta.fit.plane,
        point_count=beta.point_count,
        beta_open=beta.beta_open,
        diagnostics={"beta": beta.fit.to_dict()},
    )


def flatness_at(
    cloud,
    x: np.ndarray,
    r: float,
    beta_solver: Optional[BetaSolver] = None,
    theta_solver: Optional[ThetaSolver] = None,
) -> FlatnessResult:
    """β̄, θ̄ and their open variants at (x, r); the θ search starts from the β-optimal plane.

    Every point of the ball lies within its distance to the disk (x + H) ∩ B of the whole plane x + H,
    so the β objective at the θ plane is at most θ̄; β̄ is lowered to it when that is smaller.
    """
    result = beta_at(cloud, x, r, beta_solver)
    theta = theta_number(cloud, result.center, r, start=result.best_plane, solver=theta_solver)
    closed = cloud.ball(result.center, r, "closed")
    at_theta_plane = max_distance(cloud.points[closed] - result.center, theta.fit.plane) / r
    if at_theta_plane < result.beta_bar:
        logger.debug("θ plane improves β̄ at r=%.4g: %.6g -> %.6g", r, result.beta_bar, at_theta_plane)
        result.beta_bar = at_theta_plane
        result.best_plane = theta.fit.plane
        result.beta_open = min(result.beta_open, at_theta_plane)
    result.theta_bar = theta.theta_bar
    result.theta_open = theta.theta_open
    result.diagnostics["theta"] = theta.fit.to_dict()
    return result


@dataclass
class GapScan:
    max_ratio: float
    rows: List[List[float]]
    skipped: int
    unbounded: int

    def to_dict(self) -> Dict:
        return {
            "max_ratio": self.max_ratio,
            "pairs": len(self.rows),
            "skipped": self.skipped,
            "unbounded": self.unbounded,
        }


GAP_SCAN_HEADER = ["index", "radius", "beta_bar", "theta_bar", "ratio"]


def gap_ratio_scan(
    cloud,
    radii: Sequence[float],
    centers: Union[int, Sequence[int]] = 20,
    seed: int = shared.SEED,
    beta_solver: Optional[BetaSolver] = None,
    theta_solver: Optional[ThetaSolver] = None,
    threads: int = 1,
    show_progress: bool = False,
) -> GapScan:
    """Empirical M_Σ: the largest θ̄/β̄ over the sampled (center, radius) pairs.

    `centers` is either a count of cloud points drawn with the seed or explicit point indices. Pairs with
    β̄ below GAP_BETA_TOL are skipped; those of them with θ̄ >= GAP_THETA_TOL are counted as unbounded,
    flat patches ending in a rim.
    """
    if isinstance(centers, (int, np.integer)):
        rng = as_generator(seed)
        indices = np.sort(rng.choice(len(cloud), size=min(int(centers), len(cloud)), replace=False))
    else:
        indices = np.asarray(centers, dtype=int)
    pairs = [(int(i), float(r)) for i in indices for r in radii]

    def evaluate(pair):
        i, r = pair
        return flatness_at(cloud, cloud.points[i], r, beta_solver, theta_solver)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            results = list(progress(executor.map(evaluate, pairs), show_progress, total=len(pairs)))
    else:
        results = [evaluate(pair) for pair in progress(pairs, show_progress, desc="gap scan")]

    rows, skipped, unbounded, max_ratio = [], 0, 0, 0.0
    for (i, r), result in zip(pairs, results):
        if result.beta_bar < metadata.GAP_BETA_TOL:
            skipped += 1
            unbounded += int(result.theta_bar >= metadata.GAP_THETA_TOL)
            ratio = math.inf if result.theta_bar >= metadata.GAP_THETA_TOL else math.nan
        else:
            ratio = result.theta_bar / result.beta_bar
            max_ratio = max(max_ratio, ratio)
        rows.append([i, r, result.beta_bar, result.theta_bar, ratio])
    logger.info("Gap scan: max ratio %.4g over %d pairs, %d skipped", max_ratio, len(pairs), skipped)
    return GapScan(max_ratio=max_ratio, rows=rows, skipped=skipped, unbounded=unbounded)
