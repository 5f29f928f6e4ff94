"""Exact and Monte Carlo estimates of the p-energy E_p = ∫ K(T)^p dμ(T) over ordered (m+2)-tuples."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import logging
import math
from typing import Dict, Optional, Tuple

import numpy as np

from menger_energy.errors import BudgetExceeded, InvalidParameter
import menger_energy.metadata.energy as metadata
import menger_energy.metadata.shared as shared
from menger_energy.simplex import tuple_curvature
from menger_energy.util import as_generator, progress, spawn_generators

logger = logging.getLogger(__name__)

METHODS = ("brute", "monte_carlo")


@dataclass
class EnergyEstimate:
    p: float
    value: float
    method: str
    samples: int
    stderr: float = 0.0
    max_curvature_seen: float = 0.0

    def to_dict(self) -> Dict:
        return {
            "p": self.p,
            "value": self.value,
            "method": self.method,
            "samples": self.samples,
            "stderr": self.stderr,
            "max_curvature_seen": self.max_curvature_seen,
        }


def _check_p(p: float) -> None:
    if not p > 0:
        raise InvalidParameter(f"The exponent p must be positive, got {p}.")


def _run(function, jobs, threads: int, show_progress: bool, desc: str):
    """Map `function` over `jobs`, keeping the input order so reductions are reproducible."""
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            return list(progress(executor.map(function, jobs), show_progress, total=len(jobs), desc=desc))
    return [function(job) for job in progress(jobs, show_progress, desc=desc)]


def energy_brute(
    cloud,
    p: float,
    restrict_ball: Optional[Tuple[np.ndarray, float]] = None,
    block: int = metadata.BRUTE_BLOCK,
    max_tuples: int = metadata.BRUTE_MAX_TUPLES,
    threads: int = 1,
    show_progress: bool = False,
    tol: float = shared.TOL_LINALG,
) -> EnergyEstimate:
    """Exact weighted sum of K^p · Π weights over all ordered (m+2)-tuples of cloud points.

    With `restrict_ball` = (a, ρ) only tuples inside the closed ball B(a, ρ) count, which gives M_p(a, ρ)^p.
    Tuples are enumerated in blocks of linear indices; block sums are added in index order.
    """
    _check_p(p)
    if restrict_ball is not None:
        center, radius = restrict_ball
        cloud = cloud.restrict(cloud.ball(np.asarray(center, dtype=float), radius, "closed"))
    arity = cloud.m + 2
    count = len(cloud)
    total = count**arity
    if total > max_tuples:
        raise BudgetExceeded(
            f"{count}^{arity} = {total} ordered tuples exceed the brute-force budget of {max_tuples}; use energy_mc."
        )
    if total == 0:
        return EnergyEstimate(p=p, value=0.0, method="brute", samples=0)
    points, weights = cloud.points, cloud.weights
    shape = (count,) * arity

    def evaluate(start: int) -> Tuple[float, float]:
        indices = np.unravel_index(np.arange(start, min(start + block, total)), shape)
        curvature = tuple_curvature(np.stack([points[i] for i in indices], axis=1), tol)
        mass = np.prod(np.stack([weights[i] for i in indices], axis=1), axis=1)
        return float(np.sum(curvature**p * mass)), float(curvature.max())

    results = _run(evaluate, list(range(0, total, block)), threads, show_progress, "tuples")
    value = math.fsum(partial for partial, _ in results)
    max_curvature = max(seen for _, seen in results)
    logger.info("Brute-force E_%g over %d tuples: %.6g", p, total, value)
    return EnergyEstimate(p=p, value=value, method="brute", samples=total, max_curvature_seen=max_curvature)


def energy_mc(
    cloud,
    p: float,
    samples: int = metadata.MC_SAMPLES,
    seed: int = shared.SEED,
    batch: int = metadata.MC_BATCH,
    threads: int = 1,
    show_progress: bool = False,
    tol: float = shared.TOL_LINALG,
) -> EnergyEstimate:
    """Importance-sampled E_p: each tuple coordinate is drawn with probability weight/total_mass.

    The estimate is total_mass^{m+2} times the mean of K^p; the standard error comes from the spread of
    the batch means. Batch b draws from the b-th substream of `seed`, so the result only depends on
    (seed, samples, batch).
    """
    _check_p(p)
    if samples < metadata.MC_MIN_SAMPLES:
        raise InvalidParameter(f"Monte Carlo needs at least {metadata.MC_MIN_SAMPLES} samples, got {samples}.")
    if batch < 1:
        raise InvalidParameter(f"Batch size must be positive, got {batch}.")
    batches = max(2, samples // batch)
    size = samples // batches
    arity = cloud.m + 2
    probabilities = cloud.weights / cloud.total_mass
    points = cloud.points

    def evaluate(rng: np.random.Generator) -> Tuple[float, float]:
        indices = rng.choice(len(cloud), size=(size, arity), p=probabilities)
        curvature = tuple_curvature(points[indices], tol)
        return float(np.mean(curvature**p)), float(curvature.max())

    results = _run(evaluate, spawn_generators(seed, batches), threads, show_progress, "batches")
    means = np.array([mean for mean, _ in results])
    scale = cloud.total_mass**arity
    value = scale * float(np.mean(means))
    stderr = scale * float(np.std(means, ddof=1)) / math.sqrt(batches)
    logger.info("Monte Carlo E_%g from %d x %d samples: %.6g ± %.2g", p, batches, size, value, stderr)
    return EnergyEstimate(
        p=p,
        value=value,
        method="monte_carlo",
        samples=batches * size,
        stderr=stderr,
        max_curvature_seen=max(seen for _, seen in results),
    )


def max_curvature_sample(
    cloud, samples: int, seed: int = shared.SEED, batch: int = metadata.BRUTE_BLOCK, tol: float = shared.TOL_LINALG
) -> float:
    """Largest K over `samples` ordered tuples drawn uniformly by index, so light points are not neglected."""
    rng = as_generator(seed)
    arity = cloud.m + 2
    best = 0.0
    for start in range(0, samples, batch):
        indices = rng.integers(0, len(cloud), size=(min(batch, samples - start), arity))
        best = max(best, float(tuple_curvature(cloud.points[indices], tol).max()))
    return best
