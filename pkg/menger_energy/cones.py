"""Cones, shells and conical caps; the two-cones inclusion, the sphere-flattening isotopy and cone paths.

C(δ, H) = {x : |Q_H(x)| >= δ|x|} is the cone with axis H^⊥. Shells A(r, R) are open annuli,
the cone inequality is closed.
"""
from dataclasses import dataclass, field
import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np

from menger_energy.errors import (
    DimensionMismatch,
    HypothesisViolated,
    IntersectionNotWitnessed,
    InvalidParameter,
    MaxStagesExceeded,
    NotInCone,
)
from menger_energy.grassmann import max_gain, min_gain, principal_vectors, project, restricted_singular_values, Subspace
import menger_energy.metadata.cones as metadata
import menger_energy.metadata.shared as shared
from menger_energy.util import as_generator, RngLike, spawn_generators

logger = logging.getLogger(__name__)

# points whose norm is at most this are treated as the apex of the cone
APEX_TOL = 1e-300


@dataclass(frozen=True)
class ConeSpec:
    """C(δ, H), optionally cut to the cap C(δ, H, r, R) by the open shell r < |x| < R."""

    H: Subspace
    delta: float
    inner_radius: Optional[float] = None
    outer_radius: Optional[float] = None

    def __post_init__(self) -> None:
        if not 0 < self.delta < 1:
            raise InvalidParameter(f"δ must lie in (0, 1), got {self.delta}.")
        if self.outer_radius is not None and (self.inner_radius or 0.0) >= self.outer_radius:
            raise InvalidParameter(f"Cap radii must satisfy r < R, got r={self.inner_radius}, R={self.outer_radius}.")

    @property
    def is_cap(self) -> bool:
        return self.outer_radius is not None


def cone_ratio(H: Subspace, x: np.ndarray) -> np.ndarray:
    """|Q_H(x)|/|x| for a vector or a stack of vectors; 1 at the apex."""
    x = np.asarray(x, dtype=float)
    norms = np.linalg.norm(x, axis=-1)
    rejected = np.linalg.norm(project(H, x, "complement"), axis=-1)
    return np.where(norms > APEX_TOL, rejected / np.where(norms > APEX_TOL, norms, 1.0), 1.0)


def in_cone(H: Subspace, delta: float, x: np.ndarray, tol: float = shared.TOL_LINALG) -> np.ndarray:
    """Vectorized |Q_H(x)| >= δ|x| with a relative tolerance."""
    x = np.asarray(x, dtype=float)
    norms = np.linalg.norm(x, axis=-1)
    rejected = np.linalg.norm(project(H, x, "complement"), axis=-1)
    return rejected >= (delta - tol) * norms


def cone_membership(spec: ConeSpec, x: np.ndarray) -> bool:
    """Whether x lies in the cone (and in the open shell when spec is a cap).

    >>> spec = ConeSpec(Subspace.coordinate(2, [0]), 0.6)
    >>> cone_membership(spec, np.array([0.8, 0.6]))
    True
    >>> cone_membership(spec, np.array([1.0, 0.0]))
    False
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.H.ambient_dim,):
        raise DimensionMismatch(f"Vector of shape {x.shape} does not live in R^{spec.H.ambient_dim}.")
    member = bool(in_cone(spec.H, spec.delta, x))
    if spec.is_cap:
        norm = float(np.linalg.norm(x))
        member = member and (spec.inner_radius or 0.0) < norm < spec.outer_radius
    return member


def cap_mask(
    points: np.ndarray, x: np.ndarray, H: Subspace, delta: float, inner_radius: float, outer_radius: float
) -> np.ndarray:
    """Boolean mask of the points lying in x + C(δ, H, r, R)."""
    offsets = np.asarray(points, dtype=float) - np.asarray(x, dtype=float)
    norms = np.linalg.norm(offsets, axis=1)
    return (norms > inner_radius) & (norms < outer_radius) & in_cone(H, delta, offsets)


def cap_points(cloud, x: np.ndarray, H: Subspace, delta: float, inner_radius: float, outer_radius: float) -> np.ndarray:
    """Indices of the cloud points in x + C(δ, H, r, R), sorted by distance to x."""
    x = np.asarray(x, dtype=float)
    candidates = cloud.ball(x, outer_radius, "open")
    if not len(candidates):
        return candidates
    inside = candidates[cap_mask(cloud.points[candidates], x, H, delta, inner_radius, outer_radius)]
    order = np.argsort(np.linalg.norm(cloud.points[inside] - x, axis=1), kind="stable")
    return inside[order]


@dataclass
class InclusionReport:
    threshold: float
    samples: int
    violations: int
    min_ratio: float
    witness: str
    special_case_applicable: bool
    special_case_holds: Optional[bool]
    special_case_min_ratio: Optional[float] = None

    def to_dict(self) -> Dict:
        return dict(self.__dict__)


def _witness_ok(L: Subspace, H0: Subspace, H1: Subspace, alpha: float, beta: float, tol: float) -> bool:
    return (
        max_gain(H0.complement_projector, L) <= alpha + tol
        and max_gain(H1.complement_projector, L) <= beta + tol
        and min_gain(H1.projector, L) > tol
    )


def find_common_plane(
    H0: Subspace,
    H1: Subspace,
    alpha: float,
    beta: float,
    grid: int = metadata.WITNESS_GRID,
    tol: float = shared.TOL_GEOM,
) -> Optional[Subspace]:
    """An m-plane inside C(√(1−α²), H0^⊥) ∩ C(√(1−β²), H1^⊥) that projects onto H1.

    Searched in the pencil of principal vectors; None when the pencil holds none.
    """
    u, v, _ = principal_vectors(H0, H1)
    for t in np.linspace(0.0, 1.0, grid):
        blend = (1 - t) * u + t * v
        norms = np.linalg.norm(blend, axis=1, keepdims=True)
        if np.any(norms <= shared.TOL_LINALG):
            continue
        L = Subspace(blend / norms, tol=shared.TOL_GEOM)
        if _witness_ok(L, H0, H1, alpha, beta, tol):
            return L
    return None


def two_cones_check(
    H0: Subspace,
    H1: Subspace,
    alpha: float,
    beta: float,
    epsilon: float,
    samples: int = metadata.TWO_CONES_SAMPLES,
    seed: int = shared.SEED,
    witness: Optional[Subspace] = None,
    chunk: int = 10_000,
    tol: float = shared.TOL_GEOM,
) -> InclusionReport:
    """Sample C((α+β)/√(1−β²) + ε, H0) and count points falling outside C(ε, H1).

    The cones C(√(1−α²), H0^⊥) and C(√(1−β²), H1^⊥) must share an m-plane whose projection onto H1
    is onto (for lines this is a common ray). It is taken from `witness` or searched in the pencil of
    principal vectors of H0 and H1.
    """
    if H0.ambient_dim != H1.ambient_dim or H0.dim != H1.dim:
        raise DimensionMismatch(f"{H0} and {H1} do not lie in the same Grassmannian.")
    if alpha <= 0 or beta <= 0 or epsilon <= 0:
        raise InvalidParameter("α, β and ε must be positive.")
    if alpha + beta >= math.sqrt(1 - beta**2):
        raise HypothesisViolated("α + β < √(1 − β²)", f"α={alpha}, β={beta}.")
    if witness is not None:
        if not _witness_ok(witness, H0, H1, alpha, beta, tol):
            raise IntersectionNotWitnessed("The supplied witness does not lie in both cones.")
        source = "supplied"
    else:
        witness = find_common_plane(H0, H1, alpha, beta, tol=tol)
        if witness is None:
            raise IntersectionNotWitnessed("No common plane of the two cones found in the principal-vector pencil.")
        source = "principal-pencil"

    threshold = (alpha + beta) / math.sqrt(1 - beta**2)
    c = threshold + epsilon
    violations, min_ratio = 0, math.inf
    if c <= 1 and H0.dim < H0.ambient_dim:
        complement = H0.complement()
        sizes = [min(chunk, samples - start) for start in range(0, samples, chunk)]
        for size, rng in zip(sizes, spawn_generators(seed, len(sizes))):
            x = _sample_left_cone(H0, complement, c, size, rng)
            ratios = cone_ratio(H1, x)
            violations += int(np.sum(ratios < epsilon - tol))
            min_ratio = min(min_ratio, float(ratios.min()))

    applicable = alpha + beta <= (1 - beta) * math.sqrt(1 - beta**2)
    holds, special_ratio = None, None
    if applicable:
        special_ratio = min_gain(H1.complement_projector, H0.complement())
        holds = special_ratio >= beta - tol
    if violations:
        logger.warning(f"two-cones inclusion violated at {violations} of {samples} samples")
    return InclusionReport(
        threshold=threshold,
        samples=samples,
        violations=violations,
        min_ratio=min_ratio,
        witness=source,
        special_case_applicable=applicable,
        special_case_holds=holds,
        special_case_min_ratio=special_ratio,
    )


def _unit_rows(rng: np.random.Generator, frame: np.ndarray, size: int) -> np.ndarray:
    coefficients = rng.standard_normal((size, frame.shape[0]))
    coefficients /= np.linalg.norm(coefficients, axis=1, keepdims=True)
    return coefficients @ frame


def _sample_left_cone(
    H0: Subspace, complement: Subspace, c: float, size: int, rng: np.random.Generator
) -> np.ndarray:
    """Unit vectors x = s·u + √(1−s²)·w with u in H0^⊥, w in H0 and s uniform in [c, 1]."""
    s = rng.uniform(c, 1.0, size)[:, None]
    return s * _unit_rows(rng, complement.frame, size) + np.sqrt(1 - s**2) * _unit_rows(rng, H0.frame, size)


@dataclass
class ConePath:
    subspaces: List[Subspace]
    intersection_dims: List[int]
    stages: int
    min_ratio: float

    def to_dict(self) -> Dict:
        return {
            "length": len(self.subspaces),
            "intersection_dims": self.intersection_dims,
            "stages": self.stages,
            "min_ratio": self.min_ratio,
        }


def _intersection_dim(V: Subspace, H: Subspace, tol: float) -> int:
    return int(np.sum(restricted_singular_values(H.complement_projector, V) >= 1 - tol))


def cone_path(
    V: Subspace, H: Subspace, delta: float, steps_per_rotation: int = metadata.STEPS_PER_ROTATION, tol: float = 1e-9
) -> ConePath:
    """Discrete path in {V : every unit v in V has |Q_H(v)| >= δ} from V to H^⊥.

    Each stage takes the unit vector v1 of V maximizing |Q_H(v)| among those not yet in H^⊥ and rotates
    it in the plane span{v1, Q_H(v1)} onto H^⊥; the other right singular vectors stay fixed.
    """
    if V.ambient_dim != H.ambient_dim or V.dim + H.dim != H.ambient_dim:
        raise DimensionMismatch(f"{V} must have dimension n − m for {H}.")
    if not 0 < delta < 1:
        raise InvalidParameter(f"δ must lie in (0, 1), got {delta}.")
    ratio = min_gain(H.complement_projector, V)
    if ratio < delta - tol:
        raise NotInCone(f"min |Q_H(v)| over unit v in V is {ratio:.6g} < δ={delta}.")

    path, dims, ratios = [V], [_intersection_dim(V, H, tol)], [ratio]
    max_stages = V.dim
    frame = V.frame
    stages = 0
    while True:
        _, s, wt = np.linalg.svd(H.complement_projector @ frame.T, full_matrices=False)
        vectors = wt @ frame
        pending = np.flatnonzero(s < 1 - tol)
        if not len(pending):
            break
        if stages == max_stages:
            raise MaxStagesExceeded(stages + 1, dims)
        stages += 1
        top = pending[0]
        v1, s1 = vectors[top], float(s[top])
        h1 = H.reject(v1)
        u1 = h1 - s1**2 * v1
        u1 /= np.linalg.norm(u1)
        angle = math.acos(min(1.0, s1))
        for j in range(1, steps_per_rotation + 1):
            step = vectors.copy()
            phase = angle * j / steps_per_rotation
            step[top] = math.cos(phase) * v1 + math.sin(phase) * u1
            subspace = Subspace(step, tol=shared.TOL_GEOM)
            path.append(subspace)
            dims.append(_intersection_dim(subspace, H, tol))
            ratios.append(min_gain(H.complement_projector, subspace))
        frame = path[-1].frame
        logger.info(f"cone path stage {stages}: rotated by {angle:.4g} rad, dim(V ∩ H^⊥) = {dims[-1]}")
    return ConePath(subspaces=path, intersection_dims=dims, stages=stages, min_ratio=float(min(ratios)))


@dataclass
class SphereFlattening:
    t: float
    center: np.ndarray
    radius: float
    initial: np.ndarray
    points: np.ndarray
    ratio_monotone: bool
    min_ratio: float
    hypotheses: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {
            "t": self.t,
            "center": self.center,
            "radius": self.radius,
            "ratio_monotone": self.ratio_monotone,
            "min_ratio": self.min_ratio,
            "samples": len(self.points),
            **self.hypotheses,
        }


def _flatten(x: np.ndarray, r: float, y: np.ndarray, t: float, target_radius: Optional[float]) -> np.ndarray:
    """F(x + ry, t) = (1−t)x + y√(r² + |x|² − |(1−t)x|²), followed by a radial rescale when a target is set."""
    norm2 = r**2 + float(x @ x)
    if target_radius is None:
        return (1 - t) * x + y * math.sqrt(norm2 - (1 - t) ** 2 * float(x @ x))
    if t <= 0.5:
        return _flatten(x, r, y, 2 * t, None)
    s = 2 * t - 1
    return y * ((1 - s) * math.sqrt(norm2) + s * target_radius)


def sphere_flatten(
    x: np.ndarray,
    r: float,
    H: Subspace,
    t: float,
    samples: int = metadata.SPHERE_SAMPLES,
    rng: RngLike = None,
    cap: Optional[Tuple[float, float, float]] = None,
    target_radius: Optional[float] = None,
    grid: int = 17,
) -> SphereFlattening:
    """Images of sampled points of S = S(x, r) ∩ (x + H^⊥) under the flattening isotopy at time t.

    Without a target radius, t = 1 gives the sphere of radius √(r² + |x|²) centered at the origin. With one,
    the center moves during t in [0, ½] and the sphere is rescaled radially inside H^⊥ during t in [½, 1].
    `cap` = (δ, ρ1, ρ2) asks to verify that S lies in the conical cap C(δ, H, ρ1, ρ2) first.
    """
    x = np.asarray(x, dtype=float)
    if r <= 0 or not 0 <= t <= 1:
        raise InvalidParameter(f"Need r > 0 and t in [0, 1], got r={r}, t={t}.")
    if not H.contains(x):
        raise HypothesisViolated("x in H", "The sphere center must lie in H.")
    norm = math.sqrt(r**2 + float(x @ x))
    hypotheses = {"initial_ratio": r / norm, "initial_norm": norm}
    if cap is not None:
        delta, rho1, rho2 = cap
        if r / norm < delta or not rho1 < norm < rho2:
            raise HypothesisViolated(
                "sphere in conical cap", f"ratio {r / norm:.6g} vs δ={delta}, |z|={norm:.6g} vs ({rho1}, {rho2})."
            )
        if target_radius is not None and not rho1 < target_radius < rho2:
            raise HypothesisViolated("target radius inside the shell", f"ρ={target_radius} not in ({rho1}, {rho2}).")
    directions = _unit_rows(as_generator(rng), H.complement().frame, samples)

    times = np.linspace(0.0, t, grid)
    previous = np.full(samples, -np.inf)
    monotone = True
    for time in times:
        images = np.array([_flatten(x, r, y, float(time), target_radius) for y in directions])
        ratios = cone_ratio(H, images)
        monotone = monotone and bool(np.all(ratios >= previous - shared.TOL_LINALG))
        previous = ratios
    initial = x + r * directions
    center = (1 - min(1.0, 2 * t if target_radius is not None else t)) * x
    radius = float(np.mean(np.linalg.norm(images - center, axis=1)))
    return SphereFlattening(
        t=t,
        center=center,
        radius=radius,
        initial=initial,
        points=images,
        ratio_monotone=monotone,
        min_ratio=float(previous.min()),
        hypotheses=hypotheses,
    )
