"""Weighted point clouds, spatial queries, sum-form Hausdorff distance and Ahlfors-regularity scans."""
from dataclasses import dataclass, field
import logging
import math
from pathlib import Path
import re
from typing import Any, Dict, List, Optional, Sequence, Union

from boltons.cacheutils import cachedproperty
import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist
import smart_open

from menger_energy.errors import EmptySet, HeaderMismatch, InvalidParameter, ParseError, TooFewPoints
import menger_energy.metadata.pointcloud as metadata
import menger_energy.metadata.shared as shared
from menger_energy.simplex import omega
from menger_energy.util import as_generator, format_float

logger = logging.getLogger(__name__)

HEADER_PATTERN = re.compile(rf"^{metadata.HEADER_PREFIX}\s+m=(\d+)\s+n=(\d+)\s*$")


class SpatialIndex:
    """Read-only k-d tree over the cloud points; safe to share between threads."""

    def __init__(self, points: np.ndarray) -> None:
        self.points = points
        self.tree = cKDTree(points, balanced_tree=True)

    def ball(self, x: np.ndarray, r: float, closure: str = "closed", tol: float = shared.TOL_GEOM) -> np.ndarray:
        """Sorted indices of points with |p − x| < r (open) or <= r + tol (closed)."""
        if r < 0:
            raise InvalidParameter(f"Radius must be nonnegative, got {r}.")
        x = np.asarray(x, dtype=float)
        if closure == "closed":
            return np.array(sorted(self.tree.query_ball_point(x, r + tol)), dtype=int)
        if closure == "open":
            candidates = np.array(sorted(self.tree.query_ball_point(x, r)), dtype=int)
            if not len(candidates):
                return candidates
            return candidates[np.linalg.norm(self.points[candidates] - x, axis=1) < r]
        raise InvalidParameter(f"Unknown ball closure {closure!r}.")

    def nearest(self, x: np.ndarray, k: int = 1):
        return self.tree.query(np.asarray(x, dtype=float), k=k)


class PointCloud:
    """Weighted sample of an m-dimensional set in R^n; weight_i is the H^m mass carried by point i."""

    def __init__(
        self,
        points: np.ndarray,
        weights: np.ndarray,
        m: int,
        provenance: Optional[Dict[str, Any]] = None,
        tol: float = shared.TOL_GEOM,
    ) -> None:
        points = np.array(points, dtype=float, ndmin=2)
        weights = np.array(weights, dtype=float).reshape(-1)
        if len(points) != len(weights):
            raise InvalidParameter(f"{len(points)} points but {len(weights)} weights.")
        if not np.all(np.isfinite(points)) or not np.all(np.isfinite(weights)):
            raise InvalidParameter("Coordinates and weights must be finite.")
        if np.any(weights <= 0):
            raise InvalidParameter("Weights must be positive.")
        if not 1 <= m <= points.shape[1]:
            raise InvalidParameter(f"Intrinsic dimension m={m} must lie in [1, {points.shape[1]}].")
        if not tol >= 0:
            raise InvalidParameter(f"Geometric tolerance must be nonnegative, got {tol}.")
        points.setflags(write=False)
        weights.setflags(write=False)
        self.points = points
        self.weights = weights
        self.m = int(m)
        self.provenance = dict(provenance or {})
        # slack added to closed-ball radii
        self.tol = float(tol)

    @property
    def n(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return len(self.points)

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    @cachedproperty
    def index(self) -> SpatialIndex:
        return SpatialIndex(self.points)

    @cachedproperty
    def diameter(self) -> float:
        return diameter(self.points)

    def scaled(self, s: float) -> "PointCloud":
        """The cloud sΣ, with weights scaled by s^m."""
        provenance = {**self.provenance, "scale": s * self.provenance.get("scale", 1.0)}
        return PointCloud(s * self.points, s**self.m * self.weights, self.m, provenance, self.tol)

    def restrict(self, indices: Sequence[int]) -> "PointCloud":
        indices = np.asarray(indices, dtype=int)
        return PointCloud(self.points[indices], self.weights[indices], self.m, self.provenance, self.tol)

    def ball(self, x: np.ndarray, r: float, closure: str = "closed") -> np.ndarray:
        return ball_query(self, x, r, closure)

    def measure_in_ball(self, x: np.ndarray, r: float, closure: str = "open") -> float:
        return float(np.sum(self.weights[self.ball(x, r, closure)]))

    def to_dict(self) -> Dict:
        return {"N": len(self), "m": self.m, "n": self.n, "total_mass": self.total_mass, "provenance": self.provenance}

    def __repr__(self) -> str:
        return f"PointCloud(N={len(self)}, m={self.m}, n={self.n})"


def diameter(points: np.ndarray, sweeps: int = 4) -> float:
    """Exact diameter for small sets; farthest-point sweep estimate (a lower bound) for large ones."""
    if len(points) < 2:
        return 0.0
    if len(points) <= metadata.EXACT_DIAMETER_LIMIT:
        return float(np.max(pdist(points)))
    best, current = 0.0, 0
    for _ in range(sweeps):
        distances = np.linalg.norm(points - points[current], axis=1)
        farthest = int(np.argmax(distances))
        if distances[farthest] <= best:
            break
        best, current = float(distances[farthest]), farthest
    return best


def load_cloud(path: Union[str, Path], format: str = "csv", tol: float = shared.TOL_GEOM) -> PointCloud:
    """Read a cloud written as `#menger m=<m> n=<n>` followed by rows of n coordinates and one weight."""
    if format != "csv":
        raise InvalidParameter(f"Unsupported cloud format {format!r}.")
    with smart_open.open(str(path), "r") as f:
        lines = f.read().splitlines()
    if not lines:
        raise HeaderMismatch(f"{path} is empty; expected a '{metadata.HEADER_PREFIX} m=<m> n=<n>' header.")
    match = HEADER_PATTERN.match(lines[0].strip())
    if match is None:
        raise HeaderMismatch(f"Bad header {lines[0]!r}; expected '{metadata.HEADER_PREFIX} m=<m> n=<n>'.")
    m, n = int(match.group(1)), int(match.group(2))
    if not 1 <= m <= n:
        raise HeaderMismatch(f"Header declares m={m}, n={n}; need 1 <= m <= n.")

    rows: List[List[float]] = []
    for number, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.startswith("#"):
            continue
        cells = line.split(",")
        if len(cells) != n + 1:
            raise ParseError(f"{len(cells)} columns, header declares n={n} coordinates plus a weight", line=number)
        try:
            row = [float(cell) for cell in cells]
        except ValueError as exception:
            raise ParseError(str(exception), line=number) from exception
        if not all(math.isfinite(value) for value in row):
            raise ParseError("non-finite entry", line=number)
        if row[-1] <= 0:
            raise ParseError(f"weight {row[-1]} is not positive", line=number)
        rows.append(row)
    if not rows:
        raise ParseError("no points", line=len(lines))
    data = np.array(rows)
    return PointCloud(data[:, :n], data[:, n], m, {"source": str(path)}, tol)


def save_cloud(cloud: PointCloud, path: Union[str, Path]) -> None:
    lines = [f"{metadata.HEADER_PREFIX} m={cloud.m} n={cloud.n}"]
    for point, weight in zip(cloud.points, cloud.weights):
        lines.append(",".join(format_float(value) for value in (*point, weight)))
    if isinstance(path, Path):
        path.parent.mkdir(parents=True, exist_ok=True)
    with smart_open.open(str(path), "w") as f:
        f.write("\n".join(lines) + "\n")


def ball_query(
    cloud: PointCloud, x: np.ndarray, r: float, closure: str = "closed", tol: Optional[float] = None
) -> np.ndarray:
    """Indices of the cloud points in the open or closed ball B(x, r); the closed ball uses `cloud.tol` by default."""
    return cloud.index.ball(x, r, closure, cloud.tol if tol is None else tol)


def hausdorff_distance(A: np.ndarray, B: np.ndarray) -> float:
    """sup_{a in A} dist(a, B) + sup_{b in B} dist(b, A): the two one-sided deviations are added.

    >>> hausdorff_distance(np.array([[0.0]]), np.array([[1.0]]))
    2.0
    """
    A, B = np.atleast_2d(np.asarray(A, dtype=float)), np.atleast_2d(np.asarray(B, dtype=float))
    if A.size == 0 or B.size == 0:
        raise EmptySet("Hausdorff distance needs two nonempty sets.")
    a_to_b, _ = cKDTree(B).query(A)
    b_to_a, _ = cKDTree(A).query(B)
    return float(np.max(a_to_b) + np.max(b_to_a))


def knn_weights(points: np.ndarray, m: int, k: int = metadata.KNN_NEIGHBORS) -> np.ndarray:
    """Density-based H^m weights ω_m r_k^m / k, with r_k the distance to the k-th neighbor."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if k < m + 1 or k >= len(points):
        raise TooFewPoints(f"Need m+1 <= k < N, got k={k}, m={m}, N={len(points)}.")
    distances, _ = cKDTree(points).query(points, k=k + 1)
    return omega(m) * distances[:, k] ** m / k


@dataclass
class AhlforsScan:
    radii: np.ndarray
    min_ratio: np.ndarray
    worst_point: np.ndarray
    centers: np.ndarray = field(repr=False)

    def rows(self) -> List[List[float]]:
        return [[r, ratio, int(worst)] for r, ratio, worst in zip(self.radii, self.min_ratio, self.worst_point)]

    def to_dict(self) -> Dict:
        return {"radii": self.radii, "min_ratio": self.min_ratio, "worst_point": self.worst_point}


def ahlfors_scan(
    cloud: PointCloud, radii: Sequence[float], sample_centers: int = metadata.AHLFORS_CENTERS, seed: int = shared.SEED
) -> AhlforsScan:
    """Empirical lower Ahlfors constants min_x H^m(Σ ∩ B(x, r))/r^m over sampled cloud points."""
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= 0):
        raise InvalidParameter("Radii must be positive.")
    rng = as_generator(seed)
    count = min(len(cloud), sample_centers)
    centers = np.sort(rng.choice(len(cloud), size=count, replace=False))
    min_ratio = np.empty(len(radii))
    worst = np.empty(len(radii), dtype=int)
    for j, r in enumerate(radii):
        neighborhoods = cloud.index.tree.query_ball_point(cloud.points[centers], r)
        masses = np.array([_open_ball_mass(cloud, c, hood, r) for c, hood in zip(centers, neighborhoods)])
        ratios = masses / r**cloud.m
        min_ratio[j] = float(ratios.min())
        worst[j] = int(centers[int(np.argmin(ratios))])
    return AhlforsScan(radii=radii, min_ratio=min_ratio, worst_point=worst, centers=centers)


def _open_ball_mass(cloud: PointCloud, center: int, hood: List[int], r: float) -> float:
    hood = np.asarray(hood, dtype=int)
    inside = np.linalg.norm(cloud.points[hood] - cloud.points[center], axis=1) < r
    return float(np.sum(cloud.weights[hood][inside]))
