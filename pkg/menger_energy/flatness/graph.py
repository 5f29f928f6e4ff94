"""Graph patches: Σ near x as the graph of F_x : T_x → T_x^⊥, with derivative estimates DF_x."""
from dataclasses import dataclass
import itertools
import logging
from typing import Callable, Dict, List, Optional

import numpy as np

from menger_energy.errors import AngleTooLarge, InvalidParameter, MultiSheet
from menger_energy.flatness.beta import BetaSolver
from menger_energy.flatness.tangent import jet_plane, local_jet, radius_schedule, tangent_plane
from menger_energy.grassmann import grass_distance, inverse_projection, Subspace
import menger_energy.metadata.flatness as metadata
import menger_energy.metadata.shared as shared

logger = logging.getLogger(__name__)


def lattice_nodes(m: int, radius: float, resolution: float) -> np.ndarray:
    """Nodes of the lattice resolution·Z^m inside the closed m-disk of the given radius, origin first.

    >>> lattice_nodes(1, 1.0, 0.5).ravel().tolist()
    [0.0, -0.5, 0.5, -1.0, 1.0]
    """
    steps = int(np.floor(radius / resolution + 1e-9))
    axis = resolution * np.arange(-steps, steps + 1)
    grid = np.stack(np.meshgrid(*([axis] * m), indexing="ij"), axis=-1).reshape(-1, m)
    norms = np.linalg.norm(grid, axis=1)
    keep = norms <= radius + 1e-12
    order = np.argsort(norms[keep], kind="stable")
    return grid[keep][order]


@dataclass
class GraphPatch:
    """F_x sampled on a lattice of T_x; values and derivatives are in the coordinates of the frames
    of T_x (domain) and T_x^⊥ (values)."""

    base_point: np.ndarray
    tangent: Subspace
    normal: Subspace
    nodes: np.ndarray
    domain: np.ndarray
    values: np.ndarray
    derivatives: np.ndarray
    local_tangent_distance: np.ndarray
    representatives: np.ndarray
    empty_fraction: float
    resolution: float
    radius: float
    local_tangents: Optional[List[Optional[Subspace]]] = None

    @classmethod
    def from_function(
        cls,
        F: Callable[[np.ndarray], np.ndarray],
        DF: Callable[[np.ndarray], np.ndarray],
        m: int,
        n: int,
        radius: float,
        resolution: float,
    ) -> "GraphPatch":
        """Patch of an analytic graph over span{e_1..e_m} at the origin.

        F maps (K, m) arrays to (K, n-m) and DF to (K, n-m, m).
        """
        if not m < n:
            raise InvalidParameter(f"A graph needs m < n, got m={m}, n={n}.")
        nodes = lattice_nodes(m, 0.5 * radius, resolution)
        values = np.asarray(F(nodes), dtype=float).reshape(len(nodes), n - m)
        derivatives = np.asarray(DF(nodes), dtype=float).reshape(len(nodes), n - m, m)
        return cls(
            base_point=np.zeros(n),
            tangent=Subspace.coordinate(n, range(m)),
            normal=Subspace.coordinate(n, range(m, n)),
            nodes=nodes,
            domain=nodes.copy(),
            values=values,
            derivatives=derivatives,
            local_tangent_distance=np.zeros(len(nodes)),
            representatives=np.full(len(nodes), -1),
            empty_fraction=0.0,
            resolution=resolution,
            radius=radius,
        )

    @property
    def valid(self) -> np.ndarray:
        """Nodes with a representative and a derivative estimate."""
        return np.all(np.isfinite(self.derivatives.reshape(len(self.nodes), -1)), axis=1)

    def rows(self) -> List[List[float]]:
        norms = np.linalg.norm(self.values, axis=1)
        derivative_norms = np.linalg.norm(self.derivatives, ord=2, axis=(1, 2))
        return [
            [*self.nodes[k], *self.domain[k], norms[k], derivative_norms[k], int(self.representatives[k])]
            for k in range(len(self.nodes))
        ]

    def header(self) -> List[str]:
        m = self.tangent.dim
        return [f"w{i}" for i in range(m)] + [f"u{i}" for i in range(m)] + ["F_norm", "DF_norm", "index"]

    def to_dict(self) -> Dict:
        valid = self.valid
        return {
            "base_point": self.base_point,
            "tangent": self.tangent,
            "nodes": len(self.nodes),
            "resolved_nodes": int(np.sum(valid)),
            "empty_fraction": self.empty_fraction,
            "resolution": self.resolution,
            "radius": self.radius,
            "F_origin": self.values[0],
            "DF_origin": self.derivatives[0],
            "max_F_norm": float(np.max(np.linalg.norm(self.values[valid], axis=1))) if valid.any() else 0.0,
        }


def graph_extract(
    cloud,
    x: np.ndarray,
    R: float,
    resolution: float,
    tangent: Optional[Subspace] = None,
    tangent_radius: Optional[float] = None,
    lip_slack: float = metadata.LIP_SLACK,
    solver: Optional[BetaSolver] = None,
) -> GraphPatch:
    """Sample F_x on the lattice of T_x ∩ closed B(R/2) with spacing `resolution`.

    The fiber of node w is the set of points of Σ ∩ closed B(x, R) whose tangential coordinate lies within
    `resolution` of w; its representative is the point closest to w, and F_x(w) = Q_x(y − x). A fiber wider
    than MULTISHEET_FACTOR·lip_slack·resolution means a second sheet entered the cylinder, and MultiSheet
    is raised. DF_x at a node is Q_x composed with the inverse of π_x restricted to the local tangent plane
    at the representative, estimated by a quadratic jet fit within `tangent_radius` (R/4 by default).
    The origin node is represented by x itself, so F_x(0) = 0 and DF_x(0) = 0 exactly.
    """
    x = np.asarray(x, dtype=float)
    if not 0 < resolution < R:
        raise InvalidParameter(f"Need 0 < resolution < R, got resolution={resolution}, R={R}.")
    m, n = cloud.m, cloud.n
    if not m < n:
        raise InvalidParameter(f"A graph patch needs m < n, got m={m}, n={n}.")
    if tangent is None:
        tangent = tangent_plane(cloud, x, radius_schedule(0.5 * R), solver).tangent
    normal = tangent.complement()
    tangent_radius = 0.25 * R if tangent_radius is None else tangent_radius
    threshold = metadata.MULTISHEET_FACTOR * lip_slack * resolution

    candidates = cloud.ball(x, R, "closed")
    offsets = cloud.points[candidates] - x
    coordinates = offsets @ tangent.frame.T
    nodes = lattice_nodes(m, 0.5 * R, resolution)

    count = len(nodes)
    domain = np.full((count, m), np.nan)
    values = np.full((count, n - m), np.nan)
    derivatives = np.full((count, n - m, m), np.nan)
    local_distance = np.full(count, np.nan)
    representatives = np.full(count, -1)
    local_tangents: List[Optional[Subspace]] = [None] * count
    empty = 0
    for k, w in enumerate(nodes):
        in_fiber = np.linalg.norm(coordinates - w, axis=1) <= resolution
        fiber = offsets[in_fiber]
        if len(fiber) > 1:
            spread = float(np.max(np.linalg.norm(fiber[:, None, :] - fiber[None, :, :], axis=2)))
            if spread > threshold:
                raise MultiSheet(node=w.tolist(), spread=spread, threshold=threshold)
        if k == 0:
            domain[0], values[0], derivatives[0], local_distance[0] = 0.0, 0.0, 0.0, 0.0
            local_tangents[0] = tangent
            continue
        if not len(fiber):
            empty += 1
            continue
        choice = int(np.argmin(np.linalg.norm(coordinates[in_fiber] - w, axis=1)))
        y_offset = fiber[choice]
        representatives[k] = int(candidates[np.flatnonzero(in_fiber)[choice]])
        domain[k] = y_offset @ tangent.frame.T
        values[k] = y_offset @ normal.frame.T
        gradient = local_jet(cloud, x + y_offset, tangent_radius, tangent, normal, center=x)
        if gradient is None:
            continue
        local = jet_plane(gradient, tangent, normal)
        local_tangents[k] = local
        local_distance[k] = grass_distance(tangent, local)
        try:
            preimages = np.array([inverse_projection(tangent, local, e) for e in tangent.frame])
        except AngleTooLarge:
            logger.warning("Local tangent at node %s is nearly orthogonal to T_x; DF left undefined", w.tolist())
            continue
        derivatives[k] = (preimages @ normal.frame.T).T
    empty_fraction = empty / max(1, count - 1)
    logger.info("Graph patch: %d nodes, %.1f%% empty fibers", count, 100 * empty_fraction)
    return GraphPatch(
        base_point=x,
        tangent=tangent,
        normal=normal,
        nodes=nodes,
        domain=domain,
        values=values,
        derivatives=derivatives,
        local_tangent_distance=local_distance,
        representatives=representatives,
        empty_fraction=empty_fraction,
        resolution=resolution,
        radius=R,
        local_tangents=local_tangents,
    )


@dataclass
class DerivativeAngleCheck:
    pairs: int
    violations: int
    worst_excess: float

    def to_dict(self) -> Dict:
        return {"pairs": self.pairs, "violations": self.violations, "worst_excess": self.worst_excess}


def check_derivative_angles(
    patch: GraphPatch, reliable: float = metadata.RELIABLE_TANGENT_DIST, tol: float = shared.TOL_GEOM
) -> DerivativeAngleCheck:
    """‖DF(w_1) − DF(w_0)‖ <= 4 dgras(T̂_y0, T̂_y1) over node pairs whose local planes are within `reliable` of T_x."""
    if patch.local_tangents is None:
        raise InvalidParameter("The patch carries no local tangent planes.")
    usable = [
        k
        for k, plane in enumerate(patch.local_tangents)
        if plane is not None and patch.valid[k] and patch.local_tangent_distance[k] <= reliable
    ]
    pairs, violations, worst = 0, 0, -np.inf
    for i, j in itertools.combinations(usable, 2):
        gap = float(np.linalg.norm(patch.derivatives[i] - patch.derivatives[j], ord=2))
        bound = 4.0 * grass_distance(patch.local_tangents[i], patch.local_tangents[j])
        pairs += 1
        worst = max(worst, gap - bound)
        violations += int(gap > bound + tol)
    return DerivativeAngleCheck(pairs=pairs, violations=violations, worst_excess=float(worst) if pairs else 0.0)
