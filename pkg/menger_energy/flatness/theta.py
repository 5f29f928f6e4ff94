"""θ numbers: how well a flat disk through x matches the cloud inside a ball, in the sum-form Hausdorff distance."""
import argparse
from dataclasses import dataclass
from functools import lru_cache
import logging
import math
from typing import Dict, Optional

import numpy as np
from scipy.optimize import minimize
from scipy.spatial import cKDTree

from menger_energy.errors import EmptyBall
from menger_energy.flatness.beta import chart_subspace, pca_plane
from menger_energy.grassmann import Subspace
import menger_energy.metadata.flatness as metadata
from menger_energy.simplex import omega

logger = logging.getLogger(__name__)

# edge of the starting Nelder-Mead simplex in chart coordinates
SIMPLEX_STEP = 0.05


def grid_size(m: int, grid: int, max_nodes: int = metadata.THETA_MAX_NODES) -> int:
    """Per-axis node count, lowered from `grid` until the disk holds about max_nodes nodes or fewer."""
    while grid > 2 and omega(m) * ((grid - 1) / 2) ** m > max_nodes:
        grid -= 1
    return grid


@lru_cache(maxsize=32)
def unit_disk_nodes(m: int, grid: int, max_nodes: int = metadata.THETA_MAX_NODES, closed: bool = True) -> np.ndarray:
    """Nodes of the per-axis lattice on [-1, 1]^m lying in the closed (or open) unit m-disk.

    >>> unit_disk_nodes(1, 5).ravel().tolist()
    [-1.0, -0.5, 0.0, 0.5, 1.0]
    """
    grid = grid_size(m, grid, max_nodes)
    axes = np.linspace(-1.0, 1.0, grid)
    lattice = np.stack(np.meshgrid(*([axes] * m), indexing="ij"), axis=-1).reshape(-1, m)
    norms = np.linalg.norm(lattice, axis=1)
    keep = norms <= 1.0 + 1e-12 if closed else norms < 1.0
    nodes = lattice[keep]
    if len(nodes) > max_nodes:
        nodes = nodes[np.argsort(norms[keep], kind="stable")[:max_nodes]]
    nodes.setflags(write=False)
    return nodes


def disk_distance(tree: cKDTree, points: np.ndarray, nodes: np.ndarray) -> float:
    """Sum-form Hausdorff distance between the points (indexed by `tree`) and the disk nodes."""
    to_disk, _ = cKDTree(nodes).query(points)
    to_cloud, _ = tree.query(nodes)
    return float(np.max(to_disk) + np.max(to_cloud))


@dataclass
class ThetaFit:
    plane: Subspace
    value: float
    evaluations: int
    disk_nodes: int
    disk_spacing: float

    def to_dict(self) -> Dict:
        return {
            "plane": self.plane,
            "value": self.value,
            "evaluations": self.evaluations,
            "disk_nodes": self.disk_nodes,
            "disk_spacing": self.disk_spacing,
        }


class ThetaSolver:
    """Disk-matching plane search started from a given plane and refined with Nelder-Mead on a chart."""

    def __init__(self, args: argparse.Namespace = None) -> None:
        self.args = vars(args) if args is not None else {}
        self.disk_grid = self.args.get("disk_grid", metadata.THETA_DISK_GRID)
        self.max_nodes = self.args.get("theta_max_nodes", metadata.THETA_MAX_NODES)
        self.max_iters = self.args.get("theta_max_iters", metadata.THETA_MAX_ITERS)

    @staticmethod
    def add_to_argparse(parser):
        parser.add_argument(
            "--disk_grid",
            type=int,
            default=metadata.THETA_DISK_GRID,
            help=f"Disk nodes per axis. Default is {metadata.THETA_DISK_GRID}.",
        )
        parser.add_argument(
            "--theta_max_iters",
            type=int,
            default=metadata.THETA_MAX_ITERS,
            help=f"Nelder-Mead iterations. Default is {metadata.THETA_MAX_ITERS}.",
        )
        return parser

    def nodes(self, m: int, closed: bool = True) -> np.ndarray:
        return unit_disk_nodes(m, self.disk_grid, self.max_nodes, closed)

    def evaluate(self, offsets: np.ndarray, tree: cKDTree, H: Subspace, r: float, closed: bool = True) -> float:
        """d_H(cloud ∩ B, (x + H) ∩ B) for the offsets z − x, not yet divided by r."""
        return disk_distance(tree, offsets, r * self.nodes(H.dim, closed) @ H.frame)

    def fit(self, offsets: np.ndarray, r: float, start: Subspace, closed: bool = True) -> ThetaFit:
        """Best disk plane for the offsets z − x; `closed=False` matches against the open disk."""
        offsets = np.atleast_2d(np.asarray(offsets, dtype=float))
        n, m = offsets.shape[1], start.dim
        tree = cKDTree(offsets)
        nodes = self.nodes(m, closed)
        spacing = 2.0 / (grid_size(m, self.disk_grid, self.max_nodes) - 1)
        best_plane, best_value = start, self.evaluate(offsets, tree, start, r, closed)
        evaluations = 1
        if 0 < m < n and self.max_iters > 0:
            E, F = start.frame, start.complement().frame

            def objective(a: np.ndarray) -> float:
                return self.evaluate(offsets, tree, chart_subspace(a.reshape(n - m, m), E, F), r, closed)

            dim = m * (n - m)
            simplex = np.vstack([np.zeros(dim), SIMPLEX_STEP * np.eye(dim)])
            result = minimize(
                objective,
                np.zeros(dim),
                method="Nelder-Mead",
                options={"maxiter": self.max_iters, "initial_simplex": simplex, "xatol": 1e-5, "fatol": 1e-9},
            )
            evaluations += int(result.nfev)
            if result.fun < best_value:
                best_plane = chart_subspace(result.x.reshape(n - m, m), E, F)
                best_value = self.evaluate(offsets, tree, best_plane, r, closed)
        return ThetaFit(
            plane=best_plane, value=best_value, evaluations=evaluations, disk_nodes=len(nodes), disk_spacing=spacing
        )


@dataclass
class ThetaResult:
    theta_bar: float
    theta_open: float
    fit: ThetaFit
    point_count: int
    open_fit: Optional[ThetaFit] = None


def theta_number(
    cloud, x: np.ndarray, r: float, start: Optional[Subspace] = None, solver: Optional[ThetaSolver] = None
) -> ThetaResult:
    """θ̄(x, r) over the closed ball and the open variant θ(x, r), both evaluated on the disk grid."""
    solver = solver or ThetaSolver()
    x = np.asarray(x, dtype=float)
    if not r > 0:
        raise EmptyBall(f"Radius must be positive, got {r}.")
    closed = cloud.ball(x, r, "closed")
    if not len(closed):
        raise EmptyBall(f"No cloud point in the closed ball of radius {r} around {x.tolist()}.")
    offsets = cloud.points[closed] - x
    if start is None:
        start = pca_plane(offsets, cloud.m, cloud.weights[closed])
    fit = solver.fit(offsets, r, start)

    inside = np.linalg.norm(offsets, axis=1) < r
    theta_open, open_fit = math.nan, None
    if np.any(inside):
        # seeded with the better of the closed optimum and the open PCA plane, so θ stays at most its value there
        open_offsets = offsets[inside]
        tree = cKDTree(open_offsets)
        pca = pca_plane(open_offsets, cloud.m, cloud.weights[closed][inside])
        seed = min((fit.plane, pca), key=lambda H: solver.evaluate(open_offsets, tree, H, r, closed=False))
        open_fit = solver.fit(open_offsets, r, seed, closed=False)
        theta_open = open_fit.value / r
    return ThetaResult(
        theta_bar=fit.value / r, theta_open=theta_open, fit=fit, point_count=len(closed), open_fit=open_fit
    )
