"""β numbers: the minimax m-plane through a point.

β̄(x, r) = (1/r) inf_H max{|Q_H(z − x)| : z in Σ ∩ closed B(x, r)}. The infimum has no closed form, so
the plane is found by descent on a chart of the Grassmannian around the PCA plane: H(A) is spanned by
e_i + Σ_j A_ji f_j, where (e_i) is the PCA frame and (f_j) a frame of its complement. The max-distance
objective is nonsmooth; torch autograd supplies a subgradient through the active point.
"""
import argparse
from dataclasses import dataclass
import logging
import math
from typing import Dict, Optional, Tuple

import numpy as np
import torch

from menger_energy.errors import EmptyBall
from menger_energy.grassmann import Subspace
import menger_energy.metadata.flatness as metadata
import menger_energy.metadata.shared as shared
from menger_energy.util import as_generator, RngLike

logger = logging.getLogger(__name__)

# the step size decays geometrically to LR_FLOOR times its initial value over max_iters steps
LR_FLOOR = 1e-3


def pca_plane(offsets: np.ndarray, m: int, weights: Optional[np.ndarray] = None) -> Subspace:
    """Top-m eigenvectors of the weighted second moment Σ w (z − x)(z − x)ᵀ, a plane through x."""
    offsets = np.atleast_2d(offsets)
    weights = np.ones(len(offsets)) if weights is None else np.asarray(weights, dtype=float)
    moment = (offsets * weights[:, None]).T @ offsets
    _, vectors = np.linalg.eigh(moment)
    return Subspace(vectors[:, ::-1][:, :m].T.copy())


def max_distance(offsets: np.ndarray, H: Subspace) -> float:
    """max |Q_H(z − x)| over the given offsets z − x."""
    if not len(offsets):
        return 0.0
    residual = offsets - (offsets @ H.frame.T) @ H.frame
    return float(np.max(np.linalg.norm(residual, axis=1)))


def half_sphere_lattice(size: int) -> np.ndarray:
    """Fibonacci lattice of `size` unit vectors in R^3 with positive last coordinate, equally spaced in height.

    >>> half_sphere_lattice(3)[:, 2].round(4).tolist()
    [0.1667, 0.5, 0.8333]
    """
    z = (np.arange(size) + 0.5) / size
    phi = math.pi * (3 - math.sqrt(5)) * np.arange(size)
    rho = np.sqrt(1 - z**2)
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def plane_net(n: int, m: int, size: int, rng: RngLike = None) -> Tuple[np.ndarray, str]:
    """Frames of m-planes spread over G(n, m), shaped (size, m, n), and how the net was built.

    Lines in R^2 and lines or planes in R^3 come from a fixed grid ("grid"): equally spaced angles, or the
    half-sphere lattice read as directions or as plane normals. Larger ambient spaces get random frames
    ("sampled").
    """
    if n == 2 and m == 1:
        angles = np.linspace(0.0, np.pi, size, endpoint=False)
        return np.stack([np.cos(angles), np.sin(angles)], axis=1)[:, None, :], "grid"
    if n == 3 and m in (1, 2):
        directions = half_sphere_lattice(size)
        if m == 1:
            return directions[:, None, :], "grid"
        helper = np.where(np.abs(directions[:, :1]) < 0.9, [[1.0, 0.0, 0.0]], [[0.0, 1.0, 0.0]])
        first = np.cross(directions, helper)
        first /= np.linalg.norm(first, axis=1, keepdims=True)
        return np.stack([first, np.cross(directions, first)], axis=1), "grid"
    rng = as_generator(rng)
    return np.stack([Subspace.random(n, m, rng).frame for _ in range(size)]), "sampled"


def _chart_frame(A: torch.Tensor, E: torch.Tensor, F: torch.Tensor) -> torch.Tensor:
    q, _ = torch.linalg.qr((E + A.T @ F).T)
    return q


def chart_subspace(A: np.ndarray, E: np.ndarray, F: np.ndarray) -> Subspace:
    q, _ = np.linalg.qr((E + A.T @ F).T)
    return Subspace(q.T.copy())


@dataclass
class BetaFit:
    plane: Subspace
    value: float
    restarts: int
    iterations: int
    pca_value: float
    certified_gap: Optional[float] = None
    # "grid" or "sampled", the kind of plane net behind certified_gap
    certificate: Optional[str] = None

    def to_dict(self) -> Dict:
        return {
            "plane": self.plane,
            "value": self.value,
            "restarts": self.restarts,
            "iterations": self.iterations,
            "pca_value": self.pca_value,
            "certified_gap": self.certified_gap,
            "certificate": self.certificate,
        }


class BetaSolver:
    """Minimax plane fit: PCA start plus multi-restart subgradient descent, with optional net certification."""

    def __init__(self, args: argparse.Namespace = None) -> None:
        self.args = vars(args) if args is not None else {}
        self.restarts = self.args.get("beta_restarts", metadata.BETA_RESTARTS)
        self.max_iters = self.args.get("beta_max_iters", metadata.BETA_MAX_ITERS)
        self.lr = self.args.get("beta_lr", metadata.BETA_LR)
        self.perturbation = self.args.get("beta_perturbation", metadata.BETA_PERTURBATION)
        self.certify = self.args.get("certify", False)
        self.net_size = self.args.get("certify_net_size", metadata.CERTIFY_NET_SIZE)
        self.seed = self.args.get("seed", shared.SEED)

    @staticmethod
    def add_to_argparse(parser):
        parser.add_argument(
            "--beta_restarts",
            type=int,
            default=metadata.BETA_RESTARTS,
            help=f"Descent runs, the first from the PCA plane. Default is {metadata.BETA_RESTARTS}.",
        )
        parser.add_argument(
            "--beta_max_iters",
            type=int,
            default=metadata.BETA_MAX_ITERS,
            help=f"Descent steps per run. Default is {metadata.BETA_MAX_ITERS}.",
        )
        parser.add_argument(
            "--beta_lr", type=float, default=metadata.BETA_LR, help=f"Initial step size. Default is {metadata.BETA_LR}."
        )
        parser.add_argument(
            "--certify",
            action="store_true",
            default=False,
            help=(
                f"Compare against a plane net when n <= {metadata.CERTIFY_MAX_N} and m <= {metadata.CERTIFY_MAX_M}: "
                "a fixed grid up to n = 3, random frames above."
            ),
        )
        return parser

    def fit(
        self, offsets: np.ndarray, m: int, weights: Optional[np.ndarray] = None, start: Optional[Subspace] = None
    ) -> BetaFit:
        """Minimax m-plane for the offsets z − x; the returned value is the max distance, not yet divided by r.

        Descent starts from the PCA plane, or from `start` when that plane already fits better.
        """
        offsets = np.atleast_2d(np.asarray(offsets, dtype=float))
        n = offsets.shape[1]
        pca = pca_plane(offsets, m, weights)
        pca_value = max_distance(offsets, pca)
        start_value = pca_value if start is None else max_distance(offsets, start)
        if start is None or start_value >= pca_value:
            start, start_value = pca, pca_value
        if m == n or start_value == 0.0:
            return BetaFit(plane=start, value=start_value, restarts=0, iterations=0, pca_value=pca_value)

        E, F = start.frame, start.complement().frame
        rng = as_generator(self.seed)
        best_A, best_value, iterations = np.zeros((n - m, m)), start_value, 0
        for restart in range(self.restarts):
            A0 = np.zeros((n - m, m)) if restart == 0 else self.perturbation * rng.standard_normal((n - m, m))
            A, value, steps = self._descend(offsets, E, F, A0)
            iterations += steps
            if value < best_value:
                best_A, best_value = A, value
        plane = chart_subspace(best_A, E, F)
        best_value = max_distance(offsets, plane)
        fit = BetaFit(plane=plane, value=best_value, restarts=self.restarts, iterations=iterations, pca_value=pca_value)
        if self.certify and n <= metadata.CERTIFY_MAX_N and m <= metadata.CERTIFY_MAX_M:
            self._certify(offsets, fit, rng)
        return fit

    def _descend(self, offsets: np.ndarray, E: np.ndarray, F: np.ndarray, A0: np.ndarray):
        points = torch.as_tensor(offsets, dtype=torch.float64)
        E_t = torch.as_tensor(E, dtype=torch.float64)
        F_t = torch.as_tensor(F, dtype=torch.float64)
        A = torch.tensor(A0, dtype=torch.float64, requires_grad=True)
        optimizer = torch.optim.Adam([A], lr=self.lr)
        scheduler = torch.optim.lr_scheduler.ExponentialLR(optimizer, gamma=LR_FLOOR ** (1.0 / self.max_iters))
        best_A, best_value = A0, math.inf
        for _ in range(self.max_iters):
            optimizer.zero_grad()
            frame = _chart_frame(A, E_t, F_t)
            residual = points - (points @ frame) @ frame.T
            loss = torch.linalg.norm(residual, dim=1).max()
            value = float(loss)
            if value < best_value:
                best_A, best_value = A.detach().numpy().copy(), value
            loss.backward()
            optimizer.step()
            scheduler.step()
        return best_A, best_value, self.max_iters

    def _certify(self, offsets: np.ndarray, fit: BetaFit, rng: np.random.Generator) -> None:
        """Evaluate a plane net; adopt its best plane if it beats the descent, recording the gap."""
        frames, fit.certificate = plane_net(offsets.shape[1], fit.plane.dim, self.net_size, rng)
        squared = np.sum(offsets**2, axis=1)
        best_value, best_frame = math.inf, None
        for chunk in np.array_split(np.arange(len(frames)), max(1, len(frames) // 256)):
            coordinates = np.einsum("kn,pmn->pkm", offsets, frames[chunk])
            distances = np.sqrt(np.clip(squared - np.sum(coordinates**2, axis=2), 0.0, None)).max(axis=1)
            j = int(np.argmin(distances))
            if distances[j] < best_value:
                best_value, best_frame = float(distances[j]), frames[chunk][j]
        fit.certified_gap = max(0.0, fit.value - best_value)
        if best_value < fit.value:
            logger.info("Plane net beat the descent by %.3g", fit.value - best_value)
            fit.plane, fit.value = Subspace(best_frame), best_value


@dataclass
class BetaResult:
    beta_bar: float
    beta_open: float
    fit: BetaFit
    point_count: int
    open_fit: Optional[BetaFit] = None


def beta_number(cloud, x: np.ndarray, r: float, solver: Optional[BetaSolver] = None) -> BetaResult:
    """β̄(x, r) over the closed ball and the open-ball variant β(x, r) <= β̄(x, r)."""
    solver = solver or BetaSolver()
    x = np.asarray(x, dtype=float)
    if not r > 0:
        raise EmptyBall(f"Radius must be positive, got {r}.")
    closed = cloud.ball(x, r, "closed")
    if not len(closed):
        raise EmptyBall(f"No cloud point in the closed ball of radius {r} around {x.tolist()}.")
    offsets = cloud.points[closed] - x
    fit = solver.fit(offsets, cloud.m, cloud.weights[closed])

    # an empty open ball has β = 0; otherwise the closed optimum seeds the open fit, so β <= β̄
    inside = np.linalg.norm(offsets, axis=1) < r
    beta_open, open_fit = 0.0, None
    if np.any(inside):
        open_fit = solver.fit(offsets[inside], cloud.m, cloud.weights[closed][inside], start=fit.plane)
        beta_open = min(open_fit.value, max_distance(offsets[inside], fit.plane))
    return BetaResult(
        beta_bar=fit.value / r, beta_open=beta_open / r, fit=fit, point_count=len(closed), open_fit=open_fit
    )
