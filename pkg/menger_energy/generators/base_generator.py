"""Base Generator class."""
import argparse
import logging
from typing import Any, Dict, Optional, Tuple

import numpy as np

from menger_energy.errors import InvalidSpec
import menger_energy.metadata.generators as metadata
import menger_energy.metadata.shared as shared
from menger_energy.pointcloud import PointCloud
from menger_energy.simplex import omega
from menger_energy.util import as_generator

logger = logging.getLogger(__name__)


def generalized_golden(dim: int) -> float:
    """Positive root of x^(dim+1) = x + 1; dim=1 gives the golden ratio.

    >>> round(generalized_golden(1), 6)
    1.618034
    """
    x = 2.0
    for _ in range(64):
        x = (1.0 + x) ** (1.0 / (dim + 1))
    return x


def lattice(count: int, dim: int, rng: np.random.Generator, jitter: float = metadata.JITTER) -> np.ndarray:
    """Quasi-uniform points in [0, 1)^dim with stratified jitter.

    The first coordinate is stratified, one point per cell [i/count, (i+1)/count); the offset inside
    each cell is drawn from a window of width `jitter` around the cell center. The remaining coordinates
    follow an additive recurrence with generalized golden increments, shifted by a random rotation.

    Parameters
    ----------
    count
        number of points
    dim
        parameter dimension
    rng
        source of the jitter and rotation
    jitter
        width of the offset window, in [0, 1]

    Returns
    -------
    np.ndarray
        (count, dim) array
    """
    if not 0 <= jitter <= 1:
        raise InvalidSpec(f"Jitter must lie in [0, 1], got {jitter}.")
    offsets = 0.5 + jitter * (rng.random(count) - 0.5)
    first = (np.arange(count) + offsets) / count
    if dim == 1:
        return first[:, None]
    phi = generalized_golden(dim - 1)
    increments = phi ** -np.arange(1, dim)
    shift = rng.random(dim - 1)
    rest = np.mod(shift + np.arange(count)[:, None] * increments, 1.0)
    return np.column_stack([first, rest])


class BaseGenerator:
    """Base for all generators: an analytic m-dimensional set in R^n sampled as a weighted cloud.

    Subclasses implement `_sample`, returning points in the first few coordinates of R^n and the
    H^m mass of each point's parameter cell (Jacobian times cell volume).
    """

    kind = ""
    default_m = 1
    # intrinsic dimensions the parameterization supports; None means any
    supported_m: Optional[Tuple[int, ...]] = None

    def __init__(self, args: argparse.Namespace = None) -> None:
        self.args = vars(args) if args is not None else {}
        m = self.args.get("m")
        self.m = self.default_m if m is None else int(m)
        n = self.args.get("n")
        self.n = self.default_n() if n is None else int(n)
        num_points = self.args.get("num_points")
        self.num_points = metadata.SAMPLE_COUNT if num_points is None else int(num_points)
        seed = self.args.get("seed")
        self.seed = shared.SEED if seed is None else int(seed)
        radius = self.args.get("radius")
        self.radius = metadata.RADIUS if radius is None else float(radius)
        jitter = self.args.get("jitter")
        self.jitter = metadata.JITTER if jitter is None else float(jitter)

    def default_n(self) -> int:
        return self.m + 1

    @staticmethod
    def add_to_argparse(parser):
        parser.add_argument("--n", type=int, default=None, help="Ambient dimension. Default is m + 1.")
        parser.add_argument(
            "--num_points", type=int, default=None, help=f"Number of sample points. Default is {metadata.SAMPLE_COUNT}."
        )
        parser.add_argument(
            "--jitter",
            type=float,
            default=None,
            help=f"Width of the in-cell offset window, in [0, 1]. Default is {metadata.JITTER}.",
        )
        return parser

    @property
    def ambient_min(self) -> int:
        """Smallest ambient dimension the parameterization fits in."""
        return self.m + 1

    @property
    def reach(self) -> Optional[float]:
        """Analytic reach of the generated set, or None when it is not C^2."""
        return None

    def params(self) -> Dict[str, Any]:
        return {"radius": self.radius}

    def validate(self) -> None:
        if self.supported_m is not None and self.m not in self.supported_m:
            raise InvalidSpec(f"{self.kind} supports m in {self.supported_m}, got m={self.m}.")
        if self.m < 1:
            raise InvalidSpec(f"Intrinsic dimension must be positive, got m={self.m}.")
        if self.n < self.ambient_min:
            raise InvalidSpec(f"{self.kind} with m={self.m} needs n >= {self.ambient_min}, got n={self.n}.")
        if self.num_points < 4 * (self.m + 2):
            raise InvalidSpec(f"Need at least 4(m+2) = {4 * (self.m + 2)} points, got {self.num_points}.")
        if not self.radius > 0:
            raise InvalidSpec(f"Radius must be positive, got {self.radius}.")
        if not 0 <= self.jitter <= 1:
            raise InvalidSpec(f"Jitter must lie in [0, 1], got {self.jitter}.")

    def _sample(self, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def provenance(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "m": self.m,
            "n": self.n,
            "num_points": self.num_points,
            "seed": self.seed,
            "jitter": self.jitter,
            "reach": self.reach,
            **self.params(),
        }

    def generate(self) -> PointCloud:
        self.validate()
        rng = as_generator(self.seed)
        points, weights = self._sample(rng)
        embedded = np.zeros((len(points), self.n))
        embedded[:, : points.shape[1]] = points
        cloud = PointCloud(embedded, weights, self.m, self.provenance(), self.args.get("tol_geom", shared.TOL_GEOM))
        logger.info("Generated %s with total mass %.6g", cloud, cloud.total_mass)
        return cloud

    def __repr__(self) -> str:
        return f"{type(self).__name__}(m={self.m}, n={self.n}, num_points={self.num_points})"


def sphere_sample(
    m: int, radius: float, count: int, rng: np.random.Generator, jitter: float = metadata.JITTER
) -> Tuple[np.ndarray, np.ndarray]:
    """Points on the round m-sphere of the given radius in R^(m+1), with equal cell masses."""
    area = (m + 1) * omega(m + 1) * radius**m
    if m == 1:
        angle = 2 * np.pi * lattice(count, 1, rng, jitter)[:, 0]
        points = radius * np.column_stack([np.cos(angle), np.sin(angle)])
    elif m == 2:
        # Archimedes: the height coordinate is uniform for the area measure
        grid = lattice(count, 2, rng, jitter)
        height = 2 * grid[:, 0] - 1
        angle = 2 * np.pi * grid[:, 1]
        ring = np.sqrt(np.clip(1 - height**2, 0.0, None))
        points = radius * np.column_stack([ring * np.cos(angle), ring * np.sin(angle), height])
    else:
        gaussian = rng.standard_normal((count, m + 1))
        points = radius * gaussian / np.linalg.norm(gaussian, axis=1, keepdims=True)
    return points, np.full(count, area / count)
