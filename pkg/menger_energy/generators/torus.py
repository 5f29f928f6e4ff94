"""Torus of revolution in R^3."""
from typing import Optional, Tuple

import numpy as np

from menger_energy.errors import InvalidSpec
from menger_energy.generators.base_generator import BaseGenerator, lattice
import menger_energy.metadata.generators as metadata


class Torus(BaseGenerator):
    """Torus with major radius `radius` and minor radius `minor_radius`, weighted by its area element."""

    kind = "torus"
    default_m = 2
    supported_m = (2,)

    def __init__(self, args=None) -> None:
        super().__init__(args)
        minor_radius = self.args.get("minor_radius")
        self.minor_radius = metadata.TORUS_MINOR_RADIUS if minor_radius is None else float(minor_radius)

    @staticmethod
    def add_to_argparse(parser):
        BaseGenerator.add_to_argparse(parser)
        parser.add_argument(
            "--minor_radius", type=float, default=None, help=f"Tube radius. Default is {metadata.TORUS_MINOR_RADIUS}."
        )
        return parser

    @property
    def reach(self) -> Optional[float]:
        return min(self.minor_radius, self.radius - self.minor_radius)

    def params(self):
        return {"radius": self.radius, "minor_radius": self.minor_radius}

    def validate(self) -> None:
        super().validate()
        if not 0 < self.minor_radius < self.radius:
            raise InvalidSpec(f"Need 0 < minor_radius < radius, got {self.minor_radius} and {self.radius}.")

    def _sample(self, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        grid = 2 * np.pi * lattice(self.num_points, 2, rng, self.jitter)
        around, tube = grid[:, 0], grid[:, 1]
        ring = self.radius + self.minor_radius * np.cos(tube)
        points = np.column_stack([ring * np.cos(around), ring * np.sin(around), self.minor_radius * np.sin(tube)])
        cell = (2 * np.pi) ** 2 / self.num_points
        return points, self.minor_radius * ring * cell
