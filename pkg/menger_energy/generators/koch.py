"""Finite-level van Koch snowflake."""
from typing import Tuple

import numpy as np

from menger_energy.errors import InvalidSpec
from menger_energy.generators.base_generator import BaseGenerator, lattice
import menger_energy.metadata.generators as metadata


def koch_vertices(level: int) -> np.ndarray:
    """Closed polygon of the level-`level` snowflake on the unit triangle, counterclockwise, first vertex repeated.

    >>> koch_vertices(1).shape
    (13, 2)
    """
    vertices = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2], [0.0, 0.0]])
    # outward is to the right of a counterclockwise edge
    turn = np.array([[0.5, -np.sqrt(3) / 2], [np.sqrt(3) / 2, 0.5]])
    for _ in range(level):
        start, edge = vertices[:-1], np.diff(vertices, axis=0) / 3
        first, second = start + edge, start + 2 * edge
        peak = first + edge @ turn
        refined = np.stack([start, first, peak, second], axis=1).reshape(-1, 2)
        vertices = np.vstack([refined, vertices[-1:]])
    return vertices


class Koch(BaseGenerator):
    """Points spread along the snowflake polygon by arc length; every point carries length 3 (4/3)^L / N."""

    kind = "koch"
    default_m = 1
    supported_m = (1,)

    def __init__(self, args=None) -> None:
        super().__init__(args)
        level = self.args.get("koch_level")
        self.level = metadata.KOCH_LEVEL if level is None else int(level)

    @staticmethod
    def add_to_argparse(parser):
        BaseGenerator.add_to_argparse(parser)
        parser.add_argument(
            "--koch_level", type=int, default=None, help=f"Refinement level. Default is {metadata.KOCH_LEVEL}."
        )
        return parser

    def params(self):
        return {"koch_level": self.level, "finest_scale": 3.0**-self.level}

    def validate(self) -> None:
        super().validate()
        if not 0 <= self.level <= 10:
            raise InvalidSpec(f"Koch level must lie in [0, 10], got {self.level}.")

    def _sample(self, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        vertices = koch_vertices(self.level)
        edges = len(vertices) - 1
        s = edges * lattice(self.num_points, 1, rng, self.jitter)[:, 0]
        index = np.minimum(s.astype(int), edges - 1)
        fraction = (s - index)[:, None]
        points = vertices[index] + fraction * (vertices[index + 1] - vertices[index])
        total = 3.0 * (4.0 / 3.0) ** self.level
        return points, np.full(self.num_points, total / self.num_points)
