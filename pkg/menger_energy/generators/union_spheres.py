"""Two overlapping round spheres; they meet in a set of zero H^m measure."""
from typing import Optional, Tuple

import numpy as np

from menger_energy.errors import InvalidSpec
from menger_energy.generators.base_generator import BaseGenerator, sphere_sample
import menger_energy.metadata.generators as metadata


class UnionSpheres(BaseGenerator):
    """Spheres of radius `radius` centered at ±offset/2 e_1, half of the points on each."""

    kind = "union_spheres"
    default_m = 2

    def __init__(self, args=None) -> None:
        super().__init__(args)
        offset = self.args.get("offset")
        self.offset = metadata.UNION_OFFSET if offset is None else float(offset)

    @staticmethod
    def add_to_argparse(parser):
        BaseGenerator.add_to_argparse(parser)
        parser.add_argument(
            "--offset", type=float, default=None, help=f"Distance between centers. Default is {metadata.UNION_OFFSET}."
        )
        return parser

    @property
    def reach(self) -> Optional[float]:
        return self.radius if self.offset >= 2 * self.radius else None

    def params(self):
        return {"radius": self.radius, "offset": self.offset}

    def validate(self) -> None:
        super().validate()
        if not self.offset > 0:
            raise InvalidSpec(f"Offset must be positive, got {self.offset}; coincident spheres overlap in measure.")

    def _sample(self, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        first = self.num_points // 2
        left, left_weights = sphere_sample(self.m, self.radius, first, rng, self.jitter)
        right, right_weights = sphere_sample(self.m, self.radius, self.num_points - first, rng, self.jitter)
        shift = np.zeros(self.m + 1)
        shift[0] = 0.5 * self.offset
        return np.vstack([left - shift, right + shift]), np.concatenate([left_weights, right_weights])
