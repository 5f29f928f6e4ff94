"""The segment [0, radius]·e_1, whose endpoint at the origin is the only non-flat point."""
from typing import Optional, Tuple

import numpy as np

from menger_energy.generators.base_generator import BaseGenerator, lattice


class HalfSegment(BaseGenerator):
    """Segment from the origin along e_1; point 0 sits exactly on the endpoint."""

    kind = "half_segment"
    default_m = 1
    supported_m = (1,)

    def default_n(self) -> int:
        return 2

    @property
    def ambient_min(self) -> int:
        return 1

    @property
    def reach(self) -> Optional[float]:
        return float("inf")

    def params(self):
        return {"radius": self.radius, "endpoint_index": 0}

    def _sample(self, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        t = self.radius * lattice(self.num_points, 1, rng, self.jitter)
        t[0] = 0.0
        return t, np.full(self.num_points, self.radius / self.num_points)
