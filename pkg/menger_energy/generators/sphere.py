"""Round m-spheres (a circle for m=1)."""
from typing import Optional, Tuple

import numpy as np

from menger_energy.generators.base_generator import BaseGenerator, sphere_sample


class Sphere(BaseGenerator):
    """The sphere of the given radius centered at the origin, in the first m+1 coordinates of R^n."""

    kind = "sphere"
    default_m = 2

    @property
    def reach(self) -> Optional[float]:
        return self.radius

    def _sample(self, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        return sphere_sample(self.m, self.radius, self.num_points, rng, self.jitter)
