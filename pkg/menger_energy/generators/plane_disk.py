"""A flat m-disk B ∩ H: regular everywhere except that it has a boundary."""
from typing import Optional, Tuple

import numpy as np

from menger_energy.generators.base_generator import BaseGenerator, lattice
from menger_energy.simplex import omega


class PlaneDisk(BaseGenerator):
    """The disk of the given radius in the plane spanned by the first m coordinate axes."""

    kind = "plane_disk"
    default_m = 2

    def default_n(self) -> int:
        return self.m + 1

    @property
    def ambient_min(self) -> int:
        return self.m

    @property
    def reach(self) -> Optional[float]:
        return float("inf")

    def _sample(self, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        count, m = self.num_points, self.m
        volume = omega(m) * self.radius**m
        if m == 1:
            points = self.radius * (2 * lattice(count, 1, rng, self.jitter) - 1)
        elif m == 2:
            # sunflower pattern: r = R sqrt(u) is uniform for the area measure
            grid = lattice(count, 2, rng, self.jitter)
            r = self.radius * np.sqrt(grid[:, 0])
            angle = 2 * np.pi * grid[:, 1]
            points = np.column_stack([r * np.cos(angle), r * np.sin(angle)])
        else:
            # oversample the cube, keep the first `count` lattice points inside the ball
            oversampled = int(np.ceil(1.25 * count * 2**m / omega(m))) + 16
            cube = self.radius * (2 * lattice(oversampled, m, rng, self.jitter) - 1)
            inside = cube[np.linalg.norm(cube, axis=1) < self.radius]
            points = inside[np.sort(rng.choice(len(inside), size=min(count, len(inside)), replace=False))]
        return points, np.full(len(points), volume / len(points))
