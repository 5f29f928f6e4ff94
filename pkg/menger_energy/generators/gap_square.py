"""Boundary of the unit square with slightly bulged sides and an optional open gap in the bottom side."""
from typing import List, Tuple

import numpy as np

from menger_energy.errors import InvalidSpec
from menger_energy.generators.base_generator import BaseGenerator, lattice
import menger_energy.metadata.generators as metadata

CORNERS = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


class GapSquare(BaseGenerator):
    """∂[0,1]^2 traversed counterclockwise, each side a circular arc with sagitta `bulge` pointing outward.

    The middle piece of arc length `gap_width` is removed from the bottom side; gap_width=0 gives the intact
    square. Points are spread by arc length, so every point carries the same length.
    """

    kind = "gap_square"
    default_m = 1
    supported_m = (1,)

    def __init__(self, args=None) -> None:
        super().__init__(args)
        gap_width = self.args.get("gap_width")
        self.gap_width = metadata.GAP_WIDTH if gap_width is None else float(gap_width)
        bulge = self.args.get("bulge")
        self.bulge = metadata.GAP_BULGE if bulge is None else float(bulge)

    @staticmethod
    def add_to_argparse(parser):
        BaseGenerator.add_to_argparse(parser)
        parser.add_argument(
            "--gap_width", type=float, default=None, help=f"Arc length removed. Default is {metadata.GAP_WIDTH}."
        )
        parser.add_argument(
            "--bulge", type=float, default=None, help=f"Sagitta of each side. Default is {metadata.GAP_BULGE}."
        )
        return parser

    def validate(self) -> None:
        super().validate()
        if not 0 <= self.bulge < 0.5:
            raise InvalidSpec(f"Bulge must lie in [0, 0.5), got {self.bulge}.")
        if not 0 <= self.gap_width < 0.5 * self.side_length:
            raise InvalidSpec(f"Gap width must lie in [0, {0.5 * self.side_length}), got {self.gap_width}.")

    @property
    def arc_radius(self) -> float:
        return (0.25 + self.bulge**2) / (2 * self.bulge) if self.bulge > 0 else float("inf")

    @property
    def side_length(self) -> float:
        if self.bulge == 0:
            return 1.0
        return 2 * self.arc_radius * np.arcsin(0.5 / self.arc_radius)

    def side_point(self, side: np.ndarray, s: np.ndarray) -> np.ndarray:
        """Point at arc length s along the given side."""
        start = CORNERS[side]
        tangent = CORNERS[(side + 1) % 4] - start
        outward = np.column_stack([tangent[:, 1], -tangent[:, 0]])
        s = np.asarray(s, dtype=float)[:, None]
        if self.bulge == 0:
            return start + s * tangent
        rho = self.arc_radius
        center = start + 0.5 * tangent - (rho - self.bulge) * outward
        angle = s / rho - np.arcsin(0.5 / rho)
        return center + rho * (np.cos(angle) * outward + np.sin(angle) * tangent)

    def gap_endpoints(self) -> List[List[float]]:
        half = 0.5 * self.side_length
        ends = np.array([half - 0.5 * self.gap_width, half + 0.5 * self.gap_width])
        return self.side_point(np.zeros(2, dtype=int), ends).tolist()

    def side_midpoints(self) -> List[List[float]]:
        return self.side_point(np.arange(4), np.full(4, 0.5 * self.side_length)).tolist()

    def params(self):
        return {
            "gap_width": self.gap_width,
            "bulge": self.bulge,
            "gap_endpoints": self.gap_endpoints() if self.gap_width > 0 else [],
            "side_midpoints": self.side_midpoints(),
        }

    def _sample(self, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        side_length = self.side_length
        total = 4 * side_length - self.gap_width
        s = total * lattice(self.num_points, 1, rng, self.jitter)[:, 0]
        # skip the gap: positions past its start on the bottom side move forward by its width
        s = np.where(s >= 0.5 * (side_length - self.gap_width), s + self.gap_width, s)
        side = np.minimum((s // side_length).astype(int), 3)
        points = self.side_point(side, s - side * side_length)
        return points, np.full(self.num_points, total / self.num_points)
