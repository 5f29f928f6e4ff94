"""The super-exponentially flattening spiral, times a cube for m > 1."""
from typing import Tuple

import numpy as np

from menger_energy.errors import InvalidSpec
from menger_energy.generators.base_generator import BaseGenerator, lattice
import menger_energy.metadata.generators as metadata

LN2 = np.log(2.0)


def spiral_point(t: np.ndarray) -> np.ndarray:
    """γ(t) = 2^(-2^(1/t)) (cos(π/2t), sin(π/2t)) for t > 0.

    >>> spiral_point(np.array([1.0])).round(12).tolist()
    [[0.0, 0.25]]
    """
    t = np.asarray(t, dtype=float)
    radius = np.exp2(-np.exp2(1.0 / t))
    angle = np.pi / (2.0 * t)
    return np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])


def spiral_speed(t: np.ndarray) -> np.ndarray:
    """|γ'(t)|, from the radial rate (ln 2)^2 2^(1/t) / t^2 and the angular rate π / (2 t^2)."""
    t = np.asarray(t, dtype=float)
    radius = np.exp2(-np.exp2(1.0 / t))
    return radius / t**2 * np.sqrt(LN2**4 * np.exp2(2.0 / t) + np.pi**2 / 4)


class Spiral(BaseGenerator):
    """γ([t_min, t_max]) × [0, 1]^(m-1) in R^(m+1); the curve winds into the origin as t -> 0."""

    kind = "spiral"
    default_m = 1

    def __init__(self, args=None) -> None:
        super().__init__(args)
        t_min = self.args.get("t_min")
        self.t_min = metadata.SPIRAL_T_MIN if t_min is None else float(t_min)
        t_max = self.args.get("t_max")
        self.t_max = metadata.SPIRAL_T_MAX if t_max is None else float(t_max)

    @staticmethod
    def add_to_argparse(parser):
        BaseGenerator.add_to_argparse(parser)
        parser.add_argument(
            "--t_min", type=float, default=None, help=f"Smallest curve parameter. Default is {metadata.SPIRAL_T_MIN}."
        )
        parser.add_argument(
            "--t_max", type=float, default=None, help=f"Largest curve parameter. Default is {metadata.SPIRAL_T_MAX}."
        )
        return parser

    def params(self):
        return {"t_min": self.t_min, "t_max": self.t_max}

    def validate(self) -> None:
        super().validate()
        if not 0 < self.t_min < self.t_max <= 1:
            raise InvalidSpec(f"Need 0 < t_min < t_max <= 1, got {self.t_min} and {self.t_max}.")

    def _sample(self, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        grid = lattice(self.num_points, self.m, rng, self.jitter)
        length = self.t_max - self.t_min
        t = self.t_min + length * grid[:, 0]
        points = np.column_stack([spiral_point(t), grid[:, 1:]])
        return points, spiral_speed(t) * length / self.num_points
