"""Graphs of closed-form height functions over a cube."""
from typing import Callable, Optional, Tuple

import numpy as np

from menger_energy.errors import InvalidSpec
from menger_energy.generators.base_generator import BaseGenerator, lattice
import menger_energy.metadata.generators as metadata

HeightFn = Callable[[np.ndarray], np.ndarray]


def quadratic_height(amplitude: float) -> Tuple[HeightFn, HeightFn]:
    def height(w):
        return amplitude * np.sum(w**2, axis=1, keepdims=True)

    def jacobian(w):
        return 2 * amplitude * w[:, None, :]

    return height, jacobian


def cusp_height(amplitude: float) -> Tuple[HeightFn, HeightFn]:
    """a |w|^(3/2): C^1 with a 1/2-Hölder derivative, not C^2 at the origin."""

    def height(w):
        return amplitude * np.linalg.norm(w, axis=1, keepdims=True) ** 1.5

    def jacobian(w):
        norm = np.linalg.norm(w, axis=1, keepdims=True)
        scale = np.divide(1.5 * amplitude, np.sqrt(norm), out=np.zeros_like(norm), where=norm > 0)
        return (scale * w)[:, None, :]

    return height, jacobian


HEIGHTS = {"quadratic": quadratic_height, "cusp": cusp_height}


def area_element(jacobian: np.ndarray) -> np.ndarray:
    """sqrt(det(I + DF^T DF)) for a stack of (n-m) x m Jacobians."""
    m = jacobian.shape[-1]
    gram = np.eye(m) + np.einsum("kim,kij->kmj", jacobian, jacobian)
    return np.sqrt(np.linalg.det(gram))


class Graph(BaseGenerator):
    """{(w, F(w)) : w in [-half_width, half_width]^m} in R^n, F valued in the last n-m coordinates.

    A named height is selected with `--height`; Python callers may pass their own `height` and `jacobian`
    callables, mapping (N, m) arrays to (N, n-m) and (N, n-m, m) arrays.
    """

    kind = "graph"
    default_m = 2

    def __init__(
        self, args=None, height: Optional[HeightFn] = None, jacobian: Optional[HeightFn] = None, reach=None
    ) -> None:
        super().__init__(args)
        self.height_name = self.args.get("height") or metadata.GRAPH_HEIGHT
        amplitude = self.args.get("amplitude")
        self.amplitude = metadata.GRAPH_AMPLITUDE if amplitude is None else float(amplitude)
        half_width = self.args.get("half_width")
        self.half_width = metadata.GRAPH_HALF_WIDTH if half_width is None else float(half_width)
        if (height is None) != (jacobian is None):
            raise InvalidSpec("Pass both a height function and its Jacobian, or neither.")
        self.custom = height is not None
        self.custom_reach = reach
        if self.custom:
            self.height_name = "custom"
            self.height, self.jacobian = height, jacobian
        elif self.height_name in HEIGHTS:
            self.height, self.jacobian = HEIGHTS[self.height_name](self.amplitude)
        else:
            raise InvalidSpec(f"Unknown height {self.height_name!r}; choose from {sorted(HEIGHTS)}.")

    @staticmethod
    def add_to_argparse(parser):
        BaseGenerator.add_to_argparse(parser)
        parser.add_argument(
            "--height",
            type=str,
            default=None,
            choices=metadata.GRAPH_HEIGHTS,
            help=f"Height function. Default is {metadata.GRAPH_HEIGHT}.",
        )
        parser.add_argument(
            "--amplitude", type=float, default=None, help=f"Height amplitude a. Default is {metadata.GRAPH_AMPLITUDE}."
        )
        parser.add_argument(
            "--half_width", type=float, default=None, help=f"Domain half width. Default is {metadata.GRAPH_HALF_WIDTH}."
        )
        return parser

    @property
    def reach(self) -> Optional[float]:
        if self.custom:
            return self.custom_reach
        if self.height_name == "quadratic":
            return float("inf") if self.amplitude == 0 else 1.0 / (2 * abs(self.amplitude))
        return None

    def params(self):
        return {"height": self.height_name, "amplitude": self.amplitude, "half_width": self.half_width}

    def validate(self) -> None:
        super().validate()
        if not self.half_width > 0:
            raise InvalidSpec(f"Half width must be positive, got {self.half_width}.")

    def _sample(self, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        count, m, codim = self.num_points, self.m, self.n - self.m
        w = self.half_width * (2 * lattice(count, m, rng, self.jitter) - 1)
        heights = np.asarray(self.height(w), dtype=float).reshape(count, -1)
        jacobian = np.asarray(self.jacobian(w), dtype=float).reshape(count, -1, m)
        if heights.shape[1] > codim or jacobian.shape[1] != heights.shape[1]:
            raise InvalidSpec(f"Height has {heights.shape[1]} components but n - m = {codim}.")
        cell = (2 * self.half_width) ** m / count
        return np.column_stack([w, heights]), area_element(jacobian) * cell
