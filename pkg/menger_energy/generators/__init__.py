"""Module containing submodules for each synthetic example set.

Each set is a generator class in its own submodule; `generate` picks one by kind.
Defaults live in menger_energy.metadata.generators.
"""
import argparse
from typing import Optional

from .base_generator import BaseGenerator
from .sphere import Sphere
from .torus import Torus
from .graph import Graph
from .plane_disk import PlaneDisk
from .spiral import Spiral
from .koch import Koch
from .gap_square import GapSquare
from .union_spheres import UnionSpheres
from .half_segment import HalfSegment

from menger_energy.errors import InvalidSpec
from menger_energy.pointcloud import PointCloud

GENERATORS = {
    generator.kind: generator
    for generator in (Sphere, Torus, Graph, PlaneDisk, Spiral, Koch, GapSquare, UnionSpheres, HalfSegment)
}


def generator_class(kind: str):
    if kind not in GENERATORS:
        raise InvalidSpec(f"Unknown generator kind {kind!r}; choose from {sorted(GENERATORS)}.")
    return GENERATORS[kind]


def generate(kind: str, args: Optional[argparse.Namespace] = None) -> PointCloud:
    """Build the generator for `kind` from parsed arguments and sample its cloud."""
    return generator_class(kind)(args).generate()
