"""Utilities for analysis scripts: config files, inputs and reports."""
import argparse
import importlib
import logging
from pathlib import Path
import sys
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pythonjsonlogger import jsonlogger
import toml

from menger_energy import generators
from menger_energy.errors import InvalidParameter, InvalidSpec
from menger_energy.pointcloud import load_cloud, PointCloud
import menger_energy.metadata.shared as shared
from menger_energy.util import dumps_report, timestamp, write_csv_table, write_text

GENERATOR_CLASS_MODULE = "menger_energy.generators"

# dotted config keys and the command-line destinations they set
CONFIG_KEYS = {
    "tol.linalg": "tol_linalg",
    "tol.geom": "tol_geom",
    "beta.restarts": "beta_restarts",
    "beta.max_iters": "beta_max_iters",
    "beta.lr": "beta_lr",
    "theta.disk_grid": "disk_grid",
    "theta.max_iters": "theta_max_iters",
    "mc.samples": "samples",
    "mc.batch": "batch",
    "brute.max_tuples": "max_tuples",
    "search.delta": "delta",
    "search.point_tol": "point_tol",
    "search.max_stages": "max_stages",
    "rng.seed": "seed",
    "output.dir": "output",
    "threads": "threads",
}


def import_class(module_and_class_name: str) -> type:
    """Import class from a module, e.g. 'menger_energy.generators.Sphere'."""
    module_name, class_name = module_and_class_name.rsplit(".", 1)
    module = importlib.import_module(module_name)
    class_ = getattr(module, class_name)
    return class_


def generator_class_from_kind(kind: str) -> type:
    """A registered kind such as 'sphere', a class name such as 'Sphere', or a dotted 'module.Class' path."""
    if "." not in kind and not kind[:1].isupper():
        return generators.generator_class(kind)
    path = kind if "." in kind else f"{GENERATOR_CLASS_MODULE}.{kind}"
    try:
        return import_class(path)
    except (ImportError, AttributeError) as exception:
        raise InvalidSpec(f"Cannot import generator class {path!r}.") from exception


def _flatten(table: Dict[str, Any], prefix: str = "") -> Dict[str, Any]:
    flat = {}
    for key, value in table.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, f"{name}."))
        else:
            flat[name] = value
    return flat


def load_config(path: str) -> Dict[str, Any]:
    """Read a TOML run config and map its dotted keys to argument destinations; unknown keys are rejected."""
    try:
        table = toml.load(path)
    except (OSError, toml.TomlDecodeError) as exception:
        raise InvalidParameter(f"Cannot read config {path}: {exception}") from exception
    flat = _flatten(table)
    unknown = sorted(set(flat) - set(CONFIG_KEYS))
    if unknown:
        raise InvalidParameter(f"Unknown config keys {unknown}; known keys are {sorted(CONFIG_KEYS)}.")
    return {CONFIG_KEYS[key]: value for key, value in flat.items()}


def setup_logging(verbose: bool = False, log_json: bool = False) -> None:
    handler = logging.StreamHandler(sys.stderr)
    if log_json:
        handler.setFormatter(jsonlogger.JsonFormatter("%(asctime)s %(name)s %(levelname)s %(message)s"))
    else:
        handler.setFormatter(logging.Formatter("%(asctime)s %(name)s %(levelname)s: %(message)s"))
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, handlers=[handler], force=True)


def parse_radii(text: Optional[str]) -> Optional[List[float]]:
    """'lo:hi:steps' as `steps` log-spaced radii from lo to hi; a single number is one radius.

    >>> parse_radii("0.01:1:3")
    [0.01, 0.1, 1.0]
    """
    if text is None:
        return None
    parts = text.split(":")
    try:
        if len(parts) == 1:
            radii = [float(parts[0])]
        elif len(parts) == 3:
            lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
            if not 0 < lo <= hi or steps < 1:
                raise InvalidParameter(f"Need 0 < lo <= hi and steps >= 1 in --radii, got {text!r}.")
            radii = [float(r) for r in np.round(np.geomspace(lo, hi, steps), 15)]
        else:
            raise InvalidParameter(f"--radii takes 'lo:hi:steps' or a single radius, got {text!r}.")
    except InvalidParameter:
        raise
    except ValueError as exception:
        raise InvalidParameter(f"Cannot parse --radii {text!r}.") from exception
    if any(r <= 0 for r in radii):
        raise InvalidParameter(f"Radii must be positive, got {text!r}.")
    return radii


def generator_namespace(args: argparse.Namespace) -> argparse.Namespace:
    """The generator reads its own radius from --set_radius; --radius stays the analysis radius."""
    return argparse.Namespace(**{**vars(args), "radius": getattr(args, "set_radius", None)})


def setup_cloud_from_args(args: argparse.Namespace) -> PointCloud:
    if args.input is not None:
        return load_cloud(args.input, tol=args.tol_geom)
    if args.kind is not None:
        return generator_class_from_kind(args.kind)(generator_namespace(args)).generate()
    raise InvalidParameter("Pass --input with a cloud file or --kind to generate one.")


class Report:
    """Results of one command, written as a JSON report plus optional CSV tables."""

    def __init__(self, command: str, params: Dict[str, Any], config: Dict[str, Any]) -> None:
        self.command = command
        self.params = params
        self.config = config
        self.results: Dict[str, Any] = {}
        self.diagnostics: Dict[str, Any] = {}
        self.tables: Dict[str, Tuple[Sequence[str], List[Sequence[Any]]]] = {}

    def add_table(self, name: str, header: Sequence[str], rows: List[Sequence[Any]]) -> None:
        self.tables[name] = (header, rows)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "params": self.params,
            "results": self.results,
            "diagnostics": self.diagnostics,
            "tool_version": shared.TOOL_VERSION,
            "config": self.config,
            "timestamp": timestamp(),
        }

    def write(self, output: Optional[str]) -> None:
        """Write <output>/<command>.json and one CSV per table, or print the JSON when there is no output dir."""
        text = dumps_report(self) + "\n"
        if output is None:
            sys.stdout.write(text)
            return
        write_text(output_path(output, f"{self.command}.json"), text)
        for name, (header, rows) in self.tables.items():
            write_csv_table(output_path(output, f"{self.command}_{name}.csv"), header, rows)


def output_path(output: str, name: str) -> Union[Path, str]:
    """A file inside the output directory; remote URIs stay strings for smart_open."""
    if "://" in output:
        return f"{output.rstrip('/')}/{name}"
    return Path(output) / name
