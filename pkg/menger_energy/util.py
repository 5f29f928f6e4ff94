"""Utility functions for menger_energy module."""
import datetime
import math
from pathlib import Path
from typing import Any, Iterable, List, Sequence, Union

import numpy as np
import smart_open
from tqdm import tqdm

import menger_energy.metadata.shared as metadata

RngLike = Union[None, int, np.random.Generator]


def as_generator(rng: RngLike = None) -> np.random.Generator:
    """Return a numpy Generator, seeding with the package default when rng is None."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(metadata.SEED if rng is None else rng)


def spawn_generators(seed: int, count: int) -> List[np.random.Generator]:
    """Deterministic independent substreams, one per chunk of work.

    >>> a = spawn_generators(7, 3)
    >>> b = spawn_generators(7, 3)
    >>> bool(a[2].random() == b[2].random())
    True
    """
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(count)]


def progress(iterable: Iterable, enabled: bool = False, **kwargs) -> Iterable:
    """Wrap an iterable in a tqdm bar when progress reporting is enabled."""
    return tqdm(iterable, disable=not enabled, **kwargs)


def format_float(value: float, digits: int = metadata.FLOAT_DIGITS) -> str:
    """Format a float with a fixed number of significant digits.

    >>> format_float(0.1875)
    '0.1875'
    >>> format_float(1 / 3)
    '0.33333333333333331'
    """
    return f"{value:.{digits}g}"


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays, paths and dataclass-like objects to plain Python values."""
    if hasattr(value, "to_dict"):
        return to_jsonable(value.to_dict())
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, Path):
        return str(value)
    return value


def dumps_report(value: Any, indent: int = 2, _level: int = 0) -> str:
    """Serialize to JSON with sorted keys and floats at FLOAT_DIGITS significant digits.

    Non-finite floats are written as null.

    >>> dumps_report({"b": 1, "a": [0.5, float("nan")]}, indent=0)
    '{"a": [0.5, null], "b": 1}'
    """
    value = to_jsonable(value)
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    sep = ",\n" if indent else ", "
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f'{pad}{_quote(key)}: {dumps_report(value[key], indent, _level + 1)}' for key in sorted(value)]
        return "{\n" + sep.join(items) + "\n" + end + "}" if indent else "{" + sep.join(items) + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        items = [f"{pad}{dumps_report(item, indent, _level + 1)}" for item in value]
        return "[\n" + sep.join(items) + "\n" + end + "]" if indent else "[" + sep.join(items) + "]"
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value) if math.isfinite(value) else "null"
    return _quote(str(value))


def _quote(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{escaped}"'


def write_text(uri: Union[Path, str], text: str) -> None:
    if isinstance(uri, Path):
        uri.parent.mkdir(parents=True, exist_ok=True)
    with smart_open.open(str(uri), "w") as f:
        f.write(text)


def write_csv_table(uri: Union[Path, str], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """Write a headed CSV table; floats use FLOAT_DIGITS significant digits."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_cell(cell) for cell in row))
    write_text(uri, "\n".join(lines) + "\n")


def _csv_cell(cell: Any) -> str:
    cell = to_jsonable(cell)
    if isinstance(cell, float):
        return format_float(cell)
    return str(cell)


def timestamp() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")

