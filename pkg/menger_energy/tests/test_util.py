"""Tests for the menger_energy.util module."""
import numpy as np

from menger_energy.grassmann import Subspace
from menger_energy.util import as_generator, dumps_report, spawn_generators, to_jsonable, write_csv_table


def test_as_generator_passes_generators_through():
    rng = np.random.default_rng(1)
    assert as_generator(rng) is rng
    assert as_generator(5).random() == np.random.default_rng(5).random()


def test_spawned_streams_differ():
    """Substreams of one seed are distinct."""
    first, second = spawn_generators(3, 2)
    assert first.random() != second.random()


def test_to_jsonable_unwraps_numpy_and_objects():
    """Arrays, numpy scalars and objects with to_dict become plain values."""
    plane = Subspace.coordinate(2, [0])
    value = to_jsonable({"a": np.arange(2), "b": np.float64(0.5), "c": np.bool_(True), "plane": plane})
    assert value["a"] == [0, 1] and value["b"] == 0.5 and value["c"] is True
    assert isinstance(value["plane"], dict)


def test_dumps_report_is_stable():
    """Keys are sorted, floats keep 17 digits and infinities become null."""
    text = dumps_report({"z": 1 / 3, "a": {"inf": float("inf"), "flag": False}}, indent=0)
    assert text == '{"a": {"flag": false, "inf": null}, "z": 0.33333333333333331}'


def test_write_csv_table(tmp_path):
    """A header line followed by one line per row."""
    path = tmp_path / "nested" / "table.csv"
    write_csv_table(path, ["name", "value"], [["x", 0.25], ["y", np.int64(3)]])
    assert path.read_text() == "name,value\nx,0.25\ny,3\n"
