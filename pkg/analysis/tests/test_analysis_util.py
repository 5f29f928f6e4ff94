"""Tests for the analysis config, report and command helpers."""
import json

import pytest

from analysis import run_analysis
from analysis.util import generator_class_from_kind, load_config, output_path, parse_radii, Report
from analysis.verify import Check, run_suites, SuiteOutcome
from menger_energy.errors import InvalidParameter, InvalidSpec
from menger_energy.generators import Sphere, Torus


def test_parse_radii():
    """Log-spaced ranges, single radii and malformed strings."""
    assert parse_radii(None) is None
    assert parse_radii("0.5") == [0.5]
    assert parse_radii("1:100:3") == [1.0, 10.0, 100.0]
    for text in ("1:2", "2:1:3", "0:1:3", "a:b:c", "-1"):
        with pytest.raises(InvalidParameter):
            parse_radii(text)


def test_load_config(tmp_path):
    """Dotted keys map to argument names; unknown keys are rejected."""
    path = tmp_path / "run.toml"
    path.write_text("threads = 4\n[mc]\nsamples = 5000\n[rng]\nseed = 3\n")
    assert load_config(str(path)) == {"threads": 4, "samples": 5000, "seed": 3}
    path.write_text("[mc]\nsamples = 5000\nspeed = 2\n")
    with pytest.raises(InvalidParameter):
        load_config(str(path))
    with pytest.raises(InvalidParameter):
        load_config(str(tmp_path / "missing.toml"))


def test_generator_class_from_kind():
    """Registered kinds, class names and dotted paths all resolve."""
    assert generator_class_from_kind("sphere") is Sphere
    assert generator_class_from_kind("Torus") is Torus
    assert generator_class_from_kind("menger_energy.generators.Sphere") is Sphere
    with pytest.raises(InvalidSpec):
        generator_class_from_kind("NoSuchShape")


def test_report_write(tmp_path):
    """The JSON report and its tables land in the output directory."""
    report = Report("demo", {"p": 2.0}, {"seed": 1})
    report.results = {"value": 0.1875}
    report.add_table("rows", ["a", "b"], [[1, 0.5]])
    report.write(str(tmp_path))
    written = json.loads((tmp_path / "demo.json").read_text())
    assert written["results"]["value"] == 0.1875 and written["command"] == "demo"
    assert (tmp_path / "demo_rows.csv").read_text() == "a,b\n1,0.5\n"
    assert output_path("s3://bucket/run/", "demo.json") == "s3://bucket/run/demo.json"


def test_suite_outcome():
    """An outcome passes only when every check does, and names the failures."""
    outcome = SuiteOutcome([Check("energy", "first", True), Check("flatness", "second", False, "off")])
    summary = outcome.to_dict()
    assert not outcome.passed
    assert summary["failed"] == ["flatness/second"] and summary["suites"] == ["energy", "flatness"]
    assert outcome.rows()[1] == ["flatness", "second", False, "off"]
    with pytest.raises(InvalidParameter):
        run_suites("no-such-suite")


def test_main_energy_and_constants(tmp_path):
    """End to end: the three-point energy and the constants ledger."""
    cloud = tmp_path / "tri.csv"
    cloud.write_text("#menger m=1 n=2\n0,0,1\n1,0,1\n0,1,1\n")
    status = run_analysis.main(["energy", "--input", str(cloud), "--p", "2", "--output", str(tmp_path / "tri")])
    assert status == 0
    assert json.loads((tmp_path / "tri" / "energy.json").read_text())["results"]["value"] == pytest.approx(0.1875)

    argv = ["constants", "--E", "1", "--m", "2", "--p", "16", "--output", str(tmp_path / "ledger")]
    assert run_analysis.main(argv) == 0
    results = json.loads((tmp_path / "ledger" / "constants.json").read_text())["results"]
    assert results["lam"] == 8 and results["kappa"] == 120
    assert (tmp_path / "ledger" / "constants_ledger.csv").exists()


def test_main_exit_codes():
    """Validation problems exit with status 1."""
    assert run_analysis.main(["constants", "--E", "1", "--m", "2", "--p", "4"]) == 1
    assert run_analysis.main(["constants", "--no-such-flag"]) == 1
    assert run_analysis.main(["energy", "--p", "2"]) == 1


def test_main_geometric_tolerance_reaches_ball_queries(tmp_path):
    """tol.geom widens closed balls, whether it comes from the flag or from the TOML config."""
    cloud = tmp_path / "line.csv"
    cloud.write_text("#menger m=1 n=2\n0,0,1\n1,0,1\n1.3,0,1\n0,0.5,1\n")
    config = tmp_path / "run.toml"
    config.write_text("[tol]\ngeom = 0.5\n")
    counts = []
    for extra in ([], ["--tol_geom", "0.5"], ["--config", str(config)]):
        output = tmp_path / f"beta{len(counts)}"
        argv = ["beta", "--input", str(cloud), "--point-index", "0", "--radius", "1", "--output", str(output), *extra]
        assert run_analysis.main(argv) == 0
        counts.append(json.loads((output / "beta.json").read_text())["results"]["flatness"][0]["point_count"])
    assert counts == [3, 4, 4]
    assert run_analysis.main(["beta", "--input", str(cloud), "--radius", "1", "--tol_geom", "-1"]) == 1
