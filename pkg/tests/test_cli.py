import csv
import json
from pathlib import Path

import pytest

from heatbv.cli import main


CONFIG = """
[space]
builder = "torus"
dim = 2
side = 8
h = 0.125

[run]
seed = 3
"""


@pytest.fixture()
def config_file(tmp_path):
    path = tmp_path / "exp.toml"
    path.write_text(CONFIG)
    return str(path)


def test_build_space_roundtrip(tmp_path):
    out = tmp_path / "space.json"
    rc = main(["build-space", "--builder", "lattice", "--dim", "2", "--side", "5",
               "--h", "0.25", "--out", str(out)])
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["n"] == 25


def test_unknown_config_key_is_config_error(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("[space]\nbuilder = 'torus'\nwibble = 3\n")
    rc = main(["--config", str(bad), "heat-verify"])
    assert rc == 2


def test_missing_config_file_is_config_error():
    rc = main(["--config", "/nonexistent/exp.toml", "heat-verify"])
    assert rc == 2


def test_no_space_is_config_error():
    rc = main(["heat-verify"])
    assert rc == 2


def test_capacity_exit_code(tmp_path):
    rc = main(["--cap", "10", "build-space", "--builder", "lattice", "--dim", "2",
               "--side", "9", "--h", "0.125", "--out", str(tmp_path / "s.json")])
    assert rc == 3


def test_heat_verify_report(config_file, tmp_path):
    out = tmp_path / "reports"
    rc = main(["--config", config_file, "heat-verify", "--out", str(out)])
    assert rc == 0
    doc = json.loads((out / "heat.json").read_text())
    assert doc["seed"] == 3
    assert max(doc["data"]["residuals"].values()) < 1e-9
    assert "configHash" in doc
    assert "generatedAt" in json.loads((out / "manifest.json").read_text())
    # no timestamps inside the numeric report
    assert "generatedAt" not in doc


def test_be_subcommand_single_check(config_file, tmp_path):
    out = tmp_path / "reports"
    rc = main(["--config", config_file, "be", "--check", "riesz", "--p", "2.0",
               "--out", str(out)])
    assert rc == 0
    doc = json.loads((out / "be.json").read_text())
    assert doc["data"]["reports"][0]["kind"] == "riesz"
    assert abs(doc["data"]["reports"][0]["constant"] - 1.0) < 1e-9


def test_bv_subcommand_builtin_function(config_file, tmp_path):
    out = tmp_path / "reports"
    rc = main(["--config", config_file, "bv", "--function", "halfspace[axis0]",
               "--out", str(out)])
    assert rc == 0
    doc = json.loads((out / "bv.json").read_text())
    assert doc["data"]["coarea"]["bvEnergy"] > 0
    assert (out / "bv_levels.csv").exists()


def test_besov_subcommand_emits_csv(config_file, tmp_path):
    out = tmp_path / "besov.csv"
    rc = main(["--config", config_file, "besov", "--kind", "both", "--out", str(out)])
    assert rc == 0
    rows = list(csv.DictReader(out.open()))
    kinds = {r["kind"] for r in rows}
    assert kinds == {"heat", "metric"}


def test_suite_reports_and_determinism(config_file, tmp_path):
    a, b = tmp_path / "runA", tmp_path / "runB"
    assert main(["--config", config_file, "suite", "--out", str(a)]) == 0
    assert main(["--config", config_file, "suite", "--out", str(b)]) == 0
    names = ["heat", "besov", "bv", "be", "ineq", "summary"]
    for name in names:
        fa, fb = a / f"{name}.json", b / f"{name}.json"
        assert fa.exists(), name
        assert fa.read_bytes() == fb.read_bytes(), f"{name} not deterministic"


def test_suite_seed_changes_reports(config_file, tmp_path):
    a, b = tmp_path / "runA", tmp_path / "runB"
    assert main(["--config", config_file, "suite", "--out", str(a)]) == 0
    assert main(["--config", config_file, "--seed", "99", "suite", "--out", str(b)]) == 0
    assert (a / "heat.json").read_bytes() != (b / "heat.json").read_bytes()


def test_summarize_csv(config_file, tmp_path):
    out = tmp_path / "reports"
    assert main(["--config", config_file, "suite", "--out", str(out)]) == 0
    assert main(["summarize", str(out)]) == 0
    rows = list(csv.DictReader((out / "summary.csv").open()))
    assert len(rows) >= 7
    checks = {r["check"] for r in rows}
    assert "hamilton-gradient" in checks
    assert "riesz-comparability-p2" in checks
    for r in rows:
        assert r["status"] in ("pass", "flag", "fail")


def test_summarize_missing_dir_config_error():
    assert main(["summarize", "/no/such/reports"]) == 2


def test_ineq_koch_subcommand(tmp_path):
    out = tmp_path / "reports"
    rc = main(["ineq", "--koch", "129", "--check", "koch", "--out", str(out)])
    # needs >= 2 resolutions: single resolution is a config error
    assert rc == 2
    rc = main(["ineq", "--koch", "129,161", "--check", "koch", "--out", str(out)])
    assert rc == 0
    doc = json.loads((out / "koch.json").read_text())
    assert len(doc["data"]["rows"]) == 2
