import json

import pytest
from typer.testing import CliRunner

from dslt_lab import experiments
from dslt_lab.cli import app
from dslt_lab.errors import QuadratureError
from dslt_lab.experiments import Command, ExperimentSpec, resolved_params, validate
from dslt_lab.render import read_artifact

runner = CliRunner()


def _simulate_args(out):
    return ["simulate", "--hurst", "0.5", "--steps", "8", "--t", "1", "--seed", "7", "--method", "cholesky", "--out", str(out)]


def test_simulate_writes_artifact(tmp_path):
    out = tmp_path / "path.csv"
    result = runner.invoke(app, _simulate_args(out))
    assert result.exit_code == 0, result.output
    spec, rows = read_artifact(out)
    assert spec["command"] == "simulate"
    assert spec["params"] == {"hurst": 0.5, "t": 1.0, "steps": 8, "seed": 7, "method": "cholesky", "paths": 1}
    assert len(rows) == 9
    assert rows[0] == {"path": 0, "t": 0.0, "value": 0.0}
    assert rows[-1]["t"] == 1.0


def test_same_spec_gives_identical_bytes(tmp_path):
    out = tmp_path / "path.csv"
    assert runner.invoke(app, _simulate_args(out)).exit_code == 0
    first = out.read_bytes()
    assert runner.invoke(app, _simulate_args(out)).exit_code == 0
    assert out.read_bytes() == first


def test_simulate_json_format(tmp_path):
    out = tmp_path / "paths.json"
    args = ["simulate", "--hurst", "0.3", "--steps", "4", "--paths", "2", "--out", str(out), "--format", "json"]
    assert runner.invoke(app, args).exit_code == 0
    spec, rows = read_artifact(out)
    assert spec["format"] == "json"
    assert [r["path"] for r in rows] == [0] * 5 + [1] * 5


def test_bounds_counterexample(tmp_path):
    out = tmp_path / "ce.csv"
    args = ["bounds", "--case", "ii-counterexample", "--hurst", "0.5", "--b", "1", "--deltas", "0.01,0.001", "--out", str(out)]
    result = runner.invoke(app, args)
    assert result.exit_code == 0, result.output
    _, rows = read_artifact(out)
    assert [r["delta"] for r in rows] == [0.01, 0.001]
    assert rows[0]["ratio"] == pytest.approx(0.0196, abs=1e-4)
    assert rows[1]["ratio"] == pytest.approx(0.001996, abs=1e-6)


def test_bounds_scan_prints_table():
    result = runner.invoke(app, ["bounds", "--case", "iii", "--hurst", "0.4", "--samples", "500"])
    assert result.exit_code == 0, result.output


@pytest.mark.parametrize(
    "args",
    [
        ["simulate", "--hurst", "1.0"],
        ["simulate", "--steps", "8"],
        ["tanaka", "--hurst", "0.3", "--paths", "2", "--steps", "8"],
        ["chaos", "--hurst", "0.7"],
        ["dslt", "--hurst", "0.5", "--eps", "0"],
        ["bounds", "--hurst", "0.5", "--case", "ii-counterexample", "--deltas", "0.01,abc"],
        ["bounds", "--hurst", "0.5", "--case", "ii-counterexample", "--deltas", "0.001,0.01"],
        ["bounds", "--hurst", "0.5", "--case", "nope"],
        ["bounds", "--hurst", "0.7", "--case", "chain-1", "--samples", "10"],
        ["tanaka", "--hurst", "0.5", "--smoothed", "--eps", "0.01", "--bandwidth", "0.02", "--paths", "2", "--steps", "8"],
    ],
)
def test_invalid_specs_exit_with_usage_code(args):
    result = runner.invoke(app, args)
    assert result.exit_code == 2, result.output


def test_numerical_failure_exits_with_one(monkeypatch):
    def fail(_params):
        raise QuadratureError("refinement did not settle")

    monkeypatch.setitem(experiments.RUNNERS, Command.CHAOS, fail)
    result = runner.invoke(app, ["chaos", "--hurst", "0.5"])
    assert result.exit_code == 1


def test_batch_runs_valid_lines_and_reports_worst(tmp_path):
    good = tmp_path / "good.csv"
    lines = [
        "# comment",
        json.dumps({"command": "simulate", "params": {"hurst": 0.5, "steps": 4}, "output": str(good)}),
        "",
        json.dumps({"command": "simulate", "params": {"hurst": 1.5}}),
        json.dumps({"command": "nope"}),
    ]
    batch = tmp_path / "specs.jsonl"
    batch.write_text("\n".join(lines) + "\n")
    result = runner.invoke(app, ["batch", str(batch)])
    assert result.exit_code == 2
    _, rows = read_artifact(good)
    assert len(rows) == 5


def test_batch_all_valid(tmp_path):
    batch = tmp_path / "specs.jsonl"
    specs = [
        {"command": "bounds", "params": {"hurst": 0.5, "case": "lnd", "samples": 50, "max_j": 3}, "output": str(tmp_path / "lnd.csv")},
        {"command": "simulate", "params": {"hurst": 0.2, "steps": 4, "paths": 2}, "output": str(tmp_path / "sim.json"), "format": "json"},
    ]
    batch.write_text("\n".join(json.dumps(s) for s in specs))
    assert runner.invoke(app, ["batch", str(batch)]).exit_code == 0
    _, rows = read_artifact(tmp_path / "lnd.csv")
    assert rows[0]["min_ratio"] == pytest.approx(1.0, abs=1e-9)


def test_validate_names_violations():
    spec = ExperimentSpec(command=Command.DSLT, params={"hurst": 1.0, "eps": 0.0, "k": 3})
    errs = validate(spec)
    assert "hurst must lie strictly in (0,1)" in errs
    assert "mollifier scale must be positive" in errs
    assert "unknown parameter 'k' for dslt" in errs
    assert validate(ExperimentSpec(command=Command.DSLT, params={"hurst": 0.5})) == []
    assert validate(ExperimentSpec(command=Command.CHAOS, params={})) == ["missing required parameter 'hurst'"]


def test_resolved_params_fill_defaults():
    p = resolved_params(ExperimentSpec(command=Command.MOMENT2, params={"hurst": 0.4, "paths": 10}))
    assert p["paths"] == 10
    assert p["eps"] == 0.05 and p["tol"] == 1e-3


@pytest.mark.parametrize(
    "args,columns",
    [
        (["dslt", "--hurst", "0.4", "--steps", "16", "--paths", "4", "--y", "0.2"], {"mean", "std_error"}),
        (["tanaka", "--hurst", "0.5", "--steps", "16", "--paths", "3", "--smoothed"], {"rms"}),
        (["moment2", "--hurst", "0.5", "--steps", "16", "--paths", "3", "--tol", "1e-2"], {"mc_mean", "quad_value"}),
        (["moment2", "--hurst", "0.5", "--steps", "16", "--paths", "3", "--tol", "1e-2", "--y", "0.3"], {"y", "quad_value"}),
        (["chaos", "--hurst", "0.5", "--mmax", "2", "--tol", "1e-2"], {"m", "norm_sq"}),
    ],
)
def test_small_runs_of_every_estimator_command(tmp_path, args, columns):
    out = tmp_path / "run.csv"
    result = runner.invoke(app, args + ["--out", str(out)])
    assert result.exit_code == 0, result.output
    _, rows = read_artifact(out)
    assert rows and columns <= set(rows[0])


def test_smoothed_tanaka_takes_bandwidth_from_eps():
    spec = ExperimentSpec(command=Command.TANAKA, params={"hurst": 0.5, "eps": 0.02, "smoothed": True})
    assert resolved_params(spec)["bandwidth"] == 0.02
    assert validate(spec) == []
    clash = ExperimentSpec(command=Command.TANAKA, params={"hurst": 0.5, "eps": 0.02, "bandwidth": 0.01, "smoothed": True})
    assert validate(clash) == ["smoothed residual needs bandwidth = eps"]
    plain = ExperimentSpec(command=Command.TANAKA, params={"hurst": 0.5, "eps": 0.02})
    assert resolved_params(plain)["bandwidth"] == 0.01


def test_moment2_records_the_level(tmp_path):
    out = tmp_path / "m2.csv"
    args = ["moment2", "--hurst", "0.5", "--steps", "16", "--paths", "3", "--tol", "1e-2", "--y", "-0.4", "--out", str(out)]
    assert runner.invoke(app, args).exit_code == 0
    spec, rows = read_artifact(out)
    assert spec["params"]["y"] == -0.4
    assert rows[0]["y"] == -0.4
