import json
import os

import pytest
import yaml
from click.testing import CliRunner

from multicoap.cli import main
from multicoap.configs import default_configs
from multicoap.simgen import SimConfig

SIM = {"n": [30, 40], "p": 12, "d": 2, "q": 1, "qs": [1, 1], "r0": 1, "rho_a": 2.0, "rho_b": 2.0, "rho_z": 0.5}


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def simulated(tmp_path, runner):
    config = tmp_path / "sim.yaml"
    config.write_text(yaml.safe_dump(SIM))
    out = tmp_path / "data"
    result = runner.invoke(main, ["simulate", "--config", str(config), "--out-dir", str(out), "--seed", "4"])
    assert result.exit_code == 0, result.output
    return out


def test_bundled_configs():
    assert SimConfig.from_config(default_configs["example1"]) == SimConfig()
    example5 = SimConfig.from_config(default_configs["example5"])
    assert (example5.d, example5.r0, example5.n) == (3, 3, [150, 200])


def test_simulate(simulated):
    files = set(os.listdir(simulated))
    assert {"X_1.csv", "Z_2.csv", "a_1.csv", "manifest.json", "truth"} <= files
    with open(simulated / "manifest.json") as f:
        manifest = json.load(f)
    assert manifest["command"] == "simulate"
    assert manifest["seeds"]["seed"] == 4
    assert manifest["config"]["p"] == 12


def test_fit(simulated, tmp_path, runner):
    out = tmp_path / "fit"
    result = runner.invoke(
        main,
        ["fit", "--data-dir", str(simulated), "--out-dir", str(out), "--q", "1", "--qs", "1", "--rank", "1"],
    )
    assert result.exit_code == 0, result.output
    assert "converged=" in result.output
    with open(out / "fit_summary.json") as f:
        summary = json.load(f)
    assert summary["qs"] == [1, 1]
    assert "fit" in summary["timings"]
    assert {"A.csv", "B_2.csv", "Mh_1.csv", "manifest.json"} <= set(os.listdir(out))


def test_fit_reads_config_file(simulated, tmp_path, runner):
    config = tmp_path / "fit.json"
    config.write_text(json.dumps({"q": 2, "qs": [1, 0], "max_iter": 3}))
    out = tmp_path / "fit"
    result = runner.invoke(
        main, ["fit", "--data-dir", str(simulated), "--config", str(config), "--out-dir", str(out), "--q", "1"]
    )
    assert result.exit_code == 0, result.output
    with open(out / "manifest.json") as f:
        manifest = json.load(f)
    assert manifest["config"]["q"] == 1
    assert manifest["config"]["qs"] == [1, 0]
    assert manifest["config"]["max_iter"] == 3


def test_fit_threads_from_environment(simulated, tmp_path, runner):
    out = tmp_path / "fit"
    result = runner.invoke(
        main,
        ["fit", "--data-dir", str(simulated), "--out-dir", str(out), "--q", "1", "--qs", "1"],
        env={"MULTICOAP_THREADS": "2"},
    )
    assert result.exit_code == 0, result.output
    with open(out / "manifest.json") as f:
        assert json.load(f)["config"]["threads"] == 2


def test_select(simulated, tmp_path, runner):
    out = tmp_path / "select"
    result = runner.invoke(
        main,
        ["select", "--data-dir", str(simulated), "--out-dir", str(out), "--q-max", "3", "--qs-max", "2", "--r-max", "2"],
    )
    assert result.exit_code == 0, result.output
    with open(out / "selection.json") as f:
        selection = json.load(f)
    assert 1 <= selection["q_hat"] <= 3
    assert len(selection["qs_hat"]) == 2
    assert selection["rank"] is not None
    assert result.output.strip().splitlines()[-1].startswith(f"q={selection['q_hat']}")


def test_benchmark(tmp_path, runner, tiny_scenarios):
    out = tmp_path / "bench"
    result = runner.invoke(main, ["benchmark", "tiny", "--out-dir", str(out), "--replicates", "1"])
    assert result.exit_code == 0, result.output
    assert {"results.csv", "summary.csv", "manifest.json"} <= set(os.listdir(out))
    assert "A_tr" in result.output


@pytest.mark.parametrize(
    "args, code, name",
    [
        (["--q", "6", "--qs", "6"], 2, "IdentifiabilityBoundError"),
        ([], 2, "InvalidConfigError"),
        (["--q", "1", "--qs", "a,b"], 2, "InvalidConfigError"),
    ],
)
def test_fit_configuration_errors(simulated, tmp_path, runner, args, code, name):
    result = runner.invoke(main, ["fit", "--data-dir", str(simulated), "--out-dir", str(tmp_path / "o"), *args])
    assert result.exit_code == code
    assert name in result.output


def test_data_errors(tmp_path, runner, simulated):
    result = runner.invoke(main, ["fit", "--data-dir", str(tmp_path / "missing"), "--out-dir", str(tmp_path), "--q", "1"])
    assert result.exit_code == 3

    blocker = tmp_path / "blocker"
    blocker.write_text("")
    result = runner.invoke(
        main, ["fit", "--data-dir", str(simulated), "--out-dir", str(blocker / "out"), "--q", "1", "--qs", "1"]
    )
    assert result.exit_code == 3
    assert "DataFileError" in result.output


def test_unknown_scenario(tmp_path, runner):
    result = runner.invoke(main, ["benchmark", "nope", "--out-dir", str(tmp_path)])
    assert result.exit_code == 2
    assert "ScenarioNotFound" in result.output
