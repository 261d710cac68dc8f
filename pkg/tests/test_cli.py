import json

import pytest

from exchange_kinetics import __version__
from exchange_kinetics.cli.io import read_pmf_csv
from exchange_kinetics.cli.main import main
from exchange_kinetics.mean_field.step_info import MeanFieldStepInfo
from exchange_kinetics.monte_carlo.step_info import ExchangeStepInfo


def load(path):
    return json.loads(path.read_text())


def test_equilibrium_mode(tmp_path):
    assert main(["--mode", "equilibrium", "--mu", "1", "--nu", "0.5", "--out", str(tmp_path)]) == 0
    report = load(tmp_path / "equilibrium.json")
    assert report["p0_star"] == pytest.approx(0.25)
    assert report["r_star"] == pytest.approx(0.5)
    assert report["laplace"]["rho0"] > 0
    assert set(report["decay_rates"]) == {"left", "right"}
    pmf = read_pmf_csv(tmp_path / "pmf_equilibrium.csv")
    assert pmf.at(0) == pytest.approx(0.25)

    manifest = load(tmp_path / "manifest.json")
    assert manifest["version"] == __version__
    assert manifest["mode"] == "equilibrium"
    assert manifest["config"]["nu"] == 0.5
    assert manifest["files"] == ["equilibrium.json", "pmf_equilibrium.csv"]
    assert "seed" not in manifest


def test_equilibrium_without_bank(tmp_path):
    assert main(["--mu", "4", "--nu", "0", "--out", str(tmp_path)]) == 0
    report = load(tmp_path / "equilibrium.json")
    assert report["laplace"] is None
    assert report["decay_rates"]["left"] is None


def test_linearize_mode(tmp_path):
    assert main(["--mode", "linearize", "--mu", "0.01", "--nu", "0.001", "--out", str(tmp_path)]) == 0
    report = load(tmp_path / "linearization.json")
    assert report["in_G"] is True
    assert report["margin"] == pytest.approx(1.6647e-5, rel=5e-3)


def test_abm_without_events(tmp_path):
    args = ["--mode", "abm", "--n-agents", "4", "--mu", "10", "--nu", "0.5", "--events", "0", "--out", str(tmp_path)]
    assert main(args) == 0
    lines = (tmp_path / "trajectory.csv").read_text().splitlines()
    assert lines == [",".join(ExchangeStepInfo.columns), "0,0,20,0,0,0"]
    summary = load(tmp_path / "summary.json")
    assert summary["events"] == 0
    assert summary["params"] == {"n_agents": 4, "mu": 10.0, "nu": 0.5, "lambda": 1.0}
    manifest = load(tmp_path / "manifest.json")
    assert manifest["seed"] == 0
    assert manifest["generator"] == "PCG64"


def test_reproduction_preset(tmp_path):
    assert main(["--preset", "fig2", "--events", "0", "--out", str(tmp_path)]) == 0
    config = load(tmp_path / "manifest.json")["config"]
    assert config["preset"] == "fig2"
    assert (config["mode"], config["n-agents"], config["mu"], config["nu"]) == ("abm", 10_000, 10.0, 0.4)
    assert (tmp_path / "trajectory.csv").read_text().splitlines()[1] == "0,0,40000,0,0,0"


def test_abm_is_reproducible(tmp_path):
    outputs = []
    for name in ("a", "b"):
        out = tmp_path / name
        args = ["--mode", "abm", "--n-agents", "20", "--mu", "3", "--nu", "0.5", "--events", "5000", "--seed", "4"]
        assert main(args + ["--snapshots", "50", "--out", str(out)]) == 0
        outputs.append(out)
    for name in ("trajectory.csv", "pmf_final.csv", "pmf_1000.csv"):
        assert (outputs[0] / name).read_bytes() == (outputs[1] / name).read_bytes()


def test_abm_replicas(tmp_path):
    args = ["--mode", "abm", "--n-agents", "20", "--mu", "3", "--nu", "0.5", "--events", "2000", "--replicas", "3"]
    assert main(args + ["--out", str(tmp_path)]) == 0
    summary = load(tmp_path / "summary.json")
    assert summary["seeds"] == [0, 1, 2]
    assert len(summary["replicas"]) == 3


def test_meanfield_mode(tmp_path):
    args = ["--mode", "meanfield", "--mu", "10", "--nu", "0.4", "--t-end", "5", "--snapshots", "1,5"]
    assert main(args + ["--out", str(tmp_path)]) == 0
    header = (tmp_path / "trajectory.csv").read_text().splitlines()[0]
    assert header == ",".join(MeanFieldStepInfo.columns)
    for name in ("pmf_t1.csv", "pmf_t5.csv", "pmf_final.csv"):
        assert (tmp_path / name).exists()
    report = load(tmp_path / "report.json")
    assert report["t_star"] is None
    assert report["phase"] == "PhaseI"
    assert not (tmp_path / "decay_fit.json").exists()


def test_gini_sweep_mode(tmp_path):
    args = ["--mode", "gini-sweep", "--mu", "3", "--nus", "0,0.5", "--t-end", "5", "--out", str(tmp_path)]
    assert main(args) == 0
    assert (tmp_path / "gini_nu_0.csv").exists()
    assert (tmp_path / "gini_nu_0.5.csv").exists()
    report = load(tmp_path / "gini_sweep.json")
    assert set(report) == {"0", "0.5"}
    assert report["0"]["t_star"] == 0.0


def test_compare_mode(tmp_path):
    args = ["--mode", "compare", "--n-agents", "10", "--mu", "2", "--nu", "0.5", "--replicas", "2", "--t-end", "2"]
    assert main(args + ["--out", str(tmp_path)]) == 0
    report = load(tmp_path / "comparison.json")
    assert report["finite_size_warning"] is True
    assert [row["events"] for row in report["snapshots"]] == [20]
    assert 0 <= report["max_total_variation"] <= 1
    first = (tmp_path / "comparison.json").read_bytes()
    assert main(args + ["--out", str(tmp_path)]) == 0
    assert (tmp_path / "comparison.json").read_bytes() == first


def test_config_errors_exit_with_two(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("nu = -1\n")
    assert main(["--config", str(cfg), "--out", str(tmp_path / "x")]) == 2
    assert "nu" in capsys.readouterr().err
    assert not (tmp_path / "x").exists()
    assert main(["--no-such-flag", "1"]) == 2
    assert main(["--mode", "abm", "--n-agents", "3", "--mu", "1", "--nu", "0.5"]) == 2


def test_help_exits_cleanly(capsys):
    assert main(["--help"]) == 0
    assert "--mode" in capsys.readouterr().out


def test_runtime_errors_exit_with_one(tmp_path, capsys):
    assert main(["--mode", "linearize", "--nu", "0", "--out", str(tmp_path)]) == 1
    assert "nu must be positive" in capsys.readouterr().err


@pytest.mark.slow
def test_compare_agrees_with_mean_field(tmp_path):
    args = ["--mode", "compare", "--n-agents", "1000", "--mu", "5", "--nu", "0.2", "--replicas", "16"]
    assert main(args + ["--snapshots", "10,25,50", "--out", str(tmp_path)]) == 0
    report = load(tmp_path / "comparison.json")
    assert report["finite_size_warning"] is False
    assert report["max_total_variation"] < 0.05
