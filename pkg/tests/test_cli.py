import json
import os

import pytest

from soiltip.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, main


def run(args, tmp_path):
    return main(args + ["--output-dir", str(tmp_path)])


def test_manifold_writes_csv(tmp_path, capsys):
    assert run(["manifold", "--Ta", "0", "--n", "11"], tmp_path) == EXIT_OK
    lines = (tmp_path / "manifold.csv").read_text().splitlines()
    assert lines[0] == "Ta,T,C,branch_label,stability"
    assert len(lines) == 12
    assert "folds at" in capsys.readouterr().out


def test_manifold_pulse_axis(tmp_path):
    assert run(["manifold", "--Ta-max", "5", "--n", "21"], tmp_path) == EXIT_OK
    assert (tmp_path / "manifold.csv").read_text().startswith("s,T,C,branch_label,stability")


def test_folded_writes_csv(tmp_path):
    assert run(["folded", "--r", "0.111", "--Ta-plus", "1.5"], tmp_path) == EXIT_OK
    lines = (tmp_path / "folded.csv").read_text().splitlines()
    assert lines[0] == "Ta_plus,r,T,s,kind,eig1,eig2"
    assert len(lines) == 3


def test_simulate_unstable_manifold(tmp_path):
    assert run(["simulate", "--forcing", "tanh", "--amp", "5", "--rate", "0.1"], tmp_path) == EXIT_OK
    data = json.loads((tmp_path / "simulate_TanhShift_5_0.1.json").read_text())
    assert data["class"] == "RTIPPING"
    assert (tmp_path / "simulate_TanhShift_5_0.1.csv").read_text().startswith("t,T,C,s,Ta")


def test_simulate_scenario(tmp_path):
    assert run(["simulate", "--scenario", "fig2"], tmp_path) == EXIT_OK
    data = json.loads((tmp_path / "simulate_fig2.json").read_text())
    assert {"onset_year", "duration_years", "peak_T", "mean_warming_at_tip"} <= set(data)


def test_simulate_from_config(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("forcing_kind=TanhShift\nta_plus=5\nr=0.02\n")
    assert run(["simulate", "--config", str(cfg)], tmp_path) == EXIT_OK
    assert json.loads((tmp_path / "simulate_TanhShift_5_0.02.json").read_text())["class"] == "TRACKING"


def test_layer_rate(tmp_path):
    assert run(["layer-rate", "--Ta-max", "15", "--tol", "1e-4"], tmp_path) == EXIT_OK
    assert json.loads((tmp_path / "layer_rate.json").read_text())["r_c"] == pytest.approx(15.14, abs=0.05)


def test_diagram_reproducible(tmp_path):
    args = ["diagram", "--forcing", "tanh", "--amp", "4:5:2", "--rate", "log:0.02:0.1:3"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(args, a) == EXIT_OK
    assert run(args + ["--jobs", "2"], b) == EXIT_OK
    assert (a / "diagram_tanh.csv").read_bytes() == (b / "diagram_tanh.csv").read_bytes()


def test_output_dir_from_env(tmp_path, monkeypatch):
    monkeypatch.setenv("SOILTIP_OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["manifold", "--n", "5"]) == EXIT_OK
    assert os.path.exists(tmp_path / "env" / "manifold.csv")


@pytest.mark.parametrize(
    "args",
    [
        ["nonsense"],
        ["simulate"],
        ["simulate", "--forcing", "tanh", "--amp", "5"],
        ["diagram", "--forcing", "tanh", "--amp", "1:0:3", "--rate", "0.1:0.2:2"],
        ["diagram", "--forcing", "tanh", "--amp", "1:2:2", "--rate", "0.1:0.2:2", "--jobs", "0"],
        ["layer-rate", "--bracket", "5"],
    ],
)
def test_usage_errors(args, tmp_path):
    assert run(args, tmp_path) == EXIT_CONFIG


def test_bad_config_value(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("Tstar=70\nmu=-1\n")
    assert run(["manifold", "--config", str(cfg)], tmp_path) == EXIT_CONFIG
    assert "line 2" in capsys.readouterr().err


def test_numerical_failure_exit(tmp_path):
    # both ends without head: no boundary inside the bracket
    assert run(["frozen-canard", "--bracket", "53:53.5", "--tol", "1e-3"], tmp_path) == EXIT_NUMERIC


def test_help_exits_ok():
    assert main(["--help"]) == EXIT_OK
