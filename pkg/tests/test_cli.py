import json
import os

import pytest

from rzqlab import cli


def run(argv, cwd):
    old = os.getcwd()
    os.chdir(cwd)
    try:
        return cli.main(argv)
    finally:
        os.chdir(old)


def test_no_subcommand_is_usage_error(tmp_path, capsys):
    assert run([], tmp_path) == cli.EXIT_USAGE


def test_simulate_zero_profile(tmp_path):
    code = run(["simulate", "--profile", "zero", "--t-end", "0.05",
                "--dt", "0.01", "--out", "sim"], tmp_path)
    assert code == cli.EXIT_OK
    assert (tmp_path / "sim" / "trajectory.csv").exists()
    meta = json.loads((tmp_path / "sim" / "metadata.json").read_text())
    assert meta["subcommand"] == "simulate"
    assert meta["blow_up_t"] is None


def test_simulate_cosine_bounded(tmp_path):
    code = run(["simulate", "--profile", "cosine", "--amp", "0.1",
                "--s", "4", "--dt", "0.002", "--t-end", "0.2",
                "--out", "sim"], tmp_path)
    assert code == cli.EXIT_OK
    rows = (tmp_path / "sim" / "trajectory.csv").read_text().splitlines()[1:]
    norms = [float(r.split(",")[1]) for r in rows]
    assert max(norms) <= 2.0 * norms[0]


def test_simulate_dt_above_ceiling(tmp_path, capsys):
    code = run(["simulate", "--dt", "10", "--out", "sim"], tmp_path)
    assert code == cli.EXIT_USAGE
    assert "dt" in capsys.readouterr().err


def test_unknown_experiment(tmp_path, capsys):
    assert run(["experiment", "bogus"], tmp_path) == cli.EXIT_USAGE
    assert "valid names" in capsys.readouterr().err


def test_experiment_illposed(tmp_path):
    code = run(["experiment", "illposed", "--out", "illp"], tmp_path)
    assert code == cli.EXIT_OK
    out = tmp_path / "illp"
    assert (out / "report.json").exists()
    assert (out / "report.csv").exists()
    assert (out / "plot_report.py").exists()
    doc = json.loads((out / "report.json").read_text())
    assert all(v["passed"] for v in doc["verdicts"].values())


def test_experiment_determinism(tmp_path):
    for out in ("a", "b"):
        code = run(["experiment", "lemmas", "--seed", "7", "--count", "20",
                    "--out", out], tmp_path)
        assert code == cli.EXIT_OK
    assert ((tmp_path / "a" / "report.csv").read_bytes()
            == (tmp_path / "b" / "report.csv").read_bytes())
    assert ((tmp_path / "a" / "report.json").read_bytes()
            == (tmp_path / "b" / "report.json").read_bytes())


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "job.cfg"
    cfg.write_text("profile = zero\nt_end = 0.05\ndt = 0.025\n")
    code = run(["simulate", "--config", str(cfg), "--dt", "0.01",
                "--out", "sim"], tmp_path)
    assert code == cli.EXIT_OK
    meta = json.loads((tmp_path / "sim" / "metadata.json").read_text())
    assert meta["config"]["profile"] == "zero"  # from file
    assert meta["config"]["dt"] == 0.01  # flag wins over file


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "job.cfg"
    cfg.write_text("does_not_exist = 1\n")
    code = run(["simulate", "--config", str(cfg)], tmp_path)
    assert code == cli.EXIT_USAGE
    assert "does_not_exist" in capsys.readouterr().err


def test_config_file_missing(tmp_path, capsys):
    code = run(["simulate", "--config", "nope.cfg"], tmp_path)
    assert code == cli.EXIT_USAGE


def test_peakons_single(tmp_path):
    code = run(["peakons", "--p", "1", "--q", "0", "--t-end", "1",
                "--out", "pk"], tmp_path)
    assert code == cli.EXIT_OK
    rows = (tmp_path / "pk" / "trajectory.csv").read_text().splitlines()
    assert rows[0] == "t,q_1,p_1,H,P"
    last = rows[-1].split(",")
    assert abs(float(last[1]) - float(last[0])) < 1e-8  # q(t) = t


def test_peakons_preset_conservation(tmp_path):
    code = run(["peakons", "--t-end", "2", "--out", "pk"], tmp_path)
    assert code == cli.EXIT_OK
    meta = json.loads((tmp_path / "pk" / "metadata.json").read_text())
    assert meta["h_drift"] <= 1e-8


def test_peakons_empty_is_usage_error(tmp_path, capsys):
    code = run(["peakons", "--p", "1,2", "--q", "0"], tmp_path)
    assert code == cli.EXIT_USAGE
