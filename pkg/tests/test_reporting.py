import json
import math

import numpy as np
import pytest

from rzqlab.reporting import (ExperimentReport, SlopeFit, SweepRecord,
                              Verdict, fit_loglog, report_to_csv,
                              report_to_json, write_plot_script)


def test_fit_loglog_exact_power_law():
    xs = [2.0, 4.0, 8.0, 16.0]
    ys = [5.0 * x ** -1.5 for x in xs]
    fit = fit_loglog(xs, ys)
    assert fit.slope == pytest.approx(-1.5, abs=1e-12)
    assert fit.stderr == pytest.approx(0.0, abs=1e-10)
    assert fit.reliable


def test_fit_loglog_drops_transient():
    xs = [2.0, 4.0, 8.0, 16.0, 32.0]
    ys = [5.0 * x ** -2.0 for x in xs]
    ys[0] *= 50.0  # out-of-regime smallest point
    fit = fit_loglog(xs, ys)
    assert fit.dropped == (2.0,)
    assert fit.slope == pytest.approx(-2.0, abs=1e-10)


def test_fit_loglog_validation():
    with pytest.raises(ValueError):
        fit_loglog([1.0], [1.0])
    with pytest.raises(ValueError):
        fit_loglog([1.0, 2.0], [1.0, -1.0])


def test_reliability_needs_four_points():
    fit = SlopeFit(-2.0, 0.01, 0.0, 3)
    assert not fit.reliable


def test_sweep_record_rejects_nonfinite():
    with pytest.raises(ValueError):
        SweepRecord("n", 16, {"x": math.nan})
    SweepRecord("n", 16, {"x": 0.0, "y": None})  # ok


def build_report():
    rep = ExperimentReport("demo", {"s": 4.0}, seed=3)
    rep.add_record(SweepRecord("n", 16, {"a": 1.0, "b": 2.0}))
    rep.add_record(SweepRecord("n", 32, {"a": 0.5, "c": 7.0}))
    rep.add_slope("a", SlopeFit(-1.0, 0.0, 0.0, 2))
    rep.add_verdict("ok", Verdict(True, "a <= 1", 1.0))
    return rep


def test_report_csv_union_columns(tmp_path):
    rep = build_report()
    path = tmp_path / "r.csv"
    report_to_csv(rep, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "n,a,b,c,divergent"
    assert lines[2].startswith("32,0.5,,7,")


def test_report_json_roundtrip(tmp_path):
    rep = build_report()
    path = tmp_path / "r.json"
    report_to_json(rep, path)
    doc = json.loads(path.read_text())
    assert doc["name"] == "demo"
    assert doc["seed"] == 3
    assert doc["verdicts"]["ok"]["passed"] is True
    assert doc["records"][0]["measurements"]["a"] == 1.0


def test_report_deterministic_bytes(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    report_to_csv(build_report(), a)
    report_to_csv(build_report(), b)
    assert a.read_bytes() == b.read_bytes()


def test_plot_script_is_python(tmp_path):
    rep = build_report()
    path = tmp_path / "plot.py"
    write_plot_script(rep, "r.csv", path)
    src = path.read_text()
    compile(src, str(path), "exec")
    assert "matplotlib" in src


def test_all_passed():
    rep = build_report()
    assert rep.all_passed
    rep.add_verdict("bad", Verdict(False, "x", 0.0))
    assert not rep.all_passed
