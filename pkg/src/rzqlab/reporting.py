"""Sweep records, slope fits, verdicts, and report serialization.

Reports serialize deterministically: identical configuration and seed
produce byte-identical CSV and JSON artifacts (floats via repr-stable
'%.17g' formatting, keys in insertion order).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

CODE_VERSION = "rzqlab-0.1.0"


@dataclass(frozen=True)
class SlopeFit:
    """Ordinary least squares fit of log(y) against log(x)."""

    slope: float
    stderr: float
    intercept: float
    n_points: int
    dropped: tuple = ()

    @property
    def reliable(self) -> bool:
        """Verdicts require stderr below 25% of |slope|."""
        return self.n_points >= 4 and self.stderr < 0.25 * abs(self.slope)


def fit_loglog(xs: Sequence[float], ys: Sequence[float],
               drop_transient: bool = True) -> SlopeFit:
    """OLS on log-log points.  The smallest x is dropped when its residual
    exceeds 3x the fit RMS (transient-regime guard)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) < 2 or np.any(xs <= 0.0) or np.any(ys <= 0.0):
        raise ValueError("log-log fit needs >= 2 strictly positive points")
    order = np.argsort(xs)
    lx, ly = np.log(xs[order]), np.log(ys[order])

    def ols(lx, ly):
        A = np.vstack([lx, np.ones(len(lx))]).T
        coef, _, _, _ = np.linalg.lstsq(A, ly, rcond=None)
        resid = ly - A @ coef
        rms = float(np.sqrt(np.mean(resid ** 2)))
        n = len(lx)
        if n > 2 and rms > 0.0:
            sxx = float(np.sum((lx - lx.mean()) ** 2))
            stderr = math.sqrt(np.sum(resid ** 2) / (n - 2) / sxx)
        else:
            stderr = 0.0
        return float(coef[0]), float(coef[1]), stderr, resid, rms

    if drop_transient and len(lx) >= 4:
        # leave-one-out: fit without the smallest x and see whether it is an
        # outlier relative to that fit (0.1 log-unit floor guards exact fits)
        slope, intercept, stderr, _, rms = ols(lx[1:], ly[1:])
        resid0 = ly[0] - (slope * lx[0] + intercept)
        if abs(resid0) > max(3.0 * rms, 0.1):
            return SlopeFit(slope, stderr, intercept, len(lx) - 1,
                            (float(xs[order][0]),))
    slope, intercept, stderr, _, _ = ols(lx, ly)
    return SlopeFit(slope, stderr, intercept, len(lx), ())


@dataclass(frozen=True)
class SweepRecord:
    """One (parameter -> measurements) row of an experiment."""

    parameter_name: str
    parameter_value: float
    measurements: dict
    divergent: bool = False

    def __post_init__(self):
        for key, val in self.measurements.items():
            if val is None:
                continue
            if not np.isfinite(val):
                raise ValueError(
                    f"measurement {key!r} is not finite; tag the record "
                    "divergent instead")


@dataclass(frozen=True)
class Verdict:
    passed: bool
    threshold: str
    measured: float
    detail: str = ""


@dataclass
class ExperimentReport:
    name: str
    config: dict
    seed: Optional[int] = None
    records: list = field(default_factory=list)
    fitted_slopes: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def add_record(self, record: SweepRecord) -> None:
        self.records.append(record)

    def add_slope(self, name: str, fit: SlopeFit) -> None:
        self.fitted_slopes[name] = fit

    def add_verdict(self, name: str, verdict: Verdict) -> None:
        self.verdicts[name] = verdict

    @property
    def all_passed(self) -> bool:
        return all(v.passed for v in self.verdicts.values())


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def report_to_csv(report: ExperimentReport, path) -> None:
    """Flat CSV: one row per record, measurement names as columns (union,
    in first-seen order)."""
    columns: list[str] = []
    for rec in report.records:
        for key in rec.measurements:
            if key not in columns:
                columns.append(key)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([report.records[0].parameter_name if report.records
                    else "parameter"] + columns + ["divergent"])
        for rec in report.records:
            w.writerow([_fmt(rec.parameter_value)]
                       + [_fmt(rec.measurements.get(c)) for c in columns]
                       + [_fmt(rec.divergent)])


def _jsonable(obj):
    if isinstance(obj, (SlopeFit, Verdict)):
        return {k: _jsonable(v) for k, v in vars(obj).items()}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj]
    return obj


def report_to_json(report: ExperimentReport, path) -> None:
    doc = {
        "name": report.name,
        "code_version": CODE_VERSION,
        "seed": report.seed,
        "config": _jsonable(report.config),
        "records": [
            {
                "parameter_name": r.parameter_name,
                "parameter_value": _jsonable(r.parameter_value),
                "measurements": _jsonable(r.measurements),
                "divergent": r.divergent,
            }
            for r in report.records
        ],
        "fitted_slopes": _jsonable(report.fitted_slopes),
        "verdicts": _jsonable(report.verdicts),
        "notes": list(report.notes),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=False)
        fh.write("\n")


def write_plot_script(report: ExperimentReport, csv_name: str, path) -> None:
    """Emit a small matplotlib script that consumes the report CSV."""
    param = report.records[0].parameter_name if report.records else "parameter"
    lines = [
        "#!/usr/bin/env python3",
        f'"""Plot the {report.name} report from {csv_name}."""',
        "import csv",
        "import math",
        "import matplotlib",
        'matplotlib.use("Agg")',
        "import matplotlib.pyplot as plt",
        "",
        f'rows = list(csv.DictReader(open("{csv_name}")))',
        f'x = [float(r["{param}"]) for r in rows]',
        'names = [k for k in rows[0] if k not in '
        f'("{param}", "divergent")]',
        "fig, ax = plt.subplots(figsize=(7, 5))",
        "for name in names:",
        "    y = []",
        "    for r in rows:",
        '        v = r[name]',
        "        y.append(float(v) if v not in ('', 'None') else math.nan)",
        '    ax.plot(x, y, marker="o", label=name)',
        "if all(v > 0 for v in x):",
        '    ax.set_xscale("log")',
        '    ax.set_yscale("log")',
        f'ax.set_xlabel("{param}")',
        'ax.legend(fontsize=7)',
        f'ax.set_title("{report.name}")',
        "fig.tight_layout()",
        f'fig.savefig("{report.name}.png", dpi=150)',
        f'print("wrote {report.name}.png")',
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
