#!/usr/bin/env python3
"""Run every experiment at its full-size parameters via the CLI.

Each experiment gets its own subdirectory under --out with report.json,
report.csv, plot_report.py, and metadata.json.  The real-line study is the
slow one; pass --skip-slow to leave it to run_full_realline.py.
"""

import argparse
import pathlib
import subprocess
import sys

EXPERIMENTS = [
    ("residual-scaling", []),
    ("nonuniform-periodic", ["--n-list", "64,128,256"]),
    ("mollifier", []),
    ("continuous-dependence", []),
    ("illposed", []),
    ("lemmas", ["--count", "200"]),
    ("nonuniform-realline", ["--n-list", "16,32,64,128,256"]),
]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="experiment_reports")
    ap.add_argument("--skip-slow", action="store_true",
                    help="skip the full-size real-line study")
    args = ap.parse_args()

    out = pathlib.Path(args.out)
    worst = 0
    for name, extra in EXPERIMENTS:
        if args.skip_slow and name == "nonuniform-realline":
            continue
        cmd = [sys.executable, "-m", "rzqlab.cli", "experiment", name,
               "--out", str(out / name)] + extra
        print("+", " ".join(cmd), flush=True)
        rc = subprocess.run(cmd).returncode
        worst = max(worst, rc)
    return worst


if __name__ == "__main__":
    raise SystemExit(main())
