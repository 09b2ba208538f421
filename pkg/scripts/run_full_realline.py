#!/usr/bin/env python3
"""Full-size real-line surrogate study: n up to 256 on the matching big box.

This is the heavyweight companion of the reduced CI run; expect tens of
minutes.  Writes report.json / report.csv / plot_report.py under --out.
"""

import argparse
import json
import pathlib
import time

from rzqlab.experiments import nonuniform_dependence_realline
from rzqlab.reporting import report_to_csv, report_to_json, write_plot_script


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="realline_full")
    ap.add_argument("--s", type=float, default=4.0)
    ap.add_argument("--sigma", type=float, default=2.8)
    ap.add_argument("--delta", type=float, default=0.5)
    ap.add_argument("--n-list", default="16,32,64,128,256")
    args = ap.parse_args()

    n_list = [int(v) for v in args.n_list.split(",")]
    t0 = time.time()
    report = nonuniform_dependence_realline(args.s, args.sigma, args.delta,
                                            n_list)
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report_to_json(report, out / "report.json")
    report_to_csv(report, out / "report.csv")
    write_plot_script(report, out / "plot_report.py", "report.csv")
    print(json.dumps({name: v.passed for name, v in report.verdicts.items()},
                     indent=2))
    print(f"all_passed={report.all_passed}  ({time.time() - t0:.0f} s)")
    return 0 if report.all_passed else 2


if __name__ == "__main__":
    raise SystemExit(main())
