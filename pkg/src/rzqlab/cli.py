"""Command-line entry point.

Subcommands: simulate (time-step one datum and dump diagnostics),
experiment (run a named study and emit report artifacts), peakons (integrate
the N-peakon Hamiltonian system).

Exit codes: 0 success, 1 usage or configuration error, 2 verdict failure,
3 blow-up signal.  Config precedence: command-line flag, then config file
(flat key=value lines), then built-in default.  Identical config and seed
produce byte-identical CSV artifacts.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import dynamics, experiments, peakons, spectral
from .dynamics import EvolutionConfig, RhsForm
from .errors import (BlowUpError, ConfigurationError, DomainError,
                     StabilityError)
from .reporting import (CODE_VERSION, report_to_csv, report_to_json,
                        write_plot_script)
from .spectral import Grid, PeriodicField

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERDICT = 2
EXIT_BLOWUP = 3

EXPERIMENT_NAMES = ("nonuniform-periodic", "nonuniform-realline", "mollifier",
                    "continuous-dependence", "illposed", "lemmas",
                    "residual-scaling")


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; the exit-code contract
    # reserves 2 for verdict failures, so route them through an exception
    def error(self, message):
        raise _Usage(message)


def _read_config_file(path: str) -> dict:
    if not os.path.exists(path):
        raise _Usage(f"config file not found: {path}")
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise _Usage(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, val = line.split("=", 1)
            out[key.strip().replace("-", "_")] = val.strip()
    return out


def _parse_list(text: str, cast):
    return [cast(tok) for tok in text.replace(",", " ").split()]


def _merge(args: argparse.Namespace, defaults: dict) -> dict:
    """flag > config file > default; values typed like the defaults."""
    file_cfg = _read_config_file(args.config) if args.config else {}
    merged = {}
    for key, default in defaults.items():
        flag = getattr(args, key, None)
        raw = file_cfg.pop(key, None)
        if flag is not None:
            merged[key] = flag
            continue
        if raw is not None:
            try:
                if isinstance(default, list):
                    merged[key] = _parse_list(raw, type(default[0]))
                elif isinstance(default, bool):
                    merged[key] = raw.lower() in ("1", "true", "yes")
                elif default is None:
                    merged[key] = raw
                else:
                    merged[key] = type(default)(raw)
            except ValueError as exc:
                raise _Usage(f"config key {key!r}: {exc}") from None
            continue
        merged[key] = default
    if file_cfg:
        raise _Usage(f"unknown config key {sorted(file_cfg)[0]!r}")
    return merged


def _write_metadata(out_dir: str, subcommand: str, cfg: dict,
                    extra: dict | None = None) -> None:
    doc = {"subcommand": subcommand, "code_version": CODE_VERSION,
           "config": cfg}
    if extra:
        doc.update(extra)
    with open(os.path.join(out_dir, "metadata.json"), "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# simulate

SIMULATE_DEFAULTS = {
    "profile": "cosine", "amp": 0.1, "s": 4.0, "grid_n": 256,
    "box_length": 2.0 * math.pi, "dt": 1e-3, "t_end": 1.0,
    "rhs": "nonlocal", "epsilon": 0.5, "seed": 0, "out": "rzqlab-out/simulate",
}


def _initial_datum(cfg: dict, grid: Grid) -> PeriodicField:
    profile = cfg["profile"]
    if profile == "zero":
        return spectral.zeros(grid)
    if profile == "cosine":
        return PeriodicField(grid, cfg["amp"] * np.cos(grid.nodes))
    if profile == "random":
        rng = np.random.default_rng(cfg["seed"])
        f = spectral.random_field(grid, cfg["s"], rng)
        scale = spectral.sobolev_norm(f, cfg["s"])
        return PeriodicField(grid, cfg["amp"] * f.values / max(scale, 1e-300))
    if profile == "peakon":
        e = peakons.PeakonEnsemble(np.array([cfg["amp"]]), np.array([0.0]))
        return peakons.ensemble_to_field(e, grid)
    raise _Usage(f"unknown profile {profile!r} "
                 "(expected zero, cosine, random, peakon)")


def _trajectory_csv(traj, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "hs_norm", "mean", "sqrt_m_integral"])
        for i, t in enumerate(traj.times):
            sq = traj.sqrt_m_integrals[i]
            w.writerow([f"{t:.17g}", f"{traj.hs_norms[i]:.17g}",
                        f"{traj.means[i]:.17g}",
                        "" if sq is None else f"{sq:.17g}"])


def cmd_simulate(args) -> int:
    cfg = _merge(args, SIMULATE_DEFAULTS)
    grid = Grid(cfg["grid_n"], cfg["box_length"])
    u0 = _initial_datum(cfg, grid)
    if cfg["rhs"] == "mollified":
        form = RhsForm.mollified(cfg["epsilon"])
    else:
        try:
            form = RhsForm(cfg["rhs"])
        except ConfigurationError as exc:
            raise _Usage(str(exc)) from None
    ceiling = dynamics.stability_ceiling(u0)
    if cfg["dt"] > ceiling:
        raise _Usage(
            f"dt={cfg['dt']:g} exceeds the stability ceiling {ceiling:.3g} "
            "for this datum; lower --dt")
    econfig = EvolutionConfig(grid, cfg["dt"], cfg["t_end"], form,
                              norm_index=cfg["s"])
    os.makedirs(cfg["out"], exist_ok=True)
    blow_up = None
    try:
        traj = dynamics.evolve(u0, econfig)
    except BlowUpError as exc:
        traj = exc.trajectory
        blow_up = exc.t
    if traj is not None:
        _trajectory_csv(traj, os.path.join(cfg["out"], "trajectory.csv"))
        spectral.write_field_csv(traj.final,
                                 os.path.join(cfg["out"], "final_state.csv"))
    _write_metadata(cfg["out"], "simulate", cfg,
                    {"blow_up_t": blow_up, "stability_ceiling": ceiling})
    if blow_up is not None:
        print(f"blow-up signal at t={blow_up:g}; partial trajectory written",
              file=sys.stderr)
        return EXIT_BLOWUP
    print(f"wrote {cfg['out']}/trajectory.csv "
          f"({len(traj.times)} snapshots to t={cfg['t_end']:g})")
    return EXIT_OK


# ---------------------------------------------------------------------------
# experiment

EXPERIMENT_DEFAULTS = {
    "n_list": [16, 32, 64, 128, 256], "eps_list": [1.0, 0.5, 0.25, 0.125],
    "s": 4.0, "sigma": -1.0, "delta": 0.5, "dt": -1.0, "t_end": -1.0,
    "grid_n": -1, "box_length": -1.0, "seed": 0, "workers": 1,
    "count": 100, "amp": 0.05, "out": "",
}


def _rough_datum(grid: Grid, s: float, amp: float) -> PeriodicField:
    """Small-amplitude datum with coefficients at the H^s membership border
    (rough tail: every mollification scale is visible)."""
    k = grid.wavenumbers
    coeff = (1.0 + k * k) ** (-(s + 0.5 + 0.01) / 2.0)
    f = spectral.from_spectrum(coeff, grid)
    return PeriodicField(grid, amp * f.values
                         / spectral.sobolev_norm(f, s))


def _pick(value, default):
    return default if value is None or value < 0 else value


def _run_experiment(name: str, cfg: dict):
    s = cfg["s"]
    if name == "residual-scaling":
        grid = Grid(_pick(cfg["grid_n"], 2048))
        sigmas = [cfg["sigma"]] if cfg["sigma"] >= 0 else [2.75, 3.0, 3.2]
        return experiments.residual_scaling_study(s, sigmas, cfg["n_list"],
                                                  grid)
    if name == "nonuniform-periodic":
        grid = Grid(_pick(cfg["grid_n"], 1024))
        n_list = [n for n in cfg["n_list"] if n >= 32] or cfg["n_list"]
        return experiments.nonuniform_dependence_periodic(
            s, n_list, [math.pi / 2.0], grid,
            dt=_pick(cfg["dt"], 2e-3), sigma=_pick(cfg["sigma"], 2.75))
    if name == "nonuniform-realline":
        return experiments.nonuniform_dependence_realline(
            s, _pick(cfg["sigma"], 2.8), cfg["delta"], cfg["n_list"],
            t=_pick(cfg["t_end"], 0.5), dt=_pick(cfg["dt"], 0.02))
    if name == "mollifier":
        grid = Grid(_pick(cfg["grid_n"], 256))
        u0 = _rough_datum(grid, s, cfg["amp"])
        return experiments.mollified_convergence_study(
            u0, s, cfg["eps_list"], _pick(cfg["t_end"], 0.5),
            _pick(cfg["dt"], 2e-3))
    if name == "continuous-dependence":
        grid = Grid(_pick(cfg["grid_n"], 256))
        u0 = PeriodicField(grid, cfg["amp"] * (np.cos(grid.nodes)
                                               + 0.5 * np.sin(2 * grid.nodes)))
        return experiments.continuous_dependence_study(
            u0, u0, [1e-3, 1e-4], _pick(cfg["sigma"], 2.75), s,
            _pick(cfg["t_end"], 1.0), _pick(cfg["dt"], 2e-3))
    if name == "illposed":
        return experiments.illposedness_scan(
            [3.0, 3.4, 3.5, 3.6, 4.0],
            [100.0 * 2 ** k for k in range(9)])
    if name == "lemmas":
        return experiments.lemma_corpus_study(
            seed=cfg["seed"], count=cfg["count"], workers=cfg["workers"])
    raise _Usage(f"unknown experiment {name!r}; valid names: "
                 + ", ".join(EXPERIMENT_NAMES))


def cmd_experiment(args) -> int:
    if args.name not in EXPERIMENT_NAMES:
        raise _Usage(f"unknown experiment {args.name!r}; valid names: "
                     + ", ".join(EXPERIMENT_NAMES))
    cfg = _merge(args, EXPERIMENT_DEFAULTS)
    out_dir = cfg["out"] or os.path.join("rzqlab-out", args.name)
    cfg["out"] = out_dir
    try:
        report = _run_experiment(args.name, cfg)
    except (ConfigurationError, DomainError) as exc:
        raise _Usage(str(exc)) from None
    except BlowUpError as exc:
        print(f"blow-up signal at t={exc.t:g}", file=sys.stderr)
        return EXIT_BLOWUP
    report.seed = cfg["seed"]
    os.makedirs(out_dir, exist_ok=True)
    report_to_json(report, os.path.join(out_dir, "report.json"))
    report_to_csv(report, os.path.join(out_dir, "report.csv"))
    write_plot_script(report, "report.csv",
                      os.path.join(out_dir, "plot_report.py"))
    _write_metadata(out_dir, f"experiment {args.name}", cfg)
    for vname, v in report.verdicts.items():
        status = "pass" if v.passed else "FAIL"
        print(f"[{status}] {vname}: measured {v.measured:.6g} ({v.threshold})")
    if report.all_passed:
        print(f"all verdicts passed; artifacts in {out_dir}")
        return EXIT_OK
    print("verdict failure; see report.json", file=sys.stderr)
    return EXIT_VERDICT


# ---------------------------------------------------------------------------
# peakons

PEAKON_DEFAULTS = {
    "p": [2.0, 1.0], "q": [-5.0, 0.0], "dt": 1e-3, "t_end": 10.0,
    "out": "rzqlab-out/peakons",
}


def cmd_peakons(args) -> int:
    cfg = _merge(args, PEAKON_DEFAULTS)
    if len(cfg["p"]) == 0 or len(cfg["p"]) != len(cfg["q"]):
        raise _Usage("need equally long, nonempty --p and --q lists")
    try:
        e0 = peakons.PeakonEnsemble(np.asarray(cfg["p"]),
                                    np.asarray(cfg["q"]))
        traj = peakons.evolve_peakons(e0, cfg["dt"], cfg["t_end"])
    except ConfigurationError as exc:
        raise _Usage(str(exc)) from None
    os.makedirs(cfg["out"], exist_ok=True)
    peakons.trajectory_to_csv(traj, os.path.join(cfg["out"], "trajectory.csv"))
    h_drift = float(np.max(np.abs(traj.hamiltonians - traj.hamiltonians[0])))
    p_drift = float(np.max(np.abs(traj.momenta - traj.momenta[0])))
    h_tol = 1e-8 * max(1.0, abs(traj.hamiltonians[0]))
    _write_metadata(cfg["out"], "peakons", cfg,
                    {"h_drift": h_drift, "p_drift": p_drift})
    print(f"H drift {h_drift:.3e}, P drift {p_drift:.3e}; "
          f"artifacts in {cfg['out']}")
    if h_drift <= h_tol and p_drift <= 1e-8:
        return EXIT_OK
    print("conservation verdict failed", file=sys.stderr)
    return EXIT_VERDICT


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rzqlab",
                     description="pseudospectral laboratory for a fifth-order "
                                 "Camassa-Holm-type equation")
    sub = parser.add_subparsers(dest="subcommand")

    def common(p):
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--out", help="output directory")

    sim = sub.add_parser("simulate", help="evolve one datum")
    common(sim)
    sim.add_argument("--profile", choices=("zero", "cosine", "random",
                                           "peakon"))
    sim.add_argument("--amp", type=float)
    sim.add_argument("--s", type=float)
    sim.add_argument("--grid-n", dest="grid_n", type=int)
    sim.add_argument("--box-length", dest="box_length", type=float)
    sim.add_argument("--dt", type=float)
    sim.add_argument("--t-end", dest="t_end", type=float)
    sim.add_argument("--rhs", choices=("m_form", "nonlocal", "burgers",
                                       "mollified"))
    sim.add_argument("--epsilon", type=float)
    sim.add_argument("--seed", type=int)
    sim.set_defaults(func=cmd_simulate)

    exp = sub.add_parser("experiment", help="run a named study")
    exp.add_argument("name", help="one of: " + ", ".join(EXPERIMENT_NAMES))
    common(exp)
    exp.add_argument("--seed", type=int)
    exp.add_argument("--workers", type=int)
    exp.add_argument("--count", type=int)
    exp.add_argument("--n-list", dest="n_list",
                     type=lambda v: _parse_list(v, int))
    exp.add_argument("--eps-list", dest="eps_list",
                     type=lambda v: _parse_list(v, float))
    exp.add_argument("--s", type=float)
    exp.add_argument("--sigma", type=float)
    exp.add_argument("--delta", type=float)
    exp.add_argument("--dt", type=float)
    exp.add_argument("--t-end", dest="t_end", type=float)
    exp.add_argument("--amp", type=float)
    exp.add_argument("--grid-n", dest="grid_n", type=int)
    exp.add_argument("--box-length", dest="box_length", type=float)
    exp.set_defaults(func=cmd_experiment)

    pk = sub.add_parser("peakons", help="integrate the N-peakon system")
    common(pk)
    pk.add_argument("--p", type=lambda v: _parse_list(v, float),
                    help="comma-separated momenta")
    pk.add_argument("--q", type=lambda v: _parse_list(v, float),
                    help="comma-separated positions")
    pk.add_argument("--dt", type=float)
    pk.add_argument("--t-end", dest="t_end", type=float)
    pk.set_defaults(func=cmd_peakons)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "subcommand", None):
            parser.print_help()
            return EXIT_USAGE
        return args.func(args)
    except _Usage as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigurationError, DomainError, StabilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
