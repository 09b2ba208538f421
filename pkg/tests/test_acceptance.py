"""Acceptance suite: one test per quantitative criterion, at the stated
tolerances.  Heavier studies run at the reduced (CI-scale) parameter lists;
scripts/ contains the full-size drivers."""

import math

import numpy as np
import pytest

from rzqlab import dynamics, experiments, operators, peakons, spectral
from rzqlab.dynamics import EvolutionConfig, RhsForm
from rzqlab.peakons import PeakonEnsemble
from rzqlab.reporting import report_to_csv, report_to_json
from rzqlab.spectral import Grid, PeriodicField

from conftest import make_corpus


def test_01_operator_algebra():
    """lambda^r o lambda^-r = id and multiplier composition, <= 1e-12."""
    for n in (128, 256):
        grid = Grid(n)
        rng = np.random.default_rng(n)
        for _ in range(10):
            f = spectral.random_field(grid, 3.0, rng)
            scale = np.max(np.abs(f.values))
            for r in (0.5, 2.0, 4.0):
                g = spectral.lambda_pow(spectral.lambda_pow(f, r), -r)
                assert np.max(np.abs(g.values - f.values)) <= 1e-12 * scale
            a = spectral.lambda_pow(spectral.lambda_pow(f, 1.0), 3.0)
            b = spectral.lambda_pow(f, 4.0)
            sc = np.max(np.abs(b.values))
            assert np.max(np.abs(a.values - b.values)) <= 1e-12 * sc


def test_02_cross_form_rhs_equivalence():
    """m-form vs nonlocal form, relative L2 gap <= 1e-10, 200 corpus fields."""
    grid = Grid(128)
    for f in make_corpus(grid, 4.0, 200, seed=2024, amp=0.2):
        a = dynamics.rhs_m_form(f)
        b = dynamics.rhs_nonlocal(f)
        gap = spectral.sobolev_norm(
            PeriodicField(grid, a.values - b.values), 0.0)
        assert gap <= 1e-10 * spectral.sobolev_norm(b, 0.0)


def test_03_conservation_along_flow():
    """Mean drift <= 1e-10 and, for m > 0 data, sqrt(m)-integral drift
    <= 1e-6 over t in [0, 1] at dt = 1e-3, N = 256."""
    grid = Grid(256)
    u0 = PeriodicField(grid, 1.0 + 0.002 * np.cos(grid.nodes)
                       + 0.001 * np.sin(2 * grid.nodes))
    assert dynamics.conserved_quantities(u0)[1] is not None  # m > 0
    cfg = EvolutionConfig(grid, 1e-3, 1.0, RhsForm.nonlocal_form(),
                          snapshot_stride=50)
    traj = dynamics.evolve(u0, cfg)
    assert np.max(np.abs(traj.means - traj.means[0])) <= 1e-10
    sq = np.array([v for v in traj.sqrt_m_integrals])
    assert None not in traj.sqrt_m_integrals
    assert np.max(np.abs(sq - sq[0])) <= 1e-6


def test_04_solution_size_bound():
    """||u(t)||_{H^4} <= 2 ||u0||_{H^4} on a 10-datum small-amplitude suite
    over the computed interval."""
    grid = Grid(128)
    for i, u0 in enumerate(make_corpus(grid, 4.0, 10, seed=404, amp=0.02)):
        cfg = EvolutionConfig(grid, 2e-3, 1.0, RhsForm.nonlocal_form(),
                              snapshot_stride=25)
        est = dynamics.empirical_lifespan(u0, 4.0, cfg)
        assert est.reached_t_end and not est.blew_up, f"datum {i}"


def test_05_mollifier_contract():
    """Transparency exact on low modes, H^s contraction on the corpus,
    defect slope >= s - r - 0.2 at (s, r) = (4, 2)."""
    grid = Grid(256)
    rng = np.random.default_rng(55)
    low = spectral.random_field(grid, 4.0, rng, band_limit=7)
    gap = np.max(np.abs(operators.mollify(low, 0.125).values - low.values))
    assert gap < 1e-15 * np.max(np.abs(low.values))
    for f in make_corpus(grid, 4.0, 50, seed=56):
        for eps in (1.0, 0.5, 0.25, 0.125):
            assert (spectral.sobolev_norm(operators.mollify(f, eps), 4.0)
                    <= spectral.sobolev_norm(f, 4.0) * (1 + 1e-12))
    rep = experiments.mollifier_defect_study(s=4.0, r=2.0)
    assert rep.verdicts["defect_rate"].passed
    assert rep.verdicts["defect_rate"].measured >= 4.0 - 2.0 - 0.2


def test_06_peakon_fourier_and_membership_scan():
    """Closed-form transform vs quadrature <= 1e-8 on xi in {0..20};
    Sobolev scan: 4*pi limit at s = 3, bounded at s = 3.4, divergent at
    s = 3.6."""
    for xi in range(21):
        assert abs(peakons.pseudo_peakon_fourier(float(xi))
                   - peakons.pseudo_peakon_fourier_quadrature(float(xi))) \
            <= 1e-8
    rep = experiments.illposedness_scan(
        [3.0, 3.4, 3.6], [100.0 * 2 ** k for k in range(9)])
    assert rep.verdicts["s_3_limit_4pi"].passed
    assert rep.verdicts["s_3.4_bounded"].passed
    assert rep.verdicts["s_3.6_divergent"].passed


def test_07_peakon_dynamics():
    """Two-peakon H and P drift <= 1e-8 over [0, 10] at dt = 1e-3; gradient
    check <= 1e-6; free peakon speed p to 1e-8."""
    traj = peakons.evolve_peakons(
        PeakonEnsemble(np.array([2.0, 1.0]), np.array([-5.0, 0.0])),
        1e-3, 10.0)
    assert np.max(np.abs(traj.hamiltonians - traj.hamiltonians[0])) \
        <= 1e-8 * max(1.0, abs(traj.hamiltonians[0]))
    assert np.max(np.abs(traj.momenta - traj.momenta[0])) <= 1e-8

    gen = np.random.default_rng(707)
    for _ in range(50):
        n = int(gen.integers(2, 5))
        q = np.sort(gen.uniform(-8.0, 8.0, n)) + np.arange(n) * 0.5
        p = gen.uniform(-2.0, 2.0, n)
        e = PeakonEnsemble(p, q)
        dp, dq = peakons.peakon_flow(e)
        dp_fd, dq_fd = peakons.hamiltonian_gradient_fd(e)
        scale = max(1.0, float(np.max(np.abs(dp))),
                    float(np.max(np.abs(dq))))
        assert np.max(np.abs(dp - dp_fd)) <= 1e-6 * scale
        assert np.max(np.abs(dq - dq_fd)) <= 1e-6 * scale

    single = peakons.evolve_peakons(
        PeakonEnsemble(np.array([1.0]), np.array([0.0])), 1e-3, 5.0)
    assert abs(single.q[-1][0] - 5.0) <= 1e-8


def test_08_periodic_residual_scaling():
    """Fitted residual slope -2.25 +/- 0.3 at (s, sigma) = (4, 2.75) and
    -1.6 +/- 0.3 at (4, 3.2), with the branch switchover at sigma = 3."""
    rep = experiments.residual_scaling_study(
        4.0, [2.75, 3.0, 3.2], [16, 32, 64, 128, 256], Grid(2048))
    assert rep.all_passed
    for sigma in (2.75, 3.0, 3.2):
        fit = rep.fitted_slopes[f"sigma_{sigma:g}"]
        predicted = max(sigma + 3.0 - 8.0, 2.0 * sigma - 8.0)
        assert abs(fit.slope - predicted) <= 0.3
        assert fit.reliable
    # switchover: both branches meet at sigma = 3 where the prediction is -2
    assert abs(rep.fitted_slopes["sigma_3"].slope + 2.0) <= 0.3


def test_09_nonuniform_dependence_periodic():
    """Initial H^4 distance 2/n; evolved distance at t = pi/2 stays >= 0.5
    for n in {128, 256}."""
    rep = experiments.nonuniform_dependence_periodic(
        4.0, [128, 256], [math.pi / 2.0], Grid(1024), dt=2e-3)
    for rec in rep.records:
        assert not rec.divergent
        n = rec.parameter_value
        assert rec.measurements["initial_distance"] == pytest.approx(
            2.0 / n, rel=1e-10)
        assert rec.measurements[f"distance_t_{math.pi / 2.0:g}"] >= 0.5
    assert rep.verdicts["distance_stays_large"].passed
    assert rep.verdicts["initial_distance_decays"].passed


def test_10_realline_surrogate():
    """Large-box study at (s, sigma, delta) = (4, 2.8, 0.5), reduced n-list:
    hk2009 within 2% at the largest n, total slope <= -alpha + 0.3, each
    E_i slope <= prediction + 0.3, boundary tails < 1e-8."""
    rep = experiments.nonuniform_dependence_realline(
        4.0, 2.8, 0.5, [16, 32, 64], t=0.5, dt=0.02)
    assert rep.verdicts["hk2009_limit"].passed
    assert rep.verdicts["boundary_decay"].passed
    alpha = 4.0 + 1.0 - 2.8 - 0.5
    assert rep.fitted_slopes["E_total"].slope <= -alpha + 0.3
    for i in range(1, 13):
        assert rep.verdicts[f"E{i}_rate"].passed, f"E{i}"
    assert rep.verdicts["low_frequency_size"].passed


def test_11_continuous_dependence_and_mollified_convergence():
    """Gronwall constant stable within 50% across eta in {1e-3, 1e-4};
    mollified-solution gaps monotone in eps."""
    grid = Grid(256)
    u0 = PeriodicField(grid, 0.05 * (np.cos(grid.nodes)
                                     + 0.5 * np.sin(2 * grid.nodes)))
    rep = experiments.continuous_dependence_study(
        u0, u0, [1e-3, 1e-4], 2.75, 4.0, 1.0, 2e-3)
    assert rep.verdicts["C_stable"].passed
    assert rep.verdicts["exponential_bound"].passed
    assert rep.verdicts["lipschitz_in_time"].passed

    k = grid.wavenumbers
    coeff = (1.0 + k * k) ** (-(4.0 + 0.51) / 2.0)
    rough = spectral.from_spectrum(coeff, grid)
    rough = PeriodicField(grid, 0.05 * rough.values
                          / spectral.sobolev_norm(rough, 4.0))
    rep2 = experiments.mollified_convergence_study(
        rough, 4.0, [1.0, 0.5, 0.25, 0.125], 0.5, 2e-3)
    assert rep2.verdicts["monotone_gaps"].passed
    assert rep2.verdicts["data_contraction"].passed


def test_12_determinism(tmp_path):
    """Same experiment, same seed: byte-identical artifacts."""
    payloads = []
    for tag in ("a", "b"):
        rep = experiments.lemma_corpus_study(seed=7, count=20)
        csv_path = tmp_path / f"{tag}.csv"
        json_path = tmp_path / f"{tag}.json"
        report_to_csv(rep, csv_path)
        report_to_json(rep, json_path)
        payloads.append((csv_path.read_bytes(), json_path.read_bytes()))
    assert payloads[0] == payloads[1]
