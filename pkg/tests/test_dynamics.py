import numpy as np
import pytest

from rzqlab import dynamics, spectral
from rzqlab.dynamics import EvolutionConfig, RhsForm
from rzqlab.errors import (BlowUpError, ConfigurationError, StabilityError)
from rzqlab.spectral import Grid, PeriodicField

from conftest import make_corpus


def small_datum(grid, amp=0.1):
    x = grid.nodes
    return PeriodicField(grid, amp * (np.cos(x) + 0.3 * np.sin(2 * x)))


# ---------------------------------------------------------------------------
# rhs forms

def test_rhs_form_validation():
    with pytest.raises(ConfigurationError):
        RhsForm("spectral")
    with pytest.raises(ConfigurationError):
        RhsForm("mollified")  # missing epsilon
    with pytest.raises(ConfigurationError):
        RhsForm("nonlocal", epsilon=0.5)
    assert RhsForm.mollified(0.5).epsilon == 0.5


def test_constant_is_steady(grid128):
    u = PeriodicField(grid128, np.full(128, 0.7))
    for rhs in (dynamics.rhs_m_form, dynamics.rhs_nonlocal,
                dynamics.rhs_burgers_equiv):
        assert np.max(np.abs(rhs(u).values)) < 1e-12


def test_m_form_equals_nonlocal(grid128):
    for f in make_corpus(grid128, 4.0, 20, seed=11, amp=0.2):
        a = dynamics.rhs_m_form(f)
        b = dynamics.rhs_nonlocal(f)
        scale = spectral.sobolev_norm(b, 0.0)
        assert spectral.sobolev_norm(
            PeriodicField(grid128, a.values - b.values), 0.0) <= 1e-10 * scale


def test_burgers_equals_nonlocal(grid128):
    # algebraically identical; agreement limited by round-off through the
    # lambda^(+/-4) multiplier paths, observed ~1e-10 relative
    for f in make_corpus(grid128, 4.0, 20, seed=13, amp=0.2):
        a = dynamics.rhs_burgers_equiv(f)
        b = dynamics.rhs_nonlocal(f)
        scale = spectral.sobolev_norm(b, 0.0)
        assert spectral.sobolev_norm(
            PeriodicField(grid128, a.values - b.values), 0.0) <= 1e-8 * scale


def test_mollified_matches_plain_on_band_limited(grid128, rng):
    # J_eps transparent on resolved modes: mollified rhs == nonlocal rhs
    f = spectral.random_field(grid128, 4.0, rng, band_limit=6)
    f = PeriodicField(grid128, 0.1 * f.values)
    a = dynamics.rhs_mollified(f, 0.05)
    b = dynamics.rhs_nonlocal(f)
    scale = np.max(np.abs(b.values))
    assert np.max(np.abs(a.values - b.values)) <= 1e-10 * scale


def test_rhs_preserves_mean(grid128):
    for f in make_corpus(grid128, 4.0, 5, seed=17, amp=0.3):
        assert abs(spectral.mean(dynamics.rhs_nonlocal(f))) < 1e-12


# ---------------------------------------------------------------------------
# stepping

def test_stability_ceiling_positive(grid128):
    u = small_datum(grid128)
    assert dynamics.stability_ceiling(u) > 0.0
    # zero field: ceiling capped at 0.5
    assert dynamics.stability_ceiling(spectral.zeros(grid128)) == 0.5


def test_step_richardson_order(grid128):
    # RK4: halving dt shrinks the one-step-interval error ~16x (5th order
    # local, 4th order global over the fixed interval)
    u0 = small_datum(grid128, amp=0.05)
    t_end = 0.08
    def solve(dt):
        cfg = EvolutionConfig(grid128, dt, t_end, RhsForm.nonlocal_form(),
                              snapshot_stride=10 ** 6)
        return dynamics.evolve(u0, cfg).final
    ref = solve(0.0025)
    e1 = np.max(np.abs(solve(0.02).values - ref.values))
    e2 = np.max(np.abs(solve(0.01).values - ref.values))
    assert e1 / e2 > 10.0


def test_stability_error(grid128):
    u0 = small_datum(grid128, amp=0.5)
    ceiling = dynamics.stability_ceiling(u0)
    cfg = EvolutionConfig(grid128, 2.0 * ceiling, 10.0 * ceiling)
    with pytest.raises(StabilityError):
        dynamics.evolve(u0, cfg)


def test_zero_datum_stays_zero(grid128):
    cfg = EvolutionConfig(grid128, 0.01, 0.1)
    traj = dynamics.evolve(spectral.zeros(grid128), cfg)
    assert np.max(np.abs(traj.final.values)) == 0.0


def test_grid_mismatch(grid128, grid256):
    cfg = EvolutionConfig(grid256, 0.01, 0.1)
    with pytest.raises(ConfigurationError):
        dynamics.evolve(spectral.zeros(grid128), cfg)


def test_blowup_error_carries_partial_trajectory(grid128):
    u0 = small_datum(grid128, amp=0.1)
    # absurdly tight blow-up factor triggers the signal immediately
    cfg = EvolutionConfig(grid128, 1e-3, 0.5, blowup_factor=1.0 + 1e-9,
                          snapshot_stride=1)
    with pytest.raises(BlowUpError) as exc_info:
        dynamics.evolve(u0, cfg)
    traj = exc_info.value.trajectory
    assert traj is not None and len(traj.times) >= 1


# ---------------------------------------------------------------------------
# conservation

def test_conserved_quantities_positive_m(grid128):
    u = PeriodicField(grid128, 1.0 + 0.001 * np.cos(grid128.nodes))
    mean, sq = dynamics.conserved_quantities(u)
    assert mean == pytest.approx(1.0)
    # m = L^4 u = 1 + 0.004 cos x > 0, integral of sqrt(m) ~ 2 pi
    assert sq == pytest.approx(2 * np.pi, rel=1e-5)


def test_conserved_quantities_sign_indefinite(grid128):
    u = PeriodicField(grid128, 0.1 * np.cos(grid128.nodes))
    # m changes sign: sqrt(m) integral undefined
    _, sq = dynamics.conserved_quantities(u)
    assert sq is None


def test_mean_conserved_along_flow(grid128):
    u0 = PeriodicField(grid128,
                       0.5 + 0.05 * np.cos(grid128.nodes))
    cfg = EvolutionConfig(grid128, 1e-3, 0.2)
    traj = dynamics.evolve(u0, cfg)
    assert np.max(np.abs(traj.means - traj.means[0])) < 1e-12


# ---------------------------------------------------------------------------
# lifespan

def test_lifespan_zero_datum(grid128):
    cfg = EvolutionConfig(grid128, 0.01, 1.0)
    est = dynamics.empirical_lifespan(spectral.zeros(grid128), 4.0, cfg)
    assert est.reached_t_end and est.t_star == 1.0 and not est.blew_up


def test_lifespan_small_datum_survives(grid128):
    u0 = small_datum(grid128, amp=0.02)
    cfg = EvolutionConfig(grid128, 2e-3, 0.5)
    est = dynamics.empirical_lifespan(u0, 4.0, cfg)
    assert est.reached_t_end and not est.blew_up
