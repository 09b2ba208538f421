"""Friedrichs mollifier and empirical functional-inequality evaluators.

The mollifier acts in Fourier space as the multiplier jhat(eps * k~).  The
concrete symbol is 1 on [-1, 1], a smooth compactly supported transition
exp(1 - 1/(1 - (|xi|-1)^2)) on 1 < |xi| < 2, and 0 for |xi| >= 2.  Compact
support makes "identity on low modes" exact and testable.

The inequality evaluators measure the left/right sides of the commutator
and product estimates on sample fields and report the ratio; corpus maxima
are empirical constants to be reported, never asserted against theory.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import spectral
from .errors import DegenerateInputError, DomainError
from .spectral import PeriodicField, SobolevIndex


def mollifier_symbol(xi) -> np.ndarray:
    """Smooth even symbol: 1 on [-1,1], 0 outside (-2,2)."""
    a = np.abs(np.asarray(xi, dtype=float))
    out = np.zeros_like(a)
    out[a <= 1.0] = 1.0
    mid = (a > 1.0) & (a < 2.0)
    t = a[mid] - 1.0
    out[mid] = np.exp(1.0 - 1.0 / (1.0 - t * t))
    return out


@dataclass(frozen=True)
class MollifierSpec:
    """Scale eps in (0, 1] plus the Fourier symbol jhat."""

    epsilon: float
    symbol: Callable[[np.ndarray], np.ndarray] = mollifier_symbol

    def __post_init__(self):
        if not (0.0 < self.epsilon <= 1.0):
            raise DomainError(
                f"mollifier epsilon must be in (0, 1], got {self.epsilon}"
            )


def mollify(f: PeriodicField, spec: MollifierSpec | float) -> PeriodicField:
    """J_eps f: multiply the spectrum by jhat(eps * k~)."""
    if not isinstance(spec, MollifierSpec):
        spec = MollifierSpec(float(spec))
    sym = spec.symbol(spec.epsilon * f.grid.wavenumbers)
    return spectral.from_spectrum(f.spectrum * sym, f.grid)


@dataclass(frozen=True)
class DefectRate:
    """Fitted log-log rate of ||(I - J_eps) f||_{H^r} against eps."""

    slope: float
    stderr: float
    defects: tuple
    eps_list: tuple
    exact: bool = False  # defect identically zero for every eps in the list


def mollifier_defect_rate(f: PeriodicField, s: SobolevIndex, r: SobolevIndex,
                          eps_list: Sequence[float]) -> DefectRate:
    """Least-squares slope of log ||(I - J_eps) f||_{H^r} versus log eps.

    For f whose coefficients decay exactly at the H^s membership border the
    slope shadows the o(eps^(s-r)) operator-norm decay."""
    if not (0.0 < r <= s):
        raise DomainError(f"need 0 < r <= s, got r={r}, s={s}")
    if not np.any(f.values):
        raise DegenerateInputError("defect rate of the zero field is undefined")
    eps = np.asarray(sorted(eps_list, reverse=True), dtype=float)
    defects = []
    for e in eps:
        # defect computed in coefficient space: where the symbol is exactly 1
        # the defect is exactly 0, with no transform round-trip noise
        sym = MollifierSpec(float(e)).symbol(e * f.grid.wavenumbers)
        defects.append(spectral.sobolev_norm_from_coefficients(
            f.spectrum * (1.0 - sym), f.grid, r))
    defects = np.asarray(defects)
    if np.all(defects == 0.0):
        return DefectRate(math.inf, 0.0, tuple(defects), tuple(eps), exact=True)
    if np.any(defects == 0.0):
        raise DegenerateInputError(
            "defect vanishes for some eps but not all; rate fit is ill-posed")
    slope, stderr = _ols_slope(np.log(eps), np.log(defects))
    return DefectRate(slope, stderr, tuple(defects), tuple(eps))


def _ols_slope(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    n = len(x)
    A = np.vstack([x, np.ones(n)]).T
    coef, res, _, _ = np.linalg.lstsq(A, y, rcond=None)
    if n > 2:
        rss = float(res[0]) if len(res) else float(np.sum((y - A @ coef) ** 2))
        sxx = float(np.sum((x - x.mean()) ** 2))
        stderr = math.sqrt(rss / (n - 2) / sxx)
    else:
        stderr = 0.0
    return float(coef[0]), stderr


@dataclass(frozen=True)
class InequalityRecord:
    """One evaluation of an inequality: lhs, labeled rhs pieces, and the
    ratio lhs / (sum or product of the pieces, per the lemma's shape)."""

    lhs: float
    rhs_components: tuple
    ratio: float
    label: str = ""

    def __post_init__(self):
        vals = [self.lhs, self.ratio] + [v for _, v in self.rhs_components]
        if not all(np.isfinite(v) and v >= 0.0 for v in vals):
            raise DegenerateInputError(
                f"inequality record has non-finite or negative entries: {vals}")


def kato_ponce_check(f: PeriodicField, g: PeriodicField,
                     s: SobolevIndex) -> InequalityRecord:
    """Commutator estimate ratio for
    ||L^s(fg) - f L^s g||_{L2} <= c_s (||L^s f|| ||g||_inf + ||f_x||_inf ||L^(s-1) g||),
    with L^s the Bessel multiplier."""
    if not s > 0:
        raise DomainError(f"Kato-Ponce check needs s > 0, got {s}")
    fg = spectral.product(f, g)
    commutator = spectral.from_spectrum(
        spectral.lambda_pow(fg, s).spectrum
        - spectral.product(f, spectral.lambda_pow(g, s)).spectrum,
        f.grid)
    lhs = spectral.sobolev_norm(commutator, 0.0)
    rhs1 = spectral.sobolev_norm(f, s) * spectral.sup_norms(g, 0)
    rhs2 = spectral.sup_norms(spectral.derivative(f, 1), 0) * \
        spectral.sobolev_norm(g, s - 1.0)
    total = rhs1 + rhs2
    ratio = lhs / total if total > 0.0 else 0.0
    return InequalityRecord(lhs, (("hs_f_times_sup_g", rhs1),
                                  ("sup_fx_times_hs1_g", rhs2)), ratio,
                            label="kato_ponce")


def product_lemma_check(f: PeriodicField, g: PeriodicField,
                        r: SobolevIndex) -> InequalityRecord:
    """Ratio for ||fg||_{H^(r-1)} <= c_r ||f||_{H^r} ||g||_{H^(r-1)}."""
    if not r > 0.5:
        raise DomainError(f"product lemma needs r > 1/2, got {r}")
    lhs = spectral.sobolev_norm(spectral.product(f, g), r - 1.0)
    rhs1 = spectral.sobolev_norm(f, r)
    rhs2 = spectral.sobolev_norm(g, r - 1.0)
    denom = rhs1 * rhs2
    if denom == 0.0:
        raise DegenerateInputError("product lemma ratio with zero denominator")
    return InequalityRecord(lhs, (("hr_f", rhs1), ("hr1_g", rhs2)),
                            lhs / denom, label="product_lemma")


def ccm_commutator_check(f: PeriodicField, v: PeriodicField,
                         rho: SobolevIndex, r: SobolevIndex) -> InequalityRecord:
    """Ratio for the Calderon-Coifman-Meyer type estimate
    ||L^rho d/dx (fv) - f L^rho d/dx v||_{L2} <= C ||f||_{H^r} ||v||_{H^rho}."""
    if not (r > 1.5 and 0.0 <= rho + 1.0 <= r):
        raise DomainError(
            f"CCM check needs r > 3/2 and 0 <= rho+1 <= r, got rho={rho}, r={r}")

    def op(h):
        return spectral.derivative(spectral.lambda_pow(h, rho), 1)

    commutator = spectral.from_spectrum(
        op(spectral.product(f, v)).spectrum
        - spectral.product(f, op(v)).spectrum,
        f.grid)
    lhs = spectral.sobolev_norm(commutator, 0.0)
    rhs1 = spectral.sobolev_norm(f, r)
    rhs2 = spectral.sobolev_norm(v, rho)
    denom = rhs1 * rhs2
    ratio = lhs / denom if denom > 0.0 else 0.0
    return InequalityRecord(lhs, (("hr_f", rhs1), ("hrho_v", rhs2)),
                            ratio, label="ccm_commutator")


def records_to_csv(records: Sequence[InequalityRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sample_id", "lhs", "rhs_1", "rhs_2", "ratio"])
        for i, rec in enumerate(records):
            w.writerow([i, f"{rec.lhs:.17g}",
                        f"{rec.rhs_components[0][1]:.17g}",
                        f"{rec.rhs_components[1][1]:.17g}",
                        f"{rec.ratio:.17g}"])
