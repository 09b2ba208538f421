"""Grids, Fourier transforms, multipliers, and Sobolev norms on the torus.

Conventions (fixed once, used everywhere):

* Fourier coefficients: u_hat(k) = (1/L) * integral of u(x) exp(-i k~ x) dx
  over one period, where k~ = 2*pi*k/L is the physical wavenumber of
  integer mode k.  On the grid this is fft(values)/N.
* Parseval: (1/N) * sum |u_j|^2 = sum_k |u_hat(k)|^2.
* Sobolev norm: ||u||_{H^s} = ( sum_k (1 + k~^2)^s |u_hat(k)|^2 )^{1/2}.
  At L = 2*pi this matches the classical periodic H^s norm with the
  coefficient convention above; at large L it is (1/L) times the squared
  real-line integral norm (see experiments.realline_norm).
* Quadratic products are dealiased by 3/2 zero padding, so they are exact
  (to round-off) whenever the sum of the two bandwidths fits in 3N/2 modes.
* The Nyquist mode of odd-order derivatives is set to zero.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigurationError, DomainError

TWO_PI = 2.0 * np.pi

#: A Sobolev regularity index is just a real number.
SobolevIndex = float


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid: node k at x_k = k*L/N, physical wavenumbers
    k~ = 2*pi*k/L for k in [-N/2, N/2)."""

    n_points: int
    box_length: float = TWO_PI

    def __post_init__(self):
        if self.n_points < 8 or not _is_power_of_two(self.n_points):
            raise ConfigurationError(
                f"n_points must be a power of two >= 8, got {self.n_points}"
            )
        if not (self.box_length > 0.0):
            raise ConfigurationError(
                f"box_length must be positive, got {self.box_length}"
            )

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n_points) * (self.box_length / self.n_points)

    @cached_property
    def centered_nodes(self) -> np.ndarray:
        """Nodes mapped to [-L/2, L/2); convenient for bump profiles."""
        L = self.box_length
        return ((self.nodes + L / 2.0) % L) - L / 2.0

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Physical wavenumbers k~ in FFT order."""
        return TWO_PI * np.fft.fftfreq(self.n_points, d=self.box_length / self.n_points)

    @property
    def max_wavenumber(self) -> float:
        return np.pi * self.n_points / self.box_length

    @property
    def nyquist_index(self) -> int:
        return self.n_points // 2


@dataclass(frozen=True, eq=False)
class PeriodicField:
    """A real function on a Grid with a lazily computed spectrum."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n_points,):
            raise ConfigurationError(
                f"values length {v.shape} does not match grid "
                f"n_points={self.grid.n_points}"
            )
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @cached_property
    def spectrum(self) -> np.ndarray:
        c = np.fft.fft(self.values) / self.grid.n_points
        c.setflags(write=False)
        return c


def to_spectrum(f: PeriodicField) -> np.ndarray:
    """Fourier coefficients u_hat(k) = (1/L) int u exp(-i k~ x) dx."""
    return f.spectrum


def from_spectrum(coefficients: np.ndarray, grid: Grid) -> PeriodicField:
    """Inverse transform.  Coefficients must be Hermitian-symmetric so the
    result is real; the (round-off level) imaginary part is discarded."""
    c = np.asarray(coefficients, dtype=complex)
    if c.shape != (grid.n_points,):
        raise ConfigurationError(
            f"coefficient length {c.shape} does not match grid "
            f"n_points={grid.n_points}"
        )
    values = np.fft.ifft(c * grid.n_points)
    out = PeriodicField(grid, values.real)
    # taking the real part above is exactly the Hermitian projection in
    # coefficient space, so the known coefficients can seed the cache and
    # spare one transform round trip per operator application
    sym = hermitian_symmetrize(c)
    sym.setflags(write=False)
    out.__dict__["spectrum"] = sym
    return out


def field_from_function(func: Callable[[np.ndarray], np.ndarray], grid: Grid,
                        centered: bool = False) -> PeriodicField:
    x = grid.centered_nodes if centered else grid.nodes
    return PeriodicField(grid, np.asarray(func(x), dtype=float))


def zeros(grid: Grid) -> PeriodicField:
    return PeriodicField(grid, np.zeros(grid.n_points))


def hermitian_symmetrize(coefficients: np.ndarray) -> np.ndarray:
    """Project arbitrary coefficients onto the Hermitian-symmetric subspace
    (real fields): u_hat(-k) = conj(u_hat(k))."""
    c = np.asarray(coefficients, dtype=complex)
    n = len(c)
    out = np.empty_like(c)
    out[0] = c[0].real
    out[1:] = 0.5 * (c[1:] + np.conj(c[1:][::-1]))
    out[n // 2] = out[n // 2].real
    return out


def apply_multiplier(f: PeriodicField,
                     symbol: Callable[[np.ndarray], np.ndarray]) -> PeriodicField:
    """Multiply the spectrum pointwise by symbol(k~)."""
    sym = np.asarray(symbol(f.grid.wavenumbers))
    if not np.all(np.isfinite(sym)):
        bad = f.grid.wavenumbers[~np.isfinite(np.abs(sym))][0]
        raise DomainError(f"multiplier symbol is not finite at wavenumber {bad:g}")
    return from_spectrum(f.spectrum * sym, f.grid)


def lambda_pow(f: PeriodicField, r: float) -> PeriodicField:
    """The Bessel-potential multiplier (1 + k~^2)^(r/2); r=2 is 1 - d^2/dx^2."""
    if r == 0.0:
        return f
    sym = (1.0 + f.grid.wavenumbers ** 2) ** (r / 2.0)
    return from_spectrum(f.spectrum * sym, f.grid)


def derivative(f: PeriodicField, order: int = 1) -> PeriodicField:
    """Spectral derivative (i k~)^order.  Nyquist mode zeroed for odd order."""
    if order < 0 or order > 4:
        raise DomainError(f"derivative order must be in 0..4, got {order}")
    if order == 0:
        return f
    sym = (1j * f.grid.wavenumbers) ** order
    if order % 2 == 1:
        sym = sym.copy()
        sym[f.grid.nyquist_index] = 0.0
    return from_spectrum(f.spectrum * sym, f.grid)


def _pad_spectrum(c: np.ndarray, n_out: int) -> np.ndarray:
    """Zero-pad FFT-ordered coefficients from length n to length n_out >= n,
    splitting the Nyquist coefficient symmetrically."""
    n = len(c)
    half = n // 2
    out = np.zeros(n_out, dtype=complex)
    out[:half] = c[:half]
    out[n_out - half + 1:] = c[half + 1:]
    out[half] = 0.5 * c[half]
    out[n_out - half] = 0.5 * np.conj(c[half])
    return out


def _truncate_spectrum(c: np.ndarray, n_out: int) -> np.ndarray:
    """Truncate FFT-ordered coefficients from length n to n_out <= n."""
    n = len(c)
    half = n_out // 2
    out = np.empty(n_out, dtype=complex)
    out[:half] = c[:half]
    out[half + 1:] = c[n - half + 1:]
    out[half] = c[half] + c[n - half]  # modes +/- n_out/2 collapse on the coarse grid
    return out


def product(a: PeriodicField, b: PeriodicField) -> PeriodicField:
    """Pointwise product with 3/2 zero-padding dealiasing."""
    if a.grid != b.grid:
        raise ConfigurationError("product requires both fields on the same grid")
    n = a.grid.n_points
    m = 3 * n // 2
    ap = np.fft.ifft(_pad_spectrum(a.spectrum, m) * m)
    bp = np.fft.ifft(_pad_spectrum(b.spectrum, m) * m)
    cp = np.fft.fft(ap * bp) / m
    c = _truncate_spectrum(cp, n)
    # the product's Nyquist mode is unreliable (odd derivatives drop it,
    # multipliers keep it, breaking exact operator identities): zero it
    c[n // 2] = 0.0
    return from_spectrum(c, a.grid)


def resample(f: PeriodicField, grid: Grid) -> PeriodicField:
    """Spectral interpolation onto a finer or coarser grid over the same box."""
    if not np.isclose(f.grid.box_length, grid.box_length):
        raise ConfigurationError("resample requires matching box lengths")
    if grid.n_points == f.grid.n_points:
        return PeriodicField(grid, f.values)
    if grid.n_points > f.grid.n_points:
        c = _pad_spectrum(f.spectrum, grid.n_points)
    else:
        c = _truncate_spectrum(f.spectrum, grid.n_points)
    return from_spectrum(c, grid)


def sobolev_norm(f: PeriodicField, s: SobolevIndex) -> float:
    """( sum_k (1 + k~^2)^s |u_hat(k)|^2 )^(1/2)."""
    w = (1.0 + f.grid.wavenumbers ** 2) ** s
    return float(np.sqrt(np.sum(w * np.abs(f.spectrum) ** 2)))


def sobolev_norm_from_coefficients(coefficients: np.ndarray, grid: Grid,
                                   s: SobolevIndex) -> float:
    """Same norm computed directly from coefficient data (oracle path)."""
    w = (1.0 + grid.wavenumbers ** 2) ** s
    return float(np.sqrt(np.sum(w * np.abs(np.asarray(coefficients)) ** 2)))


def sup_norms(f: PeriodicField, k: int = 0) -> float:
    """max over derivative orders j = 0..k of max_x |d^j f / dx^j|."""
    if k < 0 or k > 3:
        raise DomainError(f"sup_norms supports k in 0..3, got {k}")
    out = 0.0
    for j in range(k + 1):
        out = max(out, float(np.max(np.abs(derivative(f, j).values))))
    return out


def mean(f: PeriodicField) -> float:
    """The zero mode u_hat(0) = (1/L) int u dx."""
    return float(np.mean(f.values))


def random_field(grid: Grid, s: SobolevIndex, rng: np.random.Generator,
                 band_limit: int | None = None) -> PeriodicField:
    """Generic H^s-regular random sample: u_hat(k) = zeta_k (1+k~^2)^(-(s+1)/2)
    with zeta_k complex unit Gaussian, Hermitian-symmetrized.

    band_limit, when given, zeroes modes with |k| > band_limit so the same
    function can be represented exactly on a finer grid.  The Nyquist mode
    is always left empty: it has no faithful sine component and odd-order
    derivatives drop it, which would break exact operator identities."""
    n = grid.n_points
    zeta = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    c = zeta * (1.0 + grid.wavenumbers ** 2) ** (-(s + 1.0) / 2.0)
    c = hermitian_symmetrize(c)
    c[grid.nyquist_index] = 0.0
    if band_limit is not None:
        k_index = np.fft.fftfreq(n, d=1.0 / n)  # integer mode numbers
        c = np.where(np.abs(k_index) <= band_limit, c, 0.0)
    return from_spectrum(c, grid)


def write_field_csv(f: PeriodicField, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "u"])
        for x, u in zip(f.grid.nodes, f.values):
            w.writerow([f"{x:.17g}", f"{u:.17g}"])


def write_spectrum_csv(f: PeriodicField, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "re_uhat", "im_uhat"])
        for k, c in zip(f.grid.wavenumbers, f.spectrum):
            w.writerow([f"{k:.17g}", f"{c.real:.17g}", f"{c.imag:.17g}"])
