"""Periodic discretization of 1-D signals and their Fourier transforms.

Conventions
-----------
A :class:`Grid` holds ``T`` samples over a period ``X``.  Samples sit at
``x_n = n X / T`` and frequency bins at ``omega_m = m / X`` with
``m in {-T/2, ..., T/2 - 1}``.  Integrals are discretized as

    time:       int f(x) dx        ->  (X / T) * sum_n f_n
    frequency:  int F(omega) domega ->  (1 / X) * sum_m F_m

so that the continuous transform ``F(omega) = int f(x) exp(-2 pi i omega x) dx``
becomes ``(X / T) * fft(samples)`` and Parseval holds exactly.

Spectra are stored in numpy's natural FFT order.  ``Grid.freqs`` gives the
frequency of every stored coefficient.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .errors import GridMismatchError, PreconditionError

DEFAULT_SAMPLES = 2 ** 14
DEFAULT_PERIOD = 64.0
DEFAULT_ETA = 1e-3


@dataclass(frozen=True)
class Grid:
    num_samples: int = DEFAULT_SAMPLES
    period: float = DEFAULT_PERIOD

    def __post_init__(self):
        T = self.num_samples
        if T < 2 or T & (T - 1):
            raise PreconditionError(f"num_samples must be a power of two, got {T}")
        if not self.period > 0:
            raise PreconditionError(f"period must be positive, got {self.period}")

    @property
    def dx(self) -> float:
        return self.period / self.num_samples

    @property
    def domega(self) -> float:
        return 1.0 / self.period

    @property
    def nyquist(self) -> float:
        return 0.5 * self.num_samples * self.domega

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.num_samples) * self.dx

    @property
    def freqs(self) -> np.ndarray:
        """Bin frequencies in natural FFT order."""
        return np.fft.fftfreq(self.num_samples, d=self.dx)

    @property
    def shifted_freqs(self) -> np.ndarray:
        """Bin frequencies in ascending order, ``-T/2 .. T/2-1`` times ``domega``."""
        half = self.num_samples // 2
        return np.arange(-half, half) * self.domega

    def bin_index(self, omega: float) -> int:
        """Natural-order index of the bin nearest to ``omega``."""
        m = int(round(omega * self.period))
        half = self.num_samples // 2
        if not -half <= m < half:
            raise PreconditionError(f"frequency {omega} outside the grid band")
        return m % self.num_samples


def _check_same_grid(a: Grid, b: Grid):
    if a != b:
        raise GridMismatchError(f"grid mismatch: {a} vs {b}")


@dataclass(frozen=True, eq=False)
class Signal:
    grid: Grid
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.shape != (self.grid.num_samples,):
            raise PreconditionError(
                f"expected {self.grid.num_samples} samples, got shape {s.shape}")
        s = s.copy()
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.samples) or not np.any(self.samples.imag)

    def energy(self) -> float:
        return float(self.grid.dx * np.sum(np.abs(self.samples) ** 2))

    def norm(self) -> float:
        return math.sqrt(self.energy())


@dataclass(frozen=True, eq=False)
class Spectrum:
    grid: Grid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (self.grid.num_samples,):
            raise PreconditionError(
                f"expected {self.grid.num_samples} coefficients, got shape {c.shape}")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    def power(self) -> np.ndarray:
        return np.abs(self.coeffs) ** 2

    def energy(self) -> float:
        return float(self.grid.domega * np.sum(self.power()))


def analyze(f: Signal) -> Spectrum:
    g = f.grid
    return Spectrum(g, g.dx * np.fft.fft(f.samples))


def synthesize(F: Spectrum) -> Signal:
    g = F.grid
    return Signal(g, np.fft.ifft(F.coeffs) / g.dx)


def convolve(f: Signal, g_hat: Spectrum) -> Signal:
    """Circular convolution realized as a pointwise spectral product."""
    _check_same_grid(f.grid, g_hat.grid)
    return synthesize(Spectrum(f.grid, analyze(f).coeffs * g_hat.coeffs))


def modulus(f: Signal) -> Signal:
    return Signal(f.grid, np.abs(f.samples))


def squared_modulus(f: Signal) -> Signal:
    return Signal(f.grid, np.abs(f.samples) ** 2)


def relu_complex(f: Signal) -> Signal:
    """Pointwise ``max(0, Re z) + max(0, Im z)``."""
    z = np.asarray(f.samples, dtype=complex)
    return Signal(f.grid, np.maximum(z.real, 0.0) + np.maximum(z.imag, 0.0))


def l2_norm(f: Signal) -> float:
    return f.norm()


def sobolev_norm(f: Signal, s: float) -> float:
    """Frequency-weighted norm ``sqrt(int (1 + omega^2)^s |F(omega)|^2 domega)``."""
    if s < 0:
        raise PreconditionError(f"Sobolev index must be >= 0, got {s}")
    F = analyze(f)
    w = (1.0 + F.grid.freqs ** 2) ** s
    return math.sqrt(F.grid.domega * float(np.sum(w * F.power())))


def effective_support_from_power(grid: Grid, power: np.ndarray, eta: float) -> float:
    """Half-width of the smallest symmetric band holding ``(1 - eta)`` of ``power``.

    ``power`` is in natural FFT order.
    """
    if not 0 < eta < 1:
        raise PreconditionError(f"eta must lie in (0, 1), got {eta}")
    shifted = np.ascontiguousarray(np.fft.fftshift(power), dtype=np.float64)
    if not np.any(shifted > 0):
        raise PreconditionError("effective support of a zero signal is undefined")
    k = kernels.symmetric_support_index(shifted, eta)
    return k * grid.domega


def effective_support(f: Signal, eta: float = DEFAULT_ETA) -> float:
    return effective_support_from_power(f.grid, analyze(f).power(), eta)


# -- generators -------------------------------------------------------------

def gaussian(grid: Grid, bandwidth: float = 1.0) -> Signal:
    """Real Gaussian bump centred in the period.

    ``bandwidth`` is the standard deviation ``sigma`` of the spectral
    amplitude ``exp(-omega^2 / (2 sigma^2))``.
    """
    if not bandwidth > 0:
        raise PreconditionError("bandwidth must be positive")
    x = grid.x - 0.5 * grid.period
    return Signal(grid, np.exp(-2.0 * (math.pi * bandwidth * x) ** 2))


def step(grid: Grid, bandwidth: float | None = None) -> Signal:
    """Cartoon-like signal: a smooth bump with a jump discontinuity.

    When ``bandwidth`` is given, the result is additionally low-passed
    with a Gaussian of that spectral width (smoothing the jump).
    """
    X = grid.period
    x = grid.x
    smooth = np.exp(-((x - 0.5 * X) / (0.2 * X)) ** 2)
    f = np.where((x >= 0.3 * X) & (x < 0.6 * X), 1.0, 0.0) + 0.5 * smooth
    sig = Signal(grid, f)
    if bandwidth is not None:
        lp = np.exp(-0.5 * (grid.freqs / bandwidth) ** 2)
        sig = Signal(grid, synthesize(Spectrum(grid, analyze(sig).coeffs * lp)).samples.real)
    return sig


def bandlimited_noise(grid: Grid, bandwidth: float = 1.0, seed: int = 0) -> Signal:
    """Real random signal whose spectrum is confined to ``[-bandwidth, bandwidth]``."""
    if not bandwidth > 0:
        raise PreconditionError("bandwidth must be positive")
    rng = np.random.default_rng(seed)
    T = grid.num_samples
    freqs = grid.freqs
    coeffs = rng.standard_normal(T) + 1j * rng.standard_normal(T)
    coeffs[np.abs(freqs) > bandwidth] = 0.0
    coeffs[T // 2] = 0.0
    # Hermitian symmetrization keeps the time signal real.
    mirrored = np.conj(coeffs[(-np.arange(T)) % T])
    coeffs = 0.5 * (coeffs + mirrored)
    return Signal(grid, np.fft.ifft(coeffs).real * T / grid.period)


GENERATORS = {
    "gaussian": gaussian,
    "step": step,
    "bandlimited-noise": bandlimited_noise,
}


def generate(name: str, grid: Grid, bandwidth: float | None = None,
             seed: int = 0) -> Signal:
    if name not in GENERATORS:
        raise PreconditionError(
            f"unknown generator {name!r}; choose from {sorted(GENERATORS)}")
    if name == "bandlimited-noise":
        return bandlimited_noise(grid, 1.0 if bandwidth is None else bandwidth, seed)
    if name == "gaussian":
        return gaussian(grid, 1.0 if bandwidth is None else bandwidth)
    return step(grid, bandwidth)


def read_csv(path: str | Path, grid: Grid | None = None,
             period: float = DEFAULT_PERIOD) -> Signal:
    """Load one sample per line, either ``re`` or ``re,im``.

    Without an explicit grid the sample count is taken from the file.
    """
    values = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or not row[0].strip() or row[0].lstrip().startswith("#"):
                continue
            if len(row) == 1:
                values.append(complex(float(row[0]), 0.0))
            elif len(row) == 2:
                values.append(complex(float(row[0]), float(row[1])))
            else:
                raise PreconditionError(f"malformed CSV row: {row!r}")
    if grid is None:
        grid = Grid(len(values), period)
    arr = np.array(values, dtype=complex)
    if not np.any(arr.imag):
        arr = arr.real
    return Signal(grid, arr)
