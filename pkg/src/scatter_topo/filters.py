"""Weyl-Heisenberg and wavelet Parseval filter banks built in frequency.

Both flavors are analytic band-pass collections ``{g_lambda}`` plus an
output-generating low-pass ``chi`` chosen so that, on the covered band,

    |chi(omega)|^2 + sum_lambda |g_lambda(omega)|^2 = 1.

WH atoms are translates of a square-root raised cosine
``cos(pi omega / (2R))`` on ``[-R, R]``, centred at ``+-(R|k| + delta)``.
Wavelet atoms are dilates ``psi(r^-j omega)`` of a Meyer-type mother
supported on ``[1/r, r]`` with the cubic transition ``x^2 (3 - 2x)``.

Atom spectra are real and stored sparsely as contiguous windows in
natural FFT order; windows never straddle zero or the Nyquist bin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from . import kernels
from .errors import PreconditionError
from .signal import Grid, Spectrum

WH = "wh"
WAVELET = "wavelet"

Interval = Tuple[float, float]


@dataclass(frozen=True)
class WHParams:
    R: float
    delta: float

    def __post_init__(self):
        if not self.R > 0:
            raise PreconditionError(f"R must be positive, got {self.R}")
        if not self.delta >= self.R / 2:
            raise PreconditionError(
                f"need delta >= R/2, got delta={self.delta}, R={self.R}")


@dataclass(frozen=True)
class WaveletParams:
    r: float

    def __post_init__(self):
        if not self.r > 1:
            raise PreconditionError(f"dilation base r must exceed 1, got {self.r}")


@dataclass(frozen=True, eq=False)
class FilterAtom:
    """One band-pass atom: real spectrum values on ``[start, start + len)``."""

    index: int
    start: int
    values: np.ndarray = field(repr=False)
    analytic_support: Interval
    grid: Grid = field(repr=False)

    @property
    def stop(self) -> int:
        return self.start + self.values.shape[0]

    def dense(self) -> np.ndarray:
        out = np.zeros(self.grid.num_samples)
        out[self.start:self.stop] = self.values
        return out

    @property
    def spectrum(self) -> Spectrum:
        return Spectrum(self.grid, self.dense())

    def measured_support(self) -> Interval:
        nz = np.nonzero(self.values)[0]
        if nz.size == 0:
            return (math.nan, math.nan)
        f = self.grid.freqs[self.start + nz]
        return (float(f.min()), float(f.max()))


@dataclass(frozen=True, eq=False)
class FilterBank:
    flavor: str
    params: object
    grid: Grid
    chi: np.ndarray = field(repr=False)
    atoms: Dict[int, FilterAtom] = field(repr=False)
    covered_band: float
    lambda_max: int

    @property
    def gap(self) -> float:
        """Half-width of the spectral gap covered by ``chi`` alone."""
        return self.params.delta if self.flavor == WH else 1.0

    @property
    def output_atom(self) -> Spectrum:
        return Spectrum(self.grid, self.chi)

    @property
    def indices(self):
        return sorted(self.atoms)

    def atom(self, lam: int) -> FilterAtom:
        try:
            return self.atoms[lam]
        except KeyError:
            raise PreconditionError(f"unknown filter index {lam}") from None

    def without(self, lam: int) -> "FilterBank":
        """Copy of the bank with one atom removed (chi unchanged)."""
        atoms = {k: v for k, v in self.atoms.items() if k != lam}
        return FilterBank(self.flavor, self.params, self.grid, self.chi, atoms,
                          self.covered_band, self.lambda_max)

    def replace_atom(self, lam: int, values: np.ndarray) -> "FilterBank":
        a = self.atom(lam)
        atoms = dict(self.atoms)
        atoms[lam] = FilterAtom(lam, a.start, np.asarray(values, dtype=float),
                                a.analytic_support, self.grid)
        return FilterBank(self.flavor, self.params, self.grid, self.chi, atoms,
                          self.covered_band, self.lambda_max)

    def packed(self, indices):
        """Window layout arrays for :func:`kernels.window_energies`."""
        atoms = [self.atoms[k] for k in indices]
        starts = np.array([a.start for a in atoms], dtype=np.int64)
        lengths = np.array([a.values.shape[0] for a in atoms], dtype=np.int64)
        offsets = np.zeros(len(atoms), dtype=np.int64)
        if len(atoms) > 1:
            offsets[1:] = np.cumsum(lengths)[:-1]
        values = (np.concatenate([a.values ** 2 for a in atoms]) if atoms
                  else np.zeros(0))
        return starts, lengths, offsets, np.ascontiguousarray(values)

    def to_json(self) -> dict:
        if self.flavor == WH:
            params = {"R": self.params.R, "delta": self.params.delta}
        else:
            params = {"r": self.params.r}
        return {
            "flavor": self.flavor,
            "params": params,
            "grid": {"num_samples": self.grid.num_samples,
                     "period": self.grid.period},
            "lambda_max": self.lambda_max,
            "covered_band": [-self.covered_band, self.covered_band],
            "spectral_gap": [-self.gap, self.gap],
            "atoms": [{"index": k, "support": list(self.atoms[k].analytic_support)}
                      for k in self.indices],
        }


def bank_from_json(doc: dict) -> FilterBank:
    """Regenerate a bank from its serialized metadata."""
    grid = Grid(int(doc["grid"]["num_samples"]), float(doc["grid"]["period"]))
    flavor = doc["flavor"]
    p = doc["params"]
    if flavor == WH:
        return build_wh_bank(WHParams(float(p["R"]), float(p["delta"])), grid)
    if flavor in (WAVELET, "wav"):
        return build_wavelet_bank(WaveletParams(float(p["r"])), grid)
    raise PreconditionError(f"unknown flavor {flavor!r}")


def _positive_window(grid: Grid, lo: float, hi: float):
    """Natural-order index range of positive bins strictly inside ``(lo, hi)``."""
    T = grid.num_samples
    dw = grid.domega
    m_lo = max(1, math.floor(lo / dw) + 1)
    m_hi = min(T // 2 - 1, math.ceil(hi / dw) - 1)
    if m_hi < m_lo:
        return None
    return m_lo, m_hi


def _mirror(grid: Grid, atom: FilterAtom, index: int) -> FilterAtom:
    T = grid.num_samples
    start = T - (atom.stop - 1)
    lo, hi = atom.analytic_support
    return FilterAtom(index, start, atom.values[::-1].copy(), (-hi, -lo), grid)


def _complement_chi(grid: Grid, atoms, edge: float) -> np.ndarray:
    total = np.zeros(grid.num_samples)
    for a in atoms.values():
        total[a.start:a.stop] += a.values ** 2
    chi = np.sqrt(np.clip(1.0 - total, 0.0, None))
    chi[np.abs(grid.freqs) > edge] = 0.0
    return chi


def wh_support(p: WHParams, k: int) -> Interval:
    c = p.R * abs(k) + p.delta
    lo, hi = c - p.R, c + p.R
    return (lo, hi) if k > 0 else (-hi, -lo)


def wavelet_support(p: WaveletParams, j: int) -> Interval:
    lo, hi = p.r ** (abs(j) - 1), p.r ** (abs(j) + 1)
    return (lo, hi) if j > 0 else (-hi, -lo)


def build_wh_bank(p: WHParams, grid: Grid) -> FilterBank:
    R, delta = p.R, p.delta
    omega_max = grid.nyquist
    if not omega_max > delta + R:
        raise PreconditionError(
            f"grid Nyquist {omega_max} must exceed delta + R = {delta + R}")
    covered = omega_max - 2 * R
    if not covered > 0:
        raise PreconditionError("covered band is empty")
    lam_max = max(1, math.ceil((covered - delta + R) / R - 1e-12))
    atoms: Dict[int, FilterAtom] = {}
    for k in range(1, lam_max + 1):
        lo, hi = wh_support(p, k)
        win = _positive_window(grid, lo, hi)
        if win is None:
            continue
        m_lo, m_hi = win
        w = np.arange(m_lo, m_hi + 1) * grid.domega
        vals = np.cos(0.5 * math.pi * (w - (lo + R)) / R)
        atom = FilterAtom(k, m_lo, vals, (lo, hi), grid)
        atoms[k] = atom
        atoms[-k] = _mirror(grid, atom, -k)
    chi = _complement_chi(grid, atoms, delta + R)
    return FilterBank(WH, p, grid, chi, atoms, covered, lam_max)


def _theta(x: np.ndarray) -> np.ndarray:
    return x * x * (3.0 - 2.0 * x)


def mother_wavelet(r: float, omega: np.ndarray) -> np.ndarray:
    """Meyer-type mother spectrum on ``[1/r, r]``."""
    omega = np.asarray(omega, dtype=float)
    out = np.zeros_like(omega)
    rising = (omega > 1.0 / r) & (omega <= 1.0)
    falling = (omega > 1.0) & (omega < r)
    lr = math.log(r)
    out[rising] = np.sin(0.5 * math.pi * _theta(np.log(r * omega[rising]) / lr))
    out[falling] = np.cos(0.5 * math.pi * _theta(np.log(omega[falling]) / lr))
    return out


def build_wavelet_bank(p: WaveletParams, grid: Grid) -> FilterBank:
    r = p.r
    omega_max = grid.nyquist
    if not omega_max > r:
        raise PreconditionError(f"grid Nyquist {omega_max} must exceed r = {r}")
    covered = omega_max / r ** 2
    lam_max = max(1, math.ceil(math.log(covered) / math.log(r) - 1e-12) + 1)
    atoms: Dict[int, FilterAtom] = {}
    for j in range(1, lam_max + 1):
        lo, hi = wavelet_support(p, j)
        win = _positive_window(grid, lo, hi)
        if win is None:
            continue
        m_lo, m_hi = win
        w = np.arange(m_lo, m_hi + 1) * grid.domega
        vals = mother_wavelet(r, w / r ** j)
        atom = FilterAtom(j, m_lo, vals, (lo, hi), grid)
        atoms[j] = atom
        atoms[-j] = _mirror(grid, atom, -j)
    chi = _complement_chi(grid, atoms, r)
    return FilterBank(WAVELET, p, grid, chi, atoms, covered, lam_max)


def build_bank(flavor: str, grid: Grid, R: float | None = None,
               delta: float | None = None, r: float | None = None) -> FilterBank:
    if flavor == WH:
        if R is None or delta is None:
            raise PreconditionError("WH bank needs R and delta")
        return build_wh_bank(WHParams(R, delta), grid)
    if flavor in (WAVELET, "wav"):
        if r is None:
            raise PreconditionError("wavelet bank needs r")
        return build_wavelet_bank(WaveletParams(r), grid)
    raise PreconditionError(f"unknown flavor {flavor!r}")


@dataclass(frozen=True)
class FrameReport:
    max_deviation: float
    worst_bin: float
    passed: bool


def littlewood_paley_sum(bank: FilterBank) -> np.ndarray:
    total = bank.chi ** 2
    for a in bank.atoms.values():
        total[a.start:a.stop] += a.values ** 2
    return total


def verify_parseval(bank: FilterBank, tol: float = 1e-9) -> FrameReport:
    freqs = bank.grid.freqs
    inside = np.abs(freqs) <= bank.covered_band
    dev = np.abs(1.0 - littlewood_paley_sum(bank))[inside]
    i = int(np.argmax(dev))
    worst = float(dev[i])
    return FrameReport(worst, float(freqs[inside][i]), worst <= tol)


def verify_symmetry(bank: FilterBank) -> float:
    """``max |g_lambda(-omega) - g_{-lambda}(omega)|`` over atoms and bins.

    The unpaired Nyquist bin is skipped.  A missing partner counts as zero.
    """
    T = bank.grid.num_samples
    mirror = (-np.arange(T)) % T
    paired = np.arange(T) != T // 2
    worst = 0.0
    zero = np.zeros(T)
    for lam in bank.atoms:
        a = bank.atoms[lam].dense()
        b = bank.atoms[-lam].dense() if -lam in bank.atoms else zero
        d = kernels.window_max_abs_diff(
            np.ascontiguousarray(a[mirror][paired]), np.ascontiguousarray(b[paired]))
        worst = max(worst, d)
    return worst


def filter_support(bank: FilterBank, lam: int) -> Interval:
    if lam not in bank.atoms:
        raise PreconditionError(f"unknown filter index {lam}")
    if bank.flavor == WH:
        return wh_support(bank.params, lam)
    return wavelet_support(bank.params, lam)
