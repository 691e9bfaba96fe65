"""Decay factors, depth-constrained filter design and decay-rate fitting."""
from __future__ import annotations

import math
from dataclasses import dataclass, asdict, field
from typing import Optional, Sequence

import numpy as np

from .errors import PreconditionError
from .filters import WH, WAVELET, build_wavelet_bank, build_wh_bank, WHParams, WaveletParams
from .scattering import DEFAULT_ETA, energy_capture, propagate
from .signal import Grid, Signal, l2_norm, sobolev_norm


def decay_factor_wh(R: float, delta: float) -> float:
    if not R > 0 or not delta >= R / 2:
        raise PreconditionError(f"need R > 0 and delta >= R/2, got R={R}, delta={delta}")
    return 0.5 + delta / R


def decay_factor_wav(r: float) -> float:
    if not r > 1:
        raise PreconditionError(f"need r > 1, got {r}")
    r2 = r * r
    return (r2 + 1) / (r2 - 1)


def gamma(s: float) -> float:
    if not s > 0:
        raise PreconditionError(f"Sobolev index must be positive, got {s}")
    return min(1.0, 2.0 * s)


@dataclass
class DesignSpec:
    epsilon: float
    N: int
    s: float
    delta: float
    norm2: float
    norms: float
    l: Optional[float] = None

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise PreconditionError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not (isinstance(self.N, (int, np.integer)) and self.N >= 1):
            raise PreconditionError(f"depth N must be an integer >= 1, got {self.N}")
        if not self.delta > 0:
            raise PreconditionError("delta must be positive")
        if not self.norm2 > 0:
            raise PreconditionError("input must be nonzero")
        if self.norms < self.norm2 * (1 - 1e-12):
            raise PreconditionError("Sobolev norm cannot be below the L2 norm")
        g = gamma(self.s)
        if self.l is None:
            self.l = self.epsilon ** (1 / g) * self.delta
        if not self.l > 0.5 * self.epsilon ** (1 / g) * self.delta:
            raise PreconditionError(
                f"l must exceed eps^(1/gamma) delta / 2 = "
                f"{0.5 * self.epsilon ** (1 / g) * self.delta}")

    @property
    def gamma(self) -> float:
        return gamma(self.s)

    @classmethod
    def for_signal(cls, f: Signal, epsilon: float, N: int, s: float,
                   delta: float = 1.0, l: Optional[float] = None) -> "DesignSpec":
        return cls(epsilon, N, s, delta, l2_norm(f), sobolev_norm(f, s), l)


def kappa(spec: DesignSpec) -> float:
    g = spec.gamma
    base = (2 * spec.l * spec.norms ** (2 / g)
            / (spec.epsilon ** (1 / g) * spec.delta * spec.norm2 ** (2 / g)))
    return base ** (1.0 / spec.N)


def design_wh_R(kappa_: float, delta: float) -> float:
    if not kappa_ > 1:
        raise PreconditionError(f"need kappa > 1, got {kappa_}")
    return delta / (kappa_ - 0.5)


def design_wav_r(kappa_: float) -> float:
    if not kappa_ > 1:
        raise PreconditionError(f"need kappa > 1, got {kappa_}")
    return math.sqrt((kappa_ + 1) / (kappa_ - 1))


@dataclass
class DesignResult:
    kappa: float
    wh_R_max: Optional[float]
    wav_r_max: Optional[float]
    predicted_decay_factor: float

    def to_json(self) -> dict:
        return asdict(self)


def design(spec: DesignSpec, flavor: str) -> DesignResult:
    k = kappa(spec)
    if flavor == WH:
        R = design_wh_R(k, spec.delta)
        return DesignResult(k, R, None, decay_factor_wh(R, spec.delta))
    if flavor in (WAVELET, "wav"):
        if spec.delta != 1.0:
            raise PreconditionError("wavelet designs fix delta = 1")
        r = design_wav_r(k)
        return DesignResult(k, None, r, decay_factor_wav(r))
    raise PreconditionError(f"unknown flavor {flavor!r}")


@dataclass
class DecayFit:
    slope: float
    empirical_a: float
    layers: Sequence[int] = field(default_factory=list)


def fit_decay(W: Sequence[float], n_min: int = 1, gamma_: float = 1.0) -> DecayFit:
    """Least-squares slope of ``log W_n`` against ``n`` for ``n >= n_min``.

    Layers with ``W_n == 0`` are skipped; at least three must remain.
    """
    W = np.asarray(W, dtype=float)
    n = np.arange(W.shape[0])
    m = (n >= n_min) & (W > 0)
    if m.sum() < 3:
        raise PreconditionError(
            f"need at least 3 positive layers from n={n_min}, got {int(m.sum())}")
    slope = float(np.polyfit(n[m], np.log(W[m]), 1)[0])
    return DecayFit(slope, math.exp(-slope / gamma_), [int(i) for i in n[m]])


@dataclass
class Validation:
    capture: float
    passed: bool
    design: DesignResult
    spec: DesignSpec
    xi: list

    def to_json(self) -> dict:
        return {"capture": self.capture, "pass": self.passed,
                "design": self.design.to_json(),
                "spec": asdict(self.spec), "xi": list(self.xi)}


def validate_design(f: Signal, spec: DesignSpec, flavor: str,
                    node_filter: str = "significant", eta: float = 1e-6,
                    R: Optional[float] = None, r: Optional[float] = None,
                    workers: Optional[int] = None) -> Validation:
    """Build the bank at the designed bound, propagate to depth ``N``, report capture.

    The norms in ``spec`` are recomputed from ``f``.  ``R`` / ``r`` override
    the designed parameter (used for contrast runs).
    """
    spec = DesignSpec(spec.epsilon, spec.N, spec.s, spec.delta,
                      l2_norm(f), sobolev_norm(f, spec.s), spec.l)
    res = design(spec, flavor)
    grid: Grid = f.grid
    if flavor == WH:
        R_use = res.wh_R_max if R is None else R
        if R_use < grid.domega:
            raise PreconditionError(
                f"designed R={R_use:.3g} is below one frequency bin ({grid.domega:.3g})")
        bank = build_wh_bank(WHParams(R_use, spec.delta), grid)
    else:
        r_use = res.wav_r_max if r is None else r
        if (r_use - 1.0) < grid.domega:
            raise PreconditionError(
                f"designed r={r_use:.6g} leaves less than one bin for the first band")
        bank = build_wavelet_bank(WaveletParams(r_use), grid)
    tree = propagate(f, bank, spec.N, prune=True, node_filter=node_filter, eta=eta,
                     workers=workers)
    cap = energy_capture(tree)
    return Validation(cap, cap >= 1 - spec.epsilon, res, spec, tree.xi)
