"""Operationally significant node counts and the topologies they induce.

Closed forms count distinct feature maps per layer from the input's
effective bandwidth ``L`` alone.  :func:`enumerate_sig_paths_rule` is an
independent oracle that walks the path tree explicitly using analytic
filter supports and the assumed feature-map bands.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .errors import PreconditionError
from .filters import WH, WAVELET, WaveletParams, WHParams, wavelet_support, wh_support
from .scattering import inside_gap, propagate, significant
from .signal import DEFAULT_ETA, Signal, effective_support

SQRT2 = math.sqrt(2.0)

SHALLOW = "shallow"
SINGLE_LAYER = "single-layer"
CONSTANT_WIDTH = "constant-width"
EXPANDING_WIDTH = "expanding-width"
DEPTH_PRUNED = "depth-pruned"
EXTREMELY_NARROW = "extremely-narrow"

_EPS = 1e-9


def _floor(x: float) -> int:
    """Floor that forgives representation error at integers (``log_r`` etc.)."""
    return math.floor(x + _EPS * max(1.0, abs(x)))


def _is_sqrt2(r: float) -> bool:
    return math.isclose(r * r, 2.0, rel_tol=1e-12)


def _check_wh(R, delta, L, n=0):
    if not R > 0 or not L > 0 or n < 0:
        raise PreconditionError("need R > 0, L > 0, n >= 0")
    if not delta >= R / 2:
        raise PreconditionError(f"need delta >= R/2, got delta={delta}, R={R}")


def xi_wh_closed(n: int, R: float, delta: float, L: float) -> int:
    _check_wh(R, delta, L, n)
    if n == 0:
        return 1
    if not L > delta:
        return 0
    first = 2 * _floor((L - delta) / R + 1)
    if n == 1:
        return first
    if not 2 * R > delta:
        return 0
    return first * _floor(3 - delta / R) ** (n - 1)


def bandwidth_factor(r: float) -> float:
    """``r^2 - 1``, snapped to exactly 1 at ``r = sqrt 2``."""
    return 1.0 if _is_sqrt2(r) else r * r - 1.0


def wavelet_band(L: float, r: float, n: int) -> float:
    """Assumed effective half-bandwidth ``L (r^2 - 1)^n`` of depth-``n`` maps."""
    return L * bandwidth_factor(r) ** n


def growth_class(r: float) -> str:
    if _is_sqrt2(r):
        return "2*floor(log_r(L)+1)^n"
    if r > SQRT2:
        return "O(log_r^n(L) + 2^n (n-1)!)"
    return "O(log_r^n(L)), n < M"


@dataclass(frozen=True)
class WaveletCount:
    value: int
    growth: Optional[str] = None

    def __int__(self):
        return self.value

    def __eq__(self, other):
        if isinstance(other, WaveletCount):
            return self.value == other.value
        return self.value == other


def _wav_layer_width(L: float, r: float, m: int) -> int:
    """Distinct positive children per depth-``m`` parent."""
    Lm = wavelet_band(L, r, m)
    if not Lm > 1:
        return 0
    return _floor(math.log(Lm) / math.log(r) + 1)


def xi_wav_closed(n: int, r: float, L: float) -> WaveletCount:
    """Wavelet node count; exact for ``n <= 1`` and ``r = sqrt 2``.

    Elsewhere the exact count of the recursive rule is returned together
    with the growth-order label.
    """
    if not r > 1 or not L > 0 or n < 0:
        raise PreconditionError("need r > 1, L > 0, n >= 0")
    if n == 0:
        return WaveletCount(1)
    if not L > 1:
        return WaveletCount(0)
    c = _floor(math.log(L) / math.log(r) + 1)
    if n == 1:
        return WaveletCount(2 * c)
    if _is_sqrt2(r):
        return WaveletCount(2 * c ** n)
    total = 2 * c
    for m in range(1, n):
        total *= _wav_layer_width(L, r, m)
    return WaveletCount(total, growth_class(r))


@dataclass
class NodeCountReport:
    xi: List[int]
    method: str
    params: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"xi": list(self.xi), "method": self.method, "params": self.params}


def _params_of(flavor, params):
    if flavor == WH:
        if not isinstance(params, WHParams):
            params = WHParams(*params) if isinstance(params, (tuple, list)) else WHParams(**params)
        return params
    if flavor in (WAVELET, "wav"):
        if not isinstance(params, WaveletParams):
            params = WaveletParams(params) if isinstance(params, (int, float)) else WaveletParams(**params)
        return params
    raise PreconditionError(f"unknown flavor {flavor!r}")


def enumerate_sig_paths_rule(flavor: str, params, L: float, N: int) -> NodeCountReport:
    """Walk the significant-path tree using analytic supports.

    Depth-0 band is ``[-L, L]``; deeper maps are assumed to occupy
    ``[-2R, 2R]`` (WH) or ``[-L (r^2-1)^n, L (r^2-1)^n]`` (wavelet).
    Mirror twins ``(q, -l)`` are merged from depth 2 on.
    """
    p = _params_of(flavor, params)
    if not L > 0 or N < 0:
        raise PreconditionError("need L > 0 and N >= 0")
    wh = flavor == WH
    gap = p.delta if wh else 1.0
    support = (lambda k: wh_support(p, k)) if wh else (lambda j: wavelet_support(p, j))

    def band(n):
        if n == 0:
            return L
        return 2 * p.R if wh else wavelet_band(L, p.r, n)

    def children(Lq):
        if inside_gap(Lq, gap):
            return []
        out = []
        k = 1
        while True:
            lo, _ = support(k)
            if not significant(Lq, gap, support(k)):
                if lo > Lq:
                    break
            else:
                out.append(k)
            k += 1
        return out

    paths = [()]
    xi = [1]
    for n in range(1, N + 1):
        pos = children(band(n - 1))
        nxt = []
        for q in paths:
            lams = pos + [-k for k in pos] if n == 1 else pos
            nxt.extend(q + (lam,) for lam in lams)
        paths = nxt
        xi.append(len(paths))
    echo = {"flavor": "wh" if wh else "wavelet", "L": L, "N": N}
    echo.update({"R": p.R, "delta": p.delta} if wh else {"r": p.r})
    return NodeCountReport(xi, "rule_enumeration", echo)


def enumerate_sig_paths_empirical(f: Signal, bank, N: int,
                                  eta: float = DEFAULT_ETA) -> NodeCountReport:
    """Counts from an actual propagation with measured effective supports."""
    if not np.any(f.samples):
        raise PreconditionError("empirical counting needs a nonzero signal")
    tree = propagate(f, bank, N, prune=True, node_filter="significant", eta=eta)
    xi = list(tree.xi)
    # layer-1 counts keep both signs even for real input; deeper
    # layers count distinct maps, so mirror twins collapse.
    echo = {"flavor": bank.flavor, "N": N, "eta": eta,
            "L": effective_support(f, eta)}
    echo.update({"R": bank.params.R, "delta": bank.params.delta}
                if bank.flavor == WH else {"r": bank.params.r})
    return NodeCountReport(xi, "empirical_enumeration", echo)


def closed_form_report(flavor: str, params, L: float, N: int) -> NodeCountReport:
    p = _params_of(flavor, params)
    if flavor == WH:
        xi = [xi_wh_closed(n, p.R, p.delta, L) for n in range(N + 1)]
        echo = {"flavor": "wh", "R": p.R, "delta": p.delta, "L": L, "N": N}
    else:
        xi = [xi_wav_closed(n, p.r, L).value for n in range(N + 1)]
        echo = {"flavor": "wavelet", "r": p.r, "L": L, "N": N}
    return NodeCountReport(xi, "closed_form", echo)


# -- taxonomy ---------------------------------------------------------------

@dataclass(frozen=True)
class TopologyClass:
    name: str
    M: Optional[float] = None

    def __str__(self):
        return self.name if self.M is None else f"{self.name}(M={self.M:.6g})"


def classify_wh(R: float, delta: float, L: float) -> TopologyClass:
    _check_wh(R, delta, L)
    if L <= delta:
        return TopologyClass(SHALLOW)
    if 2 * R <= delta:
        return TopologyClass(SINGLE_LAYER)
    if R < delta:
        return TopologyClass(CONSTANT_WIDTH)
    return TopologyClass(EXPANDING_WIDTH)


def depth_bound(r: float, L: float) -> float:
    """Layer ``M`` past which contracting wavelet feature maps fall into the gap.

    ``L (r^2 - 1)^(M-1) = 1``, i.e. ``M = 1 + log(L) / log(1 / (r^2 - 1))``.
    """
    return 1.0 + math.log(L) / -math.log(r * r - 1.0)


def classify_wav(r: float, L: float, N: int) -> TopologyClass:
    if not r > 1 or not L > 0:
        raise PreconditionError("need r > 1 and L > 0")
    if L <= 1:
        return TopologyClass(SHALLOW)
    if _is_sqrt2(r) and L <= r:
        return TopologyClass(EXTREMELY_NARROW)
    if r < SQRT2 and not _is_sqrt2(r):
        M = depth_bound(r, L)
        if N > M:
            return TopologyClass(DEPTH_PRUNED, M)
    return TopologyClass(EXPANDING_WIDTH)


# -- average width ----------------------------------------------------------

def theta_wh(N: int, R: float, delta: float, L: float,
             depth: str = "effective") -> float:
    """Average number of significant nodes per layer over layers ``1..N``.

    ``depth='effective'`` averages over the layers the reduced network
    actually has (those up to its last nonzero layer); ``'nominal'``
    always divides by ``N``.
    """
    if N < 1:
        raise PreconditionError(f"need N >= 1, got {N}")
    xi = [xi_wh_closed(n, R, delta, L) for n in range(1, N + 1)]
    if depth == "nominal":
        return sum(xi) / N
    if depth != "effective":
        raise PreconditionError("depth must be 'effective' or 'nominal'")
    nz = [i for i, v in enumerate(xi) if v > 0]
    if not nz:
        return 0.0
    n_eff = nz[-1] + 1
    return sum(xi[:n_eff]) / n_eff


@dataclass
class WidthObjective:
    N: int
    delta: float
    L: float
    R: np.ndarray
    theta: np.ndarray
    R_star: float
    theta_star: float
    classes: List[str]

    def rows(self):
        for R, th, c in zip(self.R, self.theta, self.classes):
            yield float(R), float(th), c


def minimize_theta(N: int, delta: float, L: float, grid_step: Optional[float] = None,
                   depth: str = "effective") -> WidthObjective:
    """Grid search of the average width over ``R in (0, 2 delta)``.

    Ties go to the larger R (fewer, wider filters for the same width).
    """
    if N < 3:
        raise PreconditionError(f"need N >= 3, got {N}")
    if not delta > 0 or not L > delta:
        raise PreconditionError("need delta > 0 and L > delta")
    step = delta / 400 if grid_step is None else grid_step
    if not 0 < step < 2 * delta:
        raise PreconditionError(f"grid step must lie in (0, 2 delta), got {step}")
    count = math.ceil(2 * delta / step - 1e-9)
    Rs = step * np.arange(1, count)
    Rs = Rs[Rs < 2 * delta]
    theta = np.array([theta_wh(N, R, delta, L, depth) for R in Rs])
    i = len(theta) - 1 - int(np.argmin(theta[::-1]))   # last occurrence
    classes = [classify_wh(R, delta, L).name for R in Rs]
    return WidthObjective(N, delta, L, Rs, theta, float(Rs[i]), float(theta[i]), classes)
