"""Breadth-first propagation through the scattering tree.

Every node holds a feature map ``U[q]f`` (kept as its spectrum); children
are ``|U[q]f * g_lambda|`` and every node emits ``U[q]f * chi``.

Two reductions are available:

* symmetry pruning -- for a real-valued parent, ``|h * g_-l| = |h * g_l|``,
  so only ``l >= 1`` is materialized and carries multiplicity 2;
* significance filtering -- a child is expanded only when the parent's
  effective spectral support meets the child's filter support.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import kernels
from .errors import PreconditionError
from .filters import WH, FilterBank, filter_support
from .signal import (DEFAULT_ETA, Signal, Spectrum, analyze,
                     effective_support_from_power, modulus, relu_complex,
                     squared_modulus, synthesize, convolve, _check_same_grid)

Path = Tuple[int, ...]

NODE_FILTERS = ("all", "significant", "heuristic")
NONLINEARITIES = ("modulus", "squared_modulus", "relu")

# relative slack for interval comparisons on analytically placed endpoints
_REL = 1e-9


def _leq(a: float, b: float) -> bool:
    return a <= b + _REL * max(1.0, abs(a), abs(b))


def inside_gap(L: float, gap: float) -> bool:
    """Is the band ``[-L, L]`` contained in the closed spectral gap?"""
    return _leq(L, gap)


def significant(L: float, gap: float, support: Tuple[float, float]) -> bool:
    """Does a feature map of effective band ``[-L, L]`` feed a filter on ``support``?

    A band inside the closed gap feeds nothing; otherwise closed-interval
    intersection decides, so a filter whose support starts exactly at
    ``L`` still counts.
    """
    if inside_gap(L, gap):
        return False
    lo, hi = support
    return _leq(lo, L) and _leq(-L, hi)


@dataclass
class EnergyProfile:
    W: List[float] = field(default_factory=list)
    Phi: List[float] = field(default_factory=list)
    dropped: List[float] = field(default_factory=list)

    def cumulative_capture(self, norm2: float) -> List[float]:
        return list(np.cumsum(self.Phi) / norm2)


@dataclass
class _Node:
    path: Path
    spec: np.ndarray          # natural FFT order
    weight: int               # multiplicity in the full tree
    count_weight: int         # multiplicity for distinct-map counting
    real: bool


@dataclass
class ScatteringTree:
    input: Signal
    bank: FilterBank
    depth: int
    profile: EnergyProfile
    xi: List[int]
    materialized: List[int]
    pruned_by_symmetry: bool
    node_filter: str
    eta: Optional[float]
    nodes: Dict[Path, Spectrum] = field(default_factory=dict, repr=False)
    multiplicity: Dict[Path, int] = field(default_factory=dict, repr=False)

    def node(self, q: Path) -> Signal:
        if q not in self.nodes:
            raise PreconditionError(f"path {q} not stored (use keep_tree=True)")
        return synthesize(self.nodes[q])

    def output(self, q: Path) -> Signal:
        return convolve(self.node(q), self.bank.output_atom)

    def paths(self, n: int) -> List[Path]:
        return sorted(q for q in self.nodes if len(q) == n)


def _heuristic_band(bank: FilterBank, n: int, root_L: float) -> float:
    """Assumed effective half-bandwidth of depth-``n`` feature maps."""
    if n == 0:
        return root_L
    if bank.flavor == WH:
        return 2.0 * bank.params.R
    r2m1 = bank.params.r ** 2 - 1.0
    if math.isclose(r2m1, 1.0, rel_tol=1e-12):
        r2m1 = 1.0
    return root_L * r2m1 ** n


def _expand(node: _Node, n: int, bank: FilterBank, prune: bool, node_filter: str,
            eta: float, root_L: float, packed_pos, packed_all, indices_pos,
            indices_all, supports, keep_children=True):
    """Children of one node; returns (children, dropped_energy)."""
    grid = bank.grid
    dx = grid.dx
    dw = grid.domega
    spec = node.spec
    power = np.ascontiguousarray(np.abs(spec) ** 2)
    mirror = prune and node.real
    idx, packed = (indices_pos, packed_pos) if mirror else (indices_all, packed_all)
    mult = 2 if mirror else 1
    energies = kernels.window_energies(power, *packed) * dw

    if node_filter == "all":
        keep = np.ones(len(idx), dtype=bool)
    else:
        if node_filter == "significant":
            L = effective_support_from_power(grid, power, eta) if power.any() else 0.0
        else:
            L = _heuristic_band(bank, n, root_L)
        keep = np.array([significant(L, bank.gap, supports[k]) for k in idx],
                        dtype=bool)

    dropped = float(np.sum(energies[~keep])) * mult * node.weight
    children = []
    T = grid.num_samples
    for k, lam in enumerate(idx):
        if not keep[k]:
            continue
        a = bank.atoms[lam]
        full = np.zeros(T, dtype=complex)
        full[a.start:a.stop] = spec[a.start:a.stop] * a.values
        u = np.abs(np.fft.ifft(full)) / dx
        child = np.fft.fft(u) * dx
        children.append(_Node(
            node.path + (lam,), child,
            node.weight * mult,
            node.count_weight * (mult if n == 0 else 1),
            True))
    return children, dropped


def propagate(f: Signal, bank: FilterBank, depth: int, prune: bool = True,
              node_filter: str = "all", eta: float = DEFAULT_ETA,
              keep_tree: bool = False, workers: Optional[int] = None) -> ScatteringTree:
    """Propagate ``f`` to ``depth`` layers and collect energies.

    Parameters
    ----------
    prune : bool
        Apply mirror-twin deduplication on real-valued nodes.
    node_filter : {'all', 'significant', 'heuristic'}
        ``'significant'`` measures each parent's effective support with
        threshold ``eta``; ``'heuristic'`` measures only the input and
        assumes ``[-2R, 2R]`` (WH) or ``L (r^2 - 1)^n`` (wavelet) below it.
    workers : int, optional
        Thread count for sibling expansion.  Results do not depend on it.
    """
    _check_same_grid(f.grid, bank.grid)
    if depth < 0:
        raise PreconditionError(f"depth must be >= 0, got {depth}")
    if node_filter not in NODE_FILTERS:
        raise PreconditionError(f"node_filter must be one of {NODE_FILTERS}")
    if not 0 < eta < 1:
        raise PreconditionError(f"eta must lie in (0, 1), got {eta}")

    grid = bank.grid
    dw = grid.domega
    chi2 = bank.chi ** 2
    indices_all = bank.indices
    indices_pos = [k for k in indices_all if k > 0]
    packed_all = bank.packed(indices_all)
    packed_pos = bank.packed(indices_pos)
    supports = {k: filter_support(bank, k) for k in indices_all}

    F = analyze(f)
    root_power = F.power()
    root_L = (effective_support_from_power(grid, root_power, eta)
              if node_filter == "heuristic" and root_power.any() else 0.0)

    layer = [_Node((), F.coeffs.copy(), 1, 1, f.is_real)]
    profile = EnergyProfile()
    xi, materialized = [], []
    nodes: Dict[Path, Spectrum] = {}
    mult_map: Dict[Path, int] = {}
    pool = ThreadPoolExecutor(workers) if workers and workers > 1 else None
    try:
        for n in range(depth + 1):
            layer.sort(key=lambda nd: nd.path)
            W = Phi = 0.0
            for nd in layer:
                p = np.abs(nd.spec) ** 2
                W += nd.weight * dw * float(np.sum(p))
                Phi += nd.weight * dw * float(np.sum(p * chi2))
                if keep_tree:
                    nodes[nd.path] = Spectrum(grid, nd.spec)
                    mult_map[nd.path] = nd.weight
            profile.W.append(W)
            profile.Phi.append(Phi)
            xi.append(int(sum(nd.count_weight for nd in layer)))
            materialized.append(len(layer))
            if n == depth:
                break
            args = (n, bank, prune, node_filter, eta, root_L, packed_pos,
                    packed_all, indices_pos, indices_all, supports)
            if pool is not None:
                results = list(pool.map(lambda nd: _expand(nd, *args), layer))
            else:
                results = [_expand(nd, *args) for nd in layer]
            layer = [c for children, _ in results for c in children]
            profile.dropped.append(float(sum(d for _, d in results)))
    finally:
        if pool is not None:
            pool.shutdown()

    return ScatteringTree(f, bank, depth, profile, xi, materialized, prune,
                          node_filter, eta if node_filter != "all" else None,
                          nodes, mult_map)


def layer_energy(tree: ScatteringTree, n: int) -> float:
    if not 0 <= n <= tree.depth:
        raise PreconditionError(f"layer {n} outside 0..{tree.depth}")
    return tree.profile.W[n]


def feature_energy(tree: ScatteringTree, n: int) -> float:
    if not 0 <= n <= tree.depth:
        raise PreconditionError(f"layer {n} outside 0..{tree.depth}")
    return tree.profile.Phi[n]


def energy_capture(tree: ScatteringTree) -> float:
    """Fraction of input energy contained in the features of layers ``0..N``."""
    e = tree.input.energy()
    if e == 0:
        raise PreconditionError("energy capture of a zero signal is undefined")
    return float(sum(tree.profile.Phi)) / e


@dataclass
class DemodResult:
    spectrum: Spectrum
    esupp: float
    carrier: float
    nonlinearity: str


def nonlinearity_spectrum_experiment(f: Signal, bank: FilterBank, lam: int,
                                     nonlinearity: str = "modulus",
                                     eta: float = DEFAULT_ETA) -> DemodResult:
    """Spectrum and effective support of a non-linearity applied to ``f * g_lam``."""
    if nonlinearity not in NONLINEARITIES:
        raise PreconditionError(f"nonlinearity must be one of {NONLINEARITIES}")
    atom = bank.atom(lam)
    h = convolve(f, atom.spectrum)
    op = {"modulus": modulus, "squared_modulus": squared_modulus,
          "relu": relu_complex}[nonlinearity]
    out = analyze(op(h))
    lo, hi = atom.analytic_support
    return DemodResult(out, effective_support_from_power(f.grid, out.power(), eta),
                       0.5 * (lo + hi), nonlinearity)
