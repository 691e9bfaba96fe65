import itertools
import math
from collections import Counter
from fractions import Fraction as Fr

import numpy as np
import pytest

from conftest import SQRT2
from scatter_topo.errors import PreconditionError
from scatter_topo.filters import WH, WAVELET, WHParams, build_wh_bank
from scatter_topo.scattering import propagate
from scatter_topo.signal import bandlimited_noise, effective_support
from scatter_topo.topology import (CONSTANT_WIDTH, DEPTH_PRUNED, EXPANDING_WIDTH,
                                   EXTREMELY_NARROW, SHALLOW, SINGLE_LAYER,
                                   classify_wav, classify_wh, closed_form_report,
                                   depth_bound, enumerate_sig_paths_empirical,
                                   enumerate_sig_paths_rule, minimize_theta, theta_wh,
                                   xi_wav_closed, xi_wh_closed)


# -- exact-arithmetic oracle ------------------------------------------------

def exact_wh_counts(R, delta, L, N):
    """Children counted by scanning filter indices in rational arithmetic.

    A parent with band [-B, B] outside the gap feeds every k whose support
    [delta + R(k-1), delta + R(k+1)] starts at or below B.
    """
    def width(B):
        if B <= delta:
            return 0
        k = 0
        while delta + R * k <= B:
            k += 1
        return k

    xi = [1]
    for n in range(1, N + 1):
        if n == 1:
            xi.append(2 * width(L))
        else:
            xi.append(xi[-1] * width(2 * R))
    return xi


WH_GRID = [(d * fr, d, d * lf)
           for d in (Fr(1), Fr(1, 2), Fr(2))
           for fr in (Fr(1, 4), Fr(2, 3), Fr(1), Fr(3, 2))
           for lf in (Fr(1, 2), Fr(2), Fr(10))]


@pytest.mark.parametrize("R,delta,L", WH_GRID)
def test_wh_closed_form_equals_oracles(R, delta, L):
    N = 4
    exact = exact_wh_counts(R, delta, L, N)
    closed = [xi_wh_closed(n, float(R), float(delta), float(L)) for n in range(N + 1)]
    rule = enumerate_sig_paths_rule(WH, (float(R), float(delta)), float(L), N).xi
    assert closed == exact
    assert rule == exact


def test_wh_closed_examples():
    assert xi_wh_closed(0, 1, 1, 0.5) == 1
    assert all(xi_wh_closed(n, 0.7, 1, 1.0) == 0 for n in range(1, 5))
    assert xi_wh_closed(2, 1, 1, 4) == 2 * math.floor(4) * math.floor(2) == 16
    assert [xi_wh_closed(n, 1, 1, 4) for n in range(4)] == [1, 8, 16, 32]


def test_wh_closed_preconditions():
    with pytest.raises(PreconditionError):
        xi_wh_closed(1, 3, 1, 4)
    with pytest.raises(PreconditionError):
        xi_wh_closed(1, 1, 1, -4)


def exact_wav_counts(r, L, N):
    """Float oracle for the wavelet rule: children are j with r^(j-1) <= band."""
    b = r * r - 1

    def width(B):
        if B <= 1 + 1e-12:
            return 0
        j = 0
        while r ** j <= B * (1 + 1e-12):
            j += 1
        return j

    xi = [1]
    for n in range(1, N + 1):
        B = L * b ** (n - 1) if n > 1 else L
        xi.append((2 if n == 1 else xi[-1]) * width(B))
    return xi


@pytest.mark.parametrize("r", [1.1, 1.2, 1.3, SQRT2, 1.7, 2.0, 3.0])
@pytest.mark.parametrize("L", [0.5, 1.0, 1.3, 2.0, 4.0, 9.5, 10.0, 33.0])
def test_wavelet_first_layer_and_root(r, L):
    rule = enumerate_sig_paths_rule(WAVELET, r, L, 1).xi
    closed = [xi_wav_closed(n, r, L).value for n in (0, 1)]
    assert closed == rule == exact_wav_counts(r, L, 1)


@pytest.mark.parametrize("L", [1.3, 2.0, 3.9, 4.0, 8.0, 16.0, 31.9])
def test_wavelet_sqrt2_branch(L):
    N = 4
    rule = enumerate_sig_paths_rule(WAVELET, SQRT2, L, N).xi
    closed = [xi_wav_closed(n, SQRT2, L).value for n in range(N + 1)]
    assert closed == rule == exact_wav_counts(SQRT2, L, N)


@pytest.mark.parametrize("r,L", [(1.2, 10.0), (1.3, 5.0), (2.0, 8.0), (3.0, 30.0)])
def test_wavelet_other_branches_count_recursive_rule(r, L):
    N = 4
    closed = [xi_wav_closed(n, r, L) for n in range(N + 1)]
    assert [c.value for c in closed] == enumerate_sig_paths_rule(WAVELET, r, L, N).xi
    assert closed[2].growth is not None


def test_wavelet_closed_examples():
    assert xi_wav_closed(1, 2, 8) == 8
    assert xi_wav_closed(2, SQRT2, 4) == 50
    assert all(xi_wav_closed(n, 2, 1.0) == 0 for n in range(1, 4))
    assert xi_wav_closed(0, 2, 0.3) == 1
    with pytest.raises(PreconditionError):
        xi_wav_closed(1, 1.0, 4)


def test_rule_report_echo():
    rep = enumerate_sig_paths_rule(WH, {"R": 1, "delta": 1}, 4, 2)
    doc = rep.to_json()
    assert doc["method"] == "rule_enumeration"
    assert doc["params"] == {"flavor": "wh", "L": 4, "N": 2, "R": 1, "delta": 1}
    assert closed_form_report(WH, WHParams(1, 1), 4, 2).xi == rep.xi


# -- empirical counting -----------------------------------------------------

def test_empirical_shallow(grid):
    from scatter_topo.signal import gaussian
    bank = build_wh_bank(WHParams(1, 1), grid)
    assert enumerate_sig_paths_empirical(gaussian(grid, 0.1), bank, 3).xi == [1, 0, 0, 0]


@pytest.mark.parametrize("seed,bw", [(0, 3.0), (1, 4.0), (2, 6.0), (3, 2.5)])
def test_empirical_first_layer_equals_rule(grid, seed, bw):
    f = bandlimited_noise(grid, bw, seed)
    bank = build_wh_bank(WHParams(1, 1), grid)
    emp = enumerate_sig_paths_empirical(f, bank, 1)
    rule = enumerate_sig_paths_rule(WH, (1, 1), emp.params["L"], 1)
    assert emp.xi == rule.xi


@pytest.mark.parametrize("seed,bw", [(0, 4.0), (1, 6.0), (2, 3.0)])
def test_empirical_deeper_within_one_child(grid, seed, bw):
    eta = 1e-4
    f = bandlimited_noise(grid, bw, seed)
    bank = build_wh_bank(WHParams(1, 1), grid)
    t = propagate(f, bank, 3, node_filter="significant", eta=eta, keep_tree=True)
    # positive children of a parent on the assumed band [-2R, 2R]
    rule_children = enumerate_sig_paths_rule(WH, (1, 1), 2.0, 1).xi[1] // 2
    for n in (1, 2):
        kids = Counter(q[:-1] for q in t.paths(n + 1))
        for q in t.paths(n):
            assert abs(kids.get(q, 0) - rule_children) <= 1


def test_empirical_rejects_zero(grid):
    from scatter_topo.signal import Signal
    bank = build_wh_bank(WHParams(1, 1), grid)
    with pytest.raises(PreconditionError):
        enumerate_sig_paths_empirical(Signal(grid, np.zeros(grid.num_samples)), bank, 1)


# -- taxonomy ---------------------------------------------------------------

def test_classify_wh_examples():
    assert classify_wh(1, 1, 0.8).name == SHALLOW
    assert classify_wh(0.4, 1, 5).name == SINGLE_LAYER
    assert classify_wh(0.3, 1, 5).name == SINGLE_LAYER
    assert classify_wh(0.75, 1, 5).name == CONSTANT_WIDTH
    assert classify_wh(1, 1, 5).name == EXPANDING_WIDTH


@pytest.mark.parametrize("step", [1e-3, 1e-2])
def test_classify_wh_boundaries(step):
    d, L = 1.0, 10.0
    assert classify_wh(d / 2 - step, d, L).name == SINGLE_LAYER
    assert classify_wh(d / 2, d, L).name == SINGLE_LAYER
    assert classify_wh(d / 2 + step, d, L).name == CONSTANT_WIDTH
    assert classify_wh(d - step, d, L).name == CONSTANT_WIDTH
    assert classify_wh(d, d, L).name == EXPANDING_WIDTH
    assert classify_wh(d + step, d, L).name == EXPANDING_WIDTH


def test_classes_agree_with_counts():
    d, L = 1.0, 10.0
    for R in np.linspace(0.05, 1.95, 39):
        xi = [xi_wh_closed(n, R, d, L) for n in range(1, 5)]
        name = classify_wh(R, d, L).name
        if name == SINGLE_LAYER:
            assert xi[0] > 0 and xi[1:] == [0, 0, 0]
        elif name == CONSTANT_WIDTH:
            assert len(set(xi)) == 1
        else:
            assert xi[1] > xi[0]


def test_wavelet_extremely_narrow():
    cls = classify_wav(SQRT2, 1.3, 5)
    assert cls.name == EXTREMELY_NARROW
    assert [xi_wav_closed(n, SQRT2, 1.3).value for n in range(6)] == [1, 2, 2, 2, 2, 2]
    assert enumerate_sig_paths_rule(WAVELET, SQRT2, 1.3, 5).xi == [1, 2, 2, 2, 2, 2]


def test_wavelet_depth_pruned():
    r, L = 1.2, 10.0
    M = depth_bound(r, L)
    assert M == pytest.approx(1 + math.log(L) / -math.log(r * r - 1))
    assert L * (r * r - 1) ** (M - 1) == pytest.approx(1.0)
    cls = classify_wav(r, L, 8)
    assert cls.name == DEPTH_PRUNED and cls.M == pytest.approx(M)
    xi = enumerate_sig_paths_rule(WAVELET, r, L, 8).xi
    assert all(v > 0 for v in xi[:math.ceil(M)])
    assert all(v == 0 for v in xi[math.ceil(M):])
    assert [xi_wav_closed(n, r, L).value for n in range(9)] == xi


def test_wavelet_classes_misc():
    assert classify_wav(2.0, 0.5, 3).name == SHALLOW
    assert classify_wav(2.0, 10, 3).name == EXPANDING_WIDTH
    assert classify_wav(SQRT2, 10, 3).name == EXPANDING_WIDTH
    assert classify_wav(1.2, 10, 3).name == EXPANDING_WIDTH     # depth below M
    with pytest.raises(PreconditionError):
        classify_wav(0.9, 10, 3)


# -- average width ----------------------------------------------------------

@pytest.mark.parametrize("N", [3, 4, 5])
@pytest.mark.parametrize("L", [5.0, 10.0, 20.0])
def test_theta_piecewise_formulas(N, L):
    d = 1.0
    for R in (0.55, 0.7, 0.99):
        assert theta_wh(N, R, d, L) == 2 * math.floor((L - d) / R + 1)
    for R in (1.0, 1.3, 1.9):
        first = 2 * math.floor((L - d) / R + 1)
        assert theta_wh(N, R, d, L) == pytest.approx(first * (2 ** N - 1) / N)


def test_theta_example():
    assert theta_wh(3, 0.99, 1, 10) == 20


def test_theta_nominal_single_layer():
    # nominal averaging divides the lone first layer by N
    assert theta_wh(3, 0.4, 1, 10, depth="nominal") == pytest.approx(
        2 * math.floor(9 / 0.4 + 1) / 3)
    assert theta_wh(3, 0.4, 1, 10) == 2 * math.floor(9 / 0.4 + 1)
    with pytest.raises(PreconditionError):
        theta_wh(3, 0.4, 1, 10, depth="median")


@pytest.mark.parametrize("N", [3, 4, 5])
@pytest.mark.parametrize("L", [5.0, 10.0, 20.0])
def test_minimize_theta(N, L):
    d = 1.0
    obj = minimize_theta(N, d, L)
    assert d / 2 < obj.R_star < d
    below = obj.R[obj.R < d][-1]
    assert obj.R_star == pytest.approx(below)
    assert theta_wh(N, 2 * d, d, L) > theta_wh(N, below, d, L)
    assert obj.classes[list(obj.R).index(obj.R_star)] == CONSTANT_WIDTH


def test_theta_non_increasing_on_constant_width_band():
    obj = minimize_theta(3, 1.0, 10.0, grid_step=0.01)
    band = (obj.R > 0.5) & (obj.R < 1.0)
    assert np.all(np.diff(obj.theta[band]) <= 0)


def test_minimize_theta_preconditions():
    with pytest.raises(PreconditionError):
        minimize_theta(2, 1, 10)
    with pytest.raises(PreconditionError):
        minimize_theta(3, 1, 0.5)
    with pytest.raises(PreconditionError):
        minimize_theta(3, 1, 10, grid_step=3.0)
