import json
import math

import numpy as np
import pytest

from conftest import SQRT2
from scatter_topo.errors import PreconditionError
from scatter_topo.filters import (WAVELET, WH, WaveletParams, WHParams, bank_from_json,
                                  build_bank, build_wavelet_bank, build_wh_bank,
                                  filter_support, littlewood_paley_sum, mother_wavelet,
                                  verify_parseval, verify_symmetry, wavelet_support,
                                  wh_support)
from scatter_topo.signal import Grid


def wh_oracle(omega, R, delta, k):
    """Raised-cosine root evaluated directly from its definition."""
    c = R * abs(k) + delta
    w = omega if k > 0 else -omega
    return np.where(np.abs(w - c) < R, np.cos(np.pi * (w - c) / (2 * R)), 0.0)


# -- parameters -------------------------------------------------------------

@pytest.mark.parametrize("R,delta", [(0.0, 1.0), (-1.0, 1.0), (3.0, 1.0)])
def test_wh_params_preconditions(R, delta):
    with pytest.raises(PreconditionError):
        WHParams(R, delta)


@pytest.mark.parametrize("r", [1.0, 0.5, -2.0])
def test_wavelet_params_preconditions(r):
    with pytest.raises(PreconditionError):
        WaveletParams(r)


def test_grid_too_coarse_for_bank():
    with pytest.raises(PreconditionError):
        build_wh_bank(WHParams(1, 1), Grid(4, 1.0))
    with pytest.raises(PreconditionError):
        build_wavelet_bank(WaveletParams(4.0), Grid(8, 1.0))


# -- WH atoms ---------------------------------------------------------------

@pytest.mark.parametrize("R,delta", [(1, 1), (0.5, 1), (1.5, 1), (0.3, 0.5)])
def test_wh_atoms_match_definition(small_grid, R, delta):
    bank = build_wh_bank(WHParams(R, delta), small_grid)
    for k in (1, 2, -1, -3):
        a = bank.atom(k).dense()
        assert np.max(np.abs(a - wh_oracle(small_grid.freqs, R, delta, k))) < 1e-12


def test_wh_peak(small_grid):
    bank = build_wh_bank(WHParams(1, 1), small_grid)
    m = small_grid.bin_index(2.0)     # delta + R
    assert bank.atom(1).dense()[m] == pytest.approx(1.0)
    others = [bank.atom(k).dense()[m] for k in bank.indices if k != 1]
    assert max(others) == 0.0


def test_chi_covers_gap(small_grid):
    for bank in (build_wh_bank(WHParams(0.5, 1), small_grid),
                 build_wavelet_bank(WaveletParams(2.0), small_grid)):
        assert bank.chi[0] == pytest.approx(1.0)
        inner = np.abs(small_grid.freqs) < bank.gap
        assert np.allclose(bank.chi[inner], 1.0)


def test_wh_lambda_max(small_grid):
    R, delta = 1.0, 1.0
    bank = build_wh_bank(WHParams(R, delta), small_grid)
    cov = small_grid.nyquist - 2 * R
    assert bank.covered_band == cov
    assert bank.lambda_max == math.ceil((cov - delta + R) / R)
    # last atom reaches past the covered band
    assert wh_support(bank.params, bank.lambda_max)[1] >= cov


# -- wavelet atoms ----------------------------------------------------------

def test_mother_wavelet_endpoints():
    r = 2.0
    vals = mother_wavelet(r, np.array([1 / r, 1.0, r, 0.3, 3.0]))
    assert vals[1] == pytest.approx(1.0)
    assert vals[0] == 0 and vals[2] == 0 and vals[3] == 0 and vals[4] == 0


def test_wavelet_atoms_are_dilations(small_grid):
    r = 2.0
    bank = build_wavelet_bank(WaveletParams(r), small_grid)
    for j in (1, 2, 3):
        a = bank.atom(j)
        w = small_grid.freqs[a.start:a.stop]
        assert np.allclose(a.values, mother_wavelet(r, w / r ** j), atol=1e-14)


def test_supports_direct_formulas():
    assert wh_support(WHParams(1, 1), 1) == (1, 3)
    assert wh_support(WHParams(1, 1), -1) == (-3, -1)
    assert wavelet_support(WaveletParams(2), 2) == (2, 8)
    assert wavelet_support(WaveletParams(1.5), 1) == (1, 1.5 ** 2)


def test_filter_support_dispatch(small_grid):
    bank = build_wavelet_bank(WaveletParams(2.0), small_grid)
    assert filter_support(bank, 1) == (1.0, 4.0)
    with pytest.raises(PreconditionError):
        filter_support(bank, 99)


def test_measured_support_inside_analytic(small_grid):
    for bank in (build_wh_bank(WHParams(0.5, 1), small_grid),
                 build_wavelet_bank(WaveletParams(SQRT2), small_grid)):
        for lam in bank.indices:
            lo, hi = bank.atom(lam).measured_support()
            alo, ahi = bank.atom(lam).analytic_support
            assert alo < lo <= hi < ahi


# -- frame identity ---------------------------------------------------------

@pytest.mark.parametrize("flavor,kw", [(WH, dict(R=1, delta=1)), (WH, dict(R=0.5, delta=1)),
                                       (WH, dict(R=1.5, delta=1)), (WAVELET, dict(r=SQRT2)),
                                       (WAVELET, dict(r=2)), (WAVELET, dict(r=3))])
def test_parseval_default_grid(grid, flavor, kw):
    bank = build_bank(flavor, grid, **kw)
    rep = verify_parseval(bank)
    assert rep.passed and rep.max_deviation < 1e-9


def test_parseval_direct_sum(small_grid):
    # independent of littlewood_paley_sum: sum the dense atoms
    bank = build_wh_bank(WHParams(0.7, 1), small_grid)
    total = bank.chi ** 2 + sum(bank.atom(k).dense() ** 2 for k in bank.indices)
    inside = np.abs(small_grid.freqs) <= bank.covered_band
    assert np.max(np.abs(total[inside] - 1)) < 1e-12
    assert np.allclose(total, littlewood_paley_sum(bank))


@pytest.mark.parametrize("lam", [1, 3, -2])
def test_parseval_detects_missing_atom(small_grid, lam):
    bank = build_wh_bank(WHParams(1, 1), small_grid)
    rep = verify_parseval(bank.without(lam))
    assert not rep.passed
    assert rep.max_deviation == pytest.approx(np.max(bank.atom(lam).values ** 2), abs=1e-12)
    assert rep.max_deviation == pytest.approx(1.0, abs=1e-12)


# -- symmetry ---------------------------------------------------------------

@pytest.mark.parametrize("make", [lambda g: build_wh_bank(WHParams(1, 1), g),
                                  lambda g: build_wh_bank(WHParams(0.37, 0.5), g),
                                  lambda g: build_wavelet_bank(WaveletParams(2), g),
                                  lambda g: build_wavelet_bank(WaveletParams(1.3), g)])
def test_symmetry(grid, make):
    assert verify_symmetry(make(grid)) < 1e-12


def test_symmetry_detects_zeroed_atom(small_grid):
    bank = build_wh_bank(WHParams(1, 1), small_grid)
    broken = bank.replace_atom(-1, np.zeros_like(bank.atom(-1).values))
    assert verify_symmetry(broken) == pytest.approx(1.0, abs=1e-12)


def test_json_round_trip(small_grid):
    for bank in (build_wh_bank(WHParams(0.5, 1), small_grid),
                 build_wavelet_bank(WaveletParams(2), small_grid)):
        doc = json.loads(json.dumps(bank.to_json()))
        again = bank_from_json(doc)
        assert again.indices == bank.indices
        assert np.array_equal(again.chi, bank.chi)
        assert doc["spectral_gap"] == [-bank.gap, bank.gap]


def test_build_bank_requires_params(small_grid):
    with pytest.raises(PreconditionError):
        build_bank(WH, small_grid, R=1)
    with pytest.raises(PreconditionError):
        build_bank(WAVELET, small_grid)
    with pytest.raises(PreconditionError):
        build_bank("gabor", small_grid)
