"""CSV emitters for decay-factor curves, width curves and demodulation spectra."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .design import decay_factor_wav, decay_factor_wh
from .filters import WHParams, build_wh_bank
from .errors import PreconditionError
from .scattering import nonlinearity_spectrum_experiment
from .signal import DEFAULT_ETA, Grid, Signal, analyze, convolve, gaussian
from .topology import minimize_theta

FIGURES = ("fig_decay", "fig_theta", "fig_demod")


def fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_csv(path, header, rows):
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def decay_curves(delta: float = 1.0):
    """``(R, a1(R))`` on ``(0, 2 delta]`` and ``(r, a2(r))`` on ``(1, 5]``."""
    wh = [(delta * i / 100, decay_factor_wh(delta * i / 100, delta))
          for i in range(30, 201)]
    wav = [(1 + i / 100, decay_factor_wav(1 + i / 100)) for i in range(5, 401)]
    return wh, wav


def demod_spectra(f: Signal, R: float, delta: float, k: int,
                  eta: float = DEFAULT_ETA):
    """Per-bin magnitudes of the band signal and its three non-linear images."""
    bank = build_wh_bank(WHParams(R, delta), f.grid)
    band = analyze(convolve(f, bank.atom(k).spectrum))
    out = {nl: nonlinearity_spectrum_experiment(f, bank, k, nl, eta)
           for nl in ("squared_modulus", "modulus", "relu")}
    order = np.argsort(f.grid.freqs)
    rows = zip(f.grid.freqs[order], np.abs(band.coeffs)[order],
               *(np.abs(out[nl].spectrum.coeffs)[order]
                 for nl in ("squared_modulus", "modulus", "relu")))
    esupp = {nl: out[nl].esupp for nl in out}
    return rows, esupp


def emit_figure_data(which: str, out_dir, *, delta: float = 1.0, N: int = 3,
                     L: float = 10.0, step: float | None = None, R: float = 1.0,
                     k: int = 5, grid: Grid | None = None, signal: Signal | None = None,
                     eta: float = DEFAULT_ETA):
    """Write the CSV(s) for one figure into ``out_dir``; returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if which == "fig_decay":
        wh, wav = decay_curves(delta)
        return [write_csv(out_dir / "fig_decay_wh.csv", ["R", "a1"], wh),
                write_csv(out_dir / "fig_decay_wav.csv", ["r", "a2"], wav)]
    if which == "fig_theta":
        obj = minimize_theta(N, delta, L, step)
        return [write_csv(out_dir / "fig_theta.csv", ["R", "Theta", "topology_class"],
                          obj.rows())]
    if which == "fig_demod":
        grid = grid or Grid()
        f = signal if signal is not None else gaussian(grid, 8.0)
        rows, _ = demod_spectra(f, R, delta, k, eta)
        return [write_csv(out_dir / "fig_demod.csv",
                          ["omega", "band", "squared_modulus", "modulus", "relu"], rows)]
    raise PreconditionError(f"unknown figure {which!r}; choose from {FIGURES}")
