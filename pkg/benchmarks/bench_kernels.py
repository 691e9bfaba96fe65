"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--samples 16384]

Times each kernel on inputs shaped like those met during propagation,
then one end-to-end ``propagate`` call under each backend.
"""
import argparse
import timeit

import numpy as np

from scatter_topo import _kernels_py, kernels
from scatter_topo.filters import WaveletParams, WHParams, build_wavelet_bank, build_wh_bank
from scatter_topo.scattering import propagate
from scatter_topo.signal import Grid, analyze, bandlimited_noise

NAMES = ("symmetric_support_index", "window_energies", "window_max_abs_diff")


def backends():
    out = {"python": {n: getattr(_kernels_py, n) for n in NAMES}}
    try:
        from scatter_topo import _kernels
        out["cython"] = {n: getattr(_kernels, n) for n in NAMES}
    except ImportError:
        pass
    return out


def best(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--samples", type=int, default=2 ** 14)
    ap.add_argument("--depth", type=int, default=3)
    args = ap.parse_args()

    grid = Grid(args.samples)
    f = bandlimited_noise(grid, 6.0, seed=0)
    power = np.ascontiguousarray(np.fft.fftshift(analyze(f).power()))
    bank = build_wh_bank(WHParams(0.5, 1.0), grid)
    packed = bank.packed(bank.indices)
    natural = np.ascontiguousarray(analyze(f).power())
    a = np.ascontiguousarray(bank.atom(3).dense())
    b = np.ascontiguousarray(bank.atom(-3).dense()[(-np.arange(grid.num_samples)) % grid.num_samples])

    impls = backends()
    print(f"grid T={grid.num_samples}, {len(bank.indices)} atoms; active backend: {kernels.BACKEND}")
    print(f"{'kernel':<28}" + "".join(f"{k:>14}" for k in impls) + f"{'speedup':>10}")
    cases = {
        "symmetric_support_index": lambda k: k["symmetric_support_index"](power, 1e-3),
        "window_energies": lambda k: k["window_energies"](natural, *packed),
        "window_max_abs_diff": lambda k: k["window_max_abs_diff"](a, b),
    }
    for name, call in cases.items():
        t = {be: best(lambda: call(impl), args.repeat, 20) for be, impl in impls.items()}
        speed = t["python"] / t["cython"] if "cython" in t else float("nan")
        print(f"{name:<28}" + "".join(f"{v * 1e6:>12.1f}us" for v in t.values()) + f"{speed:>9.1f}x")

    for label, bk in (("propagate wh(0.5,1)", bank),
                      ("propagate wavelet(sqrt2)", build_wavelet_bank(WaveletParams(2 ** 0.5), grid))):
        t = {}
        for be, impl in impls.items():
            saved = {n: getattr(kernels, n) for n in NAMES}
            for n in NAMES:
                setattr(kernels, n, impl[n])
            try:
                t[be] = best(lambda: propagate(f, bk, args.depth, node_filter="significant"),
                             max(1, args.repeat // 2), 1)
            finally:
                for n, fn in saved.items():
                    setattr(kernels, n, fn)
        speed = t["python"] / t["cython"] if "cython" in t else float("nan")
        print(f"{label:<28}" + "".join(f"{v * 1e3:>12.1f}ms" for v in t.values()) + f"{speed:>9.1f}x")


if __name__ == "__main__":
    main()
