"""Pure-numpy reference implementations of the hot kernels.

Signatures mirror ``_kernels.pyx`` exactly; ``kernels`` picks one at import.
"""
import numpy as np


def symmetric_support_index(power, eta):
    """Smallest ``k`` such that bins ``c-k .. c+k`` hold ``(1 - eta)`` of the total.

    ``power`` is fftshifted (zero frequency at ``c = len(power) // 2``).
    """
    n = power.shape[0]
    c = n // 2
    total = np.cumsum(power)[-1]
    target = (1.0 - eta) * total
    # accumulate in the order c, c+1, c-1, c+2, c-2, ... (same as the compiled loop)
    order = np.empty(n, dtype=power.dtype)
    order[0] = power[c]
    order[1:2 * c - 1:2] = power[c + 1:]
    order[2:2 * c - 1:2] = power[c - 1:0:-1]
    order[n - 1] = power[0]
    band = np.cumsum(order)[np.r_[0, 2:n:2, n - 1]]
    hits = np.nonzero(band >= target)[0]
    return int(hits[0]) if hits.size else c


def window_energies(power, starts, lengths, offsets, values):
    """Per-window weighted sums ``sum_i power[starts[k] + i] * values[offsets[k] + i]``."""
    K = starts.shape[0]
    out = np.empty(K)
    for k in range(K):
        s, m, o = starts[k], lengths[k], offsets[k]
        out[k] = np.dot(power[s:s + m], values[o:o + m])
    return out


def window_max_abs_diff(a, b):
    """``max |a - b|`` over two equal-length real arrays."""
    if a.shape[0] == 0:
        return 0.0
    return float(np.max(np.abs(a - b)))
