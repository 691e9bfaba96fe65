"""Tunable Weyl-Heisenberg and wavelet scattering networks.

Filter-bank construction, tree propagation with energy bookkeeping,
depth-constrained design and operationally-significant-node topology.
"""
from .errors import GridMismatchError, PreconditionError, ScatterTopoError
from .kernels import BACKEND
from .signal import (Grid, Signal, Spectrum, analyze, convolve,
                     effective_support, l2_norm, modulus, relu_complex,
                     sobolev_norm, synthesize)
from .filters import (FilterBank, WaveletParams, WHParams, build_wavelet_bank,
                      build_wh_bank, filter_support, verify_parseval,
                      verify_symmetry)
from .scattering import (energy_capture, feature_energy, layer_energy,
                         nonlinearity_spectrum_experiment, propagate)

__version__ = "0.1.0"
