"""Hot numeric kernels.

The simulator spends nearly all of its time in complex FIR convolutions
(pulse shaping, channel application, cancellation, matched filtering).
Those run through a numba-compiled kernel when available; setting the
environment variable ``FDSIM_NO_NUMBA=1`` (or missing numba) selects a
pure-numpy fallback.  ``benchmarks/bench_kernels.py`` compares both paths.
"""

import os

import numpy as np

USE_NUMBA = os.environ.get("FDSIM_NO_NUMBA", "0") != "1"

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        USE_NUMBA = False

if USE_NUMBA:

    @njit(cache=True)
    def _convolve_full(x, h):
        nx, nh = x.shape[0], h.shape[0]
        out = np.zeros(nx + nh - 1, dtype=np.complex128)
        for i in range(nx):
            xi = x[i]
            for j in range(nh):
                out[i + j] += xi * h[j]
        return out

else:

    def _convolve_full(x, h):
        return np.convolve(x, h)


def fir_convolve(x, h):
    """Full linear convolution of two 1-d sequences, complex128 output."""
    x = np.ascontiguousarray(x, dtype=np.complex128)
    h = np.ascontiguousarray(h, dtype=np.complex128)
    if x.size == 0 or h.size == 0:
        raise ValueError("fir_convolve requires non-empty inputs")
    return _convolve_full(x, h)
