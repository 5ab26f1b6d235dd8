"""Training-based least-squares estimation of the self-interference channel
and construction/subtraction of the baseband cancellation signal."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from ._kernels import fir_convolve
from .channel import BasebandChannel, dbm_to_linear
from .errors import EstimationError
from .sigproc import SrrcFilter, Waveform, awgn, constellation, pulse_shape

# Fixed QPSK probe pattern, as constellation indices.  A constant run
# with a single antipodal symbol keeps the short-burst convolution matrix
# well conditioned (an i.i.d. pattern this short leaves parts of the band
# nearly unexcited).  Both nodes know the pattern; it is independent of
# the per-trial data RNG and tiles to any burst length.
TRAINING_PATTERN = (0, 0, 0, 2, 0)


@dataclass(frozen=True)
class TrainingSignal:
    symbols: np.ndarray
    waveform: Waveform


@dataclass(frozen=True)
class ChannelEstimate:
    taps_hat: np.ndarray
    training_symbols_used: int
    residual_training_error: float


def make_training_signal(n_tr: int, filt: SrrcFilter, sample_rate_hz: float) -> TrainingSignal:
    """Deterministic QPSK training burst of n_tr symbols."""
    if n_tr < 1:
        raise ValueError("need at least one training symbol")
    reps = -(-n_tr // len(TRAINING_PATTERN))
    indices = np.asarray((TRAINING_PATTERN * reps)[:n_tr])
    symbols = constellation(4)[indices]
    return TrainingSignal(symbols=symbols,
                          waveform=pulse_shape(symbols, filt, sample_rate_hz))


def _convolution_matrix(x: np.ndarray, order: int, n_rows: int) -> np.ndarray:
    col = np.zeros(n_rows, dtype=np.complex128)
    col[: len(x)] = x
    row = np.zeros(order, dtype=np.complex128)
    row[0] = x[0]
    return toeplitz(col, row)


def run_training(h_aa: BasebandChannel, p_ta_dbm: float, n_tr: int,
                 noise_variance: float, estimator_order: int,
                 rng: np.random.Generator, filt: SrrcFilter) -> ChannelEstimate:
    """Estimate the self-interference channel from a silent-far-node burst.

    The known training waveform passes through the true channel with
    additive noise; the estimate solves the linear least-squares problem on
    the convolution model for the requested number of taps.
    """
    if estimator_order < 1:
        raise ValueError("estimator_order must be >= 1")
    training = make_training_signal(n_tr, filt, h_aa.sample_rate_hz)
    x = training.waveform.samples
    if estimator_order > len(x):
        raise EstimationError(
            f"training waveform has {len(x)} samples; cannot identify "
            f"{estimator_order} taps (increase n_tr or lower the order)"
        )
    amp = math.sqrt(dbm_to_linear(p_ta_dbm))
    r = amp * fir_convolve(x, h_aa.taps) + awgn(len(x) + len(h_aa.taps) - 1,
                                                noise_variance, rng)
    mat = amp * _convolution_matrix(x, estimator_order, len(r))
    taps_hat, _, rank, _ = np.linalg.lstsq(mat, r, rcond=None)
    if rank < 1:
        raise EstimationError("training signal is degenerate; estimation failed")
    fit = mat @ taps_hat
    denom = float(np.sum(np.abs(r) ** 2))
    residual = float(np.sum(np.abs(r - fit) ** 2) / denom) if denom > 0 else 0.0
    return ChannelEstimate(taps_hat=taps_hat, training_symbols_used=n_tr,
                           residual_training_error=residual)


def build_cancellation(x_a: Waveform, estimate: ChannelEstimate,
                       p_ta_dbm: float) -> Waveform:
    """Negated replica of the self-interference from the channel estimate."""
    amp = math.sqrt(dbm_to_linear(p_ta_dbm))
    out = -amp * fir_convolve(x_a.samples, estimate.taps_hat)
    return Waveform(samples=out, sample_rate_hz=x_a.sample_rate_hz,
                    samples_per_symbol=x_a.samples_per_symbol,
                    delay_samples=x_a.delay_samples)


def cancel(r_a: Waveform, x_hat: Waveform) -> Waveform:
    """Sample-wise sum of the received signal and the cancellation signal."""
    if r_a.sample_rate_hz != x_hat.sample_rate_hz:
        raise ValueError("sample rates differ")
    n = max(len(r_a.samples), len(x_hat.samples))
    out = np.zeros(n, dtype=np.complex128)
    out[: len(r_a.samples)] = r_a.samples
    out[: len(x_hat.samples)] += x_hat.samples
    return Waveform(samples=out, sample_rate_hz=r_a.sample_rate_hz,
                    samples_per_symbol=r_a.samples_per_symbol,
                    delay_samples=r_a.delay_samples)


def residual_power(h_aa: BasebandChannel, estimate: ChannelEstimate,
                   x_a: Waveform, p_ta_dbm: float, noise: np.ndarray,
                   exclude: int | None = None) -> float:
    """Mean power of the residual self-interference plus noise.

    Computed directly from the estimation error convolved with the
    transmitted waveform; the first and last ``exclude`` samples (filter
    and channel transients) are left out of the measurement window.
    """
    p_lin = dbm_to_linear(p_ta_dbm)
    n_h = max(len(h_aa.taps), len(estimate.taps_hat))
    err = np.zeros(n_h, dtype=np.complex128)
    err[: len(h_aa.taps)] = h_aa.taps
    err[: len(estimate.taps_hat)] -= estimate.taps_hat
    res = math.sqrt(p_lin) * fir_convolve(x_a.samples, err)
    n = max(len(res), len(noise))
    full = np.zeros(n, dtype=np.complex128)
    full[: len(res)] = res
    full[: len(noise)] += noise
    if exclude is None:
        exclude = len(estimate.taps_hat)
    window = full[exclude : n - exclude] if n > 2 * exclude else full
    return float(np.mean(np.abs(window) ** 2))
