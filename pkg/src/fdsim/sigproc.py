"""Bit/symbol/waveform conversions.

Gray-coded M-PSK mapping, square-root-raised-cosine pulse shaping with
matched filtering, and circularly-symmetric complex Gaussian noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import fir_convolve

SUPPORTED_ORDERS = (2, 4, 8, 16)


def _gray(n: np.ndarray | int):
    return n ^ (n >> 1)


def constellation(m_order: int) -> np.ndarray:
    """PSK points e^{j(2*pi*k/M + pi/M)} for k = 0..M-1."""
    if m_order not in SUPPORTED_ORDERS:
        raise ValueError(f"unsupported PSK order {m_order}; must be one of {SUPPORTED_ORDERS}")
    k = np.arange(m_order)
    return np.exp(1j * (2.0 * np.pi * k / m_order + np.pi / m_order))


@dataclass(frozen=True)
class SrrcFilter:
    """Square-root-raised-cosine filter taps with their design parameters."""

    taps: np.ndarray
    rolloff: float
    span_symbols: int
    samples_per_symbol: int

    @property
    def group_delay(self) -> int:
        """One-sided delay of the symmetric filter, in samples."""
        return (len(self.taps) - 1) // 2


@dataclass(frozen=True)
class Waveform:
    """Complex baseband sample sequence with rate and delay metadata.

    ``delay_samples`` accumulates filter group delay so the receiver can
    sample at the correct symbol instants after matched filtering.
    """

    samples: np.ndarray
    sample_rate_hz: float
    samples_per_symbol: int
    delay_samples: int = 0

    def __post_init__(self):
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        if int(self.samples_per_symbol) != self.samples_per_symbol or self.samples_per_symbol < 1:
            raise ValueError("samples_per_symbol must be an integer >= 1")


def modulate_psk(bits, m_order: int) -> np.ndarray:
    """Map a {0,1} sequence onto Gray-coded unit-modulus PSK symbols."""
    bits = np.asarray(bits, dtype=np.int64)
    if bits.size and (bits.min() < 0 or bits.max() > 1):
        raise ValueError("bits must contain only 0 and 1")
    points = constellation(m_order)
    n_b = int(np.log2(m_order))
    if bits.size % n_b:
        raise ValueError(f"bit count {bits.size} not divisible by log2(M) = {n_b}")
    groups = bits.reshape(-1, n_b)
    labels = groups @ (1 << np.arange(n_b - 1, -1, -1))
    # label b sits at the point index k with gray(k) == b
    inverse_gray = np.empty(m_order, dtype=np.int64)
    inverse_gray[_gray(np.arange(m_order))] = np.arange(m_order)
    return points[inverse_gray[labels]]


def demodulate_psk(symbols, m_order: int) -> np.ndarray:
    """Minimum-distance PSK detection with inverse Gray mapping.

    Ties at a decision boundary resolve to the lower constellation index.
    """
    symbols = np.asarray(symbols, dtype=np.complex128)
    points = constellation(m_order)
    n_b = int(np.log2(m_order))
    if symbols.size == 0:
        return np.zeros(0, dtype=np.int64)
    d = np.abs(symbols[:, None] - points[None, :]) ** 2
    dmin = d.min(axis=1)
    # tolerance makes the lower-index tie-break robust to float rounding
    k = np.argmax(d <= dmin[:, None] * (1.0 + 1e-9) + 1e-30, axis=1)
    labels = _gray(k)
    shifts = np.arange(n_b - 1, -1, -1)
    return ((labels[:, None] >> shifts[None, :]) & 1).reshape(-1).astype(np.int64)


def srrc_taps(rolloff: float, span_symbols: int, samples_per_symbol: int) -> SrrcFilter:
    """Unit-energy SRRC taps on a symmetric grid of span*sps + 1 points."""
    beta = float(rolloff)
    if not 0.0 < beta <= 1.0:
        raise ValueError(f"rolloff must be in (0, 1], got {beta}")
    if span_symbols < 4:
        raise ValueError("span_symbols must be >= 4")
    if samples_per_symbol < 2:
        raise ValueError("samples_per_symbol must be >= 2")
    sps = samples_per_symbol
    n = span_symbols * sps
    t = np.arange(-n // 2, n // 2 + 1) / sps  # in symbol periods
    h = np.empty_like(t)
    for i, ti in enumerate(t):
        if ti == 0.0:
            h[i] = 1.0 - beta + 4.0 * beta / np.pi
        elif np.isclose(abs(ti), 1.0 / (4.0 * beta), rtol=0, atol=1e-12):
            h[i] = (beta / np.sqrt(2.0)) * (
                (1.0 + 2.0 / np.pi) * np.sin(np.pi / (4.0 * beta))
                + (1.0 - 2.0 / np.pi) * np.cos(np.pi / (4.0 * beta))
            )
        else:
            num = np.sin(np.pi * ti * (1.0 - beta)) + 4.0 * beta * ti * np.cos(
                np.pi * ti * (1.0 + beta)
            )
            den = np.pi * ti * (1.0 - (4.0 * beta * ti) ** 2)
            h[i] = num / den
    h /= np.sqrt(np.sum(h**2))
    return SrrcFilter(taps=h, rolloff=beta, span_symbols=span_symbols,
                      samples_per_symbol=sps)


def pulse_shape(symbols, filt: SrrcFilter, sample_rate_hz: float) -> Waveform:
    """Zero-stuff to the filter's sample rate and convolve with its taps.

    With unit-energy taps the mean per-symbol waveform energy equals the
    mean symbol energy, so no extra scaling is applied.
    """
    symbols = np.asarray(symbols, dtype=np.complex128)
    sps = filt.samples_per_symbol
    up = np.zeros(max(len(symbols), 1) * sps, dtype=np.complex128)
    up[: len(symbols) * sps : sps] = symbols
    out = fir_convolve(up, filt.taps)
    return Waveform(samples=out, sample_rate_hz=sample_rate_hz,
                    samples_per_symbol=sps, delay_samples=filt.group_delay)


def matched_filter_downsample(wave: Waveform, filt: SrrcFilter,
                              n_symbols: int | None = None) -> np.ndarray:
    """Matched-filter a waveform and sample it at symbol instants.

    Compensates the accumulated group delay recorded on the waveform plus
    this filter's own delay.
    """
    if wave.samples_per_symbol != filt.samples_per_symbol:
        raise ValueError("waveform and filter samples_per_symbol differ")
    if len(wave.samples) < len(filt.taps):
        raise ValueError("waveform shorter than the matched filter span")
    y = fir_convolve(wave.samples, filt.taps)
    offset = int(round(wave.delay_samples + filt.group_delay))
    sym = y[offset :: filt.samples_per_symbol]
    if n_symbols is not None:
        if len(sym) < n_symbols:
            raise ValueError("waveform too short for the requested symbol count")
        sym = sym[:n_symbols]
    return sym


def awgn(n: int, variance: float, rng: np.random.Generator) -> np.ndarray:
    """n i.i.d. CN(0, variance) samples; real/imag each carry variance/2."""
    if variance < 0:
        raise ValueError("noise variance must be non-negative")
    if n < 0:
        raise ValueError("length must be non-negative")
    if variance == 0.0:
        return np.zeros(n, dtype=np.complex128)
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
