"""Single full-duplex trial orchestration and link metrics.

Runs one frame from the near node's perspective: both nodes transmit,
the self-interference arrives through the scheme's measured-style channel,
optional baseband cancellation subtracts its estimated replica, and the
surviving signal is matched-filtered and detected.  Metrics are the
measured SINR, bit error rate, and Shannon rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from . import cancellation, channel, sigproc
from .errors import ConfigError

SCHEMES = ("PS", "AC", "PS+B", "AC+B")

#: Scheme-optimal carrier frequencies (the system is tuned to whichever
#: RF scheme is in use).
SCHEME_FC_HZ = {"PS": channel.PS_PEAK_HZ, "AC": channel.AC_PEAK_HZ}

#: Default canceller model order: the longest FIR identifiable from the
#: default 5-symbol training burst at the widest default bandwidth.  Kept
#: fixed across bandwidth sweeps — the canceller hardware does not grow
#: extra taps when the waveform narrows.
DEFAULT_ESTIMATOR_ORDER = 26


@dataclass(frozen=True)
class LinkConfig:
    """Simulation parameters; defaults follow the prototype's network setup."""

    n_b: int = 2
    mod_order: int = 4
    n_bits: int = 2000
    n_training: int = 5
    f_c_hz: float | None = None  # None: scheme-optimal frequency
    sample_rate_hz: float = 20e6
    channel_bandwidth_hz: float = 20e6
    signal_bandwidth_hz: float = 10e6
    p_ta_dbm: float = 0.0
    p_rb_dbm: float = -60.0
    scheme: str = "PS"
    ebn0_db: float = 90.0  # cancellation-limited by default
    rolloff: float = 0.25
    span_symbols: int = 8
    estimator_order: int | None = None  # None: DEFAULT_ESTIMATOR_ORDER
    n_taps: int = 256
    seed: int = 0

    def __post_init__(self):
        if self.mod_order != 2**self.n_b:
            raise ConfigError(f"mod_order {self.mod_order} != 2**n_b with n_b={self.n_b}")
        if self.mod_order not in sigproc.SUPPORTED_ORDERS:
            raise ConfigError(f"unsupported modulation order {self.mod_order}")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.signal_bandwidth_hz > self.sample_rate_hz:
            raise ConfigError("signal bandwidth cannot exceed the sample rate")
        sps = self.sample_rate_hz / self.signal_bandwidth_hz
        if abs(sps - round(sps)) > 1e-9:
            raise ConfigError(
                f"sample_rate/signal_bandwidth = {sps} is not an integer"
            )
        if self.n_bits % self.n_b:
            raise ConfigError(f"n_bits={self.n_bits} not divisible by n_b={self.n_b}")

    @property
    def samples_per_symbol(self) -> int:
        return int(round(self.sample_rate_hz / self.signal_bandwidth_hz))

    @property
    def rf_scheme(self) -> str:
        return self.scheme.split("+")[0]

    @property
    def uses_baseband_cancellation(self) -> bool:
        return self.scheme.endswith("+B")

    @property
    def carrier_hz(self) -> float:
        return self.f_c_hz if self.f_c_hz is not None else SCHEME_FC_HZ[self.rf_scheme]


@dataclass(frozen=True)
class LinkReport:
    """Per-trial metrics; the rate field is always log2(1 + linear SINR)."""

    sinr_db: float
    ber: float
    rate_bps_hz: float
    residual_power_dbm: float
    estimate_error_db: float | None
    config: LinkConfig
    trials: int = 1

    def __post_init__(self):
        if not 0.0 <= self.ber <= 1.0:
            raise ValueError(f"ber {self.ber} outside [0, 1]")
        expected = rate_from_sinr_db(self.sinr_db)
        if not math.isclose(self.rate_bps_hz, expected, rel_tol=1e-12, abs_tol=1e-12):
            raise ValueError("rate_bps_hz inconsistent with sinr_db")


def rate_from_sinr_db(sinr_db: float) -> float:
    if sinr_db == math.inf:
        return math.inf
    return math.log2(1.0 + 10.0 ** (sinr_db / 10.0))


def ebn0_to_noise_variance(ebn0_db: float, reference_power: float, n_b: int,
                           samples_per_symbol: int) -> float:
    """Per-sample noise variance for a target Eb/N0.

    ``reference_power`` is the mean per-sample power of the reference
    (desired) waveform, so reference_power * samples_per_symbol is its
    symbol energy and the quotient by n_b the energy per bit.
    """
    return reference_power * samples_per_symbol / (n_b * 10.0 ** (ebn0_db / 10.0))


def ber(tx_bits, rx_bits) -> float:
    """Fraction of differing bits."""
    tx = np.asarray(tx_bits)
    rx = np.asarray(rx_bits)
    if tx.shape != rx.shape:
        raise ValueError(f"bit vector lengths differ: {tx.shape} vs {rx.shape}")
    if tx.size == 0:
        return 0.0
    return float(np.mean(tx != rx))


def sinr(desired: np.ndarray, residual: np.ndarray) -> float:
    """Ratio of mean powers in dB; +inf when the residual is exactly zero."""
    if len(desired) != len(residual):
        raise ValueError("desired and residual measurement windows differ in length")
    p_desired = float(np.mean(np.abs(desired) ** 2))
    p_residual = float(np.mean(np.abs(residual) ** 2))
    if p_residual == 0.0:
        return math.inf
    return 10.0 * math.log10(p_desired / p_residual)


@lru_cache(maxsize=16)
def _baseband_channel(scheme: str, f_c_hz: float, band_hz: float,
                      sample_rate_hz: float, n_taps: int) -> channel.BasebandChannel:
    profile = channel.synthesize_profile(scheme)
    return channel.derive_baseband_channel(profile, f_c_hz, band_hz,
                                           sample_rate_hz, n_taps)


def self_interference_channel(config: LinkConfig) -> channel.BasebandChannel:
    """The scheme's baseband self-interference channel for this config."""
    return _baseband_channel(config.rf_scheme, config.carrier_hz,
                             config.channel_bandwidth_hz,
                             config.sample_rate_hz, config.n_taps)


def run_trial(config: LinkConfig, rng: np.random.Generator | None = None) -> LinkReport:
    """Simulate one full-duplex frame and report the link metrics."""
    if rng is None:
        rng = np.random.default_rng(config.seed)
    sps = config.samples_per_symbol
    filt = sigproc.srrc_taps(config.rolloff, config.span_symbols, sps)
    h_aa = self_interference_channel(config)

    p_rb_lin = channel.dbm_to_linear(config.p_rb_dbm)
    # reference is the desired signal's waveform-level (per-sample) power
    noise_var = ebn0_to_noise_variance(config.ebn0_db, p_rb_lin / sps,
                                       config.n_b, sps)

    estimate = None
    if config.uses_baseband_cancellation:
        order = config.estimator_order
        if order is None:
            order = DEFAULT_ESTIMATOR_ORDER
        estimate = cancellation.run_training(h_aa, config.p_ta_dbm,
                                             config.n_training, noise_var,
                                             order, rng, filt)

    n_sym = config.n_bits // config.n_b
    bits_a = rng.integers(0, 2, size=config.n_bits)
    bits_b = rng.integers(0, 2, size=config.n_bits)
    x_a = sigproc.pulse_shape(sigproc.modulate_psk(bits_a, config.mod_order),
                              filt, config.sample_rate_hz)
    x_b = sigproc.pulse_shape(sigproc.modulate_psk(bits_b, config.mod_order),
                              filt, config.sample_rate_hz)

    p_tb_dbm = config.p_ta_dbm  # symmetric nodes
    h_ba = channel.make_desired_channel(config.p_rb_dbm, p_tb_dbm, rng)
    si = channel.apply_channel(x_a, h_aa, config.p_ta_dbm)

    n_full = len(si.samples)
    desired = np.zeros(n_full, dtype=np.complex128)
    desired[: len(x_b.samples)] = (
        math.sqrt(channel.dbm_to_linear(p_tb_dbm)) * h_ba.gain * x_b.samples
    )
    z_a = sigproc.awgn(n_full, noise_var, rng)
    r_a = sigproc.Waveform(samples=desired + si.samples + z_a,
                           sample_rate_hz=config.sample_rate_hz,
                           samples_per_symbol=sps,
                           delay_samples=x_b.delay_samples)

    if estimate is not None:
        x_hat = cancellation.build_cancellation(x_a, estimate, config.p_ta_dbm)
        y_a = cancellation.cancel(r_a, x_hat)
    else:
        y_a = r_a

    # detection: matched filter, known-phase equalization, demodulation
    symbols = sigproc.matched_filter_downsample(y_a, filt, n_symbols=n_sym)
    symbols = symbols * np.exp(-1j * np.angle(h_ba.gain))
    bits_hat = sigproc.demodulate_psk(symbols, config.mod_order)
    p_b = ber(bits_b, bits_hat)

    residual = y_a.samples - desired
    head = 2 * filt.group_delay + channel.support_length(h_aa.taps, 0.9999)
    tail = n_full - 2 * filt.group_delay
    if tail - head < sps:
        head, tail = 0, n_full
    gamma_db = sinr(desired[head:tail], residual[head:tail])
    residual_dbm = 10.0 * math.log10(
        max(float(np.mean(np.abs(residual[head:tail]) ** 2)), 1e-300)
    )

    est_err_db = None
    if estimate is not None:
        err = np.array(h_aa.taps, dtype=np.complex128, copy=True)
        err[: len(estimate.taps_hat)] -= estimate.taps_hat
        total = float(np.sum(np.abs(h_aa.taps) ** 2))
        est_err_db = 10.0 * math.log10(
            max(float(np.sum(np.abs(err) ** 2)) / total, 1e-300)
        )

    return LinkReport(sinr_db=gamma_db, ber=p_b,
                      rate_bps_hz=rate_from_sinr_db(gamma_db),
                      residual_power_dbm=residual_dbm,
                      estimate_error_db=est_err_db,
                      config=config)


def _comparison_key(config: LinkConfig) -> LinkConfig:
    return replace(config, scheme="PS", f_c_hz=None, estimator_order=None)


def _require_comparable(*reports: LinkReport) -> None:
    keys = {_comparison_key(r.config) for r in reports}
    if len(keys) != 1:
        raise ValueError("reports differ in more than the cancellation scheme")


def sinr_gain_ratios(reports: dict[str, LinkReport]) -> dict[str, float]:
    """Relative SINR gains between schemes, in dB.

    Expects one report per scheme label; all reports must share the same
    configuration apart from the scheme itself.
    """
    missing = [s for s in SCHEMES if s not in reports]
    if missing:
        raise ValueError(f"missing reports for schemes: {missing}")
    _require_comparable(*reports.values())
    g = {s: reports[s].sinr_db for s in SCHEMES}
    return {
        "ps_b_over_ac_b": g["PS+B"] - g["AC+B"],
        "ps_b_over_ps": g["PS+B"] - g["PS"],
        "ac_b_over_ac": g["AC+B"] - g["AC"],
    }


def rate_difference(r_ps_b: LinkReport, r_ac_b: LinkReport) -> float:
    """Achievable-rate advantage of PS+B over AC+B, in bps/Hz."""
    _require_comparable(r_ps_b, r_ac_b)
    return r_ps_b.rate_bps_hz - r_ac_b.rate_bps_hz
