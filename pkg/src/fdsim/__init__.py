"""Link-level simulator for full-duplex radios with analog-baseband
self-interference cancellation."""

from .cancellation import (ChannelEstimate, TrainingSignal, build_cancellation,
                           cancel, residual_power, run_training)
from .channel import (BasebandChannel, ChannelProfile, DesiredChannel,
                      apply_channel, band_isolation_db, derive_baseband_channel,
                      load_profile, make_desired_channel, save_profile,
                      support_length, synthesize_profile)
from .errors import (CalibrationError, ConfigError, EstimationError, FdsimError,
                     ProfileError)
from .harness import (SweepResult, SweepRow, SweepSpec, parse_config,
                      read_results, run_sweep, write_results)
from .link import (LinkConfig, LinkReport, ber, ebn0_to_noise_variance,
                   rate_difference, run_trial, sinr, sinr_gain_ratios)
from .sigproc import (SrrcFilter, Waveform, awgn, demodulate_psk,
                      matched_filter_downsample, modulate_psk, pulse_shape,
                      srrc_taps)

__version__ = "0.1.0"
