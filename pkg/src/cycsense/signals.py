"""Signal generators at a normalized digital IF.

All frequencies are expressed in cycles/sample of the generated buffer, so
a physical carrier (e.g. 91.44 MHz in the VHF band) maps onto a digital
carrier below 0.25.  Generators are pure functions of their parameters and
a seed: calling twice with the same arguments yields bit-identical buffers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

# Amplitude boost of the continual carrier pilot relative to a data
# subcarrier.  A plain random-QPSK payload is circularly symmetric and
# carries no feature at twice the carrier frequency; the boosted pilot
# (in the spirit of DVB-T continual pilots) is what the cyclostationary
# detector locks onto.
PILOT_BOOST = 2.0


@dataclass(frozen=True)
class SampleBuffer:
    """Real-valued sample sequence with normalized-rate metadata.

    ``sample_rate_norm`` records samples per symbol-clock tick; everything
    downstream works in cycles/sample, so it defaults to 1.0 and is carried
    for provenance only.
    """

    samples: np.ndarray
    sample_rate_norm: float = 1.0

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1 or samples.size < 1:
            raise ConfigurationError("SampleBuffer requires a nonempty 1-D sample sequence")
        if not np.all(np.isfinite(samples)):
            raise ConfigurationError("SampleBuffer samples must all be finite")
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return int(self.samples.size)

    def power(self) -> float:
        """Mean square of the samples."""
        return float(np.mean(self.samples**2))


@dataclass(frozen=True)
class OfdmParams:
    """Shape of the simplified DVB-T-like OFDM burst.

    ``carrier_fc`` is the digital carrier and ``subcarrier_bw`` the occupied
    bandwidth, both in cycles/sample.  Only subcarriers whose main lobe fits
    inside the occupied band carry payload; the DC bin holds the boosted
    continual pilot.
    """

    n_subcarriers: int = 256
    n_symbols: int = 13
    guard_fraction: float = 0.25
    carrier_fc: float = 0.125
    subcarrier_bw: float = 0.11

    def __post_init__(self):
        n = self.n_subcarriers
        if n < 2 or (n & (n - 1)) != 0:
            raise ConfigurationError("n_subcarriers must be a power of two")
        if self.n_symbols < 1:
            raise ConfigurationError("n_symbols must be at least 1")
        if not 0.0 <= self.guard_fraction < 0.5:
            raise ConfigurationError("guard_fraction must lie in [0, 0.5)")
        guard_samples = self.guard_fraction * n
        if abs(guard_samples - round(guard_samples)) > 1e-9:
            raise ConfigurationError("guard_fraction * n_subcarriers must be an integer")
        if not 0.0 < self.carrier_fc < 0.25:
            raise ConfigurationError("carrier_fc must lie in (0, 0.25) cycles/sample")
        if self.subcarrier_bw <= 0.0:
            raise ConfigurationError("subcarrier_bw must be positive")
        if self.carrier_fc + self.subcarrier_bw / 2.0 >= 0.5:
            raise ConfigurationError("carrier_fc + subcarrier_bw/2 must stay below 0.5 (no aliasing)")

    @property
    def guard_len(self) -> int:
        return int(round(self.guard_fraction * self.n_subcarriers))

    @property
    def symbol_len(self) -> int:
        return self.n_subcarriers + self.guard_len

    @property
    def n_samples(self) -> int:
        return self.symbol_len * self.n_symbols


@dataclass(frozen=True)
class NoiseSpec:
    """White Gaussian noise with the given power and seed."""

    variance: float
    seed: int

    def __post_init__(self):
        if self.variance < 0.0:
            raise ConfigurationError("noise variance must be nonnegative")


def _data_subcarrier_mask(params: OfdmParams) -> np.ndarray:
    # A subcarrier occupies roughly one main lobe (1/symbol_len wide) around
    # its center; keep only bins whose lobe fits inside the occupied band so
    # out-of-band leakage stays small.  DC is reserved for the pilot.
    bin_freqs = np.fft.fftfreq(params.n_subcarriers)
    margin = 1.0 / params.symbol_len
    half = params.subcarrier_bw / 2.0 - margin
    mask = (np.abs(bin_freqs) <= half) & (np.abs(bin_freqs) > 0.0)
    if not mask.any():
        raise ConfigurationError("subcarrier_bw too narrow to fit any data subcarrier at this n_subcarriers")
    return mask


def generate_ofdm(params: OfdmParams, seed: int) -> SampleBuffer:
    """Generate a real-valued passband OFDM burst with unit average power.

    Random QPSK symbols fill the in-band subcarriers of each OFDM symbol, a
    cyclic prefix of ``guard_fraction`` is prepended, and the complex
    baseband stream is upconverted to ``carrier_fc`` by multiplication with
    a cosine carrier.  The burst is rescaled so that mean(samples**2) == 1.
    """
    rng = np.random.default_rng(seed)
    n = params.n_subcarriers
    guard = params.guard_len
    mask = _data_subcarrier_mask(params)
    n_data = int(mask.sum())

    symbols = []
    for _ in range(params.n_symbols):
        spectrum = np.zeros(n, dtype=complex)
        bits = rng.integers(0, 2, size=(n_data, 2))
        spectrum[mask] = ((2 * bits[:, 0] - 1) + 1j * (2 * bits[:, 1] - 1)) / np.sqrt(2.0)
        spectrum[0] = PILOT_BOOST
        time = np.fft.ifft(spectrum) * n
        symbols.append(np.concatenate([time[n - guard:], time]) if guard else time)
    baseband = np.concatenate(symbols)

    t = np.arange(baseband.size)
    carrier = np.exp(2j * np.pi * params.carrier_fc * t)
    passband = np.real(baseband * carrier)
    passband /= np.sqrt(np.mean(passband**2))
    return SampleBuffer(passband)


def generate_tone(f0: float, amplitude: float, length: int) -> SampleBuffer:
    """Pure cosine test signal: samples[n] = amplitude * cos(2*pi*f0*n)."""
    if not 0.0 < f0 < 0.5:
        raise ConfigurationError("tone frequency must lie in (0, 0.5) cycles/sample")
    if length < 1:
        raise ConfigurationError("tone length must be at least 1 sample")
    return SampleBuffer(amplitude * np.cos(2.0 * np.pi * f0 * np.arange(length)))


def apply_awgn(signal: SampleBuffer, snr_db: float, seed: int) -> SampleBuffer:
    """Add white Gaussian noise calibrated against the measured signal power.

    The noise variance is P_signal / 10**(snr_db/10) with P_signal the mean
    square of the input.  For an all-zero input the SNR is undefined and the
    variance falls back to 0, returning the signal unchanged.
    """
    power = signal.power()
    variance = power * 10.0 ** (-snr_db / 10.0)
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, np.sqrt(variance), size=len(signal))
    return SampleBuffer(signal.samples + noise, signal.sample_rate_norm)


def generate_noise(spec: NoiseSpec, length: int) -> SampleBuffer:
    """I.i.d. zero-mean Gaussian samples with variance ``spec.variance``."""
    if length < 1:
        raise ConfigurationError("noise length must be at least 1 sample")
    rng = np.random.default_rng(spec.seed)
    return SampleBuffer(rng.normal(0.0, np.sqrt(spec.variance), size=length))
