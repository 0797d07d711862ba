"""Energy and cyclostationary detection statistics.

The cyclostationary pipeline follows the classic shift/conjugate/multiply
structure: the input is frequency-shifted by +alpha/2 and -alpha/2, each
windowed block of the two shifted streams is Fourier-transformed, and the
conjugate product of the block spectra is magnitude-averaged across blocks.
A signal with a hidden periodicity (a carrier at f_c, say) produces grid
peaks at (f = +-f_c, alpha = 0) and (f = 0, alpha = +-2 f_c); noise does
not.  The decision statistic is the largest magnitude near those points.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import ConfigurationError
from .signals import SampleBuffer


class Hypothesis(IntEnum):
    H0 = 0
    H1 = 1


@dataclass(frozen=True)
class DetectorConfig:
    """Block/window layout and cyclic-frequency set for the CSD estimator.

    ``alpha_set`` lists the cyclic frequencies (cycles/sample) to evaluate;
    the same code path serves a full grid (contour export) and a targeted
    set around the expected feature locations (fast Monte Carlo).
    """

    window_len: int = 1024
    overlap_fraction: float = 0.0
    alpha_set: tuple[float, ...] = (0.0,)
    peak_neighborhood: int = 1

    def __post_init__(self):
        w = self.window_len
        if w < 16 or (w & (w - 1)) != 0:
            raise ConfigurationError("window_len must be a power of two >= 16")
        if not 0.0 <= self.overlap_fraction < 1.0:
            raise ConfigurationError("overlap_fraction must lie in [0, 1)")
        if len(self.alpha_set) == 0:
            raise ConfigurationError("alpha_set must be nonempty")
        alphas = tuple(float(a) for a in self.alpha_set)
        if not all(np.isfinite(alphas)) or any(abs(a) > 0.5 for a in alphas):
            raise ConfigurationError("alpha_set values must be finite and within [-0.5, 0.5]")
        object.__setattr__(self, "alpha_set", alphas)
        if self.peak_neighborhood < 0:
            raise ConfigurationError("peak_neighborhood must be nonnegative")


@dataclass(frozen=True)
class CsdEstimate:
    """Cyclic spectral density magnitudes on a (frequency, cyclic-frequency) grid."""

    grid: np.ndarray
    f_axis: np.ndarray
    alpha_axis: np.ndarray
    window_len: int
    n_blocks: int

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        f_axis = np.asarray(self.f_axis, dtype=float)
        alpha_axis = np.asarray(self.alpha_axis, dtype=float)
        if grid.shape != (f_axis.size, alpha_axis.size):
            raise ConfigurationError("grid dimensions must match the frequency and alpha axes")
        if not np.all(np.isfinite(grid)) or np.any(grid < 0.0):
            raise ConfigurationError("grid magnitudes must be finite and nonnegative")
        if np.any(np.diff(f_axis) <= 0.0) or np.any(np.diff(alpha_axis) <= 0.0):
            raise ConfigurationError("axes must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "f_axis", f_axis)
        object.__setattr__(self, "alpha_axis", alpha_axis)


@dataclass(frozen=True)
class Decision:
    """Threshold test outcome; H1 holds exactly when statistic > threshold."""

    hypothesis: Hypothesis
    statistic: float
    threshold: float

    def __post_init__(self):
        if (self.hypothesis is Hypothesis.H1) != (self.statistic > self.threshold):
            raise ConfigurationError("hypothesis must equal H1 iff statistic > threshold")


def energy_statistic(x: SampleBuffer) -> float:
    """Total energy sum(x[n]**2) of the buffer."""
    s = x.samples
    return float(np.dot(s, s))


def cyclic_autocorrelation(x: SampleBuffer, alpha: float, tau: int) -> complex:
    """Finite-average cyclic autocorrelation at cyclic frequency ``alpha`` and lag ``tau``.

    Computes (1/M) * sum_n x[n+tau] * x[n-tau] * exp(-2j*pi*alpha*n) over
    the M index positions where both lagged samples exist.  The expectation
    of the underlying definition is replaced by this time average.
    """
    s = x.samples
    n = s.size
    tau = int(tau)
    if abs(tau) >= n / 2:
        raise ValueError("lag tau must satisfy |tau| < len(x)/2")
    a = abs(tau)
    idx = np.arange(a, n - a)
    vals = s[idx + tau] * s[idx - tau] * np.exp(-2j * np.pi * alpha * idx)
    return complex(vals.mean())


def _block_starts(n_samples: int, window_len: int, overlap_fraction: float) -> range:
    hop = max(1, window_len - int(round(overlap_fraction * window_len)))
    return range(0, n_samples - window_len + 1, hop)


def estimate_csd(x: SampleBuffer, cfg: DetectorConfig) -> CsdEstimate:
    """Estimate cyclic spectral density magnitudes over ``cfg.alpha_set``.

    For each cyclic frequency alpha the input is multiplied by
    exp(-j*pi*alpha*n) and exp(+j*pi*alpha*n) (frequency shifts of -+alpha/2),
    each block of ``window_len`` samples is transformed, and the magnitude of
    the conjugate product of the two shifted block spectra is averaged across
    blocks and divided by ``window_len``.  Duplicate alphas are collapsed and
    the axis is sorted ascending.
    """
    s = x.samples
    w = cfg.window_len
    if s.size < w:
        raise ValueError("buffer shorter than the analysis window")
    starts = _block_starts(s.size, w, cfg.overlap_fraction)
    blocks = np.stack([s[i:i + w] for i in starts])  # (n_blocks, w)
    alphas = np.array(sorted(set(cfg.alpha_set)))

    n = np.arange(w)
    rows = np.empty((alphas.size, w))
    # Chunk the alpha axis so the (chunk, n_blocks, w) temporaries stay
    # around tens of MB even for full-grid estimates.
    chunk = max(1, 2_097_152 // blocks.size)
    for lo in range(0, alphas.size, chunk):
        batch = alphas[lo:lo + chunk]
        down = np.exp(-1j * np.pi * batch[:, None, None] * n)
        spec_down = np.fft.fft(blocks[None, :, :] * down, axis=2)
        spec_up = np.fft.fft(blocks[None, :, :] * np.conj(down), axis=2)
        mags = np.abs(spec_down * np.conj(spec_up))  # (chunk, n_blocks, w)
        rows[lo:lo + chunk] = np.fft.fftshift(mags.mean(axis=1), axes=1) / w

    return CsdEstimate(
        grid=rows.T,
        f_axis=np.fft.fftshift(np.fft.fftfreq(w)),
        alpha_axis=alphas,
        window_len=w,
        n_blocks=len(starts),
    )


def peak_statistic(csd: CsdEstimate, fc: float, neighborhood: int) -> float:
    """Largest grid magnitude near the four carrier feature points.

    The search covers all bins within ``neighborhood`` grid steps of
    (f=+-fc, alpha=0) and (f=0, alpha=+-2*fc), clipped to the grid.
    """
    f_axis = csd.f_axis
    a_axis = csd.alpha_axis
    if not (f_axis[0] <= -fc and fc <= f_axis[-1]):
        raise ValueError("carrier frequency outside the frequency axis")
    if not (a_axis[0] <= -2.0 * fc and 2.0 * fc <= a_axis[-1]):
        raise ValueError("twice the carrier frequency outside the alpha axis")
    nb = int(neighborhood)
    best = 0.0
    for f_target, a_target in ((fc, 0.0), (-fc, 0.0), (0.0, 2.0 * fc), (0.0, -2.0 * fc)):
        fi = int(np.argmin(np.abs(f_axis - f_target)))
        ai = int(np.argmin(np.abs(a_axis - a_target)))
        sub = csd.grid[max(0, fi - nb):fi + nb + 1, max(0, ai - nb):ai + nb + 1]
        best = max(best, float(sub.max()))
    return best


def decide(statistic: float, lam: float) -> Decision:
    """Threshold test: H1 when statistic > lam, H0 otherwise (ties go to H0)."""
    if statistic < 0.0 or lam < 0.0:
        raise ValueError("statistic and threshold must be nonnegative")
    hyp = Hypothesis.H1 if statistic > lam else Hypothesis.H0
    return Decision(hypothesis=hyp, statistic=float(statistic), threshold=float(lam))


def targeted_alpha_set(fc: float, window_len: int, neighborhood: int = 1) -> tuple[float, ...]:
    """Cyclic frequencies covering the feature points plus ``neighborhood`` grid steps."""
    offsets = np.arange(-neighborhood, neighborhood + 1) / window_len
    alphas = np.concatenate([offsets, 2.0 * fc + offsets, -2.0 * fc + offsets])
    alphas = np.clip(alphas, -0.5, 0.5)
    return tuple(sorted(set(alphas.tolist())))


def full_alpha_grid(window_len: int) -> tuple[float, ...]:
    """All cyclic-frequency bins at the grid resolution, spanning [-0.5, 0.5)."""
    return tuple(np.fft.fftshift(np.fft.fftfreq(window_len)).tolist())
