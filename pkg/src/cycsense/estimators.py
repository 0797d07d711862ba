"""Scikit-learn compatible detector front-ends.

Both estimators treat a 2-D array of shape (n_bursts, n_samples) as a batch
of equally long bursts.  ``fit`` calibrates the decision threshold from
noise-only calibration bursts at a target false-alarm rate; ``predict``
returns 1 where a burst exceeds the threshold.  Parameters follow sklearn
conventions (``get_params``/``set_params``/``clone`` all work), so the
detectors drop into pipelines and grid searches.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .detectors import DetectorConfig, estimate_csd, peak_statistic, targeted_alpha_set
from .signals import SampleBuffer


class _ThresholdDetector(BaseEstimator):
    """Shared fit/predict plumbing; subclasses provide the statistic."""

    target_pf: float

    def _statistics(self, X) -> np.ndarray:
        X = check_array(X, dtype=float, ensure_2d=True)
        return np.array([self._statistic(row) for row in X])

    def fit(self, X, y=None):
        """Calibrate the threshold as the (1 - target_pf) quantile of the
        statistics of noise-only bursts ``X``."""
        stats = self._statistics(X)
        self.n_features_in_ = np.asarray(X).shape[1]
        self.threshold_ = float(np.quantile(stats, 1.0 - self.target_pf))
        return self

    def score_samples(self, X) -> np.ndarray:
        """Raw detection statistic per burst."""
        return self._statistics(X)

    def decision_function(self, X) -> np.ndarray:
        check_is_fitted(self, "threshold_")
        return self._statistics(X) - self.threshold_

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "threshold_")
        return (self._statistics(X) > self.threshold_).astype(int)


class EnergyDetector(_ThresholdDetector):
    """Total-energy detector: statistic is sum(x**2) per burst."""

    def __init__(self, target_pf: float = 0.1):
        self.target_pf = target_pf

    def _statistic(self, row: np.ndarray) -> float:
        return float(np.dot(row, row))


class CyclostationaryDetector(_ThresholdDetector):
    """Carrier-feature detector: statistic is the peak CSD magnitude near
    (f=+-carrier_freq, alpha=0) and (f=0, alpha=+-2*carrier_freq)."""

    def __init__(
        self,
        carrier_freq: float = 0.125,
        window_len: int = 1024,
        overlap_fraction: float = 0.0,
        peak_neighborhood: int = 1,
        target_pf: float = 0.1,
    ):
        self.carrier_freq = carrier_freq
        self.window_len = window_len
        self.overlap_fraction = overlap_fraction
        self.peak_neighborhood = peak_neighborhood
        self.target_pf = target_pf

    def _config(self) -> DetectorConfig:
        return DetectorConfig(
            window_len=self.window_len,
            overlap_fraction=self.overlap_fraction,
            alpha_set=targeted_alpha_set(self.carrier_freq, self.window_len, self.peak_neighborhood),
            peak_neighborhood=self.peak_neighborhood,
        )

    def _statistic(self, row: np.ndarray) -> float:
        est = estimate_csd(SampleBuffer(row), self._config())
        return peak_statistic(est, self.carrier_freq, self.peak_neighborhood)
