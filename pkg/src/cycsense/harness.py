"""Monte Carlo experiment driver.

A Scenario fixes everything an experiment needs: SNR, user count, trial
count, detector and OFDM parameters, fusion rule, threshold grid, and a
base seed.  Every trial derives its own RNG streams from
(base_seed, user, trial, hypothesis) through numpy's SeedSequence, with
separate draws for the signal and the noise, so results are
bit-reproducible and independent of evaluation order.

H0 trials are noise-only bursts whose variance matches what the AWGN
channel injects on H1 bursts at the scenario SNR (the generated OFDM burst
has unit power, so the H0 variance is 10**(-snr_db/10)).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from collections.abc import Sequence

import numpy as np

from .detectors import (
    DetectorConfig,
    estimate_csd,
    full_alpha_grid,
    peak_statistic,
    targeted_alpha_set,
)
from .errors import ConfigurationError
from .fusion import FusionRule, OR, rule_to_k
from .optimal_users import optimal_n
from .signals import NoiseSpec, OfdmParams, apply_awgn, generate_noise, generate_ofdm

OPTIMAL_N = "optimal_n"  # sentinel rule label for the error curve

_ROLE_SIGNAL = 0
_ROLE_NOISE = 1


@dataclass(frozen=True)
class Scenario:
    """Complete experiment configuration.

    ``thresholds=None`` selects the AUTO grid: ``auto_quantiles`` midpoint
    quantiles of the pooled H0 statistics.  When ``detector`` is omitted a
    targeted configuration is built from the OFDM carrier.
    """

    snr_db: float = -5.0
    n_users: int = 8
    n_trials: int = 500
    ofdm: OfdmParams = OfdmParams()
    detector: DetectorConfig | None = None
    fusion_rule: FusionRule = OR
    thresholds: tuple[float, ...] | None = None
    auto_quantiles: int = 50
    base_seed: int = 0

    def __post_init__(self):
        if self.n_users < 1:
            raise ConfigurationError("n_users must be at least 1")
        if self.n_trials < 1:
            raise ConfigurationError("n_trials must be at least 1")
        if self.auto_quantiles < 1:
            raise ConfigurationError("auto_quantiles must be at least 1")
        if self.detector is None:
            detector = DetectorConfig(
                alpha_set=targeted_alpha_set(self.ofdm.carrier_fc, 1024, 1),
            )
            object.__setattr__(self, "detector", detector)
        if self.ofdm.n_samples < self.detector.window_len:
            raise ConfigurationError("OFDM burst shorter than the detector window")
        if self.thresholds is not None:
            grid = tuple(float(t) for t in self.thresholds)
            if len(grid) == 0 or any(b <= a for a, b in zip(grid, grid[1:])):
                raise ConfigurationError("explicit threshold grid must be nonempty and strictly increasing")
            object.__setattr__(self, "thresholds", grid)

    @property
    def noise_variance(self) -> float:
        return 10.0 ** (-self.snr_db / 10.0)


@dataclass(frozen=True)
class RocPoint:
    """One operating point; carries the trial count for standard errors."""

    threshold: float
    pf_hat: float
    pd_hat: float
    pm_hat: float
    error_hat: float
    rule: str
    n_users: int
    n_trials: int


@dataclass(frozen=True)
class ErrorCurvePoint:
    """Fused error at a calibrated per-user operating point for one rule.

    ``pf_hat``/``pm_hat`` are the measured per-user rates behind the
    threshold; ``pf_fused``/``pm_fused`` the fused components of ``error``.
    ``n_trials`` is carried so callers can attach binomial standard errors.
    """

    pf_target: float
    rule: str
    n: int | None
    error: float
    pf_fused: float
    pm_fused: float
    pf_hat: float
    pm_hat: float
    n_trials: int
    flagged: bool


@dataclass(frozen=True)
class TrialStats:
    """Per-user decision statistics: arrays of shape (n_users, n_trials)."""

    h0: np.ndarray
    h1: np.ndarray


def _trial_rng_seeds(base_seed: int, user: int, trial: int, hypothesis: int) -> np.ndarray:
    ss = np.random.SeedSequence((base_seed, user, trial, hypothesis))
    return ss.generate_state(2, dtype=np.uint64)


def _burst_statistic(samples_buf, scenario: Scenario) -> float:
    est = estimate_csd(samples_buf, scenario.detector)
    return peak_statistic(est, scenario.ofdm.carrier_fc, scenario.detector.peak_neighborhood)


def run_trials(scenario: Scenario) -> TrialStats:
    """Compute the detection statistic for every (user, trial, hypothesis).

    H0 bursts are noise at the scenario noise variance; H1 bursts are fresh
    OFDM payloads through the AWGN channel at the scenario SNR.
    """
    n_samples = scenario.ofdm.n_samples
    h0 = np.empty((scenario.n_users, scenario.n_trials))
    h1 = np.empty_like(h0)
    for user in range(scenario.n_users):
        for trial in range(scenario.n_trials):
            seeds0 = _trial_rng_seeds(scenario.base_seed, user, trial, 0)
            noise = generate_noise(NoiseSpec(scenario.noise_variance, int(seeds0[_ROLE_NOISE])), n_samples)
            h0[user, trial] = _burst_statistic(noise, scenario)

            seeds1 = _trial_rng_seeds(scenario.base_seed, user, trial, 1)
            burst = generate_ofdm(scenario.ofdm, int(seeds1[_ROLE_SIGNAL]))
            noisy = apply_awgn(burst, scenario.snr_db, int(seeds1[_ROLE_NOISE]))
            h1[user, trial] = _burst_statistic(noisy, scenario)
    return TrialStats(h0=h0, h1=h1)


def resolve_thresholds(scenario: Scenario, stats: TrialStats) -> np.ndarray:
    """Threshold grid in descending order (so pf is nondecreasing along the ROC)."""
    if scenario.thresholds is not None:
        grid = np.asarray(scenario.thresholds, dtype=float)
    else:
        q = (np.arange(scenario.auto_quantiles) + 0.5) / scenario.auto_quantiles
        grid = np.unique(np.quantile(stats.h0.ravel(), q))
    return grid[::-1]


def _fused_rates(stats: TrialStats, rule: FusionRule, threshold: float) -> tuple[float, float]:
    k = rule_to_k(rule, stats.h0.shape[0])
    pf = float(np.mean((stats.h0 > threshold).sum(axis=0) >= k))
    pd = float(np.mean((stats.h1 > threshold).sum(axis=0) >= k))
    return pf, pd


def roc_points_from_stats(
    stats: TrialStats,
    thresholds: Sequence[float],
    rule: FusionRule | None,
) -> list[RocPoint]:
    """ROC points for a fusion rule, or the pooled per-user curve when rule is None."""
    n_users, n_trials = stats.h0.shape
    points = []
    for lam in thresholds:
        if rule is None:
            pf = float(np.mean(stats.h0 > lam))
            pd = float(np.mean(stats.h1 > lam))
            label, users, count = "single", 1, n_users * n_trials
        else:
            pf, pd = _fused_rates(stats, rule, lam)
            label, users, count = rule.label(), n_users, n_trials
        points.append(RocPoint(
            threshold=float(lam), pf_hat=pf, pd_hat=pd, pm_hat=1.0 - pd,
            error_hat=pf + (1.0 - pd), rule=label, n_users=users, n_trials=count,
        ))
    return points


def roc_curve(scenario: Scenario) -> list[RocPoint]:
    """Fused ROC for the scenario's rule plus the pooled per-user curve."""
    stats = run_trials(scenario)
    thresholds = resolve_thresholds(scenario, stats)
    return (roc_points_from_stats(stats, thresholds, scenario.fusion_rule)
            + roc_points_from_stats(stats, thresholds, None))


def error_points_from_stats(
    stats: TrialStats,
    rules: Sequence[FusionRule | str],
    pf_targets: Sequence[float],
) -> list[ErrorCurvePoint]:
    """Fused error per rule at per-user thresholds calibrated to each target pf.

    The per-user threshold inverts the empirical H0 CDF pooled across users
    (users share the statistic distribution).  Targets finer than the
    empirical resolution 1/M are flagged.  The OPTIMAL_N pseudo-rule picks
    its vote threshold from the measured per-user operating point; estimated
    probabilities are clipped away from {0, 1} by half a trial weight before
    entering the closed form.
    """
    n_users, n_trials = stats.h0.shape
    pooled_h0 = stats.h0.ravel()
    pooled_h1 = stats.h1.ravel()
    m = pooled_h0.size
    points = []
    for target in pf_targets:
        lam = float(np.quantile(pooled_h0, 1.0 - target))
        pf_u = float(np.mean(pooled_h0 > lam))
        pm_u = float(np.mean(pooled_h1 <= lam))
        flagged = target < 1.0 / m or target > 1.0 - 1.0 / m
        for rule in rules:
            if rule == OPTIMAL_N:
                eps = 0.5 / m
                res = optimal_n(np.clip(pf_u, eps, 1.0 - eps),
                                np.clip(pm_u, eps, 1.0 - eps), n_users)
                k = res.n_opt
                label = OPTIMAL_N
            else:
                k = rule_to_k(rule, n_users)
                label = rule.label()
            pf_f = float(np.mean((stats.h0 > lam).sum(axis=0) >= k))
            pd_f = float(np.mean((stats.h1 > lam).sum(axis=0) >= k))
            points.append(ErrorCurvePoint(
                pf_target=float(target), rule=label, n=k, error=pf_f + (1.0 - pd_f),
                pf_fused=pf_f, pm_fused=1.0 - pd_f,
                pf_hat=pf_u, pm_hat=pm_u, n_trials=n_trials, flagged=flagged,
            ))
    return points


def error_curve(
    scenario: Scenario,
    rules: Sequence[FusionRule | str],
    pf_targets: Sequence[float] = tuple(np.arange(1, 10) * 0.05),
) -> list[ErrorCurvePoint]:
    """Run the scenario and tabulate fused error per rule over target pf values."""
    stats = run_trials(scenario)
    return error_points_from_stats(stats, rules, pf_targets)


def contour_estimate(scenario: Scenario, variant: str = "noisy"):
    """Full-grid CSD of one H1 burst ("noisy"), its clean version
    ("noiseless"), or a noise-only burst ("noise")."""
    cfg = replace(scenario.detector, alpha_set=full_alpha_grid(scenario.detector.window_len))
    seeds = _trial_rng_seeds(scenario.base_seed, 0, 0, 1)
    if variant == "noise":
        buf = generate_noise(NoiseSpec(scenario.noise_variance, int(seeds[_ROLE_NOISE])),
                             scenario.ofdm.n_samples)
    else:
        buf = generate_ofdm(scenario.ofdm, int(seeds[_ROLE_SIGNAL]))
        if variant == "noisy":
            buf = apply_awgn(buf, scenario.snr_db, int(seeds[_ROLE_NOISE]))
        elif variant != "noiseless":
            raise ConfigurationError(f"unknown contour variant {variant!r}")
    return estimate_csd(buf, cfg)


def export_csd_contour(scenario: Scenario, path, variant: str = "noisy") -> None:
    """Write the full-grid CSD of one burst as long-format CSV (f, alpha, magnitude)."""
    est = contour_estimate(scenario, variant)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["f", "alpha", "magnitude"])
        for fi, f in enumerate(est.f_axis):
            for ai, alpha in enumerate(est.alpha_axis):
                writer.writerow([repr(float(f)), repr(float(alpha)), repr(float(est.grid[fi, ai]))])


def calibration_statistics(scenario: Scenario, n_bursts: int, user: int = 0) -> TrialStats:
    """Seeded H0/H1 statistic sets for threshold calibration (single user)."""
    cal = replace(scenario, n_users=1, n_trials=n_bursts,
                  base_seed=scenario.base_seed + 1 + user)
    return run_trials(cal)


def threshold_error_fitness(stats: TrialStats):
    """Fitness for PSO: empirical P_f(lam) + P_m(lam) on fixed statistic sets."""
    h0 = stats.h0.ravel()
    h1 = stats.h1.ravel()

    def fitness(lam: float) -> float:
        return float(np.mean(h0 > lam) + np.mean(h1 <= lam))

    return fitness
