"""Cyclostationary and energy-based spectrum sensing simulator.

Deterministic signal generation, CSD/energy detection statistics,
cooperative decision fusion, closed-form optimal user selection, PSO
threshold adaptation, and a seeded Monte Carlo harness with CSV export.
"""

from .errors import ConfigurationError, RunError
from .signals import (
    NoiseSpec,
    OfdmParams,
    SampleBuffer,
    apply_awgn,
    generate_noise,
    generate_ofdm,
    generate_tone,
)
from .detectors import (
    CsdEstimate,
    Decision,
    DetectorConfig,
    Hypothesis,
    cyclic_autocorrelation,
    decide,
    energy_statistic,
    estimate_csd,
    full_alpha_grid,
    peak_statistic,
    targeted_alpha_set,
)
from .fusion import AND, MAJORITY, OR, FusionRule, fuse_decisions, fusion_probability, k_out_of_n, rule_to_k
from .optimal_users import (
    OptimalNPoint,
    UserCountResult,
    brute_force_optimal_n,
    error_total,
    optimal_n,
    optimal_n_curve,
)
from .pso import FixedR, Particle, PsoConfig, PsoRunResult, RandomR, Swarm, initial_swarm, pso_run, pso_step
from .harness import (
    OPTIMAL_N,
    ErrorCurvePoint,
    RocPoint,
    Scenario,
    TrialStats,
    calibration_statistics,
    contour_estimate,
    error_curve,
    error_points_from_stats,
    export_csd_contour,
    resolve_thresholds,
    roc_curve,
    roc_points_from_stats,
    run_trials,
    threshold_error_fitness,
)
from .estimators import CyclostationaryDetector, EnergyDetector

__all__ = [
    "AND",
    "MAJORITY",
    "OPTIMAL_N",
    "OR",
    "ConfigurationError",
    "CsdEstimate",
    "CyclostationaryDetector",
    "Decision",
    "DetectorConfig",
    "EnergyDetector",
    "ErrorCurvePoint",
    "FixedR",
    "FusionRule",
    "Hypothesis",
    "NoiseSpec",
    "OfdmParams",
    "OptimalNPoint",
    "Particle",
    "PsoConfig",
    "PsoRunResult",
    "RandomR",
    "RocPoint",
    "RunError",
    "SampleBuffer",
    "Scenario",
    "Swarm",
    "TrialStats",
    "UserCountResult",
    "apply_awgn",
    "brute_force_optimal_n",
    "calibration_statistics",
    "contour_estimate",
    "cyclic_autocorrelation",
    "decide",
    "energy_statistic",
    "error_curve",
    "error_points_from_stats",
    "error_total",
    "estimate_csd",
    "export_csd_contour",
    "full_alpha_grid",
    "fuse_decisions",
    "fusion_probability",
    "generate_noise",
    "generate_ofdm",
    "generate_tone",
    "initial_swarm",
    "k_out_of_n",
    "optimal_n",
    "optimal_n_curve",
    "peak_statistic",
    "pso_run",
    "pso_step",
    "resolve_thresholds",
    "roc_curve",
    "roc_points_from_stats",
    "rule_to_k",
    "run_trials",
    "targeted_alpha_set",
    "threshold_error_fitness",
]

__version__ = "0.1.0"
