import csv
import math

import numpy as np
import pytest

from cycsense import (
    AND,
    MAJORITY,
    OPTIMAL_N,
    OR,
    ConfigurationError,
    DetectorConfig,
    OfdmParams,
    Scenario,
    calibration_statistics,
    contour_estimate,
    error_points_from_stats,
    export_csd_contour,
    fusion_probability,
    k_out_of_n,
    resolve_thresholds,
    roc_points_from_stats,
    run_trials,
    targeted_alpha_set,
    threshold_error_fitness,
)


def small_scenario(**overrides) -> Scenario:
    """Desk-scale-in-miniature scenario so tests stay fast."""
    ofdm = overrides.pop("ofdm", OfdmParams(n_subcarriers=64, n_symbols=4))
    detector = overrides.pop("detector", DetectorConfig(
        window_len=64, alpha_set=targeted_alpha_set(ofdm.carrier_fc, 64, 1)))
    defaults = dict(snr_db=-5.0, n_users=2, n_trials=10, base_seed=7)
    defaults.update(overrides)
    return Scenario(ofdm=ofdm, detector=detector, **defaults)


class TestScenario:
    def test_burst_must_cover_window(self):
        with pytest.raises(ConfigurationError):
            small_scenario(detector=DetectorConfig(window_len=1024))

    def test_threshold_grid_must_increase(self):
        with pytest.raises(ConfigurationError):
            small_scenario(thresholds=(1.0, 1.0, 2.0))

    def test_default_detector_targets_carrier(self):
        sc = Scenario()
        assert 2 * sc.ofdm.carrier_fc in sc.detector.alpha_set


class TestRunTrials:
    def test_deterministic(self):
        sc = small_scenario()
        a = run_trials(sc)
        b = run_trials(sc)
        assert np.array_equal(a.h0, b.h0) and np.array_equal(a.h1, b.h1)

    def test_shapes(self):
        stats = run_trials(small_scenario(n_users=3, n_trials=4))
        assert stats.h0.shape == (3, 4) and stats.h1.shape == (3, 4)

    def test_single_trial_single_user(self):
        stats = run_trials(small_scenario(n_users=1, n_trials=1))
        assert stats.h0.shape == (1, 1) and stats.h1.shape == (1, 1)

    def test_high_snr_separates(self):
        # At +30 dB the statistic supports must separate for nearly every seed.
        separated = 0
        for seed in range(20):
            stats = run_trials(small_scenario(n_users=1, n_trials=25, snr_db=30.0, base_seed=seed))
            separated += stats.h1.min() > stats.h0.max()
        assert separated >= 19

    def test_users_are_independent_streams(self):
        stats = run_trials(small_scenario(n_users=2, n_trials=5))
        assert not np.array_equal(stats.h0[0], stats.h0[1])


class TestRocCurve:
    def test_extreme_thresholds(self):
        sc = small_scenario()
        stats = run_trials(sc)
        lo = float(min(stats.h0.min(), stats.h1.min())) - 1.0
        hi = float(max(stats.h0.max(), stats.h1.max())) + 1.0
        points = roc_points_from_stats(stats, [hi, lo], OR)
        assert points[0].pf_hat == 0.0 and points[0].pd_hat == 0.0
        assert points[1].pf_hat == 1.0 and points[1].pd_hat == 1.0

    def test_monotone_along_descending_thresholds(self):
        sc = small_scenario(n_trials=40)
        stats = run_trials(sc)
        thresholds = resolve_thresholds(sc, stats)
        assert np.all(np.diff(thresholds) <= 0)
        points = roc_points_from_stats(stats, thresholds, OR)
        pf = [p.pf_hat for p in points]
        pd = [p.pd_hat for p in points]
        assert all(b >= a for a, b in zip(pf, pf[1:]))
        assert all(b >= a for a, b in zip(pd, pd[1:]))

    def test_point_bookkeeping(self):
        sc = small_scenario(n_users=2, n_trials=10)
        stats = run_trials(sc)
        fused = roc_points_from_stats(stats, [1.0], MAJORITY)[0]
        single = roc_points_from_stats(stats, [1.0], None)[0]
        assert fused.rule == "majority" and fused.n_users == 2 and fused.n_trials == 10
        assert single.rule == "single" and single.n_users == 1 and single.n_trials == 20
        for p in (fused, single):
            assert abs(p.pm_hat - (1.0 - p.pd_hat)) < 1e-15
            assert abs(p.error_hat - (p.pf_hat + p.pm_hat)) < 1e-15

    def test_fused_rate_matches_formula(self):
        # With i.i.d. users, feeding the measured per-user rate into the
        # closed form predicts the fused rate within 3 standard errors.
        sc = small_scenario(n_users=4, n_trials=100, base_seed=3)
        stats = run_trials(sc)
        lam = float(np.median(stats.h0))
        single = roc_points_from_stats(stats, [lam], None)[0]
        for rule in (OR, MAJORITY, AND):
            fused = roc_points_from_stats(stats, [lam], rule)[0]
            k = {"or": 1, "majority": 2, "and": 4}[rule.variant]
            want = fusion_probability(single.pf_hat, 4, k)
            se = math.sqrt(max(want * (1 - want), 1e-4) / 100)
            assert abs(fused.pf_hat - want) <= 3 * se


class TestErrorCurve:
    def test_rows_per_rule_and_target(self):
        stats = run_trials(small_scenario(n_users=2, n_trials=20))
        rules = [k_out_of_n(1), k_out_of_n(2), OPTIMAL_N]
        points = error_points_from_stats(stats, rules, [0.1, 0.3])
        assert len(points) == 6
        labels = {p.rule for p in points}
        assert labels == {"1_out_of_n", "2_out_of_n", OPTIMAL_N}
        for p in points:
            if p.rule == OPTIMAL_N:
                assert isinstance(p.n, int) and 1 <= p.n <= 2

    def test_perfect_regime_errors_near_zero(self):
        # High SNR: misses vanish, so the fused error reduces to the fused
        # false-alarm rate, which is small at a small per-user target.
        stats = run_trials(small_scenario(n_users=2, n_trials=50, snr_db=25.0))
        points = error_points_from_stats(stats, [OR, k_out_of_n(2), OPTIMAL_N], [0.02])
        for p in points:
            assert p.error < 0.1

    def test_unreachable_target_flagged(self):
        stats = run_trials(small_scenario(n_users=1, n_trials=10))
        points = error_points_from_stats(stats, [OR], [1e-6, 0.5])
        assert points[0].flagged and not points[1].flagged

    def test_single_grid_point(self):
        stats = run_trials(small_scenario())
        points = error_points_from_stats(stats, [OR], [0.25])
        assert len(points) == 1


class TestContourExport:
    def test_round_trip_row_count(self, tmp_path):
        sc = small_scenario()
        path = tmp_path / "contour.csv"
        export_csd_contour(sc, path)
        with open(path) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["f", "alpha", "magnitude"]
        w = sc.detector.window_len
        assert len(rows) - 1 == w * w

    def test_byte_identical_reruns(self, tmp_path):
        sc = small_scenario()
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        export_csd_contour(sc, p1)
        export_csd_contour(sc, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_noise_only_has_no_structured_peaks(self):
        est = contour_estimate(small_scenario(ofdm=OfdmParams(n_subcarriers=64, n_symbols=8)),
                               variant="noise")
        assert est.grid.max() <= 5.0 * np.median(est.grid)

    def test_noiseless_maxima_at_carrier_features(self):
        sc = small_scenario(ofdm=OfdmParams(n_subcarriers=64, n_symbols=8))
        est = contour_estimate(sc, variant="noiseless")
        fc = sc.ofdm.carrier_fc
        features = [(fc, 0.0), (-fc, 0.0), (0.0, 2 * fc), (0.0, -2 * fc)]
        feature_bins = {
            (int(np.argmin(np.abs(est.f_axis - f))), int(np.argmin(np.abs(est.alpha_axis - a))))
            for f, a in features
        }
        maxima = np.argwhere(est.grid >= est.grid.max() * (1.0 - 1e-9))
        for fi, ai in maxima:
            assert any(abs(fi - fb) <= 1 and abs(ai - ab) <= 1 for fb, ab in feature_bins)

    def test_unknown_variant_rejected(self):
        with pytest.raises(ConfigurationError):
            contour_estimate(small_scenario(), variant="bogus")


class TestThresholdFitness:
    def test_endpoints_and_interior(self):
        stats = run_trials(small_scenario(n_users=1, n_trials=30, snr_db=10.0))
        fitness = threshold_error_fitness(stats)
        assert fitness(0.0) == 1.0  # every H0 burst exceeds 0: pf = 1, pm = 0
        assert fitness(1e12) == 1.0  # nothing exceeds: pf = 0, pm = 1
        mid = float(np.median(np.concatenate([stats.h0.ravel(), stats.h1.ravel()])))
        assert fitness(mid) < 1.0

    def test_calibration_statistics_disjoint_from_test(self):
        sc = small_scenario(n_users=1, n_trials=10)
        cal = calibration_statistics(sc, 10)
        test = run_trials(sc)
        assert cal.h0.shape == (1, 10)
        assert not np.array_equal(cal.h0, test.h0)
