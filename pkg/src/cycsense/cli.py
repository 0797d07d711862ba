"""Command-line interface.

Subcommands: gen, csd, roc, fuse, optn, pso.  Every subcommand accepts
``--seed`` and ``--out``; experiment-shaped subcommands also accept
``--scenario FILE`` with ``key = value`` lines (# comments allowed)
overriding the desk-scale defaults.  Recognized scenario keys:

    snr_db, n_users, n_trials, base_seed, auto_quantiles,
    window_len, overlap_fraction, peak_neighborhood,
    n_subcarriers, n_symbols, guard_fraction, carrier_fc, subcarrier_bw,
    fusion_rule (or | and | majority | k:<int>), thresholds (comma list)

Exit codes: 0 success, 2 configuration error, 3 runtime/numeric error,
4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from .detectors import DetectorConfig, targeted_alpha_set
from .errors import ConfigurationError, RunError
from .fusion import AND, MAJORITY, OR, FusionRule, fusion_probability, k_out_of_n, rule_to_k
from .harness import (
    OPTIMAL_N,
    Scenario,
    calibration_statistics,
    error_points_from_stats,
    export_csd_contour,
    resolve_thresholds,
    roc_points_from_stats,
    run_trials,
    threshold_error_fitness,
)
from .optimal_users import optimal_n, optimal_n_curve
from .pso import FixedR, PsoConfig, RandomR, pso_run
from .signals import NoiseSpec, OfdmParams, apply_awgn, generate_noise, generate_ofdm, generate_tone

_SCENARIO_FLOAT_KEYS = ("snr_db", "overlap_fraction", "guard_fraction", "carrier_fc", "subcarrier_bw")
_SCENARIO_INT_KEYS = ("n_users", "n_trials", "base_seed", "auto_quantiles", "window_len",
                      "peak_neighborhood", "n_subcarriers", "n_symbols")


def parse_rule(text: str) -> FusionRule:
    text = text.strip().lower()
    if text == "or":
        return OR
    if text == "and":
        return AND
    if text == "majority":
        return MAJORITY
    if text.startswith("k:"):
        return k_out_of_n(int(text[2:]))
    raise ConfigurationError(f"unknown fusion rule {text!r} (expected or | and | majority | k:<int>)")


def load_scenario_file(path: str) -> dict:
    """Parse a ``key = value`` scenario file into a raw option dict."""
    options: dict = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key in _SCENARIO_FLOAT_KEYS:
                options[key] = float(value)
            elif key in _SCENARIO_INT_KEYS:
                options[key] = int(value)
            elif key == "fusion_rule":
                options[key] = parse_rule(value)
            elif key == "thresholds":
                options[key] = tuple(float(v) for v in value.split(","))
            else:
                raise ConfigurationError(f"{path}:{lineno}: unknown scenario key {key!r}")
    return options


def _merged_options(args) -> dict:
    opts: dict = {}
    if getattr(args, "scenario", None):
        opts.update(load_scenario_file(args.scenario))
    for key in ("snr_db", "n_users", "n_trials", "window_len"):
        value = getattr(args, key, None)
        if value is not None:
            opts[key] = value
    if getattr(args, "seed", None) is not None:
        opts["base_seed"] = args.seed
    if getattr(args, "rules", None):
        opts["fusion_rule"] = parse_rule(args.rules.split(",")[0])
    return opts


def _ofdm_from_options(opts: dict) -> OfdmParams:
    return OfdmParams(
        n_subcarriers=opts.pop("n_subcarriers", 256),
        n_symbols=opts.pop("n_symbols", 13),
        guard_fraction=opts.pop("guard_fraction", 0.25),
        carrier_fc=opts.pop("carrier_fc", 0.125),
        subcarrier_bw=opts.pop("subcarrier_bw", 0.11),
    )


def build_scenario(args) -> Scenario:
    """Scenario from defaults, then the scenario file, then explicit flags."""
    opts = _merged_options(args)
    ofdm = _ofdm_from_options(opts)
    window_len = opts.pop("window_len", 1024)
    neighborhood = opts.pop("peak_neighborhood", 1)
    detector = DetectorConfig(
        window_len=window_len,
        overlap_fraction=opts.pop("overlap_fraction", 0.0),
        alpha_set=targeted_alpha_set(ofdm.carrier_fc, window_len, neighborhood),
        peak_neighborhood=neighborhood,
    )
    return Scenario(ofdm=ofdm, detector=detector, **opts)


def _write_rows(path, header, rows) -> None:
    def fmt(value):
        if value is None:
            return ""
        if isinstance(value, float):
            return repr(value)
        return str(value)

    if path is None:
        writer = csv.writer(sys.stdout)
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
        return
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def _parse_grid(spec: str) -> np.ndarray:
    try:
        start, stop, step = (float(v) for v in spec.split(":"))
    except ValueError as exc:
        raise ConfigurationError(f"grid must be start:stop:step, got {spec!r}") from exc
    if step <= 0 or stop < start:
        raise ConfigurationError("grid requires step > 0 and stop >= start")
    return np.arange(start, stop + step / 2.0, step)


def cmd_gen(args) -> int:
    if args.kind == "ofdm":
        ofdm = _ofdm_from_options(_merged_options(args))
        buf = generate_ofdm(ofdm, args.seed)
        if args.snr_db is not None:
            buf = apply_awgn(buf, args.snr_db, args.seed + 1)
        fc = ofdm.carrier_fc
    elif args.kind == "tone":
        buf = generate_tone(args.f0, args.amplitude, args.length)
        fc = args.f0
    else:
        buf = generate_noise(NoiseSpec(args.variance, args.seed), args.length)
        fc = 0.0

    lines = [f"# fs_norm={buf.sample_rate_norm!r}, fc={float(fc)!r}", "sample"]
    lines += [repr(float(v)) for v in buf.samples]
    text = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    return 0


def cmd_csd(args) -> int:
    scenario = build_scenario(args)
    if args.out is None:
        raise ConfigurationError("csd requires --out PATH for the grid CSV")
    export_csd_contour(scenario, args.out, variant=args.variant)
    return 0


def cmd_roc(args) -> int:
    scenario = build_scenario(args)
    rules = [parse_rule(r) for r in args.rules.split(",")] if args.rules else [scenario.fusion_rule]
    stats = run_trials(scenario)
    thresholds = resolve_thresholds(scenario, stats)
    points = []
    for rule in rules:
        points.extend(roc_points_from_stats(stats, thresholds, rule))
    points.extend(roc_points_from_stats(stats, thresholds, None))
    _write_rows(args.out, ["threshold", "pf", "pd", "pm", "error", "rule", "n_users"],
                [(p.threshold, p.pf_hat, p.pd_hat, p.pm_hat, p.error_hat, p.rule, p.n_users)
                 for p in points])
    if args.error_out:
        err_rules = [k_out_of_n(k) for k in range(1, scenario.n_users + 1)] + [OPTIMAL_N]
        err_points = error_points_from_stats(stats, err_rules, _parse_grid(args.pf_grid))
        _write_rows(args.error_out, ["pf_target", "rule", "n", "error"],
                    [(p.pf_target, p.rule, p.n, p.error) for p in err_points])
    return 0


def cmd_fuse(args) -> int:
    rule = parse_rule(args.rule) if args.rule else (k_out_of_n(args.k) if args.k else OR)
    k = rule_to_k(rule, args.n)
    p_fused = fusion_probability(args.p, args.n, k)
    print(f"p_fused={p_fused!r}")
    if args.out:
        _write_rows(args.out, ["p", "n", "k", "rule", "p_fused"],
                    [(args.p, args.n, k, rule.label(), p_fused)])
    return 0


def cmd_optn(args) -> int:
    if args.pf_grid:
        points = optimal_n_curve(args.pm, args.k, _parse_grid(args.pf_grid))
        _write_rows(args.out, ["pf", "n_opt", "alpha_ratio", "error"],
                    [(p.pf, p.n_opt, p.alpha_ratio, p.error) for p in points])
        return 0
    if args.pf is None:
        raise ConfigurationError("optn requires --pf (or --pf-grid)")
    res = optimal_n(args.pf, args.pm, args.k)
    print(f"n_opt={res.n_opt} alpha_ratio={res.alpha_ratio!r} error={res.error_at_opt!r}")
    if args.out:
        _write_rows(args.out, ["pf", "n_opt", "alpha_ratio", "error"],
                    [(args.pf, res.n_opt, res.alpha_ratio, res.error_at_opt)])
    return 0


def cmd_pso(args) -> int:
    scenario = build_scenario(args)
    scenario_1u = Scenario(
        snr_db=scenario.snr_db, n_users=1, n_trials=args.test_trials,
        ofdm=scenario.ofdm, detector=scenario.detector,
        fusion_rule=scenario.fusion_rule, base_seed=scenario.base_seed,
    )
    cal = calibration_statistics(scenario_1u, args.calib_trials)
    fitness = threshold_error_fitness(cal)

    # Initial thresholds: spread quantiles of the pooled (unlabeled)
    # calibration statistics, i.e. what each user would pick by eyeballing
    # its own observations.
    pooled = np.concatenate([cal.h0.ravel(), cal.h1.ravel()])
    levels = np.linspace(0.50, 0.98, args.swarm_size)
    initial = [float(np.quantile(pooled, q)) for q in levels]
    r_mode = RandomR(seed=scenario.base_seed) if args.random_r else FixedR(args.r1, args.r2)
    cfg = PsoConfig(c0=args.c0, c1=args.c1, c2=args.c2, r_mode=r_mode,
                    max_iters=args.iters, tolerance_zeta=args.zeta)
    result = pso_run(initial, cfg, fitness)

    _write_rows(args.out, ["iteration", "gbest", "gbest_fitness"],
                [(i + 1, g, f) for i, (g, f) in enumerate(zip(result.history, result.fitness_history))])

    if args.compare_out:
        test = run_trials(scenario_1u)
        baseline = float(np.median(pooled))
        rows = []
        for label, lam in (("pso", result.gbest), ("baseline_median", baseline)):
            pf = float(np.mean(test.h0 > lam))
            pd = float(np.mean(test.h1 > lam))
            rows.append((label, lam, pf, pd, 1.0 - pd, pf + 1.0 - pd, test.h0.size))
        _write_rows(args.compare_out, ["label", "threshold", "pf", "pd", "pm", "error", "n_trials"], rows)
    return 0


def _add_scenario_flags(sub) -> None:
    sub.add_argument("--scenario", help="scenario file (key = value lines)")
    sub.add_argument("--snr-db", dest="snr_db", type=float, default=None)
    sub.add_argument("--n-users", dest="n_users", type=int, default=None)
    sub.add_argument("--n-trials", dest="n_trials", type=int, default=None)
    sub.add_argument("--window-len", dest="window_len", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cycsense",
                                     description="Spectrum sensing simulation toolkit")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("gen", help="emit a generated sample buffer as CSV")
    p.add_argument("--kind", choices=("ofdm", "tone", "noise"), default="ofdm")
    p.add_argument("--f0", type=float, default=0.125)
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--length", type=int, default=4096)
    p.add_argument("--variance", type=float, default=1.0)
    _add_scenario_flags(p)
    p.set_defaults(func=cmd_gen)

    p = subs.add_parser("csd", help="export a full CSD grid as long-format CSV")
    p.add_argument("--variant", choices=("noisy", "noiseless", "noise"), default="noisy")
    _add_scenario_flags(p)
    p.set_defaults(func=cmd_csd)

    p = subs.add_parser("roc", help="Monte Carlo ROC sweep (optionally an error curve)")
    p.add_argument("--rules", help="comma list: or | and | majority | k:<int>")
    p.add_argument("--error-out", dest="error_out", help="also write the fused error curve CSV")
    p.add_argument("--pf-grid", dest="pf_grid", default="0.05:0.45:0.05")
    _add_scenario_flags(p)
    p.set_defaults(func=cmd_roc)

    p = subs.add_parser("fuse", help="closed-form fused probability")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rule", default=None)
    p.add_argument("--k", type=int, default=None)
    p.set_defaults(func=cmd_fuse)

    p = subs.add_parser("optn", help="closed-form optimal vote count")
    p.add_argument("--pf", type=float, default=None)
    p.add_argument("--pm", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--pf-grid", dest="pf_grid", default=None)
    p.set_defaults(func=cmd_optn)

    p = subs.add_parser("pso", help="PSO threshold adaptation (single user)")
    p.add_argument("--swarm-size", dest="swarm_size", type=int, default=8)
    p.add_argument("--iters", type=int, default=30)
    p.add_argument("--zeta", type=float, default=None)
    p.add_argument("--c0", type=float, default=0.0)
    p.add_argument("--c1", type=float, default=1.0)
    p.add_argument("--c2", type=float, default=1.0)
    p.add_argument("--r1", type=float, default=0.3811)
    p.add_argument("--r2", type=float, default=0.1895)
    p.add_argument("--random-r", dest="random_r", action="store_true")
    p.add_argument("--calib-trials", dest="calib_trials", type=int, default=200)
    p.add_argument("--test-trials", dest="test_trials", type=int, default=200)
    p.add_argument("--compare-out", dest="compare_out")
    _add_scenario_flags(p)
    p.set_defaults(func=cmd_pso)

    for sub in subs.choices.values():
        sub.add_argument("--seed", type=int, default=0)
        sub.add_argument("--out", default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    except (RunError, ValueError, ArithmeticError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
