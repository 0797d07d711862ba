"""Error-minimizing vote count for cooperative sensing.

With k_users cooperating detectors, each at per-user false-alarm pf and
miss pm, the fused error P_f + P_m depends on the vote threshold n of the
n-out-of-k rule.  ``optimal_n`` evaluates the closed-form minimizer

    alpha = ln(pf / (1 - pm)) / ln(pm / (1 - pf))
    n_opt = min(k, ceil(k / (1 + alpha)))

and ``brute_force_optimal_n`` provides the exhaustive-search oracle.  Note
the symbol convention: here k is the total user count and n the vote
threshold (``alpha_ratio`` is unrelated to the cyclic frequency alpha of
the detectors module).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from collections.abc import Sequence

from .errors import ConfigurationError


@dataclass(frozen=True)
class UserCountResult:
    n_opt: int
    alpha_ratio: float
    error_at_opt: float


@dataclass(frozen=True)
class OptimalNPoint:
    """One row of an optimal-n sweep; out-of-domain inputs are flagged, not dropped."""

    pf: float
    n_opt: int | None
    alpha_ratio: float
    error: float
    in_domain: bool


def error_total(pf: float, pd: float, k_users: int, n: int) -> float:
    """Fused error P_f + P_m of the n-out-of-k rule at per-user (pf, pd).

    Evaluates 1 + sum_{l=n}^{k} C(k,l) [pf^l (1-pf)^(k-l) - pd^l (1-pd)^(k-l)],
    which equals the fused false-alarm tail plus one minus the fused
    detection tail; the value lies in [0, 2].
    """
    if not 0.0 < pf < 1.0 or not 0.0 < pd < 1.0:
        raise ValueError("pf and pd must lie strictly inside (0, 1)")
    if not 1 <= n <= k_users:
        raise ValueError("vote threshold n must lie in [1, k_users]")
    total = 1.0
    for l in range(n, k_users + 1):
        c = math.comb(k_users, l)
        total += c * (pf**l * (1.0 - pf) ** (k_users - l) - pd**l * (1.0 - pd) ** (k_users - l))
    return total


def optimal_n(pf: float, pm: float, k_users: int) -> UserCountResult:
    """Closed-form error-minimizing vote threshold for k_users detectors.

    Requires pf < 1 - pm (detector better than chance); outside that domain
    both logarithms change sign and the stationarity argument breaks down.
    """
    if not 0.0 < pf < 1.0 or not 0.0 < pm < 1.0:
        raise ValueError("pf and pm must lie strictly inside (0, 1)")
    if k_users < 1:
        raise ValueError("k_users must be at least 1")
    if pf >= 1.0 - pm:
        raise ConfigurationError("detector not better than chance; formula logs change sign")
    alpha = math.log(pf / (1.0 - pm)) / math.log(pm / (1.0 - pf))
    n_opt = max(1, min(k_users, math.ceil(k_users / (1.0 + alpha))))
    return UserCountResult(
        n_opt=n_opt,
        alpha_ratio=alpha,
        error_at_opt=error_total(pf, 1.0 - pm, k_users, n_opt),
    )


def brute_force_optimal_n(pf: float, pd: float, k_users: int) -> int:
    """Exhaustive argmin of ``error_total`` over n in 1..k_users (oracle).

    Ties resolve toward the smaller n: fewer required votes means less
    reporting overhead.
    """
    if not 0.0 < pf < 1.0 or not 0.0 < pd < 1.0:
        raise ValueError("pf and pd must lie strictly inside (0, 1)")
    if k_users < 1:
        raise ValueError("k_users must be at least 1")
    if pf >= pd:
        raise ConfigurationError("detector not better than chance; formula logs change sign")
    best_n = 1
    best_err = error_total(pf, pd, k_users, 1)
    for n in range(2, k_users + 1):
        err = error_total(pf, pd, k_users, n)
        if err < best_err:
            best_n, best_err = n, err
    return best_n


def optimal_n_curve(pm: float, k_users: int, pf_grid: Sequence[float]) -> list[OptimalNPoint]:
    """Sweep ``optimal_n`` over a grid of per-user false-alarm probabilities.

    Grid points outside the validity domain yield flagged rows (NaN values,
    ``in_domain=False``) rather than being silently dropped.
    """
    points = []
    for pf in pf_grid:
        try:
            res = optimal_n(pf, pm, k_users)
        except (ConfigurationError, ValueError):
            points.append(OptimalNPoint(pf=float(pf), n_opt=None, alpha_ratio=math.nan,
                                        error=math.nan, in_domain=False))
        else:
            points.append(OptimalNPoint(pf=float(pf), n_opt=res.n_opt, alpha_ratio=res.alpha_ratio,
                                        error=res.error_at_opt, in_domain=True))
    return points
