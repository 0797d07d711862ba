"""Hard-decision fusion at the fusion center.

A k-out-of-n rule declares the band occupied when at least k of the n
reporting users voted H1; AND, OR and MAJORITY are the k = n, k = 1 and
k = ceil(n/2) special cases.  ``fusion_probability`` gives the exact fused
probability when every user votes H1 independently with probability p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from collections.abc import Sequence

from .detectors import Decision, Hypothesis
from .errors import ConfigurationError


@dataclass(frozen=True)
class FusionRule:
    """Vote-count selector: one of "and", "or", "majority", "k_out_of_n"."""

    variant: str
    k: int | None = None

    _VARIANTS = ("and", "or", "majority", "k_out_of_n")

    def __post_init__(self):
        if self.variant not in self._VARIANTS:
            raise ConfigurationError(f"unknown fusion rule variant {self.variant!r}")
        if self.variant == "k_out_of_n":
            if self.k is None or self.k < 1:
                raise ConfigurationError("k_out_of_n requires a vote count k >= 1")
        elif self.k is not None:
            raise ConfigurationError(f"rule {self.variant!r} does not take a k parameter")

    def label(self) -> str:
        return f"{self.k}_out_of_n" if self.variant == "k_out_of_n" else self.variant


AND = FusionRule("and")
OR = FusionRule("or")
MAJORITY = FusionRule("majority")


def k_out_of_n(k: int) -> FusionRule:
    return FusionRule("k_out_of_n", k=k)


def rule_to_k(rule: FusionRule, n: int) -> int:
    """Minimum number of H1 votes the rule requires among n users."""
    if n < 1:
        raise ConfigurationError("fusion requires at least one user")
    if rule.variant == "and":
        return n
    if rule.variant == "or":
        return 1
    if rule.variant == "majority":
        return (n + 1) // 2  # ceil(n/2)
    if not 1 <= rule.k <= n:
        raise ConfigurationError(f"k_out_of_n vote count k={rule.k} outside [1, {n}]")
    return rule.k


def fuse_decisions(decisions: Sequence[Decision], rule: FusionRule) -> Hypothesis:
    """Global decision: H1 iff the number of H1 votes reaches the rule's k."""
    if len(decisions) == 0:
        raise ValueError("cannot fuse an empty decision list")
    votes = sum(1 for d in decisions if d.hypothesis is Hypothesis.H1)
    return Hypothesis.H1 if votes >= rule_to_k(rule, len(decisions)) else Hypothesis.H0


def fusion_probability(p: float, n: int, k: int) -> float:
    """Exact binomial tail sum_{i=k}^{n} C(n,i) p^i (1-p)^(n-i).

    Coefficients come from exact integer combinatorics, so the result is
    accurate to float rounding for any n up to 64; the same expression
    serves detection and false-alarm probabilities.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("probability p must lie in [0, 1]")
    if not 1 <= k <= n:
        raise ValueError("vote count k must lie in [1, n]")
    q = 1.0 - p
    total = 0.0
    for i in range(k, n + 1):
        total += math.comb(n, i) * p**i * q ** (n - i)
    return min(1.0, total)
