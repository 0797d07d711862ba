"""Particle-swarm adaptation of a detection threshold.

Each particle carries a candidate threshold lambda.  Per iteration the
velocity is

    V = c0 * lambda + c1*r1*(pbest - lambda) + c2*r2*(gbest - lambda)

and the particle moves to max(0, lambda + V).  Fitness is minimized; the
swarm best is the particle with the lowest personal-best fitness, ties
broken toward the smaller threshold.  With the inertia-on-velocity variant
disabled (the default) the c0 term multiplies the current threshold,
exactly as written above.
"""

from __future__ import annotations

from dataclasses import dataclass
from collections.abc import Callable, Sequence
from typing import NamedTuple

import math

import numpy as np

from .errors import ConfigurationError, RunError


@dataclass(frozen=True)
class FixedR:
    """Deterministic r-draws: the same (r1, r2) every step."""

    r1: float = 0.3811
    r2: float = 0.1895

    def __post_init__(self):
        if not (0.0 <= self.r1 <= 1.0 and 0.0 <= self.r2 <= 1.0):
            raise ConfigurationError("fixed r1, r2 must lie in [0, 1]")


@dataclass(frozen=True)
class RandomR:
    """Per-particle, per-iteration uniform r-draws from a seeded generator."""

    seed: int = 0


@dataclass(frozen=True)
class PsoConfig:
    c0: float = 0.0
    c1: float = 1.0
    c2: float = 1.0
    r_mode: FixedR | RandomR = FixedR()
    max_iters: int = 50
    tolerance_zeta: float | None = None
    standard_inertia: bool = False  # c0 multiplies the previous velocity instead of the threshold

    def __post_init__(self):
        if self.max_iters < 1:
            raise ConfigurationError("max_iters must be at least 1")
        if self.tolerance_zeta is not None and self.tolerance_zeta < 0.0:
            raise ConfigurationError("tolerance_zeta must be nonnegative")


@dataclass(frozen=True)
class Particle:
    lambda_current: float
    pbest: float
    pbest_fitness: float
    velocity: float = 0.0


@dataclass(frozen=True)
class Swarm:
    particles: tuple[Particle, ...]
    gbest: float
    gbest_fitness: float
    iteration: int = 0

    def __post_init__(self):
        if len(self.particles) == 0:
            raise ConfigurationError("swarm must contain at least one particle")


class PsoRunResult(NamedTuple):
    gbest: float
    history: list[float]
    fitness_history: list[float]


def _checked_fitness(fitness: Callable[[float], float], lam: float, index: int) -> float:
    value = float(fitness(lam))
    if not math.isfinite(value):
        raise RunError(f"fitness returned non-finite value {value!r} for particle {index} at threshold {lam!r}")
    return value


def _select_gbest(particles: Sequence[Particle]) -> tuple[float, float]:
    # Lowest personal-best fitness wins; equal fitness falls back to the
    # smaller threshold.
    best = min(particles, key=lambda p: (p.pbest_fitness, p.pbest))
    return best.pbest, best.pbest_fitness


def pso_step(swarm: Swarm, cfg: PsoConfig, fitness: Callable[[float], float]) -> Swarm:
    """Advance the swarm by one iteration (pure function of its inputs).

    Random-mode r-draws are derived from (seed, iteration, particle index),
    so the result is independent of evaluation order or scheduling.
    """
    if isinstance(cfg.r_mode, FixedR):
        draws = np.full((len(swarm.particles), 2), (cfg.r_mode.r1, cfg.r_mode.r2))
    else:
        rng = np.random.default_rng(np.random.SeedSequence((cfg.r_mode.seed, swarm.iteration)))
        draws = rng.random((len(swarm.particles), 2))

    moved = []
    for i, p in enumerate(swarm.particles):
        r1, r2 = draws[i]
        inertia = cfg.c0 * (p.velocity if cfg.standard_inertia else p.lambda_current)
        v = inertia + cfg.c1 * r1 * (p.pbest - p.lambda_current) + cfg.c2 * r2 * (swarm.gbest - p.lambda_current)
        lam = max(0.0, p.lambda_current + v)
        fit = _checked_fitness(fitness, lam, i)
        if fit < p.pbest_fitness:
            moved.append(Particle(lam, lam, fit, velocity=v))
        else:
            moved.append(Particle(lam, p.pbest, p.pbest_fitness, velocity=v))

    cand, cand_fit = _select_gbest(moved)
    if (cand_fit, cand) < (swarm.gbest_fitness, swarm.gbest):
        gbest, gbest_fit = cand, cand_fit
    else:
        gbest, gbest_fit = swarm.gbest, swarm.gbest_fitness
    return Swarm(tuple(moved), gbest, gbest_fit, swarm.iteration + 1)


def initial_swarm(initial_thresholds: Sequence[float], fitness: Callable[[float], float]) -> Swarm:
    """Build the iteration-0 swarm: each particle starts at (and best-knows) its initial threshold."""
    if len(initial_thresholds) == 0:
        raise ValueError("need at least one initial threshold")
    if any(lam < 0.0 for lam in initial_thresholds):
        raise ValueError("initial thresholds must be nonnegative")
    particles = tuple(
        Particle(float(lam), float(lam), _checked_fitness(fitness, float(lam), i))
        for i, lam in enumerate(initial_thresholds)
    )
    gbest, gbest_fit = _select_gbest(particles)
    return Swarm(particles, gbest, gbest_fit, iteration=0)


def pso_run(
    initial_thresholds: Sequence[float],
    cfg: PsoConfig,
    fitness: Callable[[float], float],
) -> PsoRunResult:
    """Iterate ``pso_step`` until the tolerance or the iteration budget is hit.

    The stopping rule compares successive swarm bests, including the
    pre-iteration best: once |gbest(k+1) - gbest(k)| < tolerance_zeta the
    run stops.  The returned history holds the swarm best after each
    executed iteration (length <= max_iters).
    """
    swarm = initial_swarm(initial_thresholds, fitness)
    history: list[float] = []
    fitness_history: list[float] = []
    prev = swarm.gbest
    for _ in range(cfg.max_iters):
        swarm = pso_step(swarm, cfg, fitness)
        history.append(swarm.gbest)
        fitness_history.append(swarm.gbest_fitness)
        if cfg.tolerance_zeta is not None and abs(swarm.gbest - prev) < cfg.tolerance_zeta:
            break
        prev = swarm.gbest
    return PsoRunResult(swarm.gbest, history, fitness_history)
