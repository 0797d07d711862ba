import math

import pytest
from hypothesis import given, settings, strategies as st

from cycsense import (
    FixedR,
    Particle,
    PsoConfig,
    RandomR,
    RunError,
    Swarm,
    initial_swarm,
    pso_run,
    pso_step,
)

R1, R2 = 0.3811, 0.1895


def step_fitness(minimum: float):
    """Flat everywhere except a single zero-cost point; keeps pbest pinned."""

    def fitness(lam: float) -> float:
        return 0.0 if lam == minimum else 1.0

    return fitness


def swarm_at(lam: float, pbest: float, gbest: float) -> Swarm:
    # Mid-run state: the particle has visited ``pbest`` earlier and the swarm
    # best sits at ``gbest``.
    return Swarm(
        particles=(Particle(lambda_current=lam, pbest=pbest, pbest_fitness=0.5),),
        gbest=gbest,
        gbest_fitness=0.0,
    )


class TestPsoStep:
    def test_fixed_point_never_moves(self):
        swarm = Swarm(particles=(Particle(0.7, 0.7, 0.2),), gbest=0.7, gbest_fitness=0.2)
        cfg = PsoConfig(c0=0.0, c1=1.0, c2=1.0, r_mode=FixedR(R1, R2))
        stepped = pso_step(swarm, cfg, lambda lam: 0.2)
        assert stepped.particles[0].lambda_current == 0.7
        assert stepped.gbest == 0.7

    def test_hand_computed_update(self):
        # V = r1*(0.8 - 1.0) + r2*(0.6 - 1.0) = -0.15202 -> lambda = 0.84798
        swarm = swarm_at(1.0, pbest=0.8, gbest=0.6)
        cfg = PsoConfig(c0=0.0, c1=1.0, c2=1.0, r_mode=FixedR(R1, R2))
        stepped = pso_step(swarm, cfg, lambda lam: 1.0)
        assert abs(stepped.particles[0].lambda_current - 0.84798) < 1e-12

    def test_degenerate_coefficients_freeze_everything(self):
        swarm = swarm_at(1.0, pbest=0.2, gbest=0.1)
        cfg = PsoConfig(c0=0.0, c1=0.0, c2=0.0, r_mode=FixedR(R1, R2))
        stepped = pso_step(swarm, cfg, lambda lam: 1.0)
        assert stepped.particles[0].lambda_current == 1.0

    def test_geometric_contraction_toward_joint_best(self):
        # With pbest == gbest pinned, |lambda - gbest| shrinks by exactly
        # (1 - r1 - r2) per step.
        target = 0.5
        swarm = Swarm(particles=(Particle(1.0, target, 0.0),), gbest=target, gbest_fitness=0.0)
        cfg = PsoConfig(c0=0.0, c1=1.0, c2=1.0, r_mode=FixedR(R1, R2))
        fitness = step_fitness(target)
        gap = 0.5
        factor = 1.0 - R1 - R2
        for _ in range(5):
            swarm = pso_step(swarm, cfg, fitness)
            gap *= factor
            assert abs(abs(swarm.particles[0].lambda_current - target) - gap) < 1e-12

    def test_threshold_clamped_at_zero(self):
        swarm = swarm_at(0.1, pbest=0.0, gbest=0.0)
        cfg = PsoConfig(c0=-60.0, c1=1.0, c2=1.0, r_mode=FixedR(R1, R2))
        stepped = pso_step(swarm, cfg, lambda lam: 1.0)
        assert stepped.particles[0].lambda_current == 0.0

    def test_non_finite_fitness_names_particle(self):
        swarm = swarm_at(1.0, pbest=0.5, gbest=0.5)
        cfg = PsoConfig(r_mode=FixedR(R1, R2))
        with pytest.raises(RunError, match="particle 0"):
            pso_step(swarm, cfg, lambda lam: math.nan)

    def test_gbest_tie_breaks_to_minimum_threshold(self):
        particles = (Particle(0.9, 0.9, 0.3), Particle(0.4, 0.4, 0.3))
        swarm = Swarm(particles=particles, gbest=0.9, gbest_fitness=0.3)
        cfg = PsoConfig(c0=0.0, c1=0.0, c2=0.0, r_mode=FixedR(R1, R2))
        stepped = pso_step(swarm, cfg, lambda lam: 0.3)
        assert stepped.gbest == 0.4

    def test_standard_inertia_coincides_when_c0_zero(self):
        swarm = swarm_at(1.0, pbest=0.8, gbest=0.6)
        base = PsoConfig(c0=0.0, r_mode=FixedR(R1, R2))
        alt = PsoConfig(c0=0.0, r_mode=FixedR(R1, R2), standard_inertia=True)
        a = pso_step(swarm, base, lambda lam: 1.0)
        b = pso_step(swarm, alt, lambda lam: 1.0)
        assert a.particles[0].lambda_current == b.particles[0].lambda_current


class TestPsoRun:
    def test_identical_initials_constant_history(self):
        cfg = PsoConfig(c0=0.0, r_mode=FixedR(R1, R2), max_iters=10)
        result = pso_run([0.3, 0.3, 0.3], cfg, lambda lam: (lam - 1.0) ** 2)
        assert all(g == 0.3 for g in result.history)

    def test_huge_tolerance_stops_after_one_step(self):
        cfg = PsoConfig(r_mode=FixedR(R1, R2), max_iters=50, tolerance_zeta=1e9)
        result = pso_run([0.1, 0.9], cfg, lambda lam: (lam - 0.5) ** 2)
        assert len(result.history) == 1

    def test_history_bounded_by_max_iters(self):
        cfg = PsoConfig(r_mode=FixedR(R1, R2), max_iters=7)
        result = pso_run([0.1, 0.9, 0.4], cfg, lambda lam: (lam - 0.5) ** 2)
        assert len(result.history) <= 7

    def test_tolerance_trigger_reflected_in_history(self):
        cfg = PsoConfig(r_mode=FixedR(R1, R2), max_iters=100, tolerance_zeta=1e-4)
        result = pso_run([0.1, 0.9], cfg, lambda lam: (lam - 0.5) ** 2)
        assert len(result.history) < 100
        if len(result.history) >= 2:
            assert abs(result.history[-1] - result.history[-2]) < 1e-4

    def test_fixed_r_run_is_reproducible(self):
        cfg = PsoConfig(r_mode=FixedR(R1, R2), max_iters=20)
        a = pso_run([0.2, 0.8, 1.4], cfg, lambda lam: (lam - 0.6) ** 2)
        b = pso_run([0.2, 0.8, 1.4], cfg, lambda lam: (lam - 0.6) ** 2)
        assert a.gbest == b.gbest
        assert a.history == b.history

    def test_random_r_seeded_reproducible(self):
        fit = lambda lam: (lam - 0.6) ** 2
        a = pso_run([0.2, 0.8], PsoConfig(r_mode=RandomR(5), max_iters=15), fit)
        b = pso_run([0.2, 0.8], PsoConfig(r_mode=RandomR(5), max_iters=15), fit)
        c = pso_run([0.2, 0.8], PsoConfig(r_mode=RandomR(6), max_iters=15), fit)
        assert a.history == b.history
        assert a.history != c.history

    def test_gbest_fitness_nonincreasing(self):
        cfg = PsoConfig(r_mode=RandomR(3), max_iters=25)
        result = pso_run([0.0, 0.5, 1.0, 2.0], cfg, lambda lam: abs(lam - 0.77))
        assert all(b <= a + 1e-15 for a, b in zip(result.fitness_history, result.fitness_history[1:]))

    def test_improves_on_best_initial_guess(self):
        # The update has no momentum term, so exact convergence to the
        # optimum is not guaranteed; the run must still beat every initial
        # threshold on a smooth objective.
        fit = lambda lam: (lam - 0.9) ** 2
        initials = [0.0, 0.4, 1.3, 2.0]
        cfg = PsoConfig(r_mode=RandomR(1), max_iters=80)
        result = pso_run(initials, cfg, fit)
        assert fit(result.gbest) < min(fit(lam) for lam in initials)

    def test_thresholds_stay_nonnegative(self):
        cfg = PsoConfig(r_mode=RandomR(2), max_iters=30)
        result = pso_run([0.0, 0.1, 3.0], cfg, lambda lam: lam)  # pushes toward 0
        assert result.gbest >= 0.0
        assert all(g >= 0.0 for g in result.history)

    def test_empty_initials_rejected(self):
        with pytest.raises(ValueError):
            pso_run([], PsoConfig(), lambda lam: lam)

    def test_negative_initials_rejected(self):
        with pytest.raises(ValueError):
            pso_run([-0.5], PsoConfig(), lambda lam: lam)

    @given(initials=st.lists(st.floats(min_value=0.0, max_value=10.0), min_size=1, max_size=6))
    @settings(max_examples=25, deadline=None)
    def test_gbest_is_best_personal_best(self, initials):
        cfg = PsoConfig(r_mode=FixedR(R1, R2), max_iters=5)
        result = pso_run(initials, cfg, lambda lam: (lam - 1.0) ** 2)
        swarm = initial_swarm(initials, lambda lam: (lam - 1.0) ** 2)
        for _ in range(5):
            swarm = pso_step(swarm, cfg, lambda lam: (lam - 1.0) ** 2)
        assert swarm.gbest_fitness <= min(p.pbest_fitness for p in swarm.particles) + 1e-15
        assert result.gbest == swarm.gbest
