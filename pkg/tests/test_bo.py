import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from pfbo.bo import (
    BOConfig,
    BORecord,
    BOTrace,
    Normalizer,
    bo_run,
    bo_step,
    build_normalizer,
    check_convergence,
    kappa,
    ucb_value,
)
from pfbo.gp import GPDataset, GPHyperParams, fit

HP = GPHyperParams(1.0, 0.2, 0.3)


def make_config(**overrides):
    base = dict(bounds=(0.005, 0.025), hp=HP, max_iters=10, seed=0)
    base.update(overrides)
    return BOConfig(**base)


def quadratic(theta, rng):
    # deterministic, peaked at 0.018
    return -((theta - 0.018) ** 2) * 1e5


def noisy_quadratic(theta, rng):
    return quadratic(theta, rng) + 0.5 * rng.normal()


class TestKappa:
    def test_mpmath_reference(self):
        mp = pytest.importorskip("mpmath")
        mp.mp.dps = 50
        for t in (1, 2, 10, 100):
            for delta in (0.01, 0.1, 0.5):
                want = mp.sqrt(2 * mp.log(t**2 * mp.pi**2 / (6 * delta)))
                assert kappa(t, delta) == pytest.approx(float(want), abs=1e-13)

    def test_monotone_in_t(self):
        for delta in (0.01, 0.1, 0.5):
            values = [kappa(t, delta) for t in range(1, 1001)]
            assert all(a < b for a, b in zip(values, values[1:]))

    def test_decreasing_in_delta(self):
        assert kappa(5, 0.01) > kappa(5, 0.1) > kappa(5, 0.5)

    def test_validation(self):
        with pytest.raises(ValueError):
            kappa(0, 0.1)
        with pytest.raises(ValueError):
            kappa(1, 0.0)
        with pytest.raises(ValueError):
            kappa(1, 1.0)


class TestUCB:
    def test_zero_kappa_is_posterior_mean(self):
        rng = np.random.default_rng(0)
        post = fit(GPDataset(rng.random(6), rng.normal(size=6)), HP)
        for x in (0.1, 0.5, 0.9):
            assert ucb_value(post, x, 0.0) == post.predict(x)[0]

    def test_prior_is_constant_kappa_sigma_f(self):
        post = fit(GPDataset(), HP)
        for x in (0.0, 0.3, 1.0):
            assert ucb_value(post, x, 2.0) == pytest.approx(2.0 * 1.0)

    def test_combines_mean_and_sd(self):
        rng = np.random.default_rng(1)
        post = fit(GPDataset(rng.random(5), rng.normal(size=5)), HP)
        mean, var = post.predict(0.42)
        assert ucb_value(post, 0.42, 2.0) == pytest.approx(mean + 2.0 * math.sqrt(var),
                                                           abs=1e-12)


class TestNormalizer:
    def test_round_trip_identity(self):
        n = Normalizer(mean=-750.0, scale=2.5)
        for v in (-760.0, -750.0, -720.0):
            assert n.inverse(n.transform(v)) == pytest.approx(v, abs=1e-9)
        assert n.transform(-750.0) == 0.0

    def test_scale_positive(self):
        with pytest.raises(ValueError):
            Normalizer(0.0, 0.0)
        with pytest.raises(ValueError):
            Normalizer(0.0, -1.0)

    def test_build_with_known_noise_levels(self):
        sigmas = {0.1: 1.0, 0.5: 2.0, 0.9: 3.0}

        def objective(theta, rng):
            return rng.normal(0.0, sigmas[theta])

        n = build_normalizer(objective, (0.1, 0.5, 0.9), reps=10_000, seed=0)
        assert n.scale == pytest.approx(3.0, rel=0.05)
        assert abs(n.mean) < 0.1

    def test_translation_equivariance(self):
        def objective(theta, rng):
            return rng.normal(0.0, 1.0)

        def shifted(theta, rng):
            return objective(theta, rng) + 100.0

        a = build_normalizer(objective, (0.2, 0.8), reps=50, seed=3)
        b = build_normalizer(shifted, (0.2, 0.8), reps=50, seed=3)
        assert b.mean == pytest.approx(a.mean + 100.0, abs=1e-9)
        assert b.scale == pytest.approx(a.scale, abs=1e-9)

    def test_deterministic_objective_hits_floor(self):
        n = build_normalizer(lambda th, rng: 5.0, (0.1, 0.9), reps=2, seed=0)
        assert n.scale == 1e-8
        assert n.mean == 5.0

    def test_validation(self):
        with pytest.raises(ValueError):
            build_normalizer(lambda th, rng: 0.0, (), reps=5, seed=0)
        with pytest.raises(ValueError):
            build_normalizer(lambda th, rng: 0.0, (0.5,), reps=1, seed=0)


class TestBOConfig:
    def test_default_init_points_equispaced(self):
        cfg = make_config()
        assert_allclose(cfg.init_points, [0.005, 0.010, 0.015, 0.020, 0.025],
                        rtol=0, atol=1e-15)

    def test_unit_mapping_round_trip(self):
        cfg = make_config()
        for theta in (0.005, 0.017, 0.025):
            assert cfg.from_unit(cfg.to_unit(theta)) == pytest.approx(theta, abs=1e-15)
        assert cfg.to_unit(0.005) == 0.0
        assert cfg.to_unit(0.025) == 1.0

    @pytest.mark.parametrize("overrides", [
        {"bounds": (0.025, 0.005)},
        {"bounds": (0.01, 0.01)},
        {"delta": 0.0},
        {"delta": 1.0},
        {"max_iters": 0},
        {"init_points": (0.001,)},  # outside bounds
        {"init_points": ()},
        {"eps_x": 0.0},
        {"patience": 0},
        {"acq_grid_size": 1},
    ])
    def test_validation(self, overrides):
        with pytest.raises(ValueError):
            make_config(**overrides)


def trace_from_incumbents(xs, means, bounds=(0.0, 1.0)):
    records = [
        BORecord(t=t, x_evaluated=x, raw_value=0.0, std_value=0.0,
                 kappa_t=1.0, incumbent_x=x, incumbent_mean=m)
        for t, (x, m) in enumerate(zip(xs, means))
    ]
    return BOTrace(bounds=bounds, records=records)


class TestCheckConvergence:
    def test_constant_incumbent(self):
        tr = trace_from_incumbents([0.5] * 5, [-1.0] * 5)
        assert check_convergence(tr, 0.01, 0.1, 3)

    def test_alternating_locations_fail(self):
        xs = [0.50, 0.52, 0.50, 0.52, 0.50]
        tr = trace_from_incumbents(xs, [0.0] * 5)
        assert not check_convergence(tr, 0.01, 0.1, 3)

    def test_hand_checked_sequence(self):
        xs = [0.500, 0.505, 0.509, 0.509]
        means = [-1.0, -0.95, -0.94, -0.94]
        tr = trace_from_incumbents(xs, means)
        assert check_convergence(tr, 0.01, 0.1, 3)

    def test_mean_jump_fails(self):
        tr = trace_from_incumbents([0.5] * 4, [0.0, 0.0, 0.5, 0.5])
        assert not check_convergence(tr, 0.01, 0.1, 3)

    def test_requires_patience_plus_one(self):
        tr = trace_from_incumbents([0.5] * 3, [0.0] * 3)
        assert not check_convergence(tr, 0.01, 0.1, 3)

    def test_location_scaled_by_domain_width(self):
        # 0.00015 move on [0.005, 0.025] is 0.0075 normalized: passes 0.01
        xs = [0.010, 0.01015, 0.010, 0.01015]
        tr = trace_from_incumbents(xs, [0.0] * 4, bounds=(0.005, 0.025))
        assert check_convergence(tr, 0.01, 0.1, 3)
        assert not check_convergence(tr, 0.007, 0.1, 3)


class TestBORun:
    def test_deterministic_objective_finds_peak(self):
        trace = bo_run(quadratic, make_config(max_iters=20))
        final = trace.records[-1]
        assert abs(final.incumbent_x - 0.018) < 5e-4
        assert trace.converged_at is not None

    def test_trace_shape_and_bounds(self):
        cfg = make_config(max_iters=8)
        trace = bo_run(noisy_quadratic, cfg)
        assert len(trace.records) == 5 + 8
        ts = [r.t for r in trace.records]
        assert ts == [0] * 5 + list(range(1, 9))
        for r in trace.records:
            assert 0.005 <= r.x_evaluated <= 0.025
            assert 0.005 <= r.incumbent_x <= 0.025

    def test_kappa_column(self):
        cfg = make_config(max_iters=4, delta=0.1)
        trace = bo_run(noisy_quadratic, cfg)
        for r in trace.records[:5]:
            assert math.isnan(r.kappa_t)
        for r in trace.records[5:]:
            assert r.kappa_t == pytest.approx(kappa(r.t, 0.1), abs=1e-15)

    def test_same_seed_identical_traces(self):
        cfg = make_config(max_iters=6, seed=21)
        a = bo_run(noisy_quadratic, cfg)
        b = bo_run(noisy_quadratic, cfg)
        assert [(r.t, r.x_evaluated, r.raw_value) for r in a.records] == \
               [(r.t, r.x_evaluated, r.raw_value) for r in b.records]

    def test_different_seed_differs(self):
        a = bo_run(noisy_quadratic, make_config(max_iters=6, seed=1))
        b = bo_run(noisy_quadratic, make_config(max_iters=6, seed=2))
        assert [r.raw_value for r in a.records] != [r.raw_value for r in b.records]

    def test_stop_on_convergence_truncates(self):
        cfg = make_config(max_iters=25, stop_on_convergence=True)
        trace = bo_run(quadratic, cfg)
        assert trace.converged_at is not None
        assert trace.records[-1].t == trace.converged_at
        assert len(trace.records) < 5 + 25

    def test_fixed_budget_continues_after_convergence(self):
        cfg = make_config(max_iters=25)
        trace = bo_run(quadratic, cfg)
        assert trace.converged_at is not None
        assert trace.records[-1].t == 25

    def test_affine_invariance_of_proposals(self):
        # scaling and shifting the objective must not change the search
        def scaled(theta, rng):
            return 2.0 * noisy_quadratic(theta, rng) + 10.0

        cfg = make_config(max_iters=8, seed=5)
        a = bo_run(noisy_quadratic, cfg)
        b = bo_run(scaled, cfg)
        xa = [r.x_evaluated for r in a.records]
        xb = [r.x_evaluated for r in b.records]
        assert_allclose(xa, xb, rtol=0, atol=1e-6)

    def test_incumbent_series_one_entry_per_iteration(self):
        trace = bo_run(noisy_quadratic, make_config(max_iters=7))
        series = trace.incumbent_series()
        assert [t for t, _, _ in series] == list(range(0, 8))

    def test_snapshots_recorded_at_requested_iters(self):
        cfg = make_config(max_iters=5, snapshot_iters=(0, 3, 5), snapshot_grid_size=41)
        trace = bo_run(noisy_quadratic, cfg)
        assert [s.t for s in trace.snapshots] == [0, 3, 5]
        s0 = trace.snapshots[0]
        assert s0.kappa_t == 0.0
        assert s0.x_grid.shape == (41,)
        assert s0.theta_grid[0] == pytest.approx(0.005)
        assert s0.theta_grid[-1] == pytest.approx(0.025)
        assert trace.snapshots[1].kappa_t == pytest.approx(kappa(3, cfg.delta))

    def test_objective_failure_wrapped_with_location(self):
        def fragile(theta, rng):
            raise ZeroDivisionError("boom")

        # first objective contact is the normalizer probe pass
        with pytest.raises(RuntimeError, match="normalizer probe 0"):
            bo_run(fragile, make_config())
        with pytest.raises(RuntimeError, match="init point 0"):
            bo_run(fragile, make_config(), normalizer=Normalizer(0.0, 1.0))

        calls = {"n": 0}

        def fails_later(theta, rng):
            calls["n"] += 1
            if calls["n"] > 7:  # 5 init + normalizer handled separately
                raise ZeroDivisionError("boom")
            return 0.0

        normalizer = Normalizer(0.0, 1.0)
        with pytest.raises(RuntimeError, match="iteration"):
            bo_run(fails_later, make_config(), normalizer=normalizer)


class TestBOStep:
    def test_single_step_appends_one_point(self):
        cfg = make_config()
        from pfbo.bo import BOState
        dataset = GPDataset(np.array([0.0, 0.5, 1.0]), np.array([-1.0, 0.5, -1.0]))
        state = BOState(dataset, fit(dataset, cfg.hp), 0)
        new_state, record = bo_step(state, noisy_quadratic, cfg, Normalizer(0.0, 1.0))
        assert len(new_state.dataset) == 4
        assert new_state.t == 1
        assert record.t == 1
        assert 0.005 <= record.x_evaluated <= 0.025
