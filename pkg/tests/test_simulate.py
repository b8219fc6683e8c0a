import math

import numpy as np
import pytest

from esac.schemes import ControlLaw
from esac.simulate import (
    MonteCarloResult,
    PlantModel,
    SchemeConfig,
    example_system,
    monte_carlo,
    sample_env,
    simulate_trajectory,
)

BENCH_P = (0.2,) * 5


def bench_config(scheme="A2", rho2=0.45, eta=2, buffer_size=3, q=0.5, p=BENCH_P):
    plant, kappa1, kappa2_factory = example_system()
    kappa2 = kappa2_factory(rho2, cost_units=eta) if scheme in ("A2", "B2") else None
    config = SchemeConfig(
        scheme=scheme,
        kappa1=kappa1,
        kappa2=kappa2,
        eta=eta,
        buffer_size=buffer_size,
        d=1.0,
        q=q,
        p=p,
    )
    return plant, config


class TestSampleEnv:
    def test_untriggered_is_silent(self):
        rng = np.random.default_rng(0)
        assert sample_env(rng, False, 0.5, BENCH_P) == (2, 0)

    def test_q_zero_never_transmits(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            assert sample_env(rng, True, 0.0, BENCH_P) == (0, 0)

    def test_q_one_always_transmits(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            gamma, n = sample_env(rng, True, 1.0, BENCH_P)
            assert gamma == 1
            assert 0 <= n <= 4

    def test_degenerate_pmf(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            assert sample_env(rng, True, 1.0, (0.0, 0.0, 0.0, 1.0)) == (1, 3)

    def test_grant_frequencies(self):
        rng = np.random.default_rng(42)
        counts = np.zeros(5)
        draws = 40_000
        for _ in range(draws):
            gamma, n = sample_env(rng, True, 1.0, BENCH_P)
            counts[n] += 1
        np.testing.assert_allclose(counts / draws, BENCH_P, atol=0.01)


class TestSimulateTrajectory:
    def test_shapes_and_initial_state(self):
        plant, config = bench_config()
        traj = simulate_trajectory(plant, config, horizon=50, seed=3)
        assert traj.x.size == 51
        assert traj.v.size == 51
        assert traj.u.size == 50
        assert traj.x[0] == 20.0
        assert traj.v[0] == 20.0
        assert not traj.divergent
        assert traj.steps == 50

    def test_deterministic_in_seed(self):
        plant, config = bench_config()
        a = simulate_trajectory(plant, config, horizon=80, seed=12)
        b = simulate_trajectory(plant, config, horizon=80, seed=12)
        np.testing.assert_array_equal(a.x, b.x)
        np.testing.assert_array_equal(a.gamma, b.gamma)
        c = simulate_trajectory(plant, config, horizon=80, seed=13)
        assert not np.array_equal(a.x, c.x)

    def test_perfect_channel_contracts_noise_free(self):
        # q = 1 with all mass on the largest grant keeps the buffer full of
        # fine entries; without noise the state should contract every step
        # until it parks below the trigger threshold.
        plant, _, kappa2_factory = example_system()
        plant = PlantModel(step=plant.step, noise_std=0.0, x0=20.0, lyapunov=abs)
        config = SchemeConfig(
            scheme="A2",
            kappa1=ControlLaw(lambda x: 1.34 * x - 0.01 * math.sin(x) + 0.9 * abs(x)),
            kappa2=kappa2_factory(0.45, cost_units=2),
            eta=2,
            buffer_size=3,
            d=1.0,
            q=1.0,
            p=(0.0, 0.0, 0.0, 0.0, 1.0),
        )
        traj = simulate_trajectory(plant, config, horizon=30, seed=0)
        # 0.45 contraction while above the threshold, zero input after
        expected = 20.0
        for k in range(1, 31):
            if abs(expected) > 1.0:
                expected = 0.45 * abs(expected)
            else:
                expected = -1.34 * expected + 0.01 * math.sin(expected)
            assert traj.x[k] == pytest.approx(expected, rel=1e-12)

    def test_forced_env_replays_script(self):
        plant, config = bench_config()
        plant = PlantModel(step=plant.step, noise_std=0.0, x0=20.0, lyapunov=abs)
        script = [(1, 4), (0, 0), (0, 0), (1, 2), (2, 0)]
        traj = simulate_trajectory(plant, config, horizon=5, seed=99, forced_env=script)
        np.testing.assert_array_equal(traj.gamma, [g for g, _ in script])
        np.testing.assert_array_equal(traj.n, [n for _, n in script])

    def test_divergence_truncates_and_flags(self):
        plant = PlantModel(
            step=lambda x, u, w: 10.0 * x + u + w,
            noise_std=0.0,
            x0=1.0,
            lyapunov=abs,
        )
        _, config = bench_config(scheme="B1", q=0.0, p=(1.0,))
        config = SchemeConfig(
            scheme="B1", kappa1=config.kappa1, kappa2=None, eta=1,
            buffer_size=1, d=0.5, q=0.0, p=(1.0,),
        )
        traj = simulate_trajectory(plant, config, horizon=100, seed=1)
        assert traj.divergent
        assert traj.x.size < 101
        assert np.all(np.abs(traj.x) <= 1e12)

    def test_rejects_bad_horizon(self):
        plant, config = bench_config()
        with pytest.raises(ValueError):
            simulate_trajectory(plant, config, horizon=0, seed=1)


class TestMonteCarlo:
    def test_single_run_matches_trajectory(self):
        plant, config = bench_config()
        result = monte_carlo(plant, config, horizon=40, runs=1, base_seed=5)
        traj = simulate_trajectory(plant, config, horizon=40, seed=5 ^ 0)
        np.testing.assert_array_equal(result.mean_v, traj.v)

    def test_mean_over_two_runs(self):
        plant, config = bench_config()
        result = monte_carlo(plant, config, horizon=40, runs=2, base_seed=5)
        t0 = simulate_trajectory(plant, config, horizon=40, seed=5 ^ 0)
        t1 = simulate_trajectory(plant, config, horizon=40, seed=5 ^ 1)
        np.testing.assert_allclose(result.mean_v, (t0.v + t1.v) / 2.0, rtol=1e-15)

    def test_thread_count_does_not_change_result(self):
        plant, config = bench_config()
        serial = monte_carlo(plant, config, horizon=30, runs=16, base_seed=7, threads=1)
        parallel = monte_carlo(plant, config, horizon=30, runs=16, base_seed=7, threads=4)
        np.testing.assert_array_equal(serial.mean_v, parallel.mean_v)
        np.testing.assert_array_equal(serial.trigger_rate, parallel.trigger_rate)

    def test_threads_env_var(self, monkeypatch):
        plant, config = bench_config()
        monkeypatch.setenv("ESAC_THREADS", "2")
        result = monte_carlo(plant, config, horizon=10, runs=4, base_seed=1)
        assert isinstance(result, MonteCarloResult)
        monkeypatch.setenv("ESAC_THREADS", "zero")
        with pytest.raises(ValueError):
            monte_carlo(plant, config, horizon=10, runs=4, base_seed=1)

    def test_trigger_rate_shape_and_range(self):
        plant, config = bench_config()
        result = monte_carlo(plant, config, horizon=40, runs=8, base_seed=2)
        assert result.trigger_rate.size == 41
        assert np.all(result.trigger_rate >= 0.0)
        assert np.all(result.trigger_rate <= 1.0)
        assert result.trigger_rate[0] == 1.0  # x0 = 20 always triggers
        assert 0.0 <= result.overall_trigger_rate <= 1.0

    def test_divergent_runs_counted(self):
        plant = PlantModel(
            step=lambda x, u, w: 10.0 * x + u + w,
            noise_std=0.0,
            x0=1.0,
            lyapunov=abs,
        )
        _, base = bench_config()
        config = SchemeConfig(
            scheme="B1", kappa1=base.kappa1, kappa2=None, eta=1,
            buffer_size=1, d=0.5, q=0.0, p=(1.0,),
        )
        result = monte_carlo(plant, config, horizon=50, runs=3, base_seed=1)
        assert result.divergent_runs == 3
        assert result.mean_v.size == 51

    def test_rejects_zero_runs(self):
        plant, config = bench_config()
        with pytest.raises(ValueError):
            monte_carlo(plant, config, horizon=10, runs=0, base_seed=1)


class TestExampleSystem:
    def test_coarse_law_contracts_exactly(self):
        plant, kappa1, _ = example_system(rho1=0.9)
        for x in (20.0, -7.5, 0.3, 1e4):
            nxt = plant.step(x, kappa1(x), 0.0)
            assert nxt == pytest.approx(0.9 * abs(x), rel=1e-9)

    def test_fine_law_factory(self):
        plant, _, kappa2_factory = example_system()
        kappa2 = kappa2_factory(0.45, cost_units=2)
        assert kappa2.cost_units == 2
        assert kappa2.contraction == 0.45
        nxt = plant.step(-3.0, kappa2(-3.0), 0.0)
        assert nxt == pytest.approx(0.45 * 3.0, rel=1e-9)

    def test_plant_shape(self):
        plant, _, _ = example_system()
        assert plant.x0 == 20.0
        assert plant.noise_std == 1.0
        assert plant.lyapunov(-4.0) == 4.0
        assert plant.step(1.0, 0.0, 0.0) == pytest.approx(
            -1.34 + 0.01 * math.sin(1.0)
        )
