import numpy as np
import pytest
from mpmath import exp, mp, mpf, ncdf, pi, quad, sqrt

from cpdbandit.helpers.errors import (
    ArmOutOfRangeError,
    EmptySpecError,
    MeanOutOfRangeError,
    RaggedRowsError,
    StartNotOneError,
    TimeOutOfRangeError,
    UnsortedSegmentsError,
)
from cpdbandit.services.env import (
    RewardModel,
    build_environment,
    clipped_normal_mean,
    effective_means,
    environment_from_lengths,
    experiment3_environment,
    reward_sample,
    reward_tape,
    segment_lookup,
    truncate,
)

from tests.conftest import EXPT1_ROWS


class TestBuildEnvironment:
    def test_experiment1_schedule(self, expt1_env):
        assert expt1_env.n_arms == 3
        assert expt1_env.n_changepoints == 3
        assert expt1_env.changepoints == (1001, 2001, 3001)
        assert expt1_env.horizon == 4000

    def test_single_segment_has_no_changepoints(self, stationary_env):
        assert stationary_env.n_changepoints == 0
        assert stationary_env.changepoints == ()

    def test_mean_above_one_rejected(self):
        with pytest.raises(MeanOutOfRangeError):
            build_environment([(1, (0.5, 1.2))], 10)

    def test_nan_mean_rejected(self):
        with pytest.raises(MeanOutOfRangeError):
            build_environment([(1, (0.5, float("nan")))], 10)

    def test_empty_spec(self):
        with pytest.raises(EmptySpecError):
            build_environment([], 10)

    def test_first_segment_must_start_at_one(self):
        with pytest.raises(StartNotOneError):
            build_environment([(2, (0.5,))], 10)

    def test_starts_strictly_increasing(self):
        with pytest.raises(UnsortedSegmentsError):
            build_environment([(1, (0.5,)), (5, (0.2,)), (5, (0.3,))], 10)

    def test_ragged_rows(self):
        with pytest.raises(RaggedRowsError):
            build_environment([(1, (0.5, 0.5)), (5, (0.2,))], 10)

    def test_last_start_after_horizon(self):
        with pytest.raises(TimeOutOfRangeError):
            build_environment([(1, (0.5,)), (20, (0.2,))], 10)

    def test_mean_table_rows_follow_wall_clock(self, expt1_env):
        table = expt1_env.mean_table
        assert table.shape == (4001, 3)
        assert tuple(table[1000]) == EXPT1_ROWS[0]
        assert tuple(table[1001]) == EXPT1_ROWS[1]
        assert tuple(table[4000]) == EXPT1_ROWS[3]


class TestSegmentLookup:
    def test_inside_second_segment(self, expt1_env):
        info = segment_lookup(expt1_env, 1500)
        assert info.index == 1
        assert info.means == (0.4, 0.9, 0.1)
        assert info.best_arm == 1
        assert info.best_mean == 0.9

    def test_boundary_belongs_to_earlier_segment(self, expt1_env):
        info = segment_lookup(expt1_env, 1000)
        assert info.index == 0
        assert info.best_arm == 2
        assert info.best_mean == 0.9

    def test_changepoint_starts_new_segment(self, expt1_env):
        assert segment_lookup(expt1_env, 1001).index == 1

    @pytest.mark.parametrize("t", [1, 37, 100])
    def test_single_segment(self, stationary_env, t):
        assert segment_lookup(stationary_env, t).index == 0

    def test_ties_pick_lowest_arm(self):
        env = build_environment([(1, (0.3, 0.7, 0.7))], 5)
        assert segment_lookup(env, 3).best_arm == 1

    @pytest.mark.parametrize("t", [0, 4001])
    def test_out_of_range(self, expt1_env, t):
        with pytest.raises(TimeOutOfRangeError):
            segment_lookup(expt1_env, t)


class TestRewardSample:
    def test_certain_arms(self):
        env = build_environment([(1, (1.0, 0.0))], 500)
        draws = [(reward_sample(env, 0, t, (3, 1, t, 0)), reward_sample(env, 1, t, (3, 1, t, 1)))
                 for t in range(1, 501)]
        assert all(a == 1.0 and b == 0.0 for a, b in draws)

    def test_deterministic_in_key(self, expt1_env):
        first = [reward_sample(expt1_env, 1, t, (7, 2, t, 1)) for t in range(1, 200)]
        again = [reward_sample(expt1_env, 1, t, (7, 2, t, 1)) for t in range(1, 200)]
        assert first == again

    def test_replications_differ(self, expt1_env):
        a = reward_tape(expt1_env, 0, 0).rewards[1:]
        b = reward_tape(expt1_env, 0, 1).rewards[1:]
        assert not np.array_equal(a, b)

    def test_rewards_bounded(self):
        env = experiment3_environment()
        rewards = reward_tape(env, 0, 0).rewards[1:]
        assert rewards.min() >= 0.0
        assert rewards.max() <= 1.0

    def test_key_must_address_the_draw(self, expt1_env):
        with pytest.raises(ValueError):
            reward_sample(expt1_env, 0, 5, (0, 0, 6, 0))

    def test_arm_out_of_range(self, expt1_env):
        with pytest.raises(ArmOutOfRangeError):
            reward_sample(expt1_env, 3, 5, (0, 0, 5, 3))

    def test_bernoulli_tape_is_one_uniform_block(self):
        env = build_environment([(1, (0.2, 0.7)), (6, (0.9, 0.4))], 10)
        uniforms = np.random.default_rng([3, 2]).random((11, 2))
        expected = (uniforms[1:] < env.mean_table[1:]).astype(float)
        np.testing.assert_array_equal(reward_tape(env, 3, 2).rewards[1:], expected)
        assert reward_sample(env, 1, 8, (3, 2, 8, 1)) == expected[7, 1]

    def test_gaussian_tape_is_one_normal_block(self):
        env = build_environment([(1, (0.2, 0.7)), (6, (0.9, 0.4))], 10, RewardModel.gaussian_clipped(0.5))
        noise = np.random.default_rng([3, 2]).standard_normal((11, 2))
        expected = np.clip(env.mean_table[1:] + 0.5 * noise[1:], 0.0, 1.0)
        np.testing.assert_array_equal(reward_tape(env, 3, 2).rewards[1:], expected)

    def test_bernoulli_frequency(self):
        env = build_environment([(1, (0.3,))], 100_000)
        rewards = reward_tape(env, 11, 0).rewards[1:, 0]
        assert rewards.mean() == pytest.approx(0.3, abs=0.01)


def _clipped_mean_oracle(mu, sigma):
    mp.dps = 50
    mu, sigma = mpf(mu), mpf(sigma)
    density = lambda x: exp(-((x - mu) ** 2) / (2 * sigma ** 2)) / (sigma * sqrt(2 * pi))
    inside = quad(lambda x: x * density(x), [0, 1])
    above = 1 - ncdf((1 - mu) / sigma)
    return inside + above


class TestClippedGaussian:
    @pytest.mark.parametrize("mu,sigma", [(0.5, 0.5), (0.3, 0.5), (0.7, 0.2), (0.05, 0.1), (0.99, 0.5)])
    def test_mean_matches_quadrature(self, mu, sigma):
        assert clipped_normal_mean(mu, sigma) == pytest.approx(float(_clipped_mean_oracle(mu, sigma)), rel=1e-10)

    def test_symmetric_mean_is_half(self):
        assert clipped_normal_mean(0.5, 0.5) == pytest.approx(0.5, abs=1e-15)

    def test_empirical_mean_of_draws(self):
        env = build_environment([(1, (0.5,))], 100_000, RewardModel.gaussian_clipped(0.5))
        rewards = reward_tape(env, 5, 0).rewards[1:, 0]
        oracle = float(_clipped_mean_oracle(0.5, 0.5))
        assert rewards.mean() == pytest.approx(oracle, abs=0.01)

    def test_effective_means_shift_toward_half(self):
        env = experiment3_environment()
        eff = effective_means(env)
        assert eff.shape == env.mean_matrix.shape
        assert eff[0, 0] > env.mean_matrix[0, 0]
        assert eff[0, -1] < env.mean_matrix[0, -1]

    def test_sigma_must_be_positive(self):
        with pytest.raises(ValueError):
            RewardModel.gaussian_clipped(0.0)


class TestDerivedEnvironments:
    def test_experiment3_rows_are_mirrored(self):
        env = experiment3_environment()
        first, second = env.mean_matrix[0], env.mean_matrix[1]
        assert env.n_arms == 10
        assert env.changepoints == (1876, 5001, 9001)
        np.testing.assert_allclose(second, first[::-1])
        np.testing.assert_allclose(first[:4], [0.3, 0.39, 0.399, 0.3999])
        np.testing.assert_allclose(second[:4], [0.7, 0.61, 0.601, 0.6001])
        np.testing.assert_allclose(second[6:], [0.3999, 0.399, 0.39, 0.3])

    def test_truncate_drops_later_segments(self):
        env = truncate(experiment3_environment(), 5000)
        assert env.horizon == 5000
        assert env.changepoints == (1876,)

    def test_lengths_identity_scaling(self, expt1_env):
        env = environment_from_lengths(EXPT1_ROWS, 1000)
        assert env == expt1_env

    def test_lengths_scale_starts(self):
        env = environment_from_lengths(EXPT1_ROWS, 400)
        assert env.changepoints == (401, 801, 1201)
        assert env.horizon == 1600
