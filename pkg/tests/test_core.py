import numpy as np
import pytest

from bms.core import (
    ConfigurationError,
    GaussianArmsPrior,
    InformationLockPrior,
    LinearGaussianPrior,
    RngStream,
    draw_reward,
    lock_bits,
    lock_mean_vector,
    lock_offset,
    sample_environment,
)


def test_rng_stream_determinism():
    a = RngStream(123, 7).generator.standard_normal(10)
    b = RngStream(123, 7).generator.standard_normal(10)
    c = RngStream(123, 8).generator.standard_normal(10)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_sampler_determinism_all_priors():
    priors = [
        GaussianArmsPrior(np.zeros(4), 1.0),
        LinearGaussianPrior(dim=3, lam=2.0, num_actions=6),
        InformationLockPrior(num_regular=4),
    ]
    for prior in priors:
        e1 = sample_environment(prior, RngStream(5, 1))
        e2 = sample_environment(prior, RngStream(5, 1))
        assert np.array_equal(e1.means, e2.means)
        assert e1.optimal_action == e2.optimal_action


def test_degenerate_gaussian_prior_returns_mu0_exactly():
    mu0 = np.array([0.3, -0.2, 1.5])
    env = sample_environment(GaussianArmsPrior(mu0, sigma0=0.0), RngStream(0))
    assert np.array_equal(env.means, mu0)
    assert env.optimal_action == 2
    assert env.optimal_mean == 1.5


def test_optimal_action_lowest_index_tie_break():
    env = sample_environment(GaussianArmsPrior(np.array([1.0, 1.0, 0.0]), sigma0=0.0), RngStream(0))
    assert env.optimal_action == 0


def test_information_lock_example_offset_four():
    # offset 4 in three MSB-first bits is (1, 0, 0)
    means = lock_mean_vector(4, 8)
    assert np.array_equal(means[:3], [-1.0, 0.0, 0.0])
    expected_regular = np.full(8, 0.5)
    expected_regular[4] = 1.0
    assert np.array_equal(means[3:], expected_regular)


def test_information_lock_bits_round_trip():
    for offset in range(16):
        assert lock_offset(lock_bits(offset, 4)) == offset


def test_information_lock_environment_round_trip():
    prior = InformationLockPrior(num_regular=16)
    for stream in range(50):
        env = sample_environment(prior, RngStream(99, stream))
        bits = (-env.means[: env.num_magic_arms]).astype(int)
        decoded = env.num_magic_arms + lock_offset(bits)
        assert decoded == env.lock_target == env.optimal_action
        assert env.optimal_mean == 1.0


def test_linear_environment_geometry():
    prior = LinearGaussianPrior(dim=10, lam=1.0, num_actions=40)
    for stream in range(20):
        env = sample_environment(prior, RngStream(3, stream))
        norms = np.linalg.norm(env.actions, axis=1)
        assert np.all(np.abs(norms - 1.0) < 1e-12)
        assert np.allclose(env.means, env.actions @ env.theta)
        # Cauchy-Schwarz: no unit action can beat the parameter norm
        assert env.means.max() <= np.linalg.norm(env.theta) + 1e-12


def test_linear_theta_prior_marginals():
    # theta coordinates are marginally N(0, 1/lam); Monte-Carlo check at lam=1
    prior = LinearGaussianPrior(dim=10, lam=1.0, num_actions=1)
    gen = RngStream(2024, 0)
    draws = np.stack([sample_environment(prior, gen).theta for _ in range(100_000)])
    var = draws.var(axis=0)
    assert np.all(var > 0.97) and np.all(var < 1.03)
    assert np.all(np.abs(draws.mean(axis=0)) < 0.02)


def test_draw_reward_noiseless():
    env = sample_environment(GaussianArmsPrior(np.array([0.1, 0.7]), 0.0, noise_std=0.0), RngStream(0))
    assert draw_reward(env, 1, RngStream(1)) == 0.7


def test_draw_reward_moments():
    env = sample_environment(GaussianArmsPrior(np.array([0.0, 0.4]), 0.0, noise_std=1.0), RngStream(0))
    rng = RngStream(7)
    draws = np.array([draw_reward(env, 0, rng) for _ in range(100_000)])
    assert abs(draws.mean()) < 0.02
    assert 0.97 < draws.var() < 1.03


def test_draw_reward_out_of_range():
    env = sample_environment(GaussianArmsPrior(np.zeros(3), 1.0), RngStream(0))
    with pytest.raises(IndexError):
        draw_reward(env, 3, RngStream(0))
    with pytest.raises(IndexError):
        draw_reward(env, -1, RngStream(0))


def test_invalid_prior_fields():
    with pytest.raises(ConfigurationError):
        GaussianArmsPrior(np.zeros(2), sigma0=-1.0)
    with pytest.raises(ConfigurationError):
        GaussianArmsPrior(np.array([np.nan, 0.0]), sigma0=1.0)
    with pytest.raises(ConfigurationError):
        LinearGaussianPrior(dim=0, lam=1.0, num_actions=5)
    with pytest.raises(ConfigurationError):
        LinearGaussianPrior(dim=2, lam=0.0, num_actions=5)
    with pytest.raises(ConfigurationError):
        InformationLockPrior(num_regular=6)  # not a power of two
    with pytest.raises(ConfigurationError):
        InformationLockPrior(num_regular=1)


def test_linear_prior_sigma0_lambda_identity():
    for lam in (0.25, 1.0, 4.0):
        prior = LinearGaussianPrior(dim=2, lam=lam, num_actions=3)
        assert prior.sigma0**2 * lam == pytest.approx(1.0, abs=1e-15)
