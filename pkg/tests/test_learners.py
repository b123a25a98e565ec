import math

import numpy as np
import pytest

from bms.core import (
    ConfigurationError,
    DataError,
    GaussianArmsPrior,
    InformationLockPrior,
    LinearGaussianPrior,
    RngStream,
    sample_environment,
)
from bms.learners import (
    FixedArmLearner,
    GaussianTSLearner,
    ILSLearner,
    LinTSLearner,
    UCBLearner,
    default_magic_pull_budget,
)
from bms.meta import run_standalone


def test_fixed_arm_always_plays_its_arm():
    learner = FixedArmLearner(3)
    rng = RngStream(0)
    for _ in range(5):
        assert learner.select(rng) == 3
    learner.update(3, 1.0)  # no-op
    assert learner.select(rng) == 3


def test_ucb_hand_evaluated_example():
    # counts (4, 1), sums (2, 0.9), c=1, delta=0.1, K=2:
    # bonus uses log(2*K*total/delta) = log(200)
    learner = UCBLearner(2, c=1.0, delta=0.1)
    learner.counts = np.array([4, 1])
    learner.sums = np.array([2.0, 0.9])
    log_term = math.log(200.0)
    expected = [0.5 + math.sqrt(log_term / 4), 0.9 + math.sqrt(log_term / 1)]
    assert expected[0] == pytest.approx(1.6509037065006824)
    assert expected[1] == pytest.approx(3.2018074130013647)
    assert learner.select(RngStream(0)) == 1


def test_ucb_unpulled_arms_first_in_index_order():
    learner = UCBLearner(3, c=1.0)
    rng = RngStream(0)
    seen = []
    for _ in range(3):
        a = learner.select(rng)
        seen.append(a)
        learner.update(a, 0.0)
    assert seen == [0, 1, 2]


def test_ucb_update_counter_arithmetic():
    learner = UCBLearner(2, c=1.0)
    learner.update(1, 0.5)
    learner.update(1, 0.5)
    assert learner.counts[1] == 2
    assert learner.sums[1] == 1.0


def test_ucb_zero_radius_is_greedy():
    learner = UCBLearner(3, c=0.0)
    for a, r in [(0, 0.1), (1, 0.9), (2, 0.5)]:
        learner.update(a, r)
    for _ in range(5):
        assert learner.select(RngStream(0)) == 1


def test_ucb_rejects_nonfinite_reward():
    learner = UCBLearner(2, c=1.0)
    with pytest.raises(DataError):
        learner.update(0, float("nan"))


def test_gaussian_ts_consistency():
    learner = GaussianTSLearner(np.zeros(2), sigma0=1.0, noise_var=1.0)
    gen = np.random.default_rng(0)
    for _ in range(10_000):
        learner.update(1, 0.8 + gen.standard_normal())
    assert abs(learner.posterior.mean[1] - 0.8) < 0.05


def test_gaussian_ts_point_prior_is_deterministic():
    learner = GaussianTSLearner(np.array([0.0, 1.0]), sigma0=0.0)
    assert learner.select(RngStream(0)) == 1


def test_lints_zero_radius_is_greedy_on_theta_hat():
    actions = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]])
    learner = LinTSLearner(actions, c=0.0, lam=1.0)
    learner.update(0, 2.0)
    theta_hat = learner.post.theta_hat
    expected = int(np.argmax(actions @ theta_hat))
    for _ in range(3):
        assert learner.select(RngStream(0)) == expected


def test_lints_needs_valid_actions():
    with pytest.raises(ConfigurationError):
        LinTSLearner(np.zeros((0, 3)), c=1.0)
    with pytest.raises(ConfigurationError):
        LinTSLearner(np.zeros((4, 3)), c=-1.0)


def test_lints_learns_a_linear_task():
    prior = LinearGaussianPrior(dim=4, lam=1.0, num_actions=30, noise_std=0.3)
    env = sample_environment(prior, RngStream(17))
    learner = LinTSLearner(env.actions, c=0.1, lam=1.0)
    run = run_standalone(env, learner, 800, RngStream(18))
    # most late pulls should be optimal, and the regret rate should collapse
    assert run.optimal[-200:].mean() > 0.8
    assert run.inst_regret[-200:].mean() < 0.5 * run.inst_regret[:200].mean()


def test_ils_decode_example():
    # noiseless magic rewards (-1, 0, 0) decode to offset 4 -> action 3 + 4
    learner = ILSLearner(num_magic=3, num_regular=8, pulls_per_magic=1)
    rng = RngStream(0)
    for reward in (-1.0, 0.0, 0.0):
        a = learner.select(rng)
        learner.update(a, reward)
    assert learner.select(rng) == 7
    assert learner.decoded == 7


def test_ils_probes_magic_arms_in_order():
    learner = ILSLearner(num_magic=2, num_regular=4, pulls_per_magic=3)
    rng = RngStream(0)
    seen = []
    for _ in range(6):
        a = learner.select(rng)
        seen.append(a)
        learner.update(a, 0.0)
    assert seen == [0, 0, 0, 1, 1, 1]


def test_ils_counts_shared_magic_observations():
    learner = ILSLearner(num_magic=2, num_regular=4, pulls_per_magic=1)
    # observations arriving from other learners complete the budget
    learner.update(0, -1.0)
    learner.update(1, 0.0)
    assert learner.select(RngStream(0)) == 2 + 2  # offset 2 = bits (1, 0)


def test_ils_noiseless_regret_is_exactly_the_probe_cost():
    # with zero noise and m=1 the decode is always right, so the whole run's
    # regret is the warm-up cost sum_n (1 + bit_n) and nothing after
    prior = InformationLockPrior(num_regular=8, noise_std=0.0)
    for stream in range(10):
        env = sample_environment(prior, RngStream(55, stream))
        learner = ILSLearner(3, 8, pulls_per_magic=1)
        run = run_standalone(env, learner, 50, RngStream(1, stream))
        bits = (-env.means[:3]).astype(int)
        probe_cost = float(sum(1 + bits[n] for n in range(3)))
        assert run.cumulative_regret()[-1] == pytest.approx(probe_cost, abs=1e-12)
        assert np.all(run.inst_regret[3:] == 0.0)


def test_select_is_pure_given_state_and_stream():
    prior = GaussianArmsPrior(np.zeros(4), 1.0)
    env = sample_environment(prior, RngStream(0))
    gen = np.random.default_rng(12)

    def trained_pair(make):
        a, b = make(), make()
        for _ in range(30):
            action = int(gen.integers(4))
            r = float(gen.normal())
            a.update(action, r)
            b.update(action, r)
        return a, b

    makers = [
        lambda: FixedArmLearner(2),
        lambda: UCBLearner(4, c=1.3),
        lambda: GaussianTSLearner(np.zeros(4), 1.0),
    ]
    for make in makers:
        a, b = trained_pair(make)
        assert a.select(RngStream(77, 5)) == b.select(RngStream(77, 5))
    del env


def test_default_magic_pull_budget():
    assert default_magic_pull_budget(0.0, 1000) == 1
    assert default_magic_pull_budget(1.0, 1000) == math.ceil(4 * math.log(1000))
    assert default_magic_pull_budget(1.0, 1000) >= default_magic_pull_budget(0.25, 1000)
