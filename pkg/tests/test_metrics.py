import numpy as np
import pytest

from bms.core import GaussianArmsPrior, RngStream, sample_environment
from bms.learners import FixedArmLearner
from bms.meta import run_standalone
from bms.metrics import (
    RunResult,
    aggregate_runs,
    ci95,
    empirical_bayes_regret,
    optimal_action_rate,
    regret_coefficient,
)


def make_run(inst_regret, optimal=None, learners=None, rewards=None, optimal_mean=1.0):
    inst = np.asarray(inst_regret, dtype=float)
    t = inst.size
    return RunResult(
        learner_indices=np.zeros(t, dtype=np.int32) if learners is None else np.asarray(learners, dtype=np.int32),
        actions=np.zeros(t, dtype=np.int32),
        rewards=np.zeros(t) if rewards is None else np.asarray(rewards, dtype=float),
        inst_regret=inst,
        optimal=np.zeros(t, dtype=bool) if optimal is None else np.asarray(optimal, dtype=bool),
        num_learners=1 if learners is None else int(np.max(learners)) + 1,
        optimal_mean=optimal_mean,
    )


def test_empirical_bayes_regret_prefix_sum():
    out = empirical_bayes_regret([make_run([0.5, 0.0, 0.5])])
    assert np.allclose(out, [0.5, 0.5, 1.0])


def test_empirical_bayes_regret_is_mean_over_runs():
    a = make_run([1.0] * 10)  # cumulative 10
    b = make_run([2.0] * 10)  # cumulative 20
    out = empirical_bayes_regret([a, b])
    assert out[-1] == pytest.approx(15.0)


def test_empirical_bayes_regret_single_run_is_its_own_curve():
    run = make_run(np.random.default_rng(0).uniform(size=50))
    assert np.array_equal(empirical_bayes_regret([run]), run.cumulative_regret())


def test_metrics_reject_empty_input():
    with pytest.raises(ValueError):
        empirical_bayes_regret([])
    with pytest.raises(ValueError):
        optimal_action_rate([])
    with pytest.raises(ValueError):
        ci95([])


def test_optimal_action_rate_examples():
    always = make_run([0.0] * 5, optimal=[1, 1, 1, 1, 1])
    assert np.array_equal(optimal_action_rate([always]), np.ones(5))
    sometimes = make_run([0.0] * 5, optimal=[0, 0, 0, 0, 1])
    rate = optimal_action_rate([always, sometimes])
    assert rate[4] == pytest.approx(1.0)
    assert rate[0] == pytest.approx(0.5)


def test_fixed_arm_rate_converges_to_prior_probability():
    # rate of "arm 1 is truly best" over environment draws should approach
    # the prior probability of that event (independent Monte-Carlo oracle)
    prior = GaussianArmsPrior(np.array([0.0, 0.1]), sigma0=0.05, noise_std=1.0)
    oracle = RngStream(100)
    samples = prior.mu0 + prior.sigma0 * oracle.generator.standard_normal((100_000, 2))
    p_arm1 = float((samples[:, 1] > samples[:, 0]).mean())

    runs = []
    for rep in range(1000):
        env = sample_environment(prior, RngStream(200, rep))
        runs.append(run_standalone(env, FixedArmLearner(1), 3, RngStream(201, rep)))
    rate = optimal_action_rate(runs)
    assert np.all(np.abs(rate - p_arm1) < 0.05)


def test_regret_coefficient_brute_force_prefixes():
    traj = [1.0, 1.2, 1.5]
    # max of 1/sqrt(1), 1.2/sqrt(2), 1.5/sqrt(3)
    assert regret_coefficient(traj) == pytest.approx(1.0)


def test_regret_coefficient_zero_trajectory():
    assert regret_coefficient(np.zeros(20)) == 0.0
    assert regret_coefficient([]) == 0.0


def test_regret_coefficient_linear_regret_grows_like_sqrt_t():
    t = 100
    traj = np.arange(1, t + 1, dtype=float)
    assert regret_coefficient(traj) == pytest.approx(np.sqrt(t))


def test_regret_coefficient_monotone_in_prefix_length():
    gen = np.random.default_rng(1)
    traj = np.cumsum(gen.uniform(size=200))
    values = [regret_coefficient(traj[:k]) for k in range(1, 201)]
    assert np.all(np.diff(values) >= -1e-15)


def test_ci95_examples():
    mean, hw = ci95([3.0, 3.0, 3.0])
    assert (mean, hw) == (3.0, 0.0)
    mean, hw = ci95([0.0, 2.0])
    assert mean == pytest.approx(1.0)
    assert hw == pytest.approx(1.96)
    mean, hw = ci95([5.0])
    assert (mean, hw) == (5.0, 0.0)


def test_noiseless_observed_equals_expected_reward_sums():
    prior = GaussianArmsPrior(np.array([0.2, 0.9, 0.4]), sigma0=0.0, noise_std=0.0)
    env = sample_environment(prior, RngStream(0))
    run = run_standalone(env, FixedArmLearner(0), 25, RngStream(1))
    assert np.allclose(run.per_learner_reward_sums(), run.per_learner_expected_reward_sums())


def test_run_result_invariants():
    prior = GaussianArmsPrior(np.zeros(4), 1.0)
    env = sample_environment(prior, RngStream(2))
    run = run_standalone(env, FixedArmLearner(2), 50, RngStream(3))
    assert np.all(run.inst_regret >= 0)
    per = run.per_learner_regret()
    assert np.all(np.diff(per, axis=1) >= 0)


def test_aggregate_runs_shapes_and_bounds():
    prior = GaussianArmsPrior(np.zeros(2), 1.0)
    runs = []
    for rep in range(8):
        env = sample_environment(prior, RngStream(5, rep))
        runs.append(run_standalone(env, FixedArmLearner(0), 30, RngStream(6, rep)))
    agg = aggregate_runs(runs)
    assert agg.horizon == 30
    assert np.all(agg.opt_rate >= 0) and np.all(agg.opt_rate <= 1)
    assert np.all(agg.regret_ci >= 0) and np.all(agg.opt_ci >= 0)
    assert np.allclose(agg.selection_freq, [1.0])
