"""Bayesian online model selection for stochastic bandits.

A balancing meta-learner routes each round to one of several base bandit
algorithms using potentials computed from a shared posterior sample, plus the
base learners, exact posterior machinery, metrics, and a seeded experiment
harness for reproducing regret/optimal-action-rate curves.
"""

from .core import (
    ConfigurationError,
    DataError,
    EnvironmentInstance,
    GaussianArmsPrior,
    HistoryRecord,
    InformationLockPrior,
    LinearGaussianPrior,
    RngStream,
    draw_reward,
    sample_environment,
)
from .harness import (
    BUILTIN_NAMES,
    ExperimentConfig,
    LearnerConfig,
    ResultTable,
    builtin_experiment,
    load_config,
    run_experiment,
)
from .learners import (
    BaseLearner,
    FixedArmLearner,
    GaussianTSLearner,
    ILSLearner,
    LinTSLearner,
    UCBLearner,
)
from .meta import MetaState, compute_potentials, run_episode, run_standalone, select_learner, step
from .metrics import (
    AggregateResult,
    RunResult,
    aggregate_runs,
    ci95,
    empirical_bayes_regret,
    optimal_action_rate,
    regret_coefficient,
)
from .posteriors import (
    FiniteHypothesisPosterior,
    GaussianArmPosterior,
    LinearGaussianPosterior,
    make_global_posterior,
    posterior_mean_weighted_average,
)

__all__ = [
    "AggregateResult",
    "BUILTIN_NAMES",
    "BaseLearner",
    "ConfigurationError",
    "DataError",
    "EnvironmentInstance",
    "ExperimentConfig",
    "FiniteHypothesisPosterior",
    "FixedArmLearner",
    "GaussianArmPosterior",
    "GaussianArmsPrior",
    "GaussianTSLearner",
    "HistoryRecord",
    "ILSLearner",
    "InformationLockPrior",
    "LearnerConfig",
    "LinTSLearner",
    "LinearGaussianPosterior",
    "LinearGaussianPrior",
    "MetaState",
    "ResultTable",
    "RngStream",
    "RunResult",
    "UCBLearner",
    "aggregate_runs",
    "builtin_experiment",
    "ci95",
    "compute_potentials",
    "draw_reward",
    "empirical_bayes_regret",
    "load_config",
    "make_global_posterior",
    "optimal_action_rate",
    "posterior_mean_weighted_average",
    "regret_coefficient",
    "run_episode",
    "run_experiment",
    "run_standalone",
    "sample_environment",
    "select_learner",
    "step",
]
