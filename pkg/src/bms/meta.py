"""The balancing meta-learner.

Each round the meta-learner samples a mean vector from the shared posterior,
scores every base learner with the balancing potential

    phi(i) = n_i * max_a mu~(a) - sum over learner i's past actions of mu~(a)

(the learner's regret under the sampled means), and hands the round to the
learner with the smallest potential. The first M rounds are a round-robin
warm start. Observed data always updates the shared posterior; base-learner
updates are routed to the selected learner only, unless data sharing is on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import ConfigurationError, EnvironmentInstance, HistoryRecord, PriorSpec, RngStream, draw_reward
from .learners import BaseLearner
from .metrics import RunResult
from .posteriors import make_global_posterior


@dataclass
class PotentialVector:
    """Balancing potentials for one round, plus the sample that produced them."""

    phi: np.ndarray
    sampled_means: np.ndarray
    sampled_best: float


class MetaState:
    """Mutable per-episode state of the meta-learner.

    Tracks, for every base learner, the rounds it was selected (1-based), its
    selection count, the reward mass it observed, and how often it played
    each action; plus the full interaction history and the shared posterior.
    """

    def __init__(
        self,
        learners: Sequence[BaseLearner],
        posterior,
        num_actions: int,
        data_sharing: bool = False,
        record_true_potentials: bool = False,
        record_sampled_potentials: bool = False,
    ):
        if len(learners) < 1:
            raise ConfigurationError("need at least one base learner")
        self.learners = list(learners)
        self.posterior = posterior
        self.data_sharing = bool(data_sharing)
        self.record_true_potentials = bool(record_true_potentials)
        self.record_sampled_potentials = bool(record_sampled_potentials)
        m = len(self.learners)
        self.t = 1
        self.selection_rounds: list[list[int]] = [[] for _ in range(m)]
        self.counts = np.zeros(m, dtype=np.int64)
        self.reward_sums = np.zeros(m)
        self.action_counts = np.zeros((m, num_actions))
        self.history: list[HistoryRecord] = []
        self.true_potentials: list[np.ndarray] = []
        self.sampled_potentials: list[Optional[PotentialVector]] = []

    @property
    def num_learners(self) -> int:
        return len(self.learners)


def compute_potentials(meta: MetaState, sampled_means: np.ndarray) -> PotentialVector:
    """Evaluate every learner's balancing potential under one mean vector."""
    best = float(sampled_means.max())
    phi = meta.counts * best - meta.action_counts @ sampled_means
    return PotentialVector(phi=phi, sampled_means=sampled_means, sampled_best=best)


def select_learner(meta: MetaState, rng: RngStream) -> int:
    """Pick the round's base learner: round-robin for the first M rounds,
    then the argmin of the balancing potentials (lowest index on ties)."""
    i, _ = _choose(meta, rng)
    return i


def _choose(meta: MetaState, rng: RngStream) -> tuple[int, Optional[PotentialVector]]:
    if meta.t <= meta.num_learners:
        return (meta.t - 1) % meta.num_learners, None
    pv = compute_potentials(meta, meta.posterior.sample(rng))
    return int(np.argmin(pv.phi)), pv


def step(meta: MetaState, env: EnvironmentInstance, rng: RngStream) -> tuple[int, int, float]:
    """Run one round: select a learner, play its action, absorb the reward.

    Returns ``(learner_index, action, reward)`` and advances ``meta``.
    """
    if meta.record_true_potentials:
        meta.true_potentials.append(compute_potentials(meta, env.means).phi)
    i, pv = _choose(meta, rng)
    if meta.record_sampled_potentials:
        meta.sampled_potentials.append(pv)
    a = meta.learners[i].select(rng)
    r = draw_reward(env, a, rng)
    if meta.data_sharing:
        for learner in meta.learners:
            learner.update(a, r)
    else:
        meta.learners[i].update(a, r)
    meta.posterior.update(a, r)
    meta.selection_rounds[i].append(meta.t)
    meta.counts[i] += 1
    meta.reward_sums[i] += r
    meta.action_counts[i, a] += 1
    meta.history.append(HistoryRecord(t=meta.t, learner=i, action=a, reward=r))
    meta.t += 1
    return i, a, r


def run_episode(
    meta_prior: PriorSpec,
    env: EnvironmentInstance,
    learners: Sequence[BaseLearner],
    horizon: int,
    rng: RngStream,
    data_sharing: bool = False,
    record_true_potentials: bool = False,
    record_sampled_potentials: bool = False,
) -> RunResult:
    """Run the meta-learner for ``horizon`` rounds on one environment.

    ``meta_prior`` seeds the shared posterior and may differ from the prior
    that generated ``env`` (a mis-specified meta-learner).
    """
    if horizon < len(learners):
        raise ConfigurationError("horizon must be at least the number of base learners")
    posterior = make_global_posterior(meta_prior, env)
    meta = MetaState(
        learners,
        posterior,
        env.num_actions,
        data_sharing=data_sharing,
        record_true_potentials=record_true_potentials,
        record_sampled_potentials=record_sampled_potentials,
    )
    learner_idx = np.empty(horizon, dtype=np.int32)
    actions = np.empty(horizon, dtype=np.int32)
    rewards = np.empty(horizon)
    for k in range(horizon):
        i, a, r = step(meta, env, rng)
        learner_idx[k] = i
        actions[k] = a
        rewards[k] = r
    played_means = env.means[actions]
    return RunResult(
        learner_indices=learner_idx,
        actions=actions,
        rewards=rewards,
        inst_regret=env.optimal_mean - played_means,
        optimal=actions == env.optimal_action,
        num_learners=len(learners),
        optimal_mean=env.optimal_mean,
        true_potentials=np.stack(meta.true_potentials) if record_true_potentials else None,
        sampled_potentials=meta.sampled_potentials if record_sampled_potentials else None,
    )


def run_standalone(
    env: EnvironmentInstance,
    learner: BaseLearner,
    horizon: int,
    rng: RngStream,
) -> RunResult:
    """Run a single base learner on its own for ``horizon`` rounds."""
    if horizon < 1:
        raise ConfigurationError("horizon must be positive")
    actions = np.empty(horizon, dtype=np.int32)
    rewards = np.empty(horizon)
    for k in range(horizon):
        a = learner.select(rng)
        r = draw_reward(env, a, rng)
        learner.update(a, r)
        actions[k] = a
        rewards[k] = r
    played_means = env.means[actions]
    return RunResult(
        learner_indices=np.zeros(horizon, dtype=np.int32),
        actions=actions,
        rewards=rewards,
        inst_regret=env.optimal_mean - played_means,
        optimal=actions == env.optimal_action,
        num_learners=1,
        optimal_mean=env.optimal_mean,
    )
