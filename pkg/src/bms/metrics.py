"""Regret accounting for single runs and aggregation across replications:
empirical Bayesian regret, optimal-action selection rate, regret
coefficients, and normal-approximation confidence intervals."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np


@dataclass
class RunResult:
    """Per-round record of one episode.

    All arrays have length T. ``inst_regret[k]`` is the optimal mean minus
    the mean of the action played in round k+1 (never negative), and
    ``optimal[k]`` flags whether that action was the environment's best.
    The two trailing fields are filled only in debug modes:
    ``true_potentials`` row k holds every learner's balancing potential under
    the true means just before round k+1, and ``sampled_potentials`` keeps
    the per-round potential vectors actually used for selection (None during
    the warm start).
    """

    learner_indices: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    inst_regret: np.ndarray
    optimal: np.ndarray
    num_learners: int
    optimal_mean: float
    true_potentials: Optional[np.ndarray] = None
    sampled_potentials: Optional[list[Any]] = None

    @property
    def horizon(self) -> int:
        return int(self.rewards.size)

    def cumulative_regret(self) -> np.ndarray:
        return np.cumsum(self.inst_regret)

    def per_learner_regret(self) -> np.ndarray:
        """(M, T) matrix: entry [i, k] is learner i's regret over rounds 1..k+1."""
        m = self.num_learners
        out = np.zeros((m, self.horizon))
        for i in range(m):
            out[i] = np.cumsum(np.where(self.learner_indices == i, self.inst_regret, 0.0))
        return out

    def per_learner_reward_sums(self) -> np.ndarray:
        """Observed reward mass routed through each learner (u at the end of the run)."""
        return np.bincount(self.learner_indices, weights=self.rewards, minlength=self.num_learners)

    def per_learner_expected_reward_sums(self) -> np.ndarray:
        """Expected counterpart of the reward mass (u-bar), from true means."""
        expected = self.optimal_mean - self.inst_regret
        return np.bincount(self.learner_indices, weights=expected, minlength=self.num_learners)

    def selection_counts(self) -> np.ndarray:
        return np.bincount(self.learner_indices, minlength=self.num_learners)


@dataclass
class AggregateResult:
    """Cross-replication summary: per-round means with 95% CI half-widths."""

    mean_regret: np.ndarray
    regret_ci: np.ndarray
    opt_rate: np.ndarray
    opt_ci: np.ndarray
    selection_freq: Optional[np.ndarray] = None

    @property
    def horizon(self) -> int:
        return int(self.mean_regret.size)


def empirical_bayes_regret(runs: Sequence[RunResult]) -> np.ndarray:
    """Mean cumulative regret across runs, reported per round."""
    if len(runs) == 0:
        raise ValueError("need at least one run")
    return np.mean([r.cumulative_regret() for r in runs], axis=0)


def optimal_action_rate(runs: Sequence[RunResult]) -> np.ndarray:
    """Per-round fraction of runs that played the truly best action."""
    if len(runs) == 0:
        raise ValueError("need at least one run")
    return np.mean([r.optimal.astype(float) for r in runs], axis=0)


def regret_coefficient(trajectory) -> float:
    """Smallest d with Regret_l <= d * sqrt(l) over every prefix l of the
    trajectory; an all-zero trajectory has coefficient 0."""
    traj = np.asarray(trajectory, dtype=float)
    if traj.size == 0:
        return 0.0
    return float(np.max(traj / np.sqrt(np.arange(1, traj.size + 1))))


def ci95(samples) -> tuple[float, float]:
    """Normal-approximation 95% CI: (mean, 1.96 * stddev / sqrt(R)).

    The half-width is 0 by convention for a single sample.
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("need at least one sample")
    if x.size == 1:
        return float(x[0]), 0.0
    return float(np.mean(x)), float(1.96 * np.std(x, ddof=1) / np.sqrt(x.size))


def _column_ci(matrix: np.ndarray) -> np.ndarray:
    r = matrix.shape[0]
    if r < 2:
        return np.zeros(matrix.shape[1])
    return 1.96 * np.std(matrix, axis=0, ddof=1) / np.sqrt(r)


def aggregate_curves(
    cum_regret: np.ndarray,
    optimal: np.ndarray,
    selection_counts: Optional[np.ndarray] = None,
) -> AggregateResult:
    """Summarize (R, T) per-replication curves into per-round mean and CI."""
    cum_regret = np.asarray(cum_regret, dtype=float)
    optimal = np.asarray(optimal, dtype=float)
    if cum_regret.ndim != 2 or cum_regret.shape != optimal.shape:
        raise ValueError("cum_regret and optimal must be matching (R, T) matrices")
    freq = None
    if selection_counts is not None:
        counts = np.asarray(selection_counts, dtype=float)
        totals = counts.sum(axis=1, keepdims=True)
        freq = np.mean(counts / totals, axis=0)
    return AggregateResult(
        mean_regret=np.mean(cum_regret, axis=0),
        regret_ci=_column_ci(cum_regret),
        opt_rate=np.mean(optimal, axis=0),
        opt_ci=_column_ci(optimal),
        selection_freq=freq,
    )


def aggregate_runs(runs: Sequence[RunResult]) -> AggregateResult:
    """Aggregate full RunResults (replication axis first)."""
    if len(runs) == 0:
        raise ValueError("need at least one run")
    cum = np.stack([r.cumulative_regret() for r in runs])
    opt = np.stack([r.optimal.astype(float) for r in runs])
    counts = np.stack([r.selection_counts() for r in runs])
    return aggregate_curves(cum, opt, counts)
