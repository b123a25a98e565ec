"""Base learners: pluggable bandit algorithms behind a uniform
``select(rng) -> action`` / ``update(action, reward)`` interface.

Five learners are provided: a constant-arm policy, UCB with a configurable
confidence radius, Gaussian Thompson sampling, linear Thompson sampling over
a finite action set, and a decoder for information-lock environments.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .core import ConfigurationError, DataError, RngStream, lock_offset
from .posteriors import GaussianArmPosterior, LinearGaussianPosterior


class BaseLearner:
    """Interface shared by all base learners."""

    __slots__ = ()

    def select(self, rng: RngStream) -> int:
        raise NotImplementedError

    def update(self, action: int, reward: float) -> None:
        raise NotImplementedError


class FixedArmLearner(BaseLearner):
    """Plays one arm forever; observations are ignored."""

    __slots__ = ("arm",)

    def __init__(self, arm: int):
        if arm < 0:
            raise ConfigurationError("arm index must be non-negative")
        self.arm = int(arm)

    def select(self, rng: RngStream) -> int:
        return self.arm

    def update(self, action: int, reward: float) -> None:
        pass


class UCBLearner(BaseLearner):
    """Upper-confidence-bound learner over K arms.

    With per-arm counts n(a) and reward sums u(a), and N = sum_a n(a) pulls
    absorbed so far, the index of a pulled arm is

        u(a)/n(a) + c * sqrt(log(2 K N / delta) / n(a))

    Unpulled arms are selected first in index order; ties go to the lowest
    index. With c == 0 the learner is greedy on empirical means.
    """

    __slots__ = ("num_actions", "c", "delta", "counts", "sums")

    def __init__(self, num_actions: int, c: float, delta: float = 0.1):
        if num_actions < 1:
            raise ConfigurationError("num_actions must be positive")
        if c < 0 or not math.isfinite(c):
            raise ConfigurationError("c must be finite and >= 0")
        if not (0 < delta < 1):
            raise ConfigurationError("delta must lie in (0, 1)")
        self.num_actions = int(num_actions)
        self.c = float(c)
        self.delta = float(delta)
        self.counts = np.zeros(num_actions, dtype=np.int64)
        self.sums = np.zeros(num_actions)

    def select(self, rng: RngStream) -> int:
        if np.any(self.counts == 0):
            return int(np.argmax(self.counts == 0))
        total = int(self.counts.sum())
        log_term = math.log(2.0 * self.num_actions * total / self.delta)
        values = self.sums / self.counts + self.c * np.sqrt(log_term / self.counts)
        return int(np.argmax(values))

    def update(self, action: int, reward: float) -> None:
        if not math.isfinite(reward):
            raise DataError(f"reward must be finite, got {reward!r}")
        self.counts[action] += 1
        self.sums[action] += reward


class GaussianTSLearner(BaseLearner):
    """Thompson sampling with an independent Gaussian posterior per arm.

    Each selection draws a fresh posterior sample and plays its argmax.
    """

    __slots__ = ("posterior",)

    def __init__(self, mu0, sigma0: float, noise_var: float = 1.0):
        self.posterior = GaussianArmPosterior(mu0, sigma0, noise_var)

    def select(self, rng: RngStream) -> int:
        return int(self.posterior.sample(rng).argmax())

    def update(self, action: int, reward: float) -> None:
        self.posterior.update(action, reward)


class LinTSLearner(BaseLearner):
    """Linear Thompson sampling over a finite action set.

    Samples theta ~ N(theta_hat, c^2 d V^{-1}) from its own regularized
    least-squares statistics and plays the action maximizing <a, theta>.
    With c == 0 this is the deterministic greedy-on-theta_hat policy.
    """

    __slots__ = ("actions", "c", "post", "_scale")

    def __init__(self, actions: np.ndarray, c: float, lam: float = 1.0):
        self.actions = np.asarray(actions, dtype=float)
        if self.actions.ndim != 2 or self.actions.shape[0] == 0:
            raise ConfigurationError("actions must be a non-empty (num_actions, dim) matrix")
        if c < 0 or not math.isfinite(c):
            raise ConfigurationError("c must be finite and >= 0")
        self.c = float(c)
        dim = self.actions.shape[1]
        self.post = LinearGaussianPosterior(dim, lam)
        self._scale = self.c * math.sqrt(dim)

    def select(self, rng: RngStream) -> int:
        theta = self.post.sample_theta(rng, self._scale)
        return int(np.argmax(self.actions @ theta))

    def update(self, action: int, reward: float) -> None:
        self.post.update(self.actions[action], reward)


class ILSLearner(BaseLearner):
    """Information-lock solver.

    Probes each magic arm ``pulls_per_magic`` times, decodes the optimal
    regular arm's offset from the magic-arm mean estimates (bit = 1 when the
    estimate falls below -1/2), then commits to the decoded arm forever.
    The decode happens only once every magic arm has its full budget; shared
    observations of magic arms count toward that budget.
    """

    __slots__ = ("num_magic", "num_regular", "pulls_per_magic", "counts", "sums", "decoded")

    def __init__(self, num_magic: int, num_regular: int, pulls_per_magic: int):
        if num_magic < 1 or num_regular < 2:
            raise ConfigurationError("need at least one magic arm and two regular arms")
        if (1 << num_magic) != num_regular:
            raise ConfigurationError("num_regular must equal 2**num_magic")
        if pulls_per_magic < 1:
            raise ConfigurationError("pulls_per_magic must be >= 1")
        self.num_magic = int(num_magic)
        self.num_regular = int(num_regular)
        self.pulls_per_magic = int(pulls_per_magic)
        self.counts = np.zeros(num_magic, dtype=np.int64)
        self.sums = np.zeros(num_magic)
        self.decoded: Optional[int] = None

    def select(self, rng: RngStream) -> int:
        if self.decoded is not None:
            return self.decoded
        for n in range(self.num_magic):
            if self.counts[n] < self.pulls_per_magic:
                return n
        bits = (self.sums / self.counts < -0.5).astype(int)
        self.decoded = self.num_magic + lock_offset(bits)
        return self.decoded

    def update(self, action: int, reward: float) -> None:
        if not math.isfinite(reward):
            raise DataError(f"reward must be finite, got {reward!r}")
        if action < self.num_magic:
            self.counts[action] += 1
            self.sums[action] += reward


def default_magic_pull_budget(noise_var: float, horizon: int) -> int:
    """Per-magic-arm probe budget making each bit decode w.h.p. over the run."""
    return max(1, math.ceil(4.0 * noise_var * math.log(horizon)))
