"""Exact posterior inference for the shared global posterior and for
Thompson-sampling base learners.

Three conjugate/exact families are provided:

* :class:`GaussianArmPosterior`: independent Normal-Normal model per arm
  with known noise variance.
* :class:`LinearGaussianPosterior`: Bayesian linear regression sufficient
  statistics (ridge form) with on-demand Cholesky solves.
* :class:`FiniteHypothesisPosterior`: exact weights over an enumerated set
  of candidate mean vectors (used for the information-lock structure).

Every family exposes ``update(action, reward)`` and a ``sample(rng)`` that
returns a full mean vector over actions, which is what the meta-learner
consumes each round.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .core import (
    ConfigurationError,
    DataError,
    EnvironmentInstance,
    GaussianArmsPrior,
    InformationLockPrior,
    LinearGaussianPrior,
    PriorSpec,
    RngStream,
    lock_mean_vector,
)


def _check_reward(reward: float) -> None:
    if not math.isfinite(reward):
        raise DataError(f"reward must be finite, got {reward!r}")


class GaussianArmPosterior:
    """Per-arm Gaussian conjugate posterior with known noise variance.

    With n(a) observations summing to s(a),

        mean(a) = (s(a)/noise_var + mu0[a]/sigma0^2) / (n(a)/noise_var + 1/sigma0^2)
        var(a)  = 1 / (n(a)/noise_var + 1/sigma0^2)

    and with no observations the posterior equals the prior. ``sigma0 == 0``
    pins the posterior at mu0 with zero variance regardless of data.
    """

    __slots__ = ("mu0", "sigma0", "noise_var", "counts", "sums", "_mean", "_sd", "_point", "_prior_prec", "_inv_noise")

    def __init__(self, mu0, sigma0: float, noise_var: float = 1.0):
        self.mu0 = np.array(mu0, dtype=float)
        if self.mu0.ndim != 1 or self.mu0.size == 0:
            raise ConfigurationError("mu0 must be a non-empty vector")
        if sigma0 < 0 or not math.isfinite(sigma0):
            raise ConfigurationError("sigma0 must be finite and >= 0")
        if not (noise_var > 0 and math.isfinite(noise_var)):
            raise ConfigurationError("noise_var must be positive")
        self.sigma0 = float(sigma0)
        self.noise_var = float(noise_var)
        k = self.mu0.size
        self.counts = np.zeros(k, dtype=np.int64)
        self.sums = np.zeros(k)
        self._point = sigma0 == 0.0
        self._prior_prec = 0.0 if self._point else 1.0 / (sigma0 * sigma0)
        self._inv_noise = 1.0 / self.noise_var
        # cached posterior mean / sd per arm, refreshed on update
        self._mean = self.mu0.copy()
        self._sd = np.zeros(k) if self._point else np.full(k, self.sigma0)

    @property
    def num_actions(self) -> int:
        return int(self.mu0.size)

    @property
    def mean(self) -> np.ndarray:
        return self._mean

    @property
    def variance(self) -> np.ndarray:
        return self._sd**2

    def update(self, action: int, reward: float) -> None:
        _check_reward(reward)
        self.counts[action] += 1
        self.sums[action] += reward
        if not self._point:
            prec = self.counts[action] * self._inv_noise + self._prior_prec
            self._mean[action] = (self.sums[action] * self._inv_noise + self.mu0[action] * self._prior_prec) / prec
            self._sd[action] = math.sqrt(1.0 / prec)

    def sample(self, rng: RngStream) -> np.ndarray:
        """Draw an independent posterior mean sample for every arm."""
        return self._mean + self._sd * rng.generator.standard_normal(self._mean.size)

    def clone(self) -> "GaussianArmPosterior":
        out = GaussianArmPosterior(self.mu0, self.sigma0, self.noise_var)
        out.counts = self.counts.copy()
        out.sums = self.sums.copy()
        out._mean = self._mean.copy()
        out._sd = self._sd.copy()
        return out


class LinearGaussianPosterior:
    """Regularized least-squares statistics for a linear reward model:

        V = lam * I + sum_l x_l x_l^T        b = sum_l r_l x_l
        theta_hat = V^{-1} b

    Solves are performed from a fresh factorization of V on demand and cached
    until the next update; no incremental inverse is kept (the dimensions in
    play make recomputation both cheap and numerically safer).
    """

    __slots__ = ("dim", "lam", "V", "b", "_chol", "_theta")

    def __init__(self, dim: int, lam: float):
        if dim < 1:
            raise ConfigurationError("dim must be a positive integer")
        if not (lam > 0 and math.isfinite(lam)):
            raise ConfigurationError("lam must be positive")
        self.dim = int(dim)
        self.lam = float(lam)
        self.V = lam * np.eye(dim)
        self.b = np.zeros(dim)
        self._chol: Optional[np.ndarray] = None
        self._theta: Optional[np.ndarray] = None

    def update(self, x: np.ndarray, reward: float) -> None:
        _check_reward(reward)
        x = np.asarray(x, dtype=float)
        self.V += np.outer(x, x)
        self.b += reward * x
        self._chol = None
        self._theta = None

    @property
    def theta_hat(self) -> np.ndarray:
        if self._theta is None:
            self._theta = np.linalg.solve(self.V, self.b)
        return self._theta

    def sample_theta(self, rng: RngStream, scale: float) -> np.ndarray:
        """Sample theta ~ N(theta_hat, scale^2 V^{-1}).

        ``scale == 0`` returns theta_hat exactly (no randomness consumed).
        """
        if scale == 0.0:
            return self.theta_hat.copy()
        if self._chol is None:
            self._chol = np.linalg.cholesky(self.V)
        z = rng.generator.standard_normal(self.dim)
        # L^{-T} z has covariance V^{-1} when V = L L^T
        return self.theta_hat + scale * np.linalg.solve(self._chol.T, z)

    def clone(self) -> "LinearGaussianPosterior":
        out = LinearGaussianPosterior(self.dim, self.lam)
        out.V = self.V.copy()
        out.b = self.b.copy()
        return out


class LinearMetaPosterior:
    """Global posterior over a linear model, evaluated on a fixed action set.

    ``sample`` draws theta ~ N(theta_hat, sample_scale^2 V^{-1}) and returns
    the implied mean for every action.
    """

    __slots__ = ("base", "actions", "sample_scale")

    def __init__(self, actions: np.ndarray, lam: float, sample_scale: float):
        self.actions = np.asarray(actions, dtype=float)
        if self.actions.ndim != 2:
            raise ConfigurationError("actions must be a (num_actions, dim) matrix")
        self.base = LinearGaussianPosterior(self.actions.shape[1], lam)
        self.sample_scale = float(sample_scale)

    def update(self, action: int, reward: float) -> None:
        self.base.update(self.actions[action], reward)

    def sample(self, rng: RngStream) -> np.ndarray:
        return self.actions @ self.base.sample_theta(rng, self.sample_scale)

    def clone(self) -> "LinearMetaPosterior":
        out = LinearMetaPosterior.__new__(LinearMetaPosterior)
        out.actions = self.actions
        out.base = self.base.clone()
        out.sample_scale = self.sample_scale
        return out


class FiniteHypothesisPosterior:
    """Exact posterior over a finite set of candidate mean vectors under
    Gaussian noise with known variance.

    Updates run in log-space with max-subtraction before normalization, so
    weights stay well-conditioned over long horizons.
    """

    __slots__ = ("means", "noise_var", "log_weights")

    def __init__(self, means: np.ndarray, noise_var: float = 1.0, log_prior=None):
        self.means = np.asarray(means, dtype=float)
        if self.means.ndim != 2 or self.means.shape[0] == 0:
            raise ConfigurationError("means must be a non-empty (num_hypotheses, num_actions) matrix")
        if not (noise_var > 0 and math.isfinite(noise_var)):
            raise ConfigurationError("noise_var must be positive")
        self.noise_var = float(noise_var)
        h = self.means.shape[0]
        if log_prior is None:
            self.log_weights = np.full(h, -math.log(h))
        else:
            lp = np.asarray(log_prior, dtype=float)
            if lp.shape != (h,):
                raise ConfigurationError("log_prior must have one entry per hypothesis")
            self.log_weights = lp - _logsumexp(lp)

    @property
    def num_actions(self) -> int:
        return int(self.means.shape[1])

    @property
    def weights(self) -> np.ndarray:
        return np.exp(self.log_weights)

    def update(self, action: int, reward: float) -> None:
        _check_reward(reward)
        ll = -0.5 * (reward - self.means[:, action]) ** 2 / self.noise_var
        lw = self.log_weights + ll
        self.log_weights = lw - _logsumexp(lw)

    def sample(self, rng: RngStream) -> np.ndarray:
        """Sample one hypothesis by weight and return its mean vector."""
        cum = np.cumsum(np.exp(self.log_weights))
        idx = int(np.searchsorted(cum, rng.generator.random() * cum[-1]))
        idx = min(idx, self.means.shape[0] - 1)
        return self.means[idx].copy()

    def clone(self) -> "FiniteHypothesisPosterior":
        out = FiniteHypothesisPosterior(self.means, self.noise_var)
        out.log_weights = self.log_weights.copy()
        return out


def _logsumexp(x: np.ndarray) -> float:
    m = float(np.max(x))
    return m + math.log(float(np.sum(np.exp(x - m))))


def posterior_mean_weighted_average(mu0: float, sigma0: float, rewards) -> tuple[float, float, float]:
    """Decompose the conjugate posterior mean (unit noise variance) into prior
    and data contributions:

        mean = w_prior * mu0 + w_data * ybar
        w_prior = (1/sigma0^2) / (1/sigma0^2 + n)
        w_data  = n / (1/sigma0^2 + n)

    Returns ``(posterior_mean, w_prior, w_data)``; the weights sum to one.
    The balance point w_prior == w_data sits exactly at n == 1/sigma0^2.
    """
    if not (sigma0 > 0 and math.isfinite(sigma0)):
        raise ConfigurationError("sigma0 must be positive")
    rewards = np.asarray(rewards, dtype=float)
    n = rewards.size
    if n == 0:
        return float(mu0), 1.0, 0.0
    prior_prec = 1.0 / (sigma0 * sigma0)
    w_prior = prior_prec / (prior_prec + n)
    w_data = n / (prior_prec + n)
    ybar = float(np.mean(rewards))
    return w_prior * float(mu0) + w_data * ybar, w_prior, w_data


def make_global_posterior(prior: PriorSpec, env: EnvironmentInstance):
    """Build the meta-learner's shared posterior from its prior belief.

    The prior may differ from the one that generated ``env`` (that is how a
    mis-specified meta-learner is expressed). Linear models need the realized
    action set to evaluate mean vectors, so it is taken from ``env``.
    """
    if isinstance(prior, GaussianArmsPrior):
        if prior.num_actions != env.num_actions:
            raise ConfigurationError("meta prior and environment disagree on the number of actions")
        return GaussianArmPosterior(prior.mu0, prior.sigma0, noise_var=prior.noise_std**2)
    if isinstance(prior, LinearGaussianPrior):
        if env.actions is None:
            raise ConfigurationError("linear meta prior requires an environment with an action set")
        if env.actions.shape != (prior.num_actions, prior.dim):
            raise ConfigurationError("meta prior and environment disagree on the action-set shape")
        return LinearMetaPosterior(env.actions, prior.lam, sample_scale=prior.sigma0)
    if isinstance(prior, InformationLockPrior):
        if prior.num_actions != env.num_actions:
            raise ConfigurationError("meta prior and environment disagree on the number of actions")
        hypotheses = np.stack([lock_mean_vector(off, prior.num_regular) for off in range(prior.num_regular)])
        return FiniteHypothesisPosterior(hypotheses, noise_var=prior.noise_std**2)
    raise ConfigurationError(f"unknown prior type: {type(prior).__name__}")
