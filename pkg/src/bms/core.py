"""Core domain types: priors over bandit environments, sampled environment
instances, reward generation, and deterministic named RNG streams."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np


class ConfigurationError(ValueError):
    """A prior, learner, or experiment configuration is invalid."""


class DataError(ValueError):
    """An observation fed to an update is not a finite number."""


class RngStream:
    """Deterministic random stream identified by ``(seed, stream)``.

    Two streams constructed from the same pair produce bit-identical draw
    sequences; distinct stream ids are statistically independent. The
    underlying generator is stateful, so repeated draws through one stream
    advance it as usual.
    """

    __slots__ = ("seed", "stream", "generator")

    def __init__(self, seed: int, stream: int = 0):
        self.seed = int(seed)
        self.stream = int(stream)
        self.generator = np.random.default_rng(
            np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream,))
        )

    def __repr__(self) -> str:  # pragma: no cover
        return f"RngStream(seed={self.seed}, stream={self.stream})"


@dataclass(frozen=True)
class GaussianArmsPrior:
    """Independent Gaussian prior per arm: mean(a) ~ N(mu0[a], sigma0^2).

    ``sigma0 == 0`` is the degenerate point prior (arm means equal mu0).
    """

    mu0: np.ndarray
    sigma0: float
    noise_std: float = 1.0

    def __post_init__(self):
        mu0 = np.array(self.mu0, dtype=float)
        object.__setattr__(self, "mu0", mu0)
        if mu0.ndim != 1 or mu0.size == 0 or not np.all(np.isfinite(mu0)):
            raise ConfigurationError("mu0 must be a non-empty finite vector")
        _check_nonneg_finite("sigma0", self.sigma0)
        _check_nonneg_finite("noise_std", self.noise_std)

    @property
    def num_actions(self) -> int:
        return int(self.mu0.size)


@dataclass(frozen=True)
class LinearGaussianPrior:
    """Linear-reward prior: theta ~ N(0, sigma0^2 I_d) with sigma0 = sqrt(1/lam),
    evaluated on a finite action set of ``num_actions`` unit vectors drawn
    uniformly on the sphere at environment-sampling time.
    """

    dim: int
    lam: float
    num_actions: int
    noise_std: float = 1.0

    def __post_init__(self):
        if self.dim < 1:
            raise ConfigurationError("dim must be a positive integer")
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ConfigurationError("lam must be positive")
        if self.num_actions < 1:
            raise ConfigurationError("num_actions must be a positive integer")
        _check_nonneg_finite("noise_std", self.noise_std)

    @property
    def sigma0(self) -> float:
        # sigma0^2 * lam == 1 holds by construction
        return math.sqrt(1.0 / self.lam)


@dataclass(frozen=True)
class InformationLockPrior:
    """Structured prior with ``num_regular`` regular arms (a power of two) and
    log2(num_regular) low-reward "magic" arms whose means spell out the index
    of the optimal regular arm in binary.
    """

    num_regular: int
    noise_std: float = 1.0

    def __post_init__(self):
        k = self.num_regular
        if k < 2 or (k & (k - 1)) != 0:
            raise ConfigurationError("num_regular must be a power of two >= 2")
        _check_nonneg_finite("noise_std", self.noise_std)

    @property
    def num_magic(self) -> int:
        return self.num_regular.bit_length() - 1

    @property
    def num_actions(self) -> int:
        return self.num_magic + self.num_regular


PriorSpec = Union[GaussianArmsPrior, LinearGaussianPrior, InformationLockPrior]


def _check_nonneg_finite(name: str, value: float) -> None:
    if not (value >= 0 and math.isfinite(value)):
        raise ConfigurationError(f"{name} must be finite and >= 0")


def lock_bits(offset: int, num_bits: int) -> np.ndarray:
    """Binary representation of ``offset``, most significant bit first."""
    if not 0 <= offset < (1 << num_bits):
        raise ConfigurationError(f"offset {offset} does not fit in {num_bits} bits")
    return np.array([(offset >> (num_bits - 1 - n)) & 1 for n in range(num_bits)], dtype=int)


def lock_offset(bits) -> int:
    """Inverse of :func:`lock_bits`."""
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


def lock_mean_vector(offset: int, num_regular: int) -> np.ndarray:
    """True arm means of an information-lock instance whose optimal regular
    arm sits at the given zero-based offset.

    Magic arm n has mean -bit_n(offset); regular arms have mean 1/2 except the
    optimal one, which has mean 1.
    """
    num_magic = num_regular.bit_length() - 1
    means = np.empty(num_magic + num_regular)
    means[:num_magic] = -lock_bits(offset, num_magic)
    means[num_magic:] = 0.5
    means[num_magic + offset] = 1.0
    return means


@dataclass(frozen=True)
class EnvironmentInstance:
    """A concrete bandit environment drawn from a prior.

    ``optimal_action`` is the lowest-index maximizer of ``means``. For linear
    environments, ``actions`` holds the unit-norm action vectors (one per row)
    and ``means == actions @ theta``. For information-lock environments,
    ``lock_target`` is the optimal regular arm's action index.
    """

    means: np.ndarray
    noise_std: float
    optimal_action: int
    optimal_mean: float
    theta: Optional[np.ndarray] = None
    actions: Optional[np.ndarray] = None
    num_magic_arms: Optional[int] = None
    lock_target: Optional[int] = None

    @property
    def num_actions(self) -> int:
        return int(self.means.size)


@dataclass(frozen=True)
class HistoryRecord:
    """One interaction round: which learner acted, what it played, what it got."""

    t: int
    learner: int
    action: int
    reward: float


def _finish(means: np.ndarray, noise_std: float, **extra) -> EnvironmentInstance:
    best = int(np.argmax(means))  # np.argmax takes the lowest index on ties
    return EnvironmentInstance(
        means=means,
        noise_std=float(noise_std),
        optimal_action=best,
        optimal_mean=float(means[best]),
        **extra,
    )


def sample_environment(prior: PriorSpec, rng: RngStream) -> EnvironmentInstance:
    """Draw one environment instance from the prior."""
    gen = rng.generator
    if isinstance(prior, GaussianArmsPrior):
        means = prior.mu0 + prior.sigma0 * gen.standard_normal(prior.num_actions)
        return _finish(means, prior.noise_std)
    if isinstance(prior, LinearGaussianPrior):
        theta = prior.sigma0 * gen.standard_normal(prior.dim)
        raw = gen.standard_normal((prior.num_actions, prior.dim))
        actions = raw / np.linalg.norm(raw, axis=1, keepdims=True)
        means = actions @ theta
        return _finish(means, prior.noise_std, theta=theta, actions=actions)
    if isinstance(prior, InformationLockPrior):
        offset = int(gen.integers(prior.num_regular))
        means = lock_mean_vector(offset, prior.num_regular)
        return _finish(
            means,
            prior.noise_std,
            num_magic_arms=prior.num_magic,
            lock_target=prior.num_magic + offset,
        )
    raise ConfigurationError(f"unknown prior type: {type(prior).__name__}")


def draw_reward(env: EnvironmentInstance, action: int, rng: RngStream) -> float:
    """Sample a reward for ``action``: N(means[action], noise_std^2)."""
    if not 0 <= action < env.num_actions:
        raise IndexError(f"action {action} out of range [0, {env.num_actions})")
    return float(env.means[action] + env.noise_std * rng.generator.standard_normal())
