"""Configuration-driven experiment runner.

An experiment samples R environments from a prior and, on each one, runs the
meta-learner plus (optionally) every base learner standalone, using common
random numbers for the environment draws so the curves are directly
comparable. Replications are distributed over a process pool; results are
deterministic for a given (config, seed) regardless of worker count.

Stream layout per replication ``j`` (stream id = j * 64 + slot):
  slot 0            environment draw (shared by all algorithms)
  slot 1            the meta-learner's episode
  slot 2 + k        standalone episode of learner k (pool first, then extras)
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
import yaml

from .core import (
    ConfigurationError,
    EnvironmentInstance,
    GaussianArmsPrior,
    InformationLockPrior,
    LinearGaussianPrior,
    PriorSpec,
    RngStream,
    sample_environment,
)
from .learners import (
    BaseLearner,
    FixedArmLearner,
    GaussianTSLearner,
    ILSLearner,
    LinTSLearner,
    UCBLearner,
    default_magic_pull_budget,
)
from .meta import run_episode, run_standalone
from .metrics import AggregateResult, aggregate_curves, regret_coefficient

STREAM_STRIDE = 64
_ENV_SLOT = 0
_META_SLOT = 1
_BASE_SLOT0 = 2

CSV_HEADER = ["experiment", "label", "t", "mean_regret", "regret_ci", "opt_rate", "opt_ci"]


@dataclass(frozen=True)
class LearnerConfig:
    """Declarative spec of one base learner.

    kinds and their parameters:
      fixed        arm
      ucb          c, delta (default 0.1)
      gaussian-ts  mu0 (vector or scalar), sigma0, noise_var (default 1.0)
      lin-ts       c, lam (default 1.0)
      ils          pulls_per_magic (default: decode-w.h.p. budget for the horizon)
    """

    kind: str
    params: dict = field(default_factory=dict)
    label: Optional[str] = None

    def resolved_label(self) -> str:
        if self.label:
            return self.label
        p = self.params
        if self.kind == "fixed":
            return f"FixedArm({p['arm']})"
        if self.kind == "ucb":
            return f"UCB(c={p['c']:g})"
        if self.kind == "gaussian-ts":
            mu0 = p.get("mu0", 0.0)
            if np.ndim(mu0) == 0:
                return f"TS(mu0={mu0:g})"
            return "TS(mu0=[" + ",".join(f"{v:g}" for v in mu0) + "])"
        if self.kind == "lin-ts":
            return f"LinTS(c={p['c']:g})"
        if self.kind == "ils":
            m = p.get("pulls_per_magic")
            return f"ILS(m={m})" if m is not None else "ILS"
        raise ConfigurationError(f"unknown learner kind: {self.kind}")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    env_prior: PriorSpec
    learners: tuple[LearnerConfig, ...]
    horizon: int
    replications: int
    meta_prior: Optional[PriorSpec] = None  # defaults to env_prior
    extra_baselines: tuple[LearnerConfig, ...] = ()
    data_sharing: bool = False
    include_baselines: bool = True
    seed: int = 20240901

    def __post_init__(self):
        if len(self.learners) < 1:
            raise ConfigurationError("need at least one base learner")
        if self.horizon < len(self.learners):
            raise ConfigurationError("horizon must be at least the pool size")
        if self.replications < 1:
            raise ConfigurationError("replications must be >= 1")

    @property
    def resolved_meta_prior(self) -> PriorSpec:
        return self.meta_prior if self.meta_prior is not None else self.env_prior

    @property
    def meta_label(self) -> str:
        return "B-MS-shared" if self.data_sharing else "B-MS"

    def baseline_configs(self) -> tuple[LearnerConfig, ...]:
        return self.learners + self.extra_baselines

    def labels(self) -> list[str]:
        out = [self.meta_label]
        if self.include_baselines:
            out.extend(lc.resolved_label() for lc in self.baseline_configs())
        return out


def make_learner(lc: LearnerConfig, env: EnvironmentInstance, config: ExperimentConfig) -> BaseLearner:
    """Instantiate one base learner for a concrete environment."""
    p = lc.params
    if lc.kind == "fixed":
        return FixedArmLearner(int(p["arm"]))
    if lc.kind == "ucb":
        return UCBLearner(env.num_actions, c=float(p["c"]), delta=float(p.get("delta", 0.1)))
    if lc.kind == "gaussian-ts":
        mu0 = p.get("mu0", 0.0)
        if np.ndim(mu0) == 0:
            mu0 = np.full(env.num_actions, float(mu0))
        return GaussianTSLearner(mu0, sigma0=float(p["sigma0"]), noise_var=float(p.get("noise_var", 1.0)))
    if lc.kind == "lin-ts":
        if env.actions is None:
            raise ConfigurationError("lin-ts learners need a linear environment")
        return LinTSLearner(env.actions, c=float(p["c"]), lam=float(p.get("lam", 1.0)))
    if lc.kind == "ils":
        if env.num_magic_arms is None:
            raise ConfigurationError("ils learners need an information-lock environment")
        n_magic = env.num_magic_arms
        n_regular = env.num_actions - n_magic
        m = p.get("pulls_per_magic")
        if m is None:
            m = default_magic_pull_budget(env.noise_std**2, config.horizon)
        return ILSLearner(n_magic, n_regular, int(m))
    raise ConfigurationError(f"unknown learner kind: {lc.kind}")


@dataclass
class ResultTable:
    """Aggregated curves per algorithm label, writable as CSV or JSON.

    ``d_star_mc`` is a Monte-Carlo surrogate for the prior-worst-case best
    regret coefficient: max over sampled environments of the min over pool
    learners of their standalone regret coefficient. Present only when
    standalone baselines were run.
    """

    experiment: str
    labels: list[str]
    aggregates: dict[str, AggregateResult]
    d_star_mc: Optional[float] = None

    def rows(self):
        for label in self.labels:
            agg = self.aggregates[label]
            for k in range(agg.horizon):
                yield (
                    self.experiment,
                    label,
                    k + 1,
                    agg.mean_regret[k],
                    agg.regret_ci[k],
                    agg.opt_rate[k],
                    agg.opt_ci[k],
                )

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for exp, label, t, mr, rci, orate, oci in self.rows():
                writer.writerow([exp, label, t, repr(float(mr)), repr(float(rci)), repr(float(orate)), repr(float(oci))])

    def to_json_dict(self) -> dict:
        out = {"experiment": self.experiment, "labels": list(self.labels), "series": {}}
        if self.d_star_mc is not None:
            # Monte-Carlo estimate, not the definition's high-probability quantity
            out["d_star_monte_carlo"] = self.d_star_mc
        for label in self.labels:
            agg = self.aggregates[label]
            entry = {
                "mean_regret": agg.mean_regret.tolist(),
                "regret_ci": agg.regret_ci.tolist(),
                "opt_rate": agg.opt_rate.tolist(),
                "opt_ci": agg.opt_ci.tolist(),
            }
            if agg.selection_freq is not None:
                entry["selection_freq"] = agg.selection_freq.tolist()
            out["series"][label] = entry
        return out

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh)


def _replication(config: ExperimentConfig, rep: int) -> dict[str, tuple]:
    """Run replication ``rep`` of every algorithm on a shared environment draw."""
    base = rep * STREAM_STRIDE
    env = sample_environment(config.env_prior, RngStream(config.seed, base + _ENV_SLOT))
    out: dict[str, tuple] = {}

    pool = [make_learner(lc, env, config) for lc in config.learners]
    meta_run = run_episode(
        config.resolved_meta_prior,
        env,
        pool,
        config.horizon,
        RngStream(config.seed, base + _META_SLOT),
        data_sharing=config.data_sharing,
    )
    out[config.meta_label] = (
        meta_run.cumulative_regret(),
        meta_run.optimal.astype(np.uint8),
        meta_run.selection_counts(),
        None,
    )
    if config.include_baselines:
        for k, lc in enumerate(config.baseline_configs()):
            learner = make_learner(lc, env, config)
            run = run_standalone(env, learner, config.horizon, RngStream(config.seed, base + _BASE_SLOT0 + k))
            cum = run.cumulative_regret()
            out[lc.resolved_label()] = (cum, run.optimal.astype(np.uint8), None, regret_coefficient(cum))
    return out


def _replication_block(config: ExperimentConfig, reps: Sequence[int]) -> list[tuple[int, dict]]:
    return [(rep, _replication(config, rep)) for rep in reps]


def run_experiment(config: ExperimentConfig, threads: Optional[int] = None) -> ResultTable:
    """Run all replications and aggregate per-label curves.

    ``threads`` caps the number of worker processes (default: CPU count).
    Output is identical for any thread count because every replication owns
    its private random streams.
    """
    labels = config.labels()
    if len(set(labels)) != len(labels):
        raise ConfigurationError(f"duplicate algorithm labels: {labels}")
    reps = list(range(config.replications))
    if threads is None:
        threads = os.cpu_count() or 1
    threads = max(1, min(threads, len(reps)))

    if threads == 1:
        results = _replication_block(config, reps)
    else:
        chunk = math.ceil(len(reps) / (threads * 4))
        blocks = [reps[i : i + chunk] for i in range(0, len(reps), chunk)]
        results = []
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for block_result in pool.map(_replication_block, [config] * len(blocks), blocks):
                results.extend(block_result)
    results.sort(key=lambda pair: pair[0])

    aggregates = {}
    for label in labels:
        cum = np.stack([res[label][0] for _, res in results])
        opt = np.stack([res[label][1] for _, res in results])
        counts = None
        if results[0][1][label][2] is not None:
            counts = np.stack([res[label][2] for _, res in results])
        aggregates[label] = aggregate_curves(cum, opt, counts)

    d_star = None
    if config.include_baselines:
        pool_labels = [lc.resolved_label() for lc in config.learners]
        d_star = max(min(res[label][3] for label in pool_labels) for _, res in results)
    return ResultTable(experiment=config.experiment, labels=labels, aggregates=aggregates, d_star_mc=d_star)


# ---------------------------------------------------------------------------
# Built-in experiment definitions
# ---------------------------------------------------------------------------

_UCB_GRID = (0.01, 0.1, 1.0, 2.0, 5.0, 10.0)
_LINTS_GRID = (0.0, 0.16, 2.5, 5.0, 25.0)
_TS_PRIOR_MEANS = ([0.0, 0.0], [0.0, 0.1], [0.0, -0.1], [0.2, 0.1])
_TS_PRIOR_MEANS_ALL_MISSPEC = ([0.0, 0.0], [0.3, 0.0], [0.0, -0.1], [0.2, 0.1])
_TRUE_TS_PRIOR_MEAN = (0.0, 0.1)
_MISSPEC_META_MEAN = (0.0, -0.1)
_TS_SIGMA0 = 0.05

BUILTIN_NAMES = (
    "ucb-grid",
    "lints-grid",
    "fixed-arm-ts",
    "misspec-a",
    "misspec-b",
    "misspec-c",
    "misspec-d",
    "info-lock",
)


def builtin_experiment(name: str) -> ExperimentConfig:
    """Return the full-scale configuration of a named experiment."""
    if name == "ucb-grid":
        prior = GaussianArmsPrior(np.zeros(5), sigma0=1.0, noise_std=1.0)
        return ExperimentConfig(
            experiment=name,
            env_prior=prior,
            learners=tuple(LearnerConfig("ucb", {"c": c, "delta": 0.1}) for c in _UCB_GRID),
            horizon=1000,
            replications=100,
        )
    if name == "lints-grid":
        prior = LinearGaussianPrior(dim=10, lam=1.0, num_actions=1000, noise_std=1.0)
        return ExperimentConfig(
            experiment=name,
            env_prior=prior,
            learners=tuple(LearnerConfig("lin-ts", {"c": c, "lam": 1.0}) for c in _LINTS_GRID),
            horizon=15000,
            replications=100,
        )
    if name == "fixed-arm-ts":
        prior = GaussianArmsPrior(np.zeros(5), sigma0=1.0, noise_std=1.0)
        return ExperimentConfig(
            experiment=name,
            env_prior=prior,
            learners=tuple(LearnerConfig("fixed", {"arm": a}) for a in range(5)),
            extra_baselines=(LearnerConfig("gaussian-ts", {"mu0": [0.0] * 5, "sigma0": 1.0}, label="TS"),),
            horizon=1000,
            replications=1000,
        )
    if name.startswith("misspec-"):
        case = name.removeprefix("misspec-")
        if case not in ("a", "b", "c", "d"):
            raise ConfigurationError(f"unknown builtin experiment: {name!r}")
        meta_well = case in ("a", "c")
        bases_well = case in ("a", "b")
        env_prior = GaussianArmsPrior(np.array(_TRUE_TS_PRIOR_MEAN), sigma0=_TS_SIGMA0, noise_std=1.0)
        meta_mean = _TRUE_TS_PRIOR_MEAN if meta_well else _MISSPEC_META_MEAN
        base_means = _TS_PRIOR_MEANS if bases_well else _TS_PRIOR_MEANS_ALL_MISSPEC
        return ExperimentConfig(
            experiment=name,
            env_prior=env_prior,
            meta_prior=GaussianArmsPrior(np.array(meta_mean), sigma0=_TS_SIGMA0, noise_std=1.0),
            learners=tuple(LearnerConfig("gaussian-ts", {"mu0": m, "sigma0": _TS_SIGMA0}) for m in base_means),
            horizon=5000,
            replications=500,
        )
    if name == "info-lock":
        # pool: naive TS plus two lock solvers with different probe budgets
        prior = InformationLockPrior(num_regular=8, noise_std=1.0)
        return ExperimentConfig(
            experiment=name,
            env_prior=prior,
            learners=(
                LearnerConfig("gaussian-ts", {"mu0": 0.0, "sigma0": 1.0}, label="TS"),
                LearnerConfig("ils", {"pulls_per_magic": 6}),
                LearnerConfig("ils", {"pulls_per_magic": 2}),
            ),
            horizon=1000,
            replications=60,
        )
    raise ConfigurationError(f"unknown builtin experiment: {name!r}")


# ---------------------------------------------------------------------------
# Config files
# ---------------------------------------------------------------------------

_PRIOR_KINDS = ("gaussian-arms", "linear-gaussian", "information-lock")


def _prior_from_dict(section: dict, where: str) -> PriorSpec:
    if not isinstance(section, dict) or "kind" not in section:
        raise ConfigurationError(f"{where}: expected a mapping with a 'kind' field")
    kind = section["kind"]
    try:
        if kind == "gaussian-arms":
            return GaussianArmsPrior(
                np.asarray(section["mu0"], dtype=float),
                sigma0=float(section["sigma0"]),
                noise_std=float(section.get("noise_std", 1.0)),
            )
        if kind == "linear-gaussian":
            return LinearGaussianPrior(
                dim=int(section["dim"]),
                lam=float(section["lam"]),
                num_actions=int(section["num_actions"]),
                noise_std=float(section.get("noise_std", 1.0)),
            )
        if kind == "information-lock":
            return InformationLockPrior(
                num_regular=int(section["num_regular"]),
                noise_std=float(section.get("noise_std", 1.0)),
            )
    except KeyError as exc:
        raise ConfigurationError(f"{where}: missing field {exc}") from exc
    raise ConfigurationError(f"{where}: unknown prior kind {kind!r} (expected one of {_PRIOR_KINDS})")


def _learner_from_dict(section: dict, where: str) -> LearnerConfig:
    if not isinstance(section, dict) or "kind" not in section:
        raise ConfigurationError(f"{where}: expected a mapping with a 'kind' field")
    section = dict(section)
    kind = section.pop("kind")
    label = section.pop("label", None)
    return LearnerConfig(kind=kind, params=section, label=label)


def load_config(path) -> ExperimentConfig:
    """Parse a YAML experiment description into an ExperimentConfig.

    The schema is documented in the README; see configs/ for examples."""
    with open(path) as fh:
        try:
            raw = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigurationError(f"{path}: not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigurationError(f"{path}: top level must be a mapping")
    for key in ("experiment", "env", "learners", "horizon", "replications"):
        if key not in raw:
            raise ConfigurationError(f"{path}: missing required field {key!r}")
    learners = raw["learners"]
    if not isinstance(learners, list) or not learners:
        raise ConfigurationError(f"{path}: 'learners' must be a non-empty list")
    extras = raw.get("extra_baselines", [])
    if not isinstance(extras, list):
        raise ConfigurationError(f"{path}: 'extra_baselines' must be a list")
    return ExperimentConfig(
        experiment=str(raw["experiment"]),
        env_prior=_prior_from_dict(raw["env"], f"{path}: env"),
        meta_prior=_prior_from_dict(raw["meta"], f"{path}: meta") if "meta" in raw else None,
        learners=tuple(_learner_from_dict(s, f"{path}: learners[{i}]") for i, s in enumerate(learners)),
        extra_baselines=tuple(_learner_from_dict(s, f"{path}: extra_baselines[{i}]") for i, s in enumerate(extras)),
        horizon=int(raw["horizon"]),
        replications=int(raw["replications"]),
        data_sharing=bool(raw.get("data_sharing", False)),
        include_baselines=bool(raw.get("include_baselines", True)),
        seed=int(raw.get("seed", ExperimentConfig.seed)),
    )


def with_overrides(
    config: ExperimentConfig,
    seed: Optional[int] = None,
    data_sharing: Optional[bool] = None,
    horizon: Optional[int] = None,
    replications: Optional[int] = None,
    include_baselines: Optional[bool] = None,
) -> ExperimentConfig:
    """Apply CLI-style overrides to a config."""
    updates = {}
    if seed is not None:
        updates["seed"] = seed
    if data_sharing is not None:
        updates["data_sharing"] = data_sharing
    if horizon is not None:
        updates["horizon"] = horizon
    if replications is not None:
        updates["replications"] = replications
    if include_baselines is not None:
        updates["include_baselines"] = include_baselines
    return replace(config, **updates) if updates else config
