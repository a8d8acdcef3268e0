"""Synthetic end-to-end evaluation of the learn/summarize/decide pipeline.

The protocol: draw a voter population with normally distributed weight
vectors around a shared center, generate noisy pairwise choices per
voter, fit each voter, and measure how often downstream decisions match
the ground truth chosen by the true population.  Ground truth is the
Borda winner of the population's ranking profile, estimated by sampling
rankings from uniformly chosen voters.

Two curves are produced: accuracy vs comparisons per voter (fit each
voter, decide from a ranking profile of the fitted population) and
accuracy vs number of voters (decide from the mean of the true weight
vectors).  Every run derives its generator from (master seed, stream,
run index) alone, so results are reproducible bit for bit regardless of
parallelism.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import partial
from typing import Callable, Sequence

import numpy as np

from .learning import FitConfig, PairwiseComparison, fit_voter
from .pipeline import decide, summarize
from .profiles import Alternative

_TM_NOISE_SCALE = math.sqrt(0.5)

# Stream codes keep the per-run generators of different experiment kinds
# disjoint under one master seed.
_STEP2_STREAM = 2
_STEP3_STREAM = 3


@dataclass(frozen=True)
class SyntheticConfig:
    """Protocol sizes and seeds for the synthetic evaluation."""

    d: int = 10
    n_voters: int = 20
    alts_per_instance: int = 5
    n_test_instances: int = 100
    n_runs: int = 50
    comparisons_grid: tuple[int, ...] = (10, 30, 60, 100)
    voters_grid: tuple[int, ...] = (1, 2, 5, 10, 20, 50)
    profile_sample_count: int = 10_000
    master_seed: int = 0

    def __post_init__(self) -> None:
        for name in (
            "d",
            "n_voters",
            "alts_per_instance",
            "n_test_instances",
            "n_runs",
            "profile_sample_count",
        ):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        for name in ("comparisons_grid", "voters_grid"):
            grid = tuple(int(v) for v in getattr(self, name))
            if not grid or any(v < 1 for v in grid):
                raise ValueError(f"{name} must be a nonempty tuple of positive ints")
            object.__setattr__(self, name, grid)
        if self.master_seed < 0:
            raise ValueError("master_seed must be nonnegative")


@dataclass(frozen=True)
class AccuracyCurve:
    """Accuracy at each grid point, with per-run detail."""

    x_values: tuple[int, ...]
    mean_accuracy: tuple[float, ...]
    per_run: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        if len(self.x_values) != len(self.mean_accuracy):
            raise ValueError("x_values and mean_accuracy disagree on length")
        for row in self.per_run:
            if len(row) != len(self.x_values):
                raise ValueError("per-run row length does not match the grid")
        flat = list(self.mean_accuracy) + [v for row in self.per_run for v in row]
        if any(not 0.0 <= v <= 1.0 for v in flat):
            raise ValueError("accuracies must lie in [0, 1]")

    @classmethod
    def from_runs(
        cls, x_values: Sequence[int], per_run: Sequence[Sequence[float]]
    ) -> "AccuracyCurve":
        rows = tuple(tuple(row) for row in per_run)
        if not rows:
            raise ValueError("need at least one run")
        if any(len(row) != len(x_values) for row in rows):
            raise ValueError("per-run row length does not match the grid")
        means = tuple(
            float(np.mean([row[k] for row in rows])) for k in range(len(x_values))
        )
        return cls(
            x_values=tuple(int(x) for x in x_values),
            mean_accuracy=means,
            per_run=rows,
        )

    def stderr(self) -> tuple[float, ...]:
        """Standard error of the mean across runs (0 for a single run)."""
        n = len(self.per_run)
        if n < 2:
            return tuple(0.0 for _ in self.x_values)
        out = []
        for k in range(len(self.x_values)):
            column = [row[k] for row in self.per_run]
            out.append(float(np.std(column, ddof=1) / math.sqrt(n)))
        return tuple(out)


def run_rng(master_seed: int, stream: int, run_index: int) -> np.random.Generator:
    """Generator derived only from (master seed, stream, run index)."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(stream, run_index))
    return np.random.default_rng(seq)


def gen_population(config: SyntheticConfig, rng: np.random.Generator) -> list[np.ndarray]:
    """Draw voter weight vectors: a shared uniform center plus unit noise."""
    center = rng.uniform(-1.0, 1.0, size=config.d)
    offsets = rng.standard_normal((config.n_voters, config.d))
    return [center + row for row in offsets]


def gen_voter_comparisons(
    beta: np.ndarray, n: int, rng: np.random.Generator
) -> list[PairwiseComparison]:
    """Simulate ``n`` noisy pairwise choices for one voter.

    Each comparison draws two standard-normal feature vectors, gives each
    a Normal(beta . x, 1/2) utility, and records which one won.
    """
    beta = np.asarray(beta, dtype=float)
    if n < 1:
        raise ValueError("need at least one comparison")
    pairs = rng.standard_normal((n, 2, beta.shape[0]))
    utilities = pairs @ beta + rng.normal(0.0, _TM_NOISE_SCALE, size=(n, 2))
    first_wins = utilities[:, 0] >= utilities[:, 1]
    out = []
    for k in range(n):
        chosen, rejected = (0, 1) if first_wins[k] else (1, 0)
        out.append(
            PairwiseComparison(chosen=pairs[k, chosen], rejected=pairs[k, rejected])
        )
    return out


def ground_truth_winner(
    betas: Sequence[np.ndarray],
    alternatives: Sequence[Alternative],
    n_samples: int,
    rng: np.random.Generator,
    family: str = "tm",
) -> Alternative:
    """Borda winner of the population's sampled ranking profile.

    Each sample picks a voter uniformly and draws one noisy ranking from
    that voter's process.  Borda scores are integer position counts, so
    the only tolerance in play is the sampling itself; score ties break
    to the smallest id.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    if not betas:
        raise ValueError("population must be nonempty")
    alts = sorted(alternatives, key=lambda alt: alt.id)
    ids = [alt.id for alt in alts]
    if len(set(ids)) != len(ids):
        raise ValueError("alternative ids must be unique within a set")
    m = len(alts)
    if m == 1:
        return alts[0]
    stacked = np.stack([np.asarray(b, dtype=float) for b in betas])
    features = np.array([alt.features for alt in alts], dtype=float)
    if stacked.shape[1] != features.shape[1]:
        raise ValueError(
            f"voter dimension {stacked.shape[1]} does not match alternative "
            f"dimension {features.shape[1]}"
        )
    mode = stacked @ features.T
    voter_idx = rng.integers(0, stacked.shape[0], size=n_samples)
    mu = mode[voter_idx]
    if family == "tm":
        utilities = mu + rng.normal(0.0, _TM_NOISE_SCALE, size=mu.shape)
    elif family == "pl":
        utilities = rng.gumbel(mu, 1.0)
    else:
        raise ValueError(f"unknown family {family!r}")
    order = np.argsort(-utilities, axis=1, kind="stable")
    scores = np.zeros(m, dtype=np.int64)
    for k in range(m):
        scores += np.bincount(order[:, k], minlength=m) * (m - 1 - k)
    return alts[int(np.argmax(scores))]


def _instance_alternatives(
    config: SyntheticConfig, rng: np.random.Generator
) -> list[Alternative]:
    features = rng.standard_normal((config.alts_per_instance, config.d))
    return [
        Alternative(id=f"a{k:02d}", features=tuple(row))
        for k, row in enumerate(features)
    ]


def _step2_run(config: SyntheticConfig, run_index: int) -> tuple[float, ...]:
    """One run of the accuracy-vs-comparisons experiment."""
    rng = run_rng(config.master_seed, _STEP2_STREAM, run_index)
    true_betas = gen_population(config, rng)
    pool_size = max(config.comparisons_grid)
    pools = [gen_voter_comparisons(b, pool_size, rng) for b in true_betas]
    fitted: dict[int, list[np.ndarray]] = {}
    fit_config = FitConfig()
    for count in config.comparisons_grid:
        fitted[count] = [
            fit_voter(pool[:count], fit_config).beta for pool in pools
        ]
    matches = {count: 0 for count in config.comparisons_grid}
    for _ in range(config.n_test_instances):
        alts = _instance_alternatives(config, rng)
        truth = ground_truth_winner(
            true_betas, alts, config.profile_sample_count, rng
        ).id
        for count in config.comparisons_grid:
            guess = ground_truth_winner(
                fitted[count], alts, config.profile_sample_count, rng
            ).id
            matches[count] += guess == truth
    return tuple(
        matches[count] / config.n_test_instances
        for count in config.comparisons_grid
    )


def _step3_run(config: SyntheticConfig, run_index: int) -> tuple[float, ...]:
    """One run of the accuracy-vs-voters experiment.

    Voter subsets are nested prefixes of one population and all grid
    points share the same test instances, so curve points differ only in
    how many voters they see.
    """
    rng = run_rng(config.master_seed, _STEP3_STREAM, run_index)
    n_max = max(config.voters_grid)
    population = gen_population(replace(config, n_voters=n_max), rng)
    instances = [
        _instance_alternatives(config, rng)
        for _ in range(config.n_test_instances)
    ]
    accuracies = []
    for n in config.voters_grid:
        subset = population[:n]
        model = summarize(subset)
        matched = 0
        for alts in instances:
            truth = ground_truth_winner(
                subset, alts, config.profile_sample_count, rng
            ).id
            matched += decide(model, alts).id == truth
        accuracies.append(matched / config.n_test_instances)
    return tuple(accuracies)


def _collect_runs(
    worker: Callable[[SyntheticConfig, int], tuple[float, ...]],
    config: SyntheticConfig,
    n_jobs: int,
) -> list[tuple[float, ...]]:
    indices = range(config.n_runs)
    if n_jobs <= 1:
        return [worker(config, k) for k in indices]
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(partial(worker, config), indices))


def eval_step2(config: SyntheticConfig, n_jobs: int = 1) -> AccuracyCurve:
    """Accuracy of decisions from fitted voters vs comparisons per voter."""
    runs = _collect_runs(_step2_run, config, n_jobs)
    return AccuracyCurve.from_runs(config.comparisons_grid, runs)


def eval_step3(config: SyntheticConfig, n_jobs: int = 1) -> AccuracyCurve:
    """Accuracy of mean-model decisions vs number of voters summarized."""
    runs = _collect_runs(_step3_run, config, n_jobs)
    return AccuracyCurve.from_runs(config.voters_grid, runs)
