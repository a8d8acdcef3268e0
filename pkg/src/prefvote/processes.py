"""Parametric ranking processes with linear utilities.

Two families are supported, both drawing one noisy utility per alternative
and ranking by decreasing utility:

* ``"tm"``: utilities are Normal(u(x), 1/2), so the chance of preferring
  a to b in isolation is Phi(u(a) - u(b)).
* ``"pl"``: utilities are Gumbel(u(x), gamma), which yields the familiar
  sequential-choice product form for whole rankings.

``u(x) = beta . features(x)`` in either case.  Both families marginalize
cleanly: the exact profile over a subset equals the marginal of the exact
profile over any superset.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import special

from .profiles import Alternative, AnonymousProfile, Ranking

TM = "tm"
PL = "pl"
FAMILIES = (TM, PL)

#: Largest alternative set accepted by exact_profile (m! support blow-up).
EXACT_PROFILE_MAX_SIZE = 8

_TM_NOISE_SCALE = math.sqrt(0.5)


class ExactProfileUnsupported(ValueError):
    """No closed-form ranking distribution is available for this request."""


@dataclass(frozen=True)
class ProcessSpec:
    """A ranking process: family, utility weights, and noise scale.

    ``gumbel_scale`` only matters for the ``"pl"`` family and must be
    positive there; the ``"tm"`` family has its noise variance fixed at
    one half.
    """

    family: str
    beta: tuple[float, ...]
    gumbel_scale: float = 1.0

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(
                f"unknown family {self.family!r}; expected one of {FAMILIES}"
            )
        object.__setattr__(self, "beta", tuple(float(v) for v in self.beta))
        if self.family == PL and not self.gumbel_scale > 0:
            raise ValueError("gumbel_scale must be positive")

    @property
    def dim(self) -> int:
        return len(self.beta)


def mode_utility(spec: ProcessSpec, alternative: Alternative) -> float:
    """Noise-free utility ``beta . features``."""
    if len(alternative.features) != spec.dim:
        raise ValueError(
            f"feature dimension {len(alternative.features)} does not match "
            f"beta dimension {spec.dim}"
        )
    return float(
        np.dot(np.asarray(spec.beta), np.asarray(alternative.features))
    )


def _sorted_alternatives(
    spec: ProcessSpec, alternatives: Iterable[Alternative]
) -> list[Alternative]:
    alts = sorted(alternatives, key=lambda alt: alt.id)
    if not alts:
        raise ValueError("alternative set must be nonempty")
    ids = [alt.id for alt in alts]
    if len(set(ids)) != len(ids):
        raise ValueError("alternative ids must be unique within a set")
    for alt in alts:
        if len(alt.features) != spec.dim:
            raise ValueError(
                f"alternative {alt.id!r} has dimension {len(alt.features)}, "
                f"expected {spec.dim}"
            )
    return alts


def _mode_utilities(spec: ProcessSpec, alts: Sequence[Alternative]) -> np.ndarray:
    features = np.array([alt.features for alt in alts], dtype=float)
    return features @ np.asarray(spec.beta, dtype=float)


def pairwise_prob(spec: ProcessSpec, a: Alternative, b: Alternative) -> float:
    """Probability that ``a`` precedes ``b`` in a sampled ranking of {a, b}."""
    if a.id == b.id:
        raise ValueError("pairwise probability needs two distinct alternatives")
    gap = mode_utility(spec, a) - mode_utility(spec, b)
    if spec.family == TM:
        return float(special.ndtr(gap))
    return float(special.expit(gap / spec.gumbel_scale))


def _draw_orders(
    spec: ProcessSpec,
    alts: Sequence[Alternative],
    n: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Sample ``n`` rankings as index rows into the id-sorted ``alts``."""
    mu = _mode_utilities(spec, alts)
    if spec.family == TM:
        utilities = rng.normal(loc=mu, scale=_TM_NOISE_SCALE, size=(n, mu.size))
    else:
        utilities = rng.gumbel(loc=mu, scale=spec.gumbel_scale, size=(n, mu.size))
    # Stable sort on columns in id order: exact utility ties resolve toward
    # the lexicographically smaller id.
    return np.argsort(-utilities, axis=1, kind="stable")


def sample_ranking(
    spec: ProcessSpec,
    alternatives: Iterable[Alternative],
    rng: np.random.Generator,
) -> Ranking:
    """Draw one ranking from the process."""
    alts = _sorted_alternatives(spec, alternatives)
    order = _draw_orders(spec, alts, 1, rng)[0]
    return Ranking(tuple(alts[j].id for j in order))


def exact_profile(
    spec: ProcessSpec, alternatives: Iterable[Alternative]
) -> AnonymousProfile:
    """Closed-form ranking distribution over the alternative set.

    Available for the ``"pl"`` family up to ``EXACT_PROFILE_MAX_SIZE``
    alternatives and for ``"tm"`` only on pairs (no closed form exists for
    larger Thurstone sets; estimate_profile covers those).
    """
    alts = _sorted_alternatives(spec, alternatives)
    m = len(alts)
    if m > EXACT_PROFILE_MAX_SIZE:
        raise ValueError(
            f"exact profile limited to {EXACT_PROFILE_MAX_SIZE} alternatives, "
            f"got {m}"
        )
    ids = [alt.id for alt in alts]
    if m == 1:
        return AnonymousProfile({Ranking((ids[0],)): 1.0})
    if spec.family == TM:
        if m > 2:
            raise ExactProfileUnsupported(
                "no closed-form ranking distribution for the tm family "
                f"beyond pairs (got {m} alternatives); use estimate_profile"
            )
        p = pairwise_prob(spec, alts[0], alts[1])
        return AnonymousProfile(
            {
                Ranking((ids[0], ids[1])): p,
                Ranking((ids[1], ids[0])): 1.0 - p,
            }
        )
    mu = _mode_utilities(spec, alts)
    weights = np.exp((mu - mu.max()) / spec.gumbel_scale)
    support: dict[Ranking, float] = {}
    for perm in itertools.permutations(range(m)):
        w = weights[list(perm)]
        denom = np.cumsum(w[::-1])[::-1]
        support[Ranking(tuple(ids[j] for j in perm))] = float(
            np.prod(w / denom)
        )
    return AnonymousProfile(support)


def estimate_profile(
    spec: ProcessSpec,
    alternatives: Iterable[Alternative],
    n_samples: int,
    rng: np.random.Generator,
) -> AnonymousProfile:
    """Monte-Carlo ranking distribution from ``n_samples`` draws."""
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    alts = _sorted_alternatives(spec, alternatives)
    m = len(alts)
    ids = [alt.id for alt in alts]
    if m == 1:
        return AnonymousProfile({Ranking((ids[0],)): 1.0})
    orders = _draw_orders(spec, alts, n_samples, rng)
    if m <= 15:
        # Encode each permutation row as a single integer for fast counting.
        powers = (m ** np.arange(m, dtype=np.int64))[::-1]
        codes = orders.astype(np.int64) @ powers
        unique_codes, counts = np.unique(codes, return_counts=True)
        support = {}
        for code, count in zip(unique_codes.tolist(), counts.tolist()):
            perm = []
            for p in powers.tolist():
                perm.append(code // p)
                code %= p
            support[Ranking(tuple(ids[j] for j in perm))] = count / n_samples
    else:
        unique_rows, counts = np.unique(orders, axis=0, return_counts=True)
        support = {
            Ranking(tuple(ids[j] for j in row)): count / n_samples
            for row, count in zip(unique_rows.tolist(), counts.tolist())
        }
    return AnonymousProfile(support, alternatives=ids)


def utility_dominance(spec: ProcessSpec, a: Alternative, b: Alternative) -> bool:
    """True when the mode utility of ``a`` is at least that of ``b``.

    For both families this is equivalent to ``a`` swap-dominating ``b`` in
    every profile the process induces, so it serves as the exact dominance
    test without enumerating rankings.
    """
    if a.id == b.id:
        raise ValueError("utility dominance needs two distinct alternatives")
    return mode_utility(spec, a) >= mode_utility(spec, b)
