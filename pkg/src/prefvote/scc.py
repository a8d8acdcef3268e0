"""Social choice correspondences and axiom checkers.

Five classic rules are provided over anonymous profiles: plurality, Borda,
Copeland, maximin, and Bucklin.  All return the full winner set (never
empty); scores within ``SCORE_TIE_TOL`` of the best count as tied.

The checkers audit a rule against swap dominance: swap-dominance
efficiency, its strong form, and stability of winners under restriction
to a subset of alternatives.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import processes
from .profiles import (
    Alternative,
    AnonymousProfile,
    marginalize_profile,
    swap_dominates,
)
from .processes import ProcessSpec

PLURALITY = "plurality"
BORDA = "borda"
COPELAND = "copeland"
MAXIMIN = "maximin"
BUCKLIN = "bucklin"
SCC_KINDS = (PLURALITY, BORDA, COPELAND, MAXIMIN, BUCKLIN)

#: Two scores within this absolute distance are treated as exactly tied.
SCORE_TIE_TOL = 1e-9

_BUCKLIN_NOTE = (
    "bucklin ties at the pivotal rank are resolved toward the larger majority"
)


def positional_scores(
    profile: AnonymousProfile, score_vector: Sequence[float]
) -> dict[str, float]:
    """Weighted positional score of every alternative.

    ``score_vector[k]`` is the credit for appearing at rank k (0-based)
    and must be non-increasing.
    """
    m = len(profile.alternatives)
    vector = [float(v) for v in score_vector]
    if len(vector) != m:
        raise ValueError(
            f"score vector has length {len(vector)}, profile has {m} alternatives"
        )
    if any(vector[k] < vector[k + 1] for k in range(m - 1)):
        raise ValueError("score vector must be non-increasing")
    terms: dict[str, list[float]] = {alt: [] for alt in profile.alternatives}
    for ranking, weight in profile.support.items():
        for k, alt in enumerate(ranking.order):
            terms[alt].append(weight * vector[k])
    return {alt: math.fsum(parts) for alt, parts in terms.items()}


def pairwise_support(profile: AnonymousProfile, a: str, b: str) -> float:
    """Total weight of rankings that place ``a`` above ``b``."""
    if a == b:
        raise ValueError("pairwise support needs two distinct alternatives")
    if a not in profile.alternatives or b not in profile.alternatives:
        raise ValueError(f"both {a!r} and {b!r} must be in the profile")
    return math.fsum(
        weight
        for ranking, weight in profile.support.items()
        if ranking.prefers(a, b)
    )


def copeland_scores(profile: AnonymousProfile) -> dict[str, int]:
    """Number of strict pairwise majorities won by each alternative.

    A majority must clear one half by more than ``SCORE_TIE_TOL``; exact
    half-half splits count for neither side.
    """
    alts = sorted(profile.alternatives)
    if len(alts) < 2:
        raise ValueError("copeland scores need at least two alternatives")
    scores = {alt: 0 for alt in alts}
    for a, b in itertools.combinations(alts, 2):
        support = pairwise_support(profile, a, b)
        if support > 0.5 + SCORE_TIE_TOL:
            scores[a] += 1
        elif support < 0.5 - SCORE_TIE_TOL:
            scores[b] += 1
    return scores


def _maximin_scores(profile: AnonymousProfile) -> dict[str, float]:
    alts = sorted(profile.alternatives)
    return {
        a: min(pairwise_support(profile, a, b) for b in alts if b != a)
        for a in alts
    }


def _bucklin_cumulative(profile: AnonymousProfile) -> dict[str, list[float]]:
    """Cumulative top-k weight per alternative, for k = 1..m."""
    alts = sorted(profile.alternatives)
    m = len(alts)
    per_rank: dict[str, list[list[float]]] = {
        alt: [[] for _ in range(m)] for alt in alts
    }
    for ranking, weight in profile.support.items():
        for k, alt in enumerate(ranking.order):
            per_rank[alt][k].append(weight)
    table: dict[str, list[float]] = {}
    for alt in alts:
        running: list[float] = []
        masses = []
        for k in range(m):
            running.extend(per_rank[alt][k])
            masses.append(math.fsum(running))
        table[alt] = masses
    return table


def _bucklin_scores(profile: AnonymousProfile) -> dict[str, tuple[int, float]]:
    """Per alternative: (pivotal rank, cumulative weight at that rank).

    The pivotal rank is the smallest k whose cumulative top-k weight
    strictly exceeds one half; masses within the tie tolerance of one
    half count as exactly half and do not qualify.
    """
    table = _bucklin_cumulative(profile)
    m = len(table)
    out: dict[str, tuple[int, float]] = {}
    for alt, masses in table.items():
        for k, mass in enumerate(masses):
            if mass > 0.5 + SCORE_TIE_TOL:
                out[alt] = (k + 1, mass)
                break
        else:
            out[alt] = (m, masses[-1])
    return out


def apply_scc(kind: str, profile: AnonymousProfile) -> frozenset[str]:
    """Winner set of the named rule; never empty."""
    if kind not in SCC_KINDS:
        raise ValueError(f"unknown rule {kind!r}; expected one of {SCC_KINDS}")
    alts = sorted(profile.alternatives)
    m = len(alts)
    if m == 1:
        return frozenset(alts)
    if kind == PLURALITY:
        vector = [1.0] + [0.0] * (m - 1)
        scores = positional_scores(profile, vector)
        return _best_within_tol(scores)
    if kind == BORDA:
        vector = [float(m - 1 - k) for k in range(m)]
        scores = positional_scores(profile, vector)
        return _best_within_tol(scores)
    if kind == COPELAND:
        scores = copeland_scores(profile)
        best = max(scores.values())
        return frozenset(a for a, s in scores.items() if s == best)
    if kind == MAXIMIN:
        return _best_within_tol(_maximin_scores(profile))
    ranks = _bucklin_scores(profile)
    best_rank = min(rank for rank, _ in ranks.values())
    at_best = {a: mass for a, (rank, mass) in ranks.items() if rank == best_rank}
    return _best_within_tol(at_best)


def _best_within_tol(scores: dict[str, float]) -> frozenset[str]:
    best = max(scores.values())
    return frozenset(a for a, s in scores.items() if s >= best - SCORE_TIE_TOL)


@dataclass(frozen=True)
class EfficiencyReport:
    """Result of auditing one rule on one profile.

    ``violations`` lists offending ordered pairs (dominating, dominated);
    ``notes`` carries rule-specific caveats, e.g. the Bucklin tie rule.
    """

    kind: str
    holds: bool
    violations: tuple[tuple[str, str], ...]
    notes: tuple[str, ...] = ()


def _dominance_pairs(profile: AnonymousProfile) -> list[tuple[str, str]]:
    alts = sorted(profile.alternatives)
    return [
        (a, b)
        for a, b in itertools.permutations(alts, 2)
        if swap_dominates(profile, a, b)
    ]


def check_swd_efficiency(kind: str, profile: AnonymousProfile) -> EfficiencyReport:
    """Audit: a dominated winner must drag its dominator in.

    For every pair with ``a`` swap-dominating ``b``, if ``b`` wins then
    ``a`` must win too.
    """
    winners = apply_scc(kind, profile)
    violations = [
        (a, b)
        for a, b in _dominance_pairs(profile)
        if b in winners and a not in winners
    ]
    notes = (_BUCKLIN_NOTE,) if kind == BUCKLIN else ()
    return EfficiencyReport(
        kind=kind,
        holds=not violations,
        violations=tuple(sorted(violations)),
        notes=notes,
    )


def check_strong_swd_efficiency(
    kind: str, profile: AnonymousProfile
) -> EfficiencyReport:
    """Audit the strict form of swap-dominance efficiency.

    When ``a`` dominates ``b`` and ``b`` does not dominate back, ``b``
    must lose; when they dominate each other, they win or lose together.
    """
    winners = apply_scc(kind, profile)
    violations = []
    for a, b in _dominance_pairs(profile):
        mutual = swap_dominates(profile, b, a)
        if not mutual and b in winners:
            violations.append((a, b))
        elif mutual and (a in winners) != (b in winners):
            violations.append((a, b))
    notes = (_BUCKLIN_NOTE,) if kind == BUCKLIN else ()
    return EfficiencyReport(
        kind=kind,
        holds=not violations,
        violations=tuple(sorted(violations)),
        notes=notes,
    )


@dataclass(frozen=True)
class StabilityReport:
    """Winners before and after restricting to a subset of alternatives.

    The check is vacuous (``applicable`` False) when no full-set winner
    survives into the subset; otherwise stability demands that the
    surviving winners be exactly the subset winners.  ``low_confidence``
    flags sampled profiles whose margins are within sampling noise.
    """

    kind: str
    winners_full: frozenset[str]
    winners_subset: frozenset[str]
    intersection: frozenset[str]
    applicable: bool
    stable: bool
    low_confidence: bool
    notes: tuple[str, ...] = ()


def _winner_margin(kind: str, profile: AnonymousProfile) -> float:
    """Smallest score gap separating winners from losers (1.0 if none)."""
    alts = sorted(profile.alternatives)
    m = len(alts)
    if m == 1:
        return 1.0
    if kind == PLURALITY:
        scores = positional_scores(profile, [1.0] + [0.0] * (m - 1))
        scale = 1.0
    elif kind == BORDA:
        scores = positional_scores(profile, [float(m - 1 - k) for k in range(m)])
        scale = float(m - 1)
    elif kind == MAXIMIN:
        scores = _maximin_scores(profile)
        scale = 1.0
    elif kind == COPELAND:
        # Margin lives in the pairwise supports, not the integer scores.
        gap = min(
            abs(pairwise_support(profile, a, b) - 0.5)
            for a, b in itertools.combinations(alts, 2)
        )
        return 2.0 * gap
    else:
        table = _bucklin_cumulative(profile)
        return 2.0 * min(
            abs(mass - 0.5) for masses in table.values() for mass in masses[:-1]
        )
    winners = _best_within_tol(scores)
    losers = [s for a, s in scores.items() if a not in winners]
    if not losers:
        return 0.0
    return (max(scores.values()) - max(losers)) / scale


def check_stability(
    spec: ProcessSpec,
    kind: str,
    alternatives: Iterable[Alternative],
    subset_ids: Iterable[str],
    mode: str = "exact",
    n_samples: int = 100_000,
    seed: int = 0,
) -> StabilityReport:
    """Check winner stability of a rule under a process.

    Builds the ranking profile over the full alternative set and over the
    subset (exactly, or by sampling ``n_samples`` rankings per profile for
    ``mode="mc"``), applies the rule to both, and compares.
    """
    if mode not in ("exact", "mc"):
        raise ValueError(f"mode must be 'exact' or 'mc', got {mode!r}")
    alts = sorted(alternatives, key=lambda alt: alt.id)
    by_id = {alt.id: alt for alt in alts}
    sub_ids = sorted(set(subset_ids))
    if not sub_ids:
        raise ValueError("subset must be nonempty")
    missing = [i for i in sub_ids if i not in by_id]
    if missing:
        raise ValueError(f"subset ids not in the alternative set: {missing}")
    sub_alts = [by_id[i] for i in sub_ids]
    low_confidence = False
    if mode == "exact":
        full_profile = processes.exact_profile(spec, alts)
        sub_profile = processes.exact_profile(spec, sub_alts)
    else:
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        full_profile = processes.estimate_profile(spec, alts, n_samples, rng)
        sub_profile = processes.estimate_profile(spec, sub_alts, n_samples, rng)
        noise = 2.0 * math.sqrt(0.25 / n_samples)
        low_confidence = (
            _winner_margin(kind, full_profile) < noise
            or _winner_margin(kind, sub_profile) < noise
        )
    return _stability_from_profiles(
        kind, full_profile, sub_profile, low_confidence
    )


def check_profile_stability(
    kind: str, profile: AnonymousProfile, subset_ids: Iterable[str]
) -> StabilityReport:
    """Stability check on a fixed profile, via marginalization."""
    sub_ids = sorted(set(subset_ids))
    sub_profile = marginalize_profile(profile, sub_ids)
    return _stability_from_profiles(kind, profile, sub_profile, False)


def _stability_from_profiles(
    kind: str,
    full_profile: AnonymousProfile,
    sub_profile: AnonymousProfile,
    low_confidence: bool,
) -> StabilityReport:
    winners_full = apply_scc(kind, full_profile)
    winners_subset = apply_scc(kind, sub_profile)
    intersection = winners_full & sub_profile.alternatives
    applicable = bool(intersection)
    stable = (not applicable) or intersection == winners_subset
    notes = (_BUCKLIN_NOTE,) if kind == BUCKLIN else ()
    return StabilityReport(
        kind=kind,
        winners_full=winners_full,
        winners_subset=winners_subset,
        intersection=intersection,
        applicable=applicable,
        stable=stable,
        low_confidence=low_confidence,
        notes=notes,
    )
