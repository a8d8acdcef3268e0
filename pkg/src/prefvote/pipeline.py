"""From many per-voter models to one decision.

The summary step collapses fitted voter weights into their arithmetic
mean.  Among all single models of the same family, the mean weight vector
minimizes the KL divergence from the per-alternative distribution of a
uniformly random voter's noisy utility, so nothing fancier is needed.
The decision step then picks the alternative with the highest summary
utility, which for both supported families equals the Borda winner of the
summary process in the limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import special

from .profiles import Alternative
from .processes import ProcessSpec, mode_utility


@dataclass(frozen=True)
class SummaryModel:
    """Mean voter weights plus the population size they summarize."""

    beta_hat: np.ndarray
    n_voters: int

    def __post_init__(self) -> None:
        beta = np.asarray(self.beta_hat, dtype=float)
        if beta.ndim != 1:
            raise ValueError("beta_hat must be one-dimensional")
        if self.n_voters < 1:
            raise ValueError("n_voters must be at least 1")
        object.__setattr__(self, "beta_hat", beta)

    @property
    def dim(self) -> int:
        return self.beta_hat.shape[0]

    def as_process(self, family: str = "tm", gumbel_scale: float = 1.0) -> ProcessSpec:
        """View the summary as a ranking process of the given family."""
        return ProcessSpec(
            family=family,
            beta=tuple(self.beta_hat.tolist()),
            gumbel_scale=gumbel_scale,
        )


def summarize(betas: Iterable[np.ndarray]) -> SummaryModel:
    """Average per-voter weight vectors into a summary model."""
    rows = [np.asarray(b, dtype=float) for b in betas]
    if not rows:
        raise ValueError("need at least one voter model to summarize")
    dims = {row.shape for row in rows}
    if len(dims) > 1 or rows[0].ndim != 1:
        raise ValueError(f"voter models disagree on dimension: {sorted(dims)}")
    stacked = np.stack(rows)
    return SummaryModel(beta_hat=stacked.mean(axis=0), n_voters=len(rows))


def gaussian_kl(mean1: float, var1: float, mean2: float, var2: float) -> float:
    """KL divergence between two univariate normal distributions."""
    if not (var1 > 0 and var2 > 0):
        raise ValueError("variances must be positive")
    return 0.5 * (
        math.log(var2 / var1) + (var1 + (mean1 - mean2) ** 2) / var2 - 1.0
    )


def decide(model: SummaryModel, alternatives: Sequence[Alternative]) -> Alternative:
    """Pick the alternative with the highest summary utility.

    Exact ties go to the lexicographically smallest id.  Runs in one pass
    over the alternatives.
    """
    alts = list(alternatives)
    if not alts:
        raise ValueError("alternative set must be nonempty")
    ids = [alt.id for alt in alts]
    if len(set(ids)) != len(ids):
        raise ValueError("alternative ids must be unique within a set")
    spec = model.as_process()
    best = None
    best_utility = -math.inf
    for alt in alts:
        utility = mode_utility(spec, alt)
        if (
            best is None
            or utility > best_utility
            or (utility == best_utility and alt.id < best.id)
        ):
            best = alt
            best_utility = utility
    return best


def predict_pairwise(model, a, b) -> float:
    """Probability the summary model prefers ``a`` over ``b``.

    ``model`` may be a SummaryModel or a raw weight vector; ``a`` and
    ``b`` may be Alternatives or feature vectors.  Equal features give
    exactly one half.
    """
    if isinstance(model, SummaryModel):
        beta = model.beta_hat
    else:
        beta = np.asarray(model, dtype=float)
    fa = np.asarray(a.features if isinstance(a, Alternative) else a, dtype=float)
    fb = np.asarray(b.features if isinstance(b, Alternative) else b, dtype=float)
    if fa.shape != fb.shape or fa.shape != beta.shape:
        raise ValueError(
            f"dimension mismatch: beta {beta.shape}, a {fa.shape}, b {fb.shape}"
        )
    return float(special.ndtr(beta @ (fa - fb)))
