"""Learn voter utility models from pairwise choices, aggregate, decide.

The pieces compose left to right: ``learning`` fits one weight vector
per voter from observed choices, ``pipeline`` averages voters and picks
winners, ``profiles``/``processes``/``scc`` supply the voting-theory
substrate (rankings, ranking processes, choice rules, axiom checks), and
``experiments`` measures end-to-end accuracy on synthetic populations.
"""

from .learning import (
    FitConfig,
    FitResult,
    NumericError,
    PairwiseComparison,
    fit_voter,
    log_std_normal_cdf,
    objective_and_gradient,
)
from .pipeline import SummaryModel, decide, gaussian_kl, predict_pairwise, summarize
from .processes import (
    ExactProfileUnsupported,
    ProcessSpec,
    estimate_profile,
    exact_profile,
    mode_utility,
    pairwise_prob,
    sample_ranking,
    utility_dominance,
)
from .profiles import (
    Alternative,
    AnonymousProfile,
    PreorderReport,
    Ranking,
    check_total_preorder,
    marginalize_profile,
    restrict_ranking,
    swap_dominates,
    swap_ranking,
)
from .scc import (
    SCC_KINDS,
    EfficiencyReport,
    StabilityReport,
    apply_scc,
    check_profile_stability,
    check_stability,
    check_strong_swd_efficiency,
    check_swd_efficiency,
    copeland_scores,
    pairwise_support,
    positional_scores,
)

__version__ = "0.1.0"

__all__ = [
    "Alternative",
    "AnonymousProfile",
    "EfficiencyReport",
    "ExactProfileUnsupported",
    "FitConfig",
    "FitResult",
    "NumericError",
    "PairwiseComparison",
    "PreorderReport",
    "ProcessSpec",
    "Ranking",
    "SCC_KINDS",
    "StabilityReport",
    "SummaryModel",
    "apply_scc",
    "check_profile_stability",
    "check_stability",
    "check_strong_swd_efficiency",
    "check_swd_efficiency",
    "check_total_preorder",
    "copeland_scores",
    "decide",
    "estimate_profile",
    "exact_profile",
    "fit_voter",
    "gaussian_kl",
    "log_std_normal_cdf",
    "marginalize_profile",
    "mode_utility",
    "objective_and_gradient",
    "pairwise_prob",
    "pairwise_support",
    "positional_scores",
    "predict_pairwise",
    "restrict_ranking",
    "sample_ranking",
    "summarize",
    "swap_dominates",
    "swap_ranking",
    "utility_dominance",
]
