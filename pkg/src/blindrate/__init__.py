"""Blind recovery of the code rate of binary linear block codes."""

from .channel import ChannelParams, LlrFrame, estimate_channel, phi, q_function, transmit
from .codes import LinearCode, encode, encode_many, from_alist, random_code
from .estimator import AUTO, RecoveryReport, corrected_rate, recover
from .filtering import FilterOutcome, FilterParams, build_word_matrix, unreliable_count
from .gf2 import BitMatrix, RrefResult, multiply, rank, rank_by_column_mean, rref
from .optimize import (
    OptimizationResult,
    contour_grid,
    optimize_constrained,
    optimize_unconstrained,
)
from .simulation import TrialResult, run_trial, simulate_rank_increase
from .theory import (
    TheoryInputs,
    TheoryMetrics,
    ToyModelParams,
    binomial_cdf,
    compute_metrics,
    conditional_error_probs,
    expected_columns_in_error,
    expected_messages,
    p_unreliable,
    rank_increase_bound,
)

__version__ = "0.1.0"
