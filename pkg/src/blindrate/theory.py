"""
Closed-form recovery metrics.

Binomial tails are evaluated in the log domain throughout, so ratios such as
``F(t2-1; n-1, p) / F(t2; n, p)`` stay accurate when both CDF values underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .channel import phi, q_function
from .errors import DegenerateThresholdError, InfeasibleFilterError


def log_binomial_pmf(n, p):
    """``log P[X = i]`` for ``i = 0..n``, ``X ~ Binomial(n, p)``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    i = np.arange(n + 1)
    out = np.full(n + 1, -np.inf)
    if p == 0.0:
        out[0] = 0.0
        return out
    if p == 1.0:
        out[n] = 0.0
        return out
    return (
        gammaln(n + 1) - gammaln(i + 1) - gammaln(n - i + 1)
        + i * math.log(p) + (n - i) * math.log1p(-p)
    )


def log_binomial_cdf_table(n, p):
    """``log F(k; n, p)`` for ``k = 0..n``."""
    out = np.logaddexp.accumulate(log_binomial_pmf(n, p))
    out[-1] = 0.0
    return out


def log_binomial_cdf(k, n, p):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if k < 0:
        return -math.inf
    if k >= n:
        return 0.0
    return float(log_binomial_cdf_table(n, p)[k])


def binomial_cdf(k, n, p):
    """``F(k; n, p) = P[X <= k]`` for ``X ~ Binomial(n, p)``."""
    return math.exp(log_binomial_cdf(k, n, p))


def p_unreliable(sigma, t1):
    """Probability that ``|r| < t1`` for a unit-amplitude BPSK symbol."""
    return float(q_function((1.0 - t1) / sigma) - q_function((1.0 + t1) / sigma))


def bit_error_probability(sigma):
    return float(q_function(1.0 / sigma))


def conditional_error_probs(sigma, t1):
    """Error probabilities given an unreliable and a reliable symbol."""
    p_u = p_unreliable(sigma, t1)
    if p_u <= 0.0:
        raise DegenerateThresholdError(
            f"t1={t1} gives zero unreliable probability; p_e|u is undefined"
        )
    tail = float(q_function((1.0 + t1) / sigma))
    p_eu = (bit_error_probability(sigma) - tail) / p_u
    p_er = tail / (1.0 - p_u)
    return p_eu, p_er


def log_algorithmic_error(n, p_u, t2):
    """``log(F(t2-1; n-1, p_u) / F(t2; n, p_u))``; ``-inf`` at ``t2 = 0``."""
    if t2 <= 0:
        return -math.inf
    log_den = log_binomial_cdf(t2, n, p_u)
    if log_den == -math.inf:
        raise InfeasibleFilterError(f"F({t2}; {n}, {p_u}) is zero")
    return log_binomial_cdf(t2 - 1, n - 1, p_u) - log_den


def algorithmic_error(n, p_u, t2):
    return math.exp(log_algorithmic_error(n, p_u, t2))


def expected_messages(m_s, n, p_u, t2):
    """Expected frames consumed to collect ``m_s`` suitable ones."""
    log_f = log_binomial_cdf(t2, n, p_u)
    if log_f == -math.inf:
        raise InfeasibleFilterError(f"F({t2}; {n}, {p_u}) is zero")
    return m_s * math.exp(-log_f)


@dataclass(frozen=True)
class TheoryInputs:
    n: int
    m_s: int
    sigma: float
    t1: float
    t2: int

    def __post_init__(self):
        if self.n < 1 or self.m_s < 1:
            raise ValueError("n and m_s must be at least 1")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not 0.0 <= self.t1 <= 1.0:
            raise ValueError(f"t1 must lie in [0, 1], got {self.t1}")
        if not 0 <= self.t2 <= self.n:
            raise ValueError(f"t2 must lie in [0, n], got {self.t2}")


@dataclass(frozen=True)
class TheoryMetrics:
    p_u: float
    p_e: float
    p_eu: float
    p_er: float
    e_c_exact: float
    e_c_approx: float
    e_m: float
    algorithmic_error: float
    ambient_error: float


def _columns_in_error(n, m_s, p_e, alg):
    # n - n(1 - p_e*alg)^m_s without cancellation when p_e*alg is tiny
    return -n * math.expm1(m_s * math.log1p(-p_e * alg))


def expected_columns_in_error(inputs):
    """Expected word-matrix columns with at least one bit error.

    Returns ``(exact, approx)``: the power-law form, and its linearisation
    ``n * E[M] * p_e * F(t2-1; n-1, p_u)`` which holds when ``m_s * p_e`` is small.
    """
    p_e = bit_error_probability(inputs.sigma)
    p_u = p_unreliable(inputs.sigma, inputs.t1)
    alg = algorithmic_error(inputs.n, p_u, inputs.t2)
    exact = _columns_in_error(inputs.n, inputs.m_s, p_e, alg)
    approx = inputs.n * inputs.m_s * p_e * alg
    return exact, approx


def compute_metrics(inputs):
    n, m_s, sigma = inputs.n, inputs.m_s, inputs.sigma
    p_e = bit_error_probability(sigma)
    p_u = p_unreliable(sigma, inputs.t1)
    if p_u > 0.0:
        p_eu, p_er = conditional_error_probs(sigma, inputs.t1)
    else:
        p_eu, p_er = math.nan, p_e
    alg = algorithmic_error(n, p_u, inputs.t2)
    return TheoryMetrics(
        p_u=p_u,
        p_e=p_e,
        p_eu=p_eu,
        p_er=p_er,
        e_c_exact=_columns_in_error(n, m_s, p_e, alg),
        e_c_approx=n * m_s * p_e * alg,
        e_m=expected_messages(m_s, n, p_u, inputs.t2),
        algorithmic_error=alg,
        ambient_error=n * m_s * p_e,
    )


@dataclass(frozen=True)
class ToyModelParams:
    """``d`` random columns plus their XOR, each of length ``m_s``."""

    d: int
    m_s: int
    p_e_prime: float

    def __post_init__(self):
        if not self.m_s > self.d >= 1:
            raise ValueError(f"need m_s > d >= 1, got m_s={self.m_s}, d={self.d}")
        if not 0.0 < self.p_e_prime < 1.0:
            raise ValueError(f"p_e_prime must lie in (0, 1), got {self.p_e_prime}")


def rank_increase_argument(params):
    d, m, p = params.d, params.m_s, params.p_e_prime
    num = (m - d) ** 2 - 2 * m * m * (d + 1) * p
    den = 2 * m * (d + 1) * math.sqrt(m * p * (1 - p))
    return num / den


def rank_increase_bound(params):
    """Lower bound on P[rank grows by one | at least one bit error]."""
    return float(phi(rank_increase_argument(params)))


def simplified_rank_increase_argument(params):
    d, m, p = params.d, params.m_s, params.p_e_prime
    return math.sqrt(m) / (2 * (d + 1) * math.sqrt(p * (1 - p)))


def simplified_rank_increase_bound(params):
    """The bound's large-``m_s``, small-``p_e_prime`` form."""
    return float(phi(simplified_rank_increase_argument(params)))


def min_distance_bound(m_s, d):
    """Almost-sure lower bound on the minimum distance of the column span."""
    return (m_s - d) ** 2 / (2 * m_s)
