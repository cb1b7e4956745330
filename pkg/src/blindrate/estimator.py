"""End-to-end blind code-rate recovery."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy.optimize import brentq

from . import gf2
from .channel import ChannelParams, estimate_channel
from .errors import InfeasibleBudgetError
from .filtering import FilterParams, build_word_matrix
from .optimize import optimize_constrained
from .theory import (
    TheoryInputs,
    expected_columns_in_error,
    log_binomial_cdf,
    p_unreliable,
)

AUTO = "auto"

REPORT_COLUMNS = (
    "n", "m_s", "frames_consumed", "k_prime", "pivot_count", "e_c", "e_c_mode",
    "rho_naive", "rho_corrected", "correction_degenerate", "clamped",
    "sigma2_hat", "snr_db_hat", "p_e_hat", "t1", "t2",
)


def corrected_rate(k_prime, n, e_c):
    """``(k' - E[C]) / (n - E[C])`` clamped to [0, 1].

    Returns ``(rate, degenerate)``; when ``e_c >= n`` the correction is skipped
    and the naive ``k'/n`` comes back with ``degenerate`` set.
    """
    if e_c >= n:
        return k_prime / n, True
    if k_prime == n:
        return 1.0, False
    return min(1.0, max(0.0, (k_prime - e_c) / (n - e_c))), False


@dataclass(frozen=True)
class RecoveryReport:
    n: int
    m_s: int
    frames_consumed: int
    k_prime: int
    pivot_count: int
    e_c: float
    rho_naive: float
    rho_corrected: float
    channel: ChannelParams
    params: FilterParams
    e_c_mode: str = "exact"
    correction_degenerate: bool = False
    clamped: bool = False
    selected_indices: tuple = field(default=(), repr=False, compare=False)

    def as_dict(self):
        return {
            "n": self.n,
            "m_s": self.m_s,
            "frames_consumed": self.frames_consumed,
            "k_prime": self.k_prime,
            "pivot_count": self.pivot_count,
            "e_c": self.e_c,
            "e_c_mode": self.e_c_mode,
            "rho_naive": self.rho_naive,
            "rho_corrected": self.rho_corrected,
            "correction_degenerate": int(self.correction_degenerate),
            "clamped": int(self.clamped),
            "sigma2_hat": self.channel.sigma2,
            "snr_db_hat": self.channel.snr_db,
            "p_e_hat": self.channel.p_e,
            "t1": self.params.t1,
            "t2": self.params.t2,
        }

    def to_text(self):
        return "".join(f"{k}={_fmt(v)}\n" for k, v in self.as_dict().items())

    def csv_row(self):
        d = self.as_dict()
        return [_fmt(d[c]) for c in REPORT_COLUMNS]


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _observed_e_c(n, frames_consumed, p_e, p_u, t2):
    # n * M * p_e * F(t2-1; n-1, p_u), with M the frames actually consumed
    return n * frames_consumed * p_e * math.exp(log_binomial_cdf(t2 - 1, n - 1, p_u))


def _effective_budget(m_budget, rows, z=3.0):
    """Budget that leaves a ``z``-standard-error margin on the suitable count.

    With acceptance probability F the number of suitable frames among
    ``m_budget`` is Binomial(m_budget, F); F = rows/m_budget would run short
    about half the time. Returns ``rows / F`` for the smallest F with
    ``m_budget*F - z*sqrt(m_budget*F*(1-F)) >= rows``.
    """
    if m_budget <= rows:
        return m_budget

    def slack(f):
        return m_budget * f - z * math.sqrt(m_budget * f * (1.0 - f)) - rows

    f = brentq(slack, rows / m_budget, 1.0) if slack(rows / m_budget) < 0 else rows / m_budget
    return rows / f


def recover(frames, n, params=AUTO, *, m_s=None, e_c_mode="exact", step=0.01, tolerance=0.25):
    """Estimate the code rate from received frames of length ``n``.

    ``params`` is a :class:`FilterParams` or ``AUTO``; in AUTO mode the
    thresholds come from the constrained optimiser with the full stream length
    as the frame budget. ``e_c_mode`` selects the closed form used for the
    correction: ``"exact"`` (needs only ``m_s``) or ``"observed"`` (the linear
    form driven by the frames actually consumed).
    """
    frames = list(frames)
    for i, f in enumerate(frames):
        if len(f) != n:
            raise ValueError(f"frame {i} has length {len(f)}, expected {n}")
    channel = estimate_channel(frames)
    sigma = channel.sigma
    if params == AUTO:
        budget = _effective_budget(len(frames), n if m_s is None else m_s)
        try:
            opt = optimize_constrained(
                n, sigma, budget, step=step, tolerance=tolerance, m_s=m_s
            )
        except InfeasibleBudgetError as exc:
            if exc.max_feasible is None:
                raise
            # every candidate accepts more than the band allows (e.g. a clean
            # channel); keep only the one-sided requirement
            opt = optimize_constrained(
                n, sigma, budget, step=step, tolerance=math.inf, m_s=m_s
            )
        params = FilterParams(t1=opt.t1_star, t2=opt.t2_star, m_s=m_s)
    elif m_s is not None:
        params = FilterParams(t1=params.t1, t2=params.t2, m_s=m_s)
    params.check_length(n)
    rows = params.rows_for(n)

    outcome = build_word_matrix(frames, params, n=n)
    reduced = gf2.rref(outcome.word_matrix)
    k_prime = gf2.rank_by_column_mean(reduced, rows)

    if e_c_mode == "exact":
        e_c, _ = expected_columns_in_error(
            TheoryInputs(n=n, m_s=rows, sigma=sigma, t1=params.t1, t2=params.t2)
        )
    elif e_c_mode == "observed":
        e_c = _observed_e_c(
            n, outcome.frames_consumed, channel.p_e, p_unreliable(sigma, params.t1), params.t2
        )
    else:
        raise ValueError(f"unknown e_c_mode {e_c_mode!r}")

    rho_naive = k_prime / n
    rho_corrected, degenerate = corrected_rate(k_prime, n, e_c)
    raw = (k_prime - e_c) / (n - e_c) if e_c < n else rho_naive
    return RecoveryReport(
        n=n,
        m_s=rows,
        frames_consumed=outcome.frames_consumed,
        k_prime=k_prime,
        pivot_count=reduced.pivot_count,
        e_c=e_c,
        rho_naive=rho_naive,
        rho_corrected=rho_corrected,
        channel=channel,
        params=params,
        e_c_mode=e_c_mode,
        correction_degenerate=degenerate,
        clamped=not degenerate and raw != rho_corrected and k_prime != n,
        selected_indices=outcome.selected_indices,
    )
