"""Grid search for the reliability thresholds (t1, t2)."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleBudgetError
from .theory import log_binomial_cdf_table, p_unreliable

CONTOUR_COLUMNS = ("t1", "t2", "algorithmic_error", "f_value")


@dataclass(frozen=True)
class OptimizationResult:
    t1_star: float
    t2_star: int
    objective: float
    constraint_value: float
    grid_resolution: float
    constrained: bool = False


def t1_grid(step):
    if not 0 < step <= 1:
        raise ValueError(f"grid step must lie in (0, 1], got {step}")
    count = int(round(1.0 / step))
    if not math.isclose(count * step, 1.0, rel_tol=1e-9):
        raise ValueError(f"grid step {step} does not divide [0, 1]")
    return np.linspace(0.0, 1.0, count + 1)


def _column(n, sigma, t1):
    """log F(t2; n, p_u) and log F(t2-1; n-1, p_u) for t2 = 0..n."""
    p_u = p_unreliable(sigma, t1)
    log_f = log_binomial_cdf_table(n, p_u)
    log_g = np.empty(n + 1)
    log_g[0] = -np.inf
    log_g[1:] = log_binomial_cdf_table(n - 1, p_u)
    return log_f, log_g


def _evaluate(n, sigma, step):
    grid = t1_grid(step)
    log_f = np.empty((grid.size, n + 1))
    log_g = np.empty((grid.size, n + 1))
    for i, t1 in enumerate(grid):
        log_f[i], log_g[i] = _column(n, sigma, t1)
    return grid, log_f, log_g


def _argmin(values, grid):
    """Index of the minimum, ties broken toward smaller t2 then smaller t1."""
    best = np.min(values)
    hits = np.argwhere(values == best)
    i, t2 = min(((int(i), int(t2)) for i, t2 in hits), key=lambda h: (h[1], h[0]))
    return i, t2


def contour_grid(n, sigma, step=0.01):
    """Rows ``(t1, t2, algorithmic_error, f_value)`` over the full grid.

    The algorithmic error at ``t2 = 0`` is reported as exactly 0.
    """
    grid, log_f, log_g = _evaluate(n, sigma, step)
    t2 = np.arange(n + 1)
    alg = np.exp(log_g - log_f)
    table = np.empty((grid.size * (n + 1), 4))
    table[:, 0] = np.repeat(grid, n + 1)
    table[:, 1] = np.tile(t2, grid.size)
    table[:, 2] = alg.reshape(-1)
    table[:, 3] = np.exp(log_f).reshape(-1)
    return table


def write_contour_csv(fh, table):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CONTOUR_COLUMNS)
    for t1, t2, alg, f in table:
        writer.writerow([f"{t1:.10g}", int(t2), repr(float(alg)), repr(float(f))])


def optimize_unconstrained(n, sigma, step=0.01):
    """Minimise the algorithmic error over t1 in the grid and t2 in 1..n.

    ``t2 = 0`` is left out: its error ratio is identically zero only because
    the closed form drops errors on reliable symbols.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    grid, log_f, log_g = _evaluate(n, sigma, step)
    log_alg = (log_g - log_f)[:, 1:]
    i, j = _argmin(log_alg, grid)
    t2 = j + 1
    return OptimizationResult(
        t1_star=float(grid[i]),
        t2_star=t2,
        objective=math.exp(log_alg[i, j]),
        constraint_value=math.exp(log_f[i, t2]),
        grid_resolution=step,
    )


def optimize_constrained(n, sigma, m_budget, step=0.01, tolerance=0.25, m_s=None):
    """Minimise ``F(t2-1; n-1, p_u)`` subject to ``F(t2; n, p_u) ~ m_s / m_budget``.

    Feasible points have acceptance probability in
    ``[m_s/m_budget, m_s/m_budget * (1 + tolerance)]``; ``m_s`` defaults to ``n``.
    """
    rows = n if m_s is None else m_s
    if m_budget < rows:
        raise InfeasibleBudgetError(
            f"budget of {m_budget} frames cannot yield {rows} suitable frames", 1.0
        )
    grid, log_f, log_g = _evaluate(n, sigma, step)
    required = rows / m_budget
    f = np.exp(log_f)[:, 1:]
    # constraint in the log domain to keep the lower edge exact at F = 1
    lo = math.log(required)
    hi = math.log(required * (1.0 + tolerance))
    feasible = (log_f[:, 1:] >= lo) & (log_f[:, 1:] <= hi)
    if not feasible.any():
        above = f[log_f[:, 1:] >= lo]
        best = float(above.min()) if above.size else None
        raise InfeasibleBudgetError(
            f"no grid point has acceptance probability in "
            f"[{required:.4g}, {required * (1 + tolerance):.4g}]; "
            f"smallest achievable value above the requirement is {best}",
            best,
        )
    objective = np.where(feasible, log_g[:, 1:], np.inf)
    i, j = _argmin(objective, grid)
    t2 = j + 1
    return OptimizationResult(
        t1_star=float(grid[i]),
        t2_star=t2,
        objective=math.exp(log_g[i, t2] - log_f[i, t2]),
        constraint_value=float(f[i, j]),
        grid_resolution=step,
        constrained=True,
    )
