import csv
import io
import math

import numpy as np
import pytest

from blindrate.errors import InfeasibleBudgetError
from blindrate.optimize import (
    CONTOUR_COLUMNS,
    contour_grid,
    optimize_constrained,
    optimize_unconstrained,
    t1_grid,
    write_contour_csv,
)
from blindrate.theory import algorithmic_error, binomial_cdf, p_unreliable

SIGMA_10DB = math.sqrt(0.1)


@pytest.fixture(scope="module")
def grid_136():
    return contour_grid(136, SIGMA_10DB, 0.01)


def lookup(table, t1, t2):
    hit = table[(np.isclose(table[:, 0], t1)) & (table[:, 1] == t2)]
    assert len(hit) == 1
    return hit[0]


def test_t1_grid():
    assert t1_grid(0.25).tolist() == [0, 0.25, 0.5, 0.75, 1.0]
    with pytest.raises(ValueError):
        t1_grid(0.3)
    with pytest.raises(ValueError):
        t1_grid(0.0)


def test_unconstrained_optimum_n136_10db():
    res = optimize_unconstrained(136, SIGMA_10DB, 0.01)
    assert res.t2_star == 1
    assert abs(res.t1_star - 0.99) <= 0.01 + 1e-12
    assert abs(res.objective - 0.0153) <= 0.002
    assert res.objective == pytest.approx(
        algorithmic_error(136, p_unreliable(SIGMA_10DB, res.t1_star), res.t2_star), rel=1e-10
    )
    assert res.constraint_value == pytest.approx(
        binomial_cdf(1, 136, p_unreliable(SIGMA_10DB, res.t1_star)), rel=1e-10
    )
    assert not res.constrained


def test_contour_row_at_reference_point(grid_136):
    row = lookup(grid_136, 0.99, 1)
    assert abs(row[2] - 0.0153) <= 0.002


def test_contour_cardinality_and_disabled_filter(grid_136):
    assert grid_136.shape == (101 * 137, 4)
    assert np.allclose(grid_136[grid_136[:, 1] == 136, 2], 1.0, atol=1e-12)
    assert np.all(grid_136[grid_136[:, 1] == 0, 2] == 0.0)
    # CDF monotonicity keeps the objective in [0, 1]
    assert np.all((grid_136[:, 2] >= 0) & (grid_136[:, 2] <= 1 + 1e-12))


def test_optimum_beats_random_grid_points(grid_136):
    res = optimize_unconstrained(136, SIGMA_10DB, 0.01)
    rng = np.random.default_rng(0)
    candidates = grid_136[grid_136[:, 1] >= 1]
    for row in candidates[rng.integers(0, len(candidates), 1000)]:
        assert res.objective <= row[2] * (1 + 1e-12)


def test_argmin_independent_of_scan_order():
    n, sigma, step = 24, 0.5, 0.05
    res = optimize_unconstrained(n, sigma, step)
    best = None
    for t1 in reversed(t1_grid(step)):
        p_u = p_unreliable(sigma, t1)
        for t2 in range(n, 0, -1):
            key = (algorithmic_error(n, p_u, t2), t2, t1)
            best = key if best is None or key < best else best
    assert res.objective == pytest.approx(best[0], rel=1e-9)
    assert (res.t2_star, res.t1_star) == (best[1], pytest.approx(best[2]))


@pytest.mark.parametrize("n, sigma", [(40, 0.4), (136, SIGMA_10DB), (64, 0.6)])
def test_halving_step_never_worsens(n, sigma):
    coarse = optimize_unconstrained(n, sigma, 0.1)
    fine = optimize_unconstrained(n, sigma, 0.05)
    assert fine.objective <= coarse.objective * (1 + 1e-12)


def test_noisy_channel_objective_near_one():
    table = contour_grid(136, 10.0, 0.1)
    middle = table[(table[:, 1] >= 34) & (table[:, 1] <= 136)]
    assert np.all(middle[:, 2] > 0.9)


def test_constrained_no_budget_forces_no_filtering():
    res = optimize_constrained(136, SIGMA_10DB, 136)
    assert res.constrained
    assert res.constraint_value == pytest.approx(1.0, abs=1e-12)
    assert res.objective > 0.99


def test_constrained_on_f_04_band():
    n = 136
    res = optimize_constrained(n, SIGMA_10DB, 340)
    assert 0.4 <= res.constraint_value <= 0.5 + 1e-12
    p_u = p_unreliable(SIGMA_10DB, res.t1_star)
    assert res.constraint_value == pytest.approx(binomial_cdf(res.t2_star, n, p_u), rel=1e-10)
    # best over the band, checked against the full grid
    table = contour_grid(n, SIGMA_10DB, 0.01)
    band = table[(table[:, 1] >= 1) & (table[:, 3] >= 0.4) & (table[:, 3] <= 0.5)]
    g = [binomial_cdf(int(t2) - 1, n - 1, p_unreliable(SIGMA_10DB, t1)) for t1, t2, _, _ in band]
    assert binomial_cdf(res.t2_star - 1, n - 1, p_u) <= min(g) * (1 + 1e-9)


def test_constrained_not_better_than_unconstrained():
    for budget in (136, 200, 340, 2000, 10**6):
        c = optimize_constrained(136, SIGMA_10DB, budget)
        u = optimize_unconstrained(136, SIGMA_10DB)
        assert c.objective >= u.objective * (1 - 1e-12)


def test_constrained_infeasible():
    with pytest.raises(InfeasibleBudgetError):
        optimize_constrained(136, SIGMA_10DB, 100)
    with pytest.raises(InfeasibleBudgetError) as info:
        optimize_constrained(1, SIGMA_10DB, 10)
    assert info.value.max_feasible == pytest.approx(1.0)


def test_contour_csv():
    table = contour_grid(8, 0.5, 0.25)
    buf = io.StringIO()
    write_contour_csv(buf, table)
    rows = list(csv.reader(io.StringIO(buf.getvalue())))
    assert tuple(rows[0]) == CONTOUR_COLUMNS == ("t1", "t2", "algorithmic_error", "f_value")
    assert len(rows) == 1 + 5 * 9
    assert float(rows[-1][2]) == pytest.approx(1.0)
