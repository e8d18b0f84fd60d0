"""Numeric checks that the baseline is a Nash equilibrium.

verify_nash searches unilateral deviations on a grid with local refinement.
The remaining functions are diagnostics in percent space (Q_hat = A = 100,
c = 0.2) showing that zero investment never beats full investment and that the
joint first-order conditions have no interior solution.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from errors import MarketSpecError
from objects.market import ProfitQuery, investment_cap, profit, profit_array

logger = logging.getLogger(__name__)

FL_PERCENT_TOTAL = 100.0
FL_PERCENT_CAP = 0.2


@dataclass(frozen=True)
class FirmDeviation:
    firm_index: int
    nash_profit: float
    best_profit: float
    best_quantity: float
    best_investment: float

    @property
    def gain(self):
        return self.best_profit - self.nash_profit


@dataclass
class DeviationReport:
    passed: bool
    tolerance: float
    grid_radius: float
    grid_points: int
    firms: list = field(default_factory=list)

    @property
    def max_gain(self):
        return max(f.gain for f in self.firms)


@dataclass(frozen=True)
class SweepReport:
    passed: bool
    extreme_value: float
    extreme_at: tuple
    points_checked: int
    boundary_points: int = 0


def verify_nash(model, fl_grid_radius=0.5, int_grid_points=201, fl_tol=1e-9):
    """Checks that no firm gains from a unilateral deviation.

    Parameters
    ----------
    model : MarketModel
    fl_grid_radius : float, default=0.5
        Quantities are searched in [(1 - r) q_hat_i, (1 + r) q_hat_i].
    int_grid_points : int, default=201
        Points per axis; investments span [0, cap].
    fl_tol : float, default=1e-9
        Absolute profit gain still counted as no improvement.

    Returns
    ----------
    report : DeviationReport
        Always produced; passed is False when a deviation gains more than fl_tol.

    Raises
    ----------
    MarketSpecError
        If fewer than 3 grid points are requested.

    Notes
    ----------
    All opponents are held at their baseline (q_hat_j, b_hat_j). The best grid
    point is refined with bounded L-BFGS-B.
    """
    if int_grid_points < 3:
        raise MarketSpecError("verify_nash needs at least 3 grid points per axis")
    list_firms = []
    for i in range(model.n_firms):
        fl_q_hat = model.baseline_quantities[i]
        fl_b_hat = model.baseline_investments[i]
        fl_others = model.total_baseline - fl_q_hat
        fl_cap = investment_cap(model, i)
        fl_nash = profit(model, ProfitQuery(i, fl_others, fl_q_hat, fl_b_hat))

        fl_q_lo = max((1.0 - fl_grid_radius) * fl_q_hat, 0.0)
        fl_q_hi = (1.0 + fl_grid_radius) * fl_q_hat
        arr_q = np.linspace(fl_q_lo, fl_q_hi, int_grid_points)
        arr_b = np.linspace(0.0, fl_cap, int_grid_points)
        arr_profit = profit_array(model, fl_others, arr_q[:, None], arr_b[None, :])
        int_q, int_b = np.unravel_index(int(np.argmax(arr_profit)), arr_profit.shape)
        fl_best = float(arr_profit[int_q, int_b])
        fl_best_q, fl_best_b = float(arr_q[int_q]), float(arr_b[int_b])

        res = minimize(
            lambda x: -float(profit_array(model, fl_others, x[0], x[1])),
            x0=np.array([fl_best_q, fl_best_b]),
            method="L-BFGS-B",
            bounds=[(fl_q_lo, fl_q_hi), (0.0, fl_cap)],
        )
        if res.success and -res.fun > fl_best:
            fl_best = float(-res.fun)
            fl_best_q, fl_best_b = float(res.x[0]), float(res.x[1])

        list_firms.append(FirmDeviation(i, fl_nash, fl_best, fl_best_q, fl_best_b))
        logger.debug("Firm %d: Nash profit %s, best deviation %s at (%s, %s)",
                     i, fl_nash, fl_best, fl_best_q, fl_best_b)

    bool_passed = all(f.gain <= fl_tol for f in list_firms)
    return DeviationReport(bool_passed, fl_tol, fl_grid_radius, int_grid_points, list_firms)


def proof_h(fl_others, fl_quantity):
    """Percent-space function whose positivity rules out an interior joint
    optimum,

        h = 100 / (Q_-i + q) + q / (2 * 0.2 * 100) - 1 - 100 q / (Q_-i + q)**2.

    Raises
    ----------
    ZeroDivisionError
        If Q_-i + q = 0.
    """
    fl_total = fl_others + fl_quantity
    if fl_total == 0:
        raise ZeroDivisionError("proof_h is undefined at Q_-i + q = 0")
    return (FL_PERCENT_TOTAL / fl_total
            + fl_quantity / (2.0 * FL_PERCENT_CAP * FL_PERCENT_TOTAL)
            - 1.0
            - FL_PERCENT_TOTAL * fl_quantity / fl_total ** 2)


def critical_quantity(fl_others):
    """Minimizer of proof_h in q, 20 * Q_-i**(1/3) - Q_-i. Negative once
    Q_-i exceeds 20**1.5 (about 89.44)."""
    return 20.0 * np.cbrt(fl_others) - fl_others


def h_at_critical(fl_others):
    """proof_h along the critical curve, 0.75 * Q_-i**(1/3) - 0.025 * Q_-i - 1."""
    return 0.75 * np.cbrt(fl_others) - 0.025 * fl_others - 1.0


def h_positivity_sweep(fl_others_lo=5.0, fl_others_hi=100.0, fl_quantity_max=200.0,
                       fl_step=0.5):
    """Evaluates proof_h on a grid and reports its minimum.

    At the corner Q_-i = 100, q = 0 the function is exactly zero (a monopoly
    of the whole market), so that point is counted as boundary and left out
    of the positivity check.
    """
    arr_others = np.arange(fl_others_lo, fl_others_hi + fl_step / 2, fl_step)
    arr_q = np.arange(0.0, fl_quantity_max + fl_step / 2, fl_step)
    grid_others, grid_q = np.meshgrid(arr_others, arr_q, indexing="ij")
    arr_total = grid_others + grid_q
    arr_h = (FL_PERCENT_TOTAL / arr_total + grid_q / (2.0 * FL_PERCENT_CAP * FL_PERCENT_TOTAL)
             - 1.0 - FL_PERCENT_TOTAL * grid_q / arr_total ** 2)
    arr_boundary = (grid_others >= FL_PERCENT_TOTAL) & (grid_q == 0)
    arr_checked = np.where(arr_boundary, np.inf, arr_h)
    int_min = int(np.argmin(arr_checked))
    tup_at = np.unravel_index(int_min, arr_h.shape)
    fl_min = float(arr_checked[tup_at])
    return SweepReport(
        passed=fl_min > 0,
        extreme_value=fl_min,
        extreme_at=(float(grid_others[tup_at]), float(grid_q[tup_at])),
        points_checked=int(arr_h.size - np.sum(arr_boundary)),
        boundary_points=int(np.sum(arr_boundary)),
    )


def zero_investment_gap(fl_others):
    """Best zero-investment profit minus the Nash profit in percent space,

        100 + Q_-i - 20 sqrt(Q_-i) - 0.008 (100 - Q_-i)**2,

    which must not be positive."""
    return (FL_PERCENT_TOTAL + fl_others - 20.0 * np.sqrt(fl_others)
            - 0.008 * (FL_PERCENT_TOTAL - fl_others) ** 2)


def zero_investment_sweep(fl_others_lo=5.0, fl_others_hi=100.0, fl_step=0.5, fl_tol=1e-12):
    arr_others = np.arange(fl_others_lo, fl_others_hi + fl_step / 2, fl_step)
    arr_gap = zero_investment_gap(arr_others)
    int_max = int(np.argmax(arr_gap))
    return SweepReport(
        passed=bool(arr_gap[int_max] <= fl_tol),
        extreme_value=float(arr_gap[int_max]),
        extreme_at=(float(arr_others[int_max]),),
        points_checked=int(arr_gap.size),
    )
