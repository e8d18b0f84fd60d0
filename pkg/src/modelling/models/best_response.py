import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from errors import MonopolyDegenerateError
from objects.decisions import make_decision
from objects.market import check_firm_index, investment_cap, profit_array

logger = logging.getLogger(__name__)

FL_OTHERS_FLOOR = 1e-3
FL_QUANTITY_XTOL = 1e-8
INT_INVESTMENT_GRID = 21

STR_PATH_CAP = "closed_form_cap"
STR_PATH_ZERO = "closed_form_zero"
STR_PATH_NUMERIC = "numeric"


@dataclass(frozen=True)
class BestResponseResult:
    decision: object
    path: str
    profit: float


def is_unit_elastic(model):
    return abs(model.spec.elasticity + 1.0) < 1e-12


def closed_form_quantity(model, fl_others, fl_unit_cost):
    """Profit-maximizing quantity for eps = -1 and a fixed unit cost,
    sqrt(A * Q_-i / w) - Q_-i clamped at 0."""
    return max(float(np.sqrt(model.scale_A * fl_others / fl_unit_cost) - fl_others), 0.0)


def closed_form_profit(model, fl_others, fl_investment):
    """Best achievable profit for eps = -1 at a fixed investment.

    At the optimal quantity the profit reduces to (sqrt(A) - sqrt(w * Q_-i))**2 - b
    as long as that quantity is positive, and to -b otherwise.
    """
    fl_cost = model.cobb_k1 * np.sqrt(fl_investment) + model.cobb_k3
    fl_gap = np.sqrt(model.scale_A) - np.sqrt(fl_cost * fl_others)
    if fl_gap <= 0:
        return -fl_investment
    return float(fl_gap ** 2 - fl_investment)


def _marginal_profit(model, fl_others, fl_quantity, fl_cost):
    fl_total = fl_others + fl_quantity
    fl_eps = model.spec.elasticity
    return (model.scale_A * fl_total ** fl_eps
            + fl_eps * model.scale_A * fl_total ** (fl_eps - 1.0) * fl_quantity - fl_cost)


def numeric_quantity(model, fl_others, fl_investment):
    """Bounded 1-D search for the best quantity at a fixed investment.

    The upper end of the bracket is doubled until the marginal profit turns
    negative.
    """
    fl_cost = float(model.cobb_k1 * np.sqrt(fl_investment) + model.cobb_k3)
    if _marginal_profit(model, fl_others, 0.0, fl_cost) <= 0:
        return 0.0
    fl_hi = max(model.total_baseline, fl_others)
    for _ in range(64):
        if _marginal_profit(model, fl_others, fl_hi, fl_cost) < 0:
            break
        fl_hi *= 2.0
    res = minimize_scalar(
        lambda q: -float(profit_array(model, fl_others, q, fl_investment)),
        bounds=(0.0, fl_hi),
        method="bounded",
        options={"xatol": FL_QUANTITY_XTOL * fl_hi},
    )
    return float(res.x)


def _numeric_response(model, int_firm, fl_others):
    """Grid over b with a refined bracket around the best grid point, nesting
    the quantity search. Returns (quantity, investment, profit)."""
    fl_cap = investment_cap(model, int_firm)

    def fn_value(fl_b):
        fl_q = numeric_quantity(model, fl_others, fl_b)
        return fl_q, float(profit_array(model, fl_others, fl_q, fl_b))

    arr_b = np.linspace(0.0, fl_cap, INT_INVESTMENT_GRID)
    list_values = [fn_value(fl_b) for fl_b in arr_b]
    arr_profit = np.array([tup[1] for tup in list_values])
    # Highest investment among equal maxima
    j = int(len(arr_profit) - 1 - np.argmax(arr_profit[::-1]))
    fl_best_b, (fl_best_q, fl_best_profit) = float(arr_b[j]), list_values[j]

    fl_lo = float(arr_b[max(j - 1, 0)])
    fl_hi = float(arr_b[min(j + 1, len(arr_b) - 1)])
    if fl_hi > fl_lo:
        res = minimize_scalar(lambda b: -fn_value(b)[1], bounds=(fl_lo, fl_hi),
                              method="bounded", options={"xatol": 1e-10 * max(fl_cap, 1.0)})
        fl_q, fl_profit = fn_value(float(res.x))
        if fl_profit > fl_best_profit:
            fl_best_b, fl_best_q, fl_best_profit = float(res.x), fl_q, fl_profit
    return fl_best_q, fl_best_b, fl_best_profit


def solve_best_response(model, int_firm, fl_others_prev, bool_cross_check=False):
    """Best response to last period's opponent production, with the path used.

    Parameters
    ----------
    model : MarketModel
    int_firm : int
        Zero-indexed firm.
    fl_others_prev : float
        Opponents' total production Q_-i of the previous period.
    bool_cross_check : bool, default=False
        For eps = -1, also run the numeric search and warn if it finds a
        better point than the closed form.

    Returns
    ----------
    result : BestResponseResult
        Decision, the path that produced it and the attained profit.

    Raises
    ----------
    MonopolyDegenerateError
        If Q_-i is below 1e-3 * Q_hat.

    Notes
    ----------
    For eps = -1 only the boundary investments {0, cap} are candidates, since
    the joint first-order conditions have no interior solution in the feasible
    region. Ties go to the higher investment, then the higher quantity.
    """
    check_firm_index(model, int_firm)
    fl_floor = FL_OTHERS_FLOOR * model.total_baseline
    if not fl_others_prev >= fl_floor:
        raise MonopolyDegenerateError(
            f"Opponents' production {fl_others_prev} is below the floor {fl_floor}")
    fl_cap = investment_cap(model, int_firm)
    fl_max_percent = 100.0 * model.spec.invest_fraction_cap

    if not is_unit_elastic(model):
        fl_q, fl_b, fl_profit = _numeric_response(model, int_firm, fl_others_prev)
        fl_percent = min(fl_max_percent, 100.0 * fl_b / model.baseline_profits[int_firm])
        decision = make_decision(model, int_firm, fl_q, fl_percent)
        return BestResponseResult(decision, STR_PATH_NUMERIC, fl_profit)

    list_candidates = []
    for fl_b, fl_percent, str_path in ((fl_cap, fl_max_percent, STR_PATH_CAP),
                                       (0.0, 0.0, STR_PATH_ZERO)):
        fl_cost = model.cobb_k1 * np.sqrt(fl_b) + model.cobb_k3
        fl_q = closed_form_quantity(model, fl_others_prev, fl_cost)
        fl_profit = float(profit_array(model, fl_others_prev, fl_q, fl_b))
        list_candidates.append((fl_profit, fl_b, fl_q, fl_percent, str_path))
    # Equal profits resolve to the higher investment, then the higher quantity
    fl_profit, fl_b, fl_q, fl_percent, str_path = max(
        list_candidates, key=lambda tup: (tup[0], tup[1], tup[2]))

    if bool_cross_check:
        _, _, fl_numeric_profit = _numeric_response(model, int_firm, fl_others_prev)
        if fl_numeric_profit > fl_profit + 1e-6:
            logger.warning("Numeric best response of firm %d beats the closed form: %s > %s",
                           int_firm, fl_numeric_profit, fl_profit)

    decision = make_decision(model, int_firm, fl_q, fl_percent)
    return BestResponseResult(decision, str_path, fl_profit)


def best_response(model, int_firm, fl_others_prev):
    """Profit-maximizing (quantity, investment) given last period's Q_-i."""
    return solve_best_response(model, int_firm, fl_others_prev).decision
