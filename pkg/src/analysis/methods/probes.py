"""Probes telling strategic deliberation apart from optimization failure.

The investment probe asks, for every observed decision, whether full
investment was optimal given the quantities actually produced. The BR probe
replaces every firm by a best-response agent and counts the iterations needed
to come within a tolerance of the Nash quantities.
"""
import logging
from dataclasses import dataclass, field, replace

import numpy as np

from errors import MarketSpecError, MonopolyDegenerateError
from modelling.models.best_response import best_response
from objects.market import investment_cap, optimal_investment

logger = logging.getLogger(__name__)

STR_UPDATE_SIMULTANEOUS = "simultaneous"
STR_UPDATE_SEQUENTIAL = "sequential"


@dataclass(frozen=True)
class ProbeReport:
    states_checked: int
    investment_optimal_fraction: float
    br_iterations_mean: float = float("nan")
    br_iterations_max: int = 0
    within_pct_of_nash: float = float("nan")
    br_converged_fraction: float = float("nan")


@dataclass
class BrProbeSummary:
    iterations: list
    update_rule: str
    tolerance: float
    starts: list = field(default_factory=list)

    @property
    def converged_fraction(self):
        return sum(it is not None for it in self.iterations) / len(self.iterations)

    @property
    def mean_iterations(self):
        list_done = [it for it in self.iterations if it is not None]
        return float(np.mean(list_done)) if list_done else float("nan")

    @property
    def max_iterations(self):
        list_done = [it for it in self.iterations if it is not None]
        return int(max(list_done)) if list_done else 0


def _within_tolerance(model, arr_q, fl_tol):
    arr_hat = np.asarray(model.baseline_quantities, dtype=float)
    return bool(np.all(np.abs(arr_q - arr_hat) <= fl_tol * arr_hat))


def _check_start(model, list_start_q, list_start_b):
    if len(list_start_q) != model.n_firms:
        raise MarketSpecError(
            f"Start state has {len(list_start_q)} quantities for {model.n_firms} firms")
    if any((not np.isfinite(q)) or q < 0 for q in list_start_q):
        raise MarketSpecError("Start quantities must be finite and non-negative")
    if list_start_b is not None:
        if len(list_start_b) != model.n_firms:
            raise MarketSpecError("Start state needs one investment per firm")
        for i, fl_b in enumerate(list_start_b):
            if fl_b < 0 or fl_b > investment_cap(model, i) * (1.0 + 1e-12):
                raise MarketSpecError(f"Start investment {fl_b} of firm {i} outside [0, cap]")


def br_convergence_probe(model, list_start_q, list_start_b=None, fl_tol=0.01, int_max_iter=50,
                         str_update_rule=STR_UPDATE_SIMULTANEOUS):
    """Iterations of all-firm best responses until every quantity is within
    fl_tol * q_hat_i of q_hat_i.

    Parameters
    ----------
    model : MarketModel
    list_start_q : list(float)
    list_start_b : list(float), optional
        Only checked for feasibility; a best response does not depend on it.
    fl_tol : float, default=0.01
    int_max_iter : int, default=50
    str_update_rule : {"simultaneous", "sequential"}
        simultaneous: every firm responds to the previous iterate.
        sequential: firms respond in index order to the latest quantities.

    Returns
    ----------
    int_iterations : int or None
        0 if the start is already within tolerance, None if not reached
        within int_max_iter iterations.

    Raises
    ----------
    MarketSpecError
        If the start state is infeasible.
    """
    _check_start(model, list_start_q, list_start_b)
    if str_update_rule not in (STR_UPDATE_SIMULTANEOUS, STR_UPDATE_SEQUENTIAL):
        raise ValueError("Unknown update rule " + repr(str_update_rule))
    arr_q = np.asarray(list_start_q, dtype=float).copy()
    if _within_tolerance(model, arr_q, fl_tol):
        return 0
    try:
        for int_iter in range(1, int_max_iter + 1):
            if str_update_rule == STR_UPDATE_SIMULTANEOUS:
                fl_total = float(np.sum(arr_q))
                arr_q = np.array([best_response(model, i, fl_total - arr_q[i]).quantity
                                  for i in range(model.n_firms)])
            else:
                for i in range(model.n_firms):
                    arr_q[i] = best_response(model, i, float(np.sum(arr_q)) - arr_q[i]).quantity
            if _within_tolerance(model, arr_q, fl_tol):
                return int_iter
    except MonopolyDegenerateError as e:
        logger.warning("Best-response iteration left the feasible region: %s", e)
    return None


def random_starts(model, int_n_starts=100, fl_lo=0.3, fl_hi=2.0, int_seed=0):
    """Seeded start quantities drawn uniformly in [lo * q_hat_i, hi * q_hat_i]."""
    rng = np.random.default_rng(int_seed)
    arr_hat = np.asarray(model.baseline_quantities, dtype=float)
    return [rng.uniform(fl_lo, fl_hi, size=model.n_firms) * arr_hat for _ in range(int_n_starts)]


def br_probe_over_starts(model, list_starts, fl_tol=0.01, int_max_iter=50,
                         str_update_rule=STR_UPDATE_SIMULTANEOUS):
    list_iterations = [br_convergence_probe(model, list(arr_start), None, fl_tol, int_max_iter,
                                            str_update_rule)
                       for arr_start in list_starts]
    return BrProbeSummary(list_iterations, str_update_rule, fl_tol,
                          [list(map(float, arr_start)) for arr_start in list_starts])


def investment_optimality_probe(model, list_history):
    """Fraction of observed decisions for which full investment is optimal,
    holding the firm's own quantity and the opponents' production fixed.

    For q > 0 the profit is concave in b with stationary point
    b* = (-k1 * k2 * q)**(1 / (1 - k2)); the cap is optimal iff b* >= cap.
    A decision with q = 0 never counts as cap-optimal.
    """
    if not list_history:
        raise MarketSpecError("Investment probe needs a non-empty history")
    int_states = 0
    int_cap_optimal = 0
    for record in list_history:
        for i, decision in enumerate(record.decisions):
            int_states += 1
            fl_cap = investment_cap(model, i)
            if decision.quantity > 0 and optimal_investment(model, i, decision.quantity) >= fl_cap:
                int_cap_optimal += 1
    return ProbeReport(int_states, int_cap_optimal / int_states)


def strategic_deliberation_probe(model, list_history, fl_tol=0.01, int_max_iter=50,
                                 str_update_rule=STR_UPDATE_SIMULTANEOUS):
    """Investment probe plus a BR convergence run from every observed state."""
    report = investment_optimality_probe(model, list_history)
    summary = br_probe_over_starts(
        model, [[d.quantity for d in record.decisions] for record in list_history],
        fl_tol, int_max_iter, str_update_rule)
    return replace(report,
                   br_iterations_mean=summary.mean_iterations,
                   br_iterations_max=summary.max_iterations,
                   within_pct_of_nash=100.0 * fl_tol,
                   br_converged_fraction=summary.converged_fraction)
