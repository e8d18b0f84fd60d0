"""Numeric validation of a derived market model.

Five checks are run, each producing one entry of the report:

- no profitable unilateral deviation from the baseline,
- positivity of the interior-optimum test function in percent space,
- zero investment never beating full investment in percent space,
- all-firm best-response iteration reaching the baseline from random starts,
- full investment being optimal on sampled states with q >= 0.4 q_hat.
"""
import logging
from dataclasses import asdict

import numpy as np

from analysis.methods import equilibrium, probes
from objects.market import investment_cap, optimal_investment, profit_array

logger = logging.getLogger(__name__)

INT_ORACLE_POINTS = 2001


def check_nash(model, dict_settings):
    report = equilibrium.verify_nash(model, float(dict_settings["grid_radius"]),
                                     int(dict_settings["grid_points"]),
                                     float(dict_settings["nash_tolerance"]))
    return {
        "check": "nash_deviation",
        "passed": report.passed,
        "max_gain": report.max_gain,
        "tolerance": report.tolerance,
        "firms": [dict(asdict(f), gain=f.gain) for f in report.firms],
    }


def check_h_positivity(model, dict_settings):
    report = equilibrium.h_positivity_sweep()
    return dict(asdict(report), check="no_interior_optimum",
                h_at_critical_min=float(np.min(equilibrium.h_at_critical(np.arange(5.0, 89.0)))))


def check_zero_investment(model, dict_settings):
    return dict(asdict(equilibrium.zero_investment_sweep()), check="zero_investment_dominated")


def check_br_convergence(model, dict_settings):
    list_starts = probes.random_starts(model, int(dict_settings["br_starts"]),
                                       float(dict_settings["br_start_low"]),
                                       float(dict_settings["br_start_high"]),
                                       int(dict_settings.get("seed", 0)))
    summary = probes.br_probe_over_starts(model, list_starts, float(dict_settings["br_tolerance"]),
                                          int(dict_settings["br_max_iter"]),
                                          str(dict_settings["br_update_rule"]))
    fl_limit = float(dict_settings["br_max_mean_iterations"])
    bool_passed = summary.converged_fraction == 1.0 and summary.mean_iterations <= fl_limit
    return {
        "check": "br_convergence",
        "passed": bool(bool_passed),
        "update_rule": summary.update_rule,
        "starts": len(list_starts),
        "converged_fraction": summary.converged_fraction,
        "mean_iterations": summary.mean_iterations,
        "max_iterations": summary.max_iterations,
        "max_mean_iterations": fl_limit,
    }


def sample_states(model, int_states, fl_q_lo, fl_q_hi, int_seed=0):
    """Seeded (firm, own quantity, others' quantity) triples with the own
    quantity in [lo, hi] * q_hat_i and the others in [0.5, 1.5] * (Q_hat - q_hat_i)."""
    rng = np.random.default_rng(int_seed)
    list_states = []
    for _ in range(int_states):
        i = int(rng.integers(model.n_firms))
        fl_q_hat = model.baseline_quantities[i]
        fl_q = float(rng.uniform(fl_q_lo, fl_q_hi)) * fl_q_hat
        fl_others = float(rng.uniform(0.5, 1.5)) * (model.total_baseline - fl_q_hat)
        list_states.append((i, fl_q, fl_others))
    return list_states


def check_investment_optimality(model, dict_settings):
    """Closed-form optimal investment against a dense grid oracle. On every
    sampled state the cap has to be optimal by both."""
    list_states = sample_states(model, int(dict_settings["investment_states"]),
                                float(dict_settings["investment_quantity_low"]),
                                float(dict_settings["investment_quantity_high"]),
                                int(dict_settings.get("seed", 0)))
    int_cap_closed = 0
    int_cap_oracle = 0
    for i, fl_q, fl_others in list_states:
        fl_cap = investment_cap(model, i)
        if optimal_investment(model, i, fl_q) >= fl_cap:
            int_cap_closed += 1
        arr_b = np.linspace(0.0, fl_cap, INT_ORACLE_POINTS)
        if int(np.argmax(profit_array(model, fl_others, fl_q, arr_b))) == INT_ORACLE_POINTS - 1:
            int_cap_oracle += 1
    fl_closed = int_cap_closed / len(list_states)
    fl_oracle = int_cap_oracle / len(list_states)
    return {
        "check": "investment_optimality",
        "passed": fl_closed == 1.0 and fl_oracle == 1.0,
        "states": len(list_states),
        "cap_optimal_fraction": fl_closed,
        "cap_optimal_fraction_grid": fl_oracle,
    }


LIST_CHECKS = [check_nash, check_h_positivity, check_zero_investment, check_br_convergence,
               check_investment_optimality]


def validate_model(model, dict_settings):
    """Runs every check on a model.

    Parameters
    ----------
    model : MarketModel
    dict_settings : dict
        The [validation] config section with defaults filled in.

    Returns
    ----------
    dict_report : dict
        "passed" and one entry per check under "checks".
    """
    list_results = []
    for fn_check in LIST_CHECKS:
        dict_result = fn_check(model, dict_settings)
        logger.info("Check %s: %s", dict_result["check"],
                    "passed" if dict_result["passed"] else "FAILED")
        list_results.append(dict_result)
    return {"passed": all(d["passed"] for d in list_results), "checks": list_results}
