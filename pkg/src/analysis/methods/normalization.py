import numpy as np


def history_arrays(list_history):
    """Raw per-period arrays of a history.

    Returns
    ----------
    dict_raw : dict
        "quantity", "invest_percent", "investment", "unit_cost", "profit" of
        shape (periods, firms); "price" and "total_quantity" of shape (periods,);
        "period" with the period indices.
    """
    return {
        "period": np.array([r.period_index for r in list_history], dtype=int),
        "quantity": np.array([[d.quantity for d in r.decisions] for r in list_history], dtype=float),
        "invest_percent": np.array([[d.invest_percent for d in r.decisions] for r in list_history],
                                   dtype=float),
        "investment": np.array([[d.investment for d in r.decisions] for r in list_history],
                               dtype=float),
        "unit_cost": np.array([r.unit_costs for r in list_history], dtype=float),
        "profit": np.array([r.profits for r in list_history], dtype=float),
        "price": np.array([r.price for r in list_history], dtype=float),
        "total_quantity": np.array([r.total_quantity for r in list_history], dtype=float),
    }


def nash_levels(model):
    """Firm-wise Nash benchmarks used as denominators."""
    return {
        "quantity": np.asarray(model.baseline_quantities, dtype=float),
        "investment": np.asarray(model.baseline_investments, dtype=float),
        "profit": np.asarray(model.nash_profits, dtype=float),
        "price": float(model.spec.baseline_price),
    }


def normalize(model, list_history):
    """Expresses a history relative to each firm's Nash levels.

    Quantities are divided by q_hat_i, investments by b_hat_i, profits by the
    Nash profit 0.8 * pi_hat_i and prices by p_hat.
    """
    dict_raw = history_arrays(list_history)
    dict_nash = nash_levels(model)
    for str_key in ("quantity", "investment", "profit"):
        dict_raw[str_key] = dict_raw[str_key].reshape(-1, model.n_firms)
    return {
        "period": dict_raw["period"],
        "quantity": dict_raw["quantity"] / dict_nash["quantity"],
        "investment": dict_raw["investment"] / dict_nash["investment"],
        "profit": dict_raw["profit"] / dict_nash["profit"],
        "price": dict_raw["price"] / dict_nash["price"],
    }


def denormalize(model, dict_normalized):
    """Inverse of normalize."""
    dict_nash = nash_levels(model)
    return {
        "period": dict_normalized["period"],
        "quantity": dict_normalized["quantity"] * dict_nash["quantity"],
        "investment": dict_normalized["investment"] * dict_nash["investment"],
        "profit": dict_normalized["profit"] * dict_nash["profit"],
        "price": dict_normalized["price"] * dict_nash["price"],
    }
