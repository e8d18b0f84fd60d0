"""Module for exporting plot-ready data of finished runs.

Run export_plot_data to write these CSV files for one run log or for every
run log below a directory. Rendering is left to the reader's plotting tool.
"""
import glob
import logging
import os

import numpy as np
import pandas as pd

import utilities as util
from analysis.methods.normalization import history_arrays, normalize
from errors import ShortSeriesError
from objects.market import unit_cost_array
from simulation.run_log import load_run_log

logger = logging.getLogger(__name__)

INT_CURVE_POINTS = 200
INT_COST_POINTS = 101


def find_run_logs(str_path):
    """A run log itself, or every history_*.jsonl below a directory, sorted.

    Raises
    ----------
    FileNotFoundError
        If nothing is found.
    """
    if os.path.isfile(str_path):
        return [str_path]
    list_paths = sorted(glob.glob(os.path.join(str_path, "**", "history_*.jsonl"),
                                  recursive=True))
    if not list_paths:
        raise FileNotFoundError("No run logs found at " + str_path)
    return list_paths


def last_periods_frames(model, str_run_id, list_history, int_last_n=50):
    """Raw and normalized decisions, prices and profits of the last periods.

    Returns
    ----------
    dict_frames : dict(str, pd.DataFrame)
        "decisions" and "profits" in long format (one row per period and firm),
        "prices" with one row per period.

    Raises
    ----------
    ShortSeriesError
        If the history is empty.
    """
    if not list_history:
        raise ShortSeriesError(f"Run {str_run_id} has no periods to export")
    list_tail = list_history[-int_last_n:]
    dict_raw = history_arrays(list_tail)
    dict_norm = normalize(model, list_tail)
    int_periods = len(list_tail)
    arr_period = np.repeat(dict_raw["period"], model.n_firms)
    arr_firm = np.tile(np.arange(model.n_firms), int_periods)

    df_decisions = pd.DataFrame({
        "run_id": str_run_id,
        "period": arr_period,
        "firm": arr_firm,
        "quantity": dict_raw["quantity"].ravel(),
        "invest_percent": dict_raw["invest_percent"].ravel(),
        "quantity_norm": dict_norm["quantity"].ravel(),
        "investment_norm": dict_norm["investment"].ravel(),
    })
    df_profits = pd.DataFrame({
        "run_id": str_run_id,
        "period": arr_period,
        "firm": arr_firm,
        "profit": dict_raw["profit"].ravel(),
        "profit_norm": dict_norm["profit"].ravel(),
    })
    df_prices = pd.DataFrame({
        "run_id": str_run_id,
        "period": dict_raw["period"],
        "price": dict_raw["price"],
        "price_norm": dict_norm["price"],
    })
    return {"decisions": df_decisions, "prices": df_prices, "profits": df_profits}


def boxplot_summary(df_decisions, df_prices, df_profits):
    """Five-number summary plus mean of every normalized variable, keyed by
    run id and firm (firm = -1 for the price)."""
    df_long = pd.concat([
        df_decisions.melt(id_vars=["run_id", "period", "firm"],
                          value_vars=["quantity_norm", "investment_norm"],
                          var_name="variable"),
        df_profits.melt(id_vars=["run_id", "period", "firm"], value_vars=["profit_norm"],
                        var_name="variable"),
        df_prices.assign(firm=-1).melt(id_vars=["run_id", "period", "firm"],
                                       value_vars=["price_norm"], var_name="variable"),
    ], ignore_index=True)
    df_summary = df_long.groupby(["run_id", "firm", "variable"])["value"].describe()
    df_summary = df_summary.rename(columns={"25%": "q1", "50%": "median", "75%": "q3"})
    return df_summary[["count", "min", "q1", "median", "q3", "max", "mean"]].reset_index()


def market_mechanism_frames(model, str_run_id=""):
    """Price against total production, each firm's unit cost against its
    investment, and the Nash point on both curves."""
    arr_total = np.linspace(0.25, 2.0, INT_CURVE_POINTS) * model.total_baseline
    df_price = pd.DataFrame({
        "run_id": str_run_id,
        "total_quantity": arr_total,
        "price": model.scale_A * np.power(arr_total, model.spec.elasticity),
    })
    fl_max_percent = 100.0 * model.spec.invest_fraction_cap
    arr_percent = np.linspace(0.0, fl_max_percent, INT_COST_POINTS)
    list_costs = []
    for i in range(model.n_firms):
        arr_investment = arr_percent / 100.0 * model.baseline_profits[i]
        list_costs.append(pd.DataFrame({
            "run_id": str_run_id,
            "firm": i,
            "invest_percent": arr_percent,
            "investment": arr_investment,
            "unit_cost": unit_cost_array(model, arr_investment),
        }))
    df_nash = pd.DataFrame({
        "run_id": str_run_id,
        "firm": np.arange(model.n_firms),
        "quantity": model.baseline_quantities,
        "invest_percent": fl_max_percent,
        "investment": model.baseline_investments,
        "unit_cost": model.baseline_costs,
        "total_quantity": model.total_baseline,
        "price": model.spec.baseline_price,
    })
    return {"price_curve": df_price, "cost_curves": pd.concat(list_costs, ignore_index=True),
            "nash_points": df_nash}


def export_plot_data(str_history_path, str_out_dir, int_last_n=50):
    """Writes the plot-data CSV files.

    Parameters
    ----------
    str_history_path : str
        A run log or a directory holding run logs (searched recursively).
    str_out_dir : str
    int_last_n : int, default=50
        Periods exported per run. Shorter runs are exported whole.

    Returns
    ----------
    dict_paths : dict(str, str)
        Written file per figure family.
    """
    dict_parts = {}
    for str_log in find_run_logs(str_history_path):
        dict_header, model, list_history = load_run_log(str_log)
        str_run_id = dict_header.get("run_id", os.path.basename(os.path.dirname(str_log)))
        print("Exporting run", str_run_id, "with", len(list_history), "periods...")
        dict_frames = last_periods_frames(model, str_run_id, list_history, int_last_n)
        dict_frames.update(market_mechanism_frames(model, str_run_id))
        for str_name, df in dict_frames.items():
            dict_parts.setdefault(str_name, []).append(df)

    dict_tables = {str_name: pd.concat(list_dfs, ignore_index=True)
                   for str_name, list_dfs in dict_parts.items()}
    dict_tables["boxplot_summary"] = boxplot_summary(dict_tables["decisions"],
                                                     dict_tables["prices"],
                                                     dict_tables["profits"])
    util.ensure_directory(str_out_dir)
    dict_paths = {}
    for str_name, df in dict_tables.items():
        dict_paths[str_name] = os.path.join(str_out_dir, str_name + ".csv")
        df.to_csv(dict_paths[str_name], index=False)
        logger.debug("Wrote %d rows to %s", len(df), dict_paths[str_name])
    print("Successfully exported", len(dict_paths), "plot-data files to", str_out_dir)
    return dict_paths
