"""Analysis of a finished run log.

The steps follow the same order for every analysis:
1. Load the history and the analysis parameters.
2. Perform the analysis.
3. Present the results numerically.
4. Store the results as CSV and JSON next to each other in the output directory.
"""
import logging
import os

import pandas as pd

import utilities
from analysis.methods import convergence, probes, summary_stats
from analysis.methods.normalization import history_arrays, nash_levels, normalize
from errors import ShortSeriesError
from init.data_loading import get_section
from simulation.run_log import load_run_log

logger = logging.getLogger(__name__)


def convergence_verdicts(model, list_history, int_window, fl_band, str_rule):
    """Verdict per firm for quantity, investment and profit, plus one for price.

    Returns
    ----------
    df_verdicts : pd.DataFrame
        Columns firm, variable, converged, p10, p90, nash_value, window, band,
        rule. The price row has firm = -1.
    """
    if len(list_history) < int_window:
        raise ShortSeriesError(
            f"History has {len(list_history)} periods but the convergence window requires "
            f"at least {int_window} (set analysis.convergence_window to change it)")
    dict_raw = history_arrays(list_history)
    dict_nash = nash_levels(model)
    list_rows = []
    for i in range(model.n_firms):
        for str_variable in ("quantity", "investment", "profit"):
            verdict = convergence.converged(dict_raw[str_variable][:, i],
                                            dict_nash[str_variable][i], int_window, fl_band,
                                            str_rule)
            list_rows.append(_verdict_row(i, str_variable, verdict))
    verdict = convergence.converged(dict_raw["price"], dict_nash["price"], int_window, fl_band,
                                    str_rule)
    list_rows.append(_verdict_row(-1, "price", verdict))
    return pd.DataFrame(list_rows, columns=["firm", "variable", "converged", "p10", "p90",
                                            "nash_value", "window", "band", "rule"])


def _verdict_row(int_firm, str_variable, verdict):
    return (int_firm, str_variable, verdict.converged, verdict.p10, verdict.p90,
            verdict.nash_value, verdict.window, verdict.band, verdict.rule)


def analyze_history(str_history_path, dict_config, str_out_dir):
    """Writes convergence verdicts, the normalized summary and probe reports
    of one run log.

    Returns
    ----------
    dict_summary : dict
        Content of the JSON summary.

    Raises
    ----------
    SchemaVersionError
        If the log has an unsupported schema version.
    ShortSeriesError
        If the history is shorter than the convergence window or the summary window.
    """
    # 1. Load the history and the analysis parameters.
    dict_header, model, list_history = load_run_log(str_history_path)
    dict_settings = get_section(dict_config, "analysis")
    int_window = int(dict_settings["convergence_window"])
    str_run_id = dict_header.get("run_id", "")
    print("Analyzing", len(list_history), "periods of run", str_run_id + "...")

    # 2. Perform the analysis.
    df_verdicts = convergence_verdicts(model, list_history, int_window,
                                       float(dict_settings["convergence_band"]),
                                       str(dict_settings["convergence_rule"]))
    df_summary = summary_stats.summary_stats(model, list_history,
                                             int(dict_settings["summary_last_n"]))
    report = probes.strategic_deliberation_probe(
        model, list_history, str_update_rule=str(dict_settings["br_update_rule"]))
    int_avg_n = min(int(dict_settings["average_price_last_n"]), len(list_history))
    fl_avg_price = summary_stats.average_price(list_history, int_avg_n)
    dict_norm_last = normalize(model, list_history[-1:])

    # 3. Present the results numerically.
    utilities.print_table(
        ["firm", "variable", "converged", "p10", "p90"],
        [(r.firm, r.variable, r.converged, r.p10, r.p90) for r in df_verdicts.itertuples()])
    print("Average price over the last", int_avg_n, "periods:", round(fl_avg_price, 6))
    print("Full investment optimal for", f"{100 * report.investment_optimal_fraction:.1f}%",
          "of", report.states_checked, "decisions")

    # 4. Store the results.
    utilities.ensure_directory(str_out_dir)
    df_verdicts.to_csv(os.path.join(str_out_dir, "convergence_verdicts.csv"), index=False)
    df_summary.to_csv(os.path.join(str_out_dir, "normalized_summary.csv"), index=False)
    dict_summary = {
        "run_id": str_run_id,
        "periods": len(list_history),
        "convergence": {
            "window": int_window,
            "rule": str(dict_settings["convergence_rule"]),
            "converged_count": int(df_verdicts["converged"].sum()),
            "verdict_count": int(len(df_verdicts)),
            "price_converged": bool(df_verdicts.iloc[-1]["converged"]),
        },
        "average_price": {"last_n": int_avg_n, "value": fl_avg_price,
                          "normalized": fl_avg_price / model.spec.baseline_price},
        "last_period_normalized": {
            "quantity": dict_norm_last["quantity"][0],
            "investment": dict_norm_last["investment"][0],
            "profit": dict_norm_last["profit"][0],
            "price": dict_norm_last["price"][0],
        },
        "probes": {
            "states_checked": report.states_checked,
            "investment_optimal_fraction": report.investment_optimal_fraction,
            "br_iterations_mean": report.br_iterations_mean,
            "br_iterations_max": report.br_iterations_max,
            "br_converged_fraction": report.br_converged_fraction,
            "within_pct_of_nash": report.within_pct_of_nash,
        },
    }
    utilities.write_json(dict_summary, os.path.join(str_out_dir, "analysis_summary.json"))
    print("Successfully stored analysis results in", str_out_dir)
    return dict_summary
