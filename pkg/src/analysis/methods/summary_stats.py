import numpy as np
import pandas as pd

from analysis.methods.normalization import normalize
from errors import ShortSeriesError

TUP_FIRM_VARIABLES = ("quantity", "investment", "profit")


def _require_length(list_history, int_last_n):
    if int_last_n < 1 or len(list_history) < int_last_n:
        raise ShortSeriesError(
            f"Summary over the last {int_last_n} periods needs at least that many periods, "
            f"history has {len(list_history)}")


def summary_stats(model, list_history, int_last_n=50):
    """Means and 10/90 percentiles of normalized decisions over the last periods.

    Parameters
    ----------
    model : MarketModel
    list_history : list(PeriodRecord)
    int_last_n : int, default=50

    Returns
    ----------
    df_metrics : pd.DataFrame
        Long format with columns firm, variable, statistic, value. Market-wide
        price rows carry firm = -1.

    Raises
    ----------
    ShortSeriesError
        If the history is shorter than int_last_n.
    """
    _require_length(list_history, int_last_n)
    dict_norm = normalize(model, list_history[-int_last_n:])
    list_rows = []
    for i in range(model.n_firms):
        for str_variable in TUP_FIRM_VARIABLES:
            arr_values = dict_norm[str_variable][:, i]
            list_rows.extend(_stat_rows(i, str_variable, arr_values))
    list_rows.extend(_stat_rows(-1, "price", dict_norm["price"]))
    return pd.DataFrame(list_rows, columns=["firm", "variable", "statistic", "value"])


def _stat_rows(int_firm, str_variable, arr_values):
    fl_p10, fl_p90 = np.percentile(arr_values, [10, 90])
    return [
        (int_firm, str_variable, "mean", float(np.mean(arr_values))),
        (int_firm, str_variable, "p10", float(fl_p10)),
        (int_firm, str_variable, "p90", float(fl_p90)),
    ]


def average_price(list_history, int_last_n=100):
    """Mean market price over the last int_last_n periods."""
    _require_length(list_history, int_last_n)
    return float(np.mean([r.price for r in list_history[-int_last_n:]]))
