from dataclasses import dataclass

import numpy as np

from errors import ShortSeriesError

STR_RULE_CONTAINMENT = "containment"
STR_RULE_WIDTH = "width"


@dataclass(frozen=True)
class ConvergenceVerdict:
    converged: bool
    p10: float
    p90: float
    nash_value: float
    window: int
    band: float
    rule: str = STR_RULE_CONTAINMENT


def converged(list_series, fl_nash_value, int_window=100, fl_band=0.10,
              str_rule=STR_RULE_CONTAINMENT):
    """Percentile convergence test over the last int_window values.

    Parameters
    ----------
    list_series : sequence of float
    fl_nash_value : float
        Positive benchmark.
    int_window : int, default=100
    fl_band : float, default=0.10
    str_rule : {"containment", "width"}, default="containment"
        containment: [p10, p90] lies inside [(1 - band) N, (1 + band) N].
        width: p90 - p10 <= band * N.

    Returns
    ----------
    verdict : ConvergenceVerdict

    Raises
    ----------
    ShortSeriesError
        If the series is shorter than the window.
    ValueError
        If the benchmark is not positive or the rule is unknown.

    Notes
    ----------
    Percentiles interpolate linearly between order statistics.
    """
    arr_series = np.asarray(list_series, dtype=float)
    if len(arr_series) < int_window:
        raise ShortSeriesError(
            f"Convergence needs at least window={int_window} values, got {len(arr_series)}")
    if not fl_nash_value > 0:
        raise ValueError(f"Nash benchmark must be positive, got {fl_nash_value}")
    arr_tail = arr_series[len(arr_series) - int_window:]
    fl_p10, fl_p90 = (float(x) for x in np.percentile(arr_tail, [10, 90], method="linear"))
    if str_rule == STR_RULE_CONTAINMENT:
        bool_converged = ((1.0 - fl_band) * fl_nash_value <= fl_p10
                          and fl_p90 <= (1.0 + fl_band) * fl_nash_value)
    elif str_rule == STR_RULE_WIDTH:
        bool_converged = fl_p90 - fl_p10 <= fl_band * fl_nash_value
    else:
        raise ValueError("Unknown convergence rule " + repr(str_rule))
    return ConvergenceVerdict(bool(bool_converged), fl_p10, fl_p90, float(fl_nash_value),
                              int_window, float(fl_band), str_rule)
