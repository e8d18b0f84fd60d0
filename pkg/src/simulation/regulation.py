import logging
from dataclasses import replace

import numpy as np

from errors import ConfigError
from objects.run_records import AgentKind

logger = logging.getLogger(__name__)


def regulated_firms(list_baseline_quantities, int_top_k):
    """Indices of the top_k largest-share firms. Equal shares keep firm order."""
    arr_order = np.argsort(-np.asarray(list_baseline_quantities, dtype=float), kind="stable")
    return sorted(int(i) for i in arr_order[:int_top_k])


def regulation_roster(base, int_top_k):
    """Puts the top_k largest firms under best-response regulation.

    Parameters
    ----------
    base : RunConfig
    int_top_k : int
        Number of largest-share firms to replace, 0 <= top_k <= n_firms.

    Returns
    ----------
    config : RunConfig
        Copy of base where those firms are BestResponse agents and every other
        firm keeps its configured kind.

    Raises
    ----------
    ConfigError
        If top_k is out of range.
    """
    int_n = len(base.market.baseline_quantities)
    if not 0 <= int_top_k <= int_n:
        raise ConfigError(f"regulate-top must lie in [0, {int_n}], got {int_top_k}")
    if int_top_k == 0:
        return base
    list_roster = list(base.roster)
    list_firms = regulated_firms(base.market.baseline_quantities, int_top_k)
    for i in list_firms:
        list_roster[i] = AgentKind("best_response")
    logger.info("Regulating firms %s with best-response agents", list_firms)
    return replace(base, roster=tuple(list_roster))
