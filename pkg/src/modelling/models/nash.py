from objects.decisions import make_decision
from objects.market import check_firm_index


def nash_decide(model, int_firm):
    """Static Nash policy: baseline quantity with full investment, every period.

    Parameters
    ----------
    model : MarketModel
    int_firm : int
        Zero-indexed firm.

    Returns
    ----------
    decision : Decision
        (q_hat_i, 100 * c percent).
    """
    check_firm_index(model, int_firm)
    return make_decision(model, int_firm, model.baseline_quantities[int_firm],
                         100.0 * model.spec.invest_fraction_cap)
