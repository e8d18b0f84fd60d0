"""Market mathematics of the augmented Cournot framework.

A market is given by baseline production units per firm, a baseline price, a
constant price elasticity and the fraction of baseline profit a firm may invest.
From these the baseline (status quo) equilibrium is reverse-engineered:

    price        p(Q)  = A * Q**eps,                A = Q_hat**(-eps) * p_hat
    unit cost    w(b)  = k1 * b**k2 + k3
    profit       pi_i  = [p(Q_-i + q_i) - w(b_i)] * q_i - b_i

Everything in this module is a pure function of its inputs, and MarketModel is
frozen so it can be shared between concurrent runs.
"""
import logging
from dataclasses import dataclass

import numpy as np

from errors import MarketSpecError

logger = logging.getLogger(__name__)

FL_MAX_SHARE = 0.95
FL_COBB_K2 = 0.5
FL_REL_TOL = 1e-12


@dataclass(frozen=True)
class MarketSpec:
    baseline_quantities: tuple
    baseline_price: float = 1.0
    elasticity: float = -1.0
    invest_fraction_cap: float = 0.2

    @property
    def n_firms(self):
        return len(self.baseline_quantities)


@dataclass(frozen=True)
class MarketModel:
    spec: MarketSpec
    total_baseline: float
    scale_A: float
    baseline_costs: tuple
    baseline_profits: tuple
    baseline_investments: tuple
    cobb_k1: float
    cobb_k2: float
    cobb_k3: float

    @property
    def n_firms(self):
        return self.spec.n_firms

    @property
    def baseline_quantities(self):
        return self.spec.baseline_quantities

    @property
    def nash_profits(self):
        """Profit of each firm when every firm plays its baseline decision,
        (1 - c) * pi_hat_i. Equals 0.8 * pi_hat_i for the usual c = 0.2."""
        fl_c = self.spec.invest_fraction_cap
        return tuple((1.0 - fl_c) * fl_pi for fl_pi in self.baseline_profits)

    @property
    def shares(self):
        return tuple(fl_q / self.total_baseline for fl_q in self.spec.baseline_quantities)


@dataclass(frozen=True)
class ProfitQuery:
    firm_index: int
    others_quantity: float
    quantity: float
    investment: float


def validate_spec(spec):
    """Checks the exogenous market inputs.

    Raises
    ----------
    MarketSpecError
        If fewer than two firms, a non-positive baseline quantity or price, a
        firm with at least 95% of the market, non-negative elasticity or an
        investment cap fraction outside (0, 1).
    """
    list_q = list(spec.baseline_quantities)
    if len(list_q) < 2:
        raise MarketSpecError("A market needs at least 2 firms, got " + str(len(list_q)))
    if any((not np.isfinite(fl_q)) or fl_q <= 0 for fl_q in list_q):
        raise MarketSpecError("Baseline quantities must be positive: " + str(list_q))
    if not spec.baseline_price > 0:
        raise MarketSpecError("Baseline price must be positive, got " + str(spec.baseline_price))
    if not spec.elasticity < 0:
        raise MarketSpecError("Elasticity must be negative, got " + str(spec.elasticity))
    if not 0 < spec.invest_fraction_cap < 1:
        raise MarketSpecError(
            "Investment cap fraction must lie in (0, 1), got " + str(spec.invest_fraction_cap))
    fl_total = sum(list_q)
    fl_max_share = max(list_q) / fl_total
    if fl_max_share >= FL_MAX_SHARE:
        raise MarketSpecError(
            f"Monopolistic market: largest share {fl_max_share:.4f} is not below {FL_MAX_SHARE}")


def derive_model(spec):
    """Derives the baseline equilibrium constants of a market.

    Parameters
    ----------
    spec : MarketSpec
        Exogenous market inputs.

    Returns
    ----------
    model : MarketModel
        Spec together with A, baseline costs, profits, investments and the
        Cobb-Douglas constants of the investment-cost curve.

    Raises
    ----------
    MarketSpecError
        If the spec is invalid, or a baseline cost falls outside (0, p_hat).

    Notes
    ----------
    Baseline costs follow from the first-order condition of the naive profit
    at the baseline, w_i = eps * A * q_i * Q**(eps - 1) + p_hat. The cost curve
    is fitted so that w(0) = p_hat and w(c * pi_hat_i) = w_hat_i, which gives
    k1 = -sqrt(-eps * p_hat / (Q_hat * c)) with k2 = 0.5 and k3 = p_hat.
    """
    validate_spec(spec)
    fl_p = float(spec.baseline_price)
    fl_eps = float(spec.elasticity)
    fl_c = float(spec.invest_fraction_cap)
    arr_q = np.asarray(spec.baseline_quantities, dtype=float)
    fl_total = float(np.sum(arr_q))

    fl_A = fl_total ** (-fl_eps) * fl_p
    # A * Q**(eps - 1) reduces to p_hat / Q
    arr_costs = fl_eps * fl_p * arr_q / fl_total + fl_p
    if np.any(arr_costs <= 0) or np.any(arr_costs >= fl_p):
        raise MarketSpecError(
            "Degenerate market: baseline costs " + str(arr_costs.tolist())
            + " must lie strictly between 0 and the baseline price")
    arr_profits = (fl_p - arr_costs) * arr_q
    arr_investments = fl_c * arr_profits

    fl_k1 = -np.sqrt(-fl_eps * fl_p / (fl_total * fl_c))

    model = MarketModel(
        spec=MarketSpec(tuple(float(fl_q) for fl_q in arr_q), fl_p, fl_eps, fl_c),
        total_baseline=fl_total,
        scale_A=float(fl_A),
        baseline_costs=tuple(float(x) for x in arr_costs),
        baseline_profits=tuple(float(x) for x in arr_profits),
        baseline_investments=tuple(float(x) for x in arr_investments),
        cobb_k1=float(fl_k1),
        cobb_k2=FL_COBB_K2,
        cobb_k3=fl_p,
    )
    logger.debug("Derived market model with A=%s, k1=%s", model.scale_A, model.cobb_k1)
    return model


def investment_cap(model, int_firm):
    """Largest admissible investment of a firm, c * pi_hat_i."""
    return model.spec.invest_fraction_cap * model.baseline_profits[int_firm]


def check_firm_index(model, int_firm):
    if not 0 <= int_firm < model.n_firms:
        raise MarketSpecError(
            f"Firm index {int_firm} out of range for a {model.n_firms}-firm market")


def check_investment(model, int_firm, fl_investment):
    """Returns the investment, snapped onto the cap when it exceeds it by
    floating-point noise only."""
    fl_cap = investment_cap(model, int_firm)
    if not np.isfinite(fl_investment) or fl_investment < 0:
        raise MarketSpecError(f"Investment must be non-negative, got {fl_investment}")
    if fl_investment > fl_cap:
        if fl_investment <= fl_cap * (1.0 + FL_REL_TOL):
            return fl_cap
        raise MarketSpecError(
            f"Investment {fl_investment} exceeds the cap {fl_cap} of firm {int_firm}")
    return float(fl_investment)


def price(model, fl_total_quantity):
    """Market price A * Q**eps.

    Raises
    ----------
    MarketSpecError
        If Q <= 0, where the price is undefined.
    """
    if not fl_total_quantity > 0:
        raise MarketSpecError(f"Price is undefined at total quantity {fl_total_quantity}")
    return model.scale_A * float(fl_total_quantity) ** model.spec.elasticity


def unit_cost(model, int_firm, fl_investment):
    """Average production cost after investing fl_investment, k1 * b**k2 + k3."""
    check_firm_index(model, int_firm)
    fl_investment = check_investment(model, int_firm, fl_investment)
    return model.cobb_k1 * fl_investment ** model.cobb_k2 + model.cobb_k3


def unit_cost_array(model, arr_investment):
    """Vectorized unit cost without bounds checks."""
    return model.cobb_k1 * np.power(arr_investment, model.cobb_k2) + model.cobb_k3


def profit_array(model, arr_others, arr_quantity, arr_investment):
    """Vectorized profit without bounds checks. Broadcasts its arguments.

    Entries with zero quantity evaluate to -b regardless of the price.
    """
    arr_others = np.asarray(arr_others, dtype=float)
    arr_quantity = np.asarray(arr_quantity, dtype=float)
    arr_investment = np.asarray(arr_investment, dtype=float)
    arr_total = arr_others + arr_quantity
    with np.errstate(divide="ignore", invalid="ignore"):
        arr_price = model.scale_A * np.power(np.where(arr_total > 0, arr_total, 1.0),
                                             model.spec.elasticity)
        arr_margin = arr_price - unit_cost_array(model, arr_investment)
        arr_profit = np.where(arr_quantity > 0, arr_margin * arr_quantity, 0.0) - arr_investment
    return arr_profit


def profit(model, query):
    """Formal profit of one firm.

    Parameters
    ----------
    model : MarketModel
    query : ProfitQuery
        Firm, opponents' total production Q_-i, own quantity and investment.

    Returns
    ----------
    fl_profit : float
        [A * (Q_-i + q)**eps - w(b)] * q - b, and -b when q = 0.

    Raises
    ----------
    MarketSpecError
        If the investment is out of bounds or a quantity is negative.
    """
    check_firm_index(model, query.firm_index)
    fl_b = check_investment(model, query.firm_index, query.investment)
    if query.quantity < 0 or query.others_quantity < 0:
        raise MarketSpecError(
            f"Quantities must be non-negative, got q={query.quantity}, Q_-i={query.others_quantity}")
    if query.quantity == 0:
        return -fl_b
    fl_price = price(model, query.others_quantity + query.quantity)
    fl_cost = model.cobb_k1 * fl_b ** model.cobb_k2 + model.cobb_k3
    return (fl_price - fl_cost) * query.quantity - fl_b


def optimal_investment(model, int_firm, fl_quantity):
    """Profit-maximizing investment for a fixed own quantity.

    The profit is concave in b for q > 0 and its stationary point solves
    -k1 * k2 * b**(k2 - 1) * q = 1, so b* = (-k1 * k2 * q)**(1 / (1 - k2)),
    clamped to [0, cap]. With q = 0 every investment is a pure loss and b* = 0.
    """
    fl_cap = investment_cap(model, int_firm)
    if fl_quantity <= 0:
        return 0.0
    fl_b = (-model.cobb_k1 * model.cobb_k2 * fl_quantity) ** (1.0 / (1.0 - model.cobb_k2))
    return float(min(max(fl_b, 0.0), fl_cap))


def model_to_dict(model):
    """Plain-dict view of a model, used for JSON output and run-log headers."""
    return {
        "baseline_quantities": list(model.spec.baseline_quantities),
        "baseline_price": model.spec.baseline_price,
        "elasticity": model.spec.elasticity,
        "invest_fraction_cap": model.spec.invest_fraction_cap,
        "total_baseline": model.total_baseline,
        "scale_A": model.scale_A,
        "baseline_costs": list(model.baseline_costs),
        "baseline_profits": list(model.baseline_profits),
        "baseline_investments": list(model.baseline_investments),
        "cobb_k1": model.cobb_k1,
        "cobb_k2": model.cobb_k2,
        "cobb_k3": model.cobb_k3,
    }


def spec_from_dict(dict_market):
    """Builds a MarketSpec from the [market] section of a config or a log header."""
    return MarketSpec(
        baseline_quantities=tuple(float(x) for x in dict_market["baseline_quantities"]),
        baseline_price=float(dict_market.get("baseline_price", 1.0)),
        elasticity=float(dict_market.get("elasticity", -1.0)),
        invest_fraction_cap=float(dict_market.get("invest_fraction_cap", 0.2)),
    )
