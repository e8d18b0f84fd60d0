from dataclasses import dataclass, asdict

from errors import MarketSpecError


@dataclass(frozen=True)
class Decision:
    """One firm's action for one period.

    The investment is stored both as percent of the firm's baseline profit and
    in money, investment = invest_percent / 100 * pi_hat_i.
    """
    quantity: float
    invest_percent: float
    investment: float

    def as_pair(self):
        return (self.quantity, self.invest_percent)


@dataclass(frozen=True)
class Observation:
    """Market feedback handed to one firm after a period. Holds nothing about
    the other firms beyond the market totals."""
    period_index: int
    own_quantity: float
    own_invest_percent: float
    own_unit_cost: float
    total_quantity: float
    market_price: float
    own_profit: float

    @property
    def others_quantity(self):
        return self.total_quantity - self.own_quantity


def make_decision(model, int_firm, fl_quantity, fl_invest_percent):
    """Builds a Decision from a quantity and an investment percent.

    Raises
    ----------
    MarketSpecError
        If the quantity is negative or the percent is outside [0, 100 * c].
    """
    fl_max_percent = 100.0 * model.spec.invest_fraction_cap
    if fl_quantity < 0:
        raise MarketSpecError(f"Quantity must be non-negative, got {fl_quantity}")
    if fl_invest_percent < 0 or fl_invest_percent > fl_max_percent * (1.0 + 1e-12):
        raise MarketSpecError(
            f"Investment percent {fl_invest_percent} outside [0, {fl_max_percent}]")
    fl_invest_percent = min(float(fl_invest_percent), fl_max_percent)
    fl_investment = fl_invest_percent / 100.0 * model.baseline_profits[int_firm]
    return Decision(float(fl_quantity), fl_invest_percent, fl_investment)


def decision_to_dict(decision):
    return asdict(decision)


def decision_from_dict(dict_decision):
    return Decision(
        float(dict_decision["quantity"]),
        float(dict_decision["invest_percent"]),
        float(dict_decision["investment"]),
    )
