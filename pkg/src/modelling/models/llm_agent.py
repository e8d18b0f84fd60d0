import logging
import re
from dataclasses import dataclass

import numpy as np

from errors import ParseFailure
from objects.decisions import make_decision

logger = logging.getLogger(__name__)

PROMPT_TEMPLATE = """Your task is to assist a firm with its strategy planning, which involves both the production and capital investment decisions. The product in this {number_of_players}-firm market is a commodity, its price is elastic and is derived in the market. Your capital investment will help in adjusting your production cost. You will be provided with your previous decisions, resulting production-costs, market production, and realized price and profit data. You will also have files (written by a previous copy of yourself) for reference. Consider demand, costs, and competitors. Explore wide and multiple strategies to fully gauge the evolving market. Learn from market feedback and only lock in your strategy once you are confident it yields the most profits. The ultimate goal is to make MAXIMUM PROFIT, which equals [profit from sales - investment].

Here's the market and firm information:

- Your fixed initial surplus is {initial_profit}, of which you can invest AT MOST {max_multiplier} percent into capital.
- Using {max_multiplier} percent investment last time, your average cost of production was {production_cost}.
- Last time, you produced about {production_units} units, at price = 1.

Following are the resources you have. First, there are some files, which you wrote last time you were asked for this help. Here is a high-level description of what these files contain:

- PLANS.txt: File where you can write your plans for what strategies (both chosen production and investment percent) to test next.
- INSIGHTS.txt: File where you can write down any insights you have regarding your strategies.

Here is the current content of these files.

Filename: PLANS.txt
++++++++++++++++++
{plans}
++++++++++++++++++

Filename: INSIGHTS.txt
++++++++++++++++++
{insights}
++++++++++++++++++

Finally, I will show you the market data you have access to.

Filename: MARKET_DATA (read-only)
++++++++++++++++++
{market_history}
++++++++++++++++++

Now you have all the necessary information to complete the task. Here is how the conversation will work:

First, carefully read through the information provided. Reminder that investment percent is at most {max_multiplier}. Then, fill in the following template to respond. Keep it very brief and succinct and don't repeat yourself.

My observations and thoughts:
<fill in here>

New content for PLANS.txt:
<fill in here>

New content for INSIGHTS.txt:
<fill in here>

My chosen production quantity:
<ONLY the NUMBER, nothing else>

My chosen investment (in percent):
<ONLY the NUMBER, nothing else>

Note whatever content you write in PLANS.txt and INSIGHTS.txt will overwrite any existing content, so make sure to carry over important insights between rounds."""

STR_LABEL_PLANS = "New content for PLANS.txt:"
STR_LABEL_INSIGHTS = "New content for INSIGHTS.txt:"
STR_LABEL_QUANTITY = "My chosen production quantity:"
STR_LABEL_PERCENT = "My chosen investment (in percent):"

# Integers or decimals, optional thousands separators and exponent
RE_NUMBER = re.compile(
    r"[-+]?(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d*)?(?:[eE][-+]?\d+)?|[-+]?\.\d+(?:[eE][-+]?\d+)?")

DICT_HISTORY_PRECISION = {"price_cost_significant_digits": 4, "quantity_profit_decimals": 2}


@dataclass(frozen=True)
class PromptContext:
    n_firms: int
    initial_profit: float
    max_multiplier_percent: float
    baseline_cost: float
    baseline_units: float
    plans_text: str = ""
    insights_text: str = ""
    market_history_text: str = ""


def format_number(fl_value):
    """Compact rendering of baseline figures, 20.0 -> '20', 122.5 -> '122.5'."""
    return f"{fl_value:g}"


def render_history_row(observation):
    """One MARKET_DATA line. Prices and costs get 4 significant digits,
    quantities and profits 2 decimals."""
    return (f"Period {observation.period_index}: "
            f"production = {observation.own_quantity:.2f}, "
            f"investment = {observation.own_invest_percent:.2f} percent, "
            f"production-cost = {observation.own_unit_cost:.4g}, "
            f"market production = {observation.total_quantity:.2f}, "
            f"price = {observation.market_price:.4g}, "
            f"profit = {observation.own_profit:.2f}")


def render_history(list_observations):
    return "\n".join(render_history_row(obs) for obs in list_observations)


def build_prompt_context(model, int_firm, str_plans, str_insights, list_observations):
    return PromptContext(
        n_firms=model.n_firms,
        initial_profit=model.baseline_profits[int_firm],
        max_multiplier_percent=100.0 * model.spec.invest_fraction_cap,
        baseline_cost=model.baseline_costs[int_firm],
        baseline_units=model.baseline_quantities[int_firm],
        plans_text=str_plans,
        insights_text=str_insights,
        market_history_text=render_history(list_observations),
    )


def render_prompt(ctx):
    """Instantiates the prompt template.

    Raises
    ----------
    ValueError
        If a placeholder value is missing.
    """
    dict_values = {
        "number_of_players": ctx.n_firms,
        "initial_profit": ctx.initial_profit,
        "max_multiplier": ctx.max_multiplier_percent,
        "production_cost": ctx.baseline_cost,
        "production_units": ctx.baseline_units,
        "plans": ctx.plans_text,
        "insights": ctx.insights_text,
        "market_history": ctx.market_history_text,
    }
    for str_name, value in dict_values.items():
        if value is None:
            raise ValueError("Missing prompt value for " + str_name)
    for str_name in ("initial_profit", "max_multiplier", "production_cost", "production_units"):
        dict_values[str_name] = format_number(dict_values[str_name])
    return PROMPT_TEMPLATE.format(**dict_values)


def _section(str_text, str_label, list_end_labels):
    """Text between a label and the next of list_end_labels, or None."""
    int_start = str_text.rfind(str_label)
    if int_start < 0:
        return None
    str_rest = str_text[int_start + len(str_label):]
    int_end = len(str_rest)
    for str_end in list_end_labels:
        int_pos = str_rest.find(str_end)
        if 0 <= int_pos < int_end:
            int_end = int_pos
    return str_rest[:int_end].strip()


def _number_after(str_text, str_label, list_end_labels):
    str_section = _section(str_text, str_label, list_end_labels)
    if str_section is None:
        raise ParseFailure("missing label " + repr(str_label), str_text[-200:])
    list_lines = [str_line.strip() for str_line in str_section.splitlines() if str_line.strip()]
    if not list_lines:
        raise ParseFailure("no value after " + repr(str_label), str_section)
    match = RE_NUMBER.search(list_lines[0])
    if match is None:
        raise ParseFailure("non-numeric value after " + repr(str_label), list_lines[0])
    fl_value = float(match.group(0).replace(",", ""))
    if not np.isfinite(fl_value):
        raise ParseFailure("non-finite value after " + repr(str_label), list_lines[0])
    return fl_value


def parse_response(str_text, model, int_firm, list_events=None):
    """Extracts the decision and the new PLANS/INSIGHTS contents from a reply.

    Parameters
    ----------
    str_text : str
        Raw reply.
    model : MarketModel
    int_firm : int
    list_events : list, optional
        Clamp events are appended here.

    Returns
    ----------
    decision : Decision
    str_plans, str_insights : str or None
        None when the reply has no such section.

    Raises
    ----------
    ParseFailure
        Missing decision label, non-numeric payload or negative quantity.
    """
    str_text = str_text or ""
    fl_quantity = _number_after(str_text, STR_LABEL_QUANTITY, [STR_LABEL_PERCENT])
    fl_percent = _number_after(str_text, STR_LABEL_PERCENT, [STR_LABEL_QUANTITY])
    if fl_quantity < 0:
        raise ParseFailure("negative production quantity", str(fl_quantity))

    fl_max_percent = 100.0 * model.spec.invest_fraction_cap
    fl_applied = min(max(fl_percent, 0.0), fl_max_percent)
    if fl_applied != fl_percent:
        logger.warning("Firm %d asked for %s percent investment, clamped to %s",
                       int_firm, fl_percent, fl_applied)
        if list_events is not None:
            list_events.append({"firm": int_firm, "event": "clamp",
                                "requested_percent": fl_percent, "applied_percent": fl_applied})

    str_plans = _section(str_text, STR_LABEL_PLANS, [STR_LABEL_INSIGHTS, STR_LABEL_QUANTITY])
    str_insights = _section(str_text, STR_LABEL_INSIGHTS, [STR_LABEL_QUANTITY, STR_LABEL_PERCENT])
    decision = make_decision(model, int_firm, fl_quantity, fl_applied)
    return decision, str_plans, str_insights


def format_response(decision, str_plans="", str_insights="", str_thoughts=""):
    """Reply in the requested template, e.g. for canned mock replies.
    Numbers are written with repr so they parse back exactly."""
    return (f"My observations and thoughts:\n{str_thoughts}\n\n"
            f"{STR_LABEL_PLANS}\n{str_plans}\n\n"
            f"{STR_LABEL_INSIGHTS}\n{str_insights}\n\n"
            f"{STR_LABEL_QUANTITY}\n{decision.quantity!r}\n\n"
            f"{STR_LABEL_PERCENT}\n{decision.invest_percent!r}\n")


def llm_decide(endpoint, ctx, client, model, int_firm, decision_prev=None, tup_key=None,
               list_events=None):
    """Asks the LLM for one period's decision.

    Parameters
    ----------
    endpoint : LlmEndpointConfig
        max_retries bounds the re-asks on unparseable replies.
    ctx : PromptContext
    client : object with complete(str_prompt, tup_key)
    model : MarketModel
    int_firm : int
    decision_prev : Decision, optional
        Last period's decision, repeated when every attempt fails to parse.
    tup_key : tuple, optional
        (run_id, period, firm) used by the mock client.
    list_events : list, optional
        Retry, clamp and fallback events are appended here.

    Returns
    ----------
    decision : Decision
    str_plans, str_insights : str
        New memory contents; unchanged on fallback or when a section is absent.

    Raises
    ----------
    TransportError
        Propagated from the client.
    """
    str_prompt = render_prompt(ctx)
    str_run, int_period = (tup_key[0], tup_key[1]) if tup_key else ("", 0)
    int_attempts = endpoint.max_retries + 1
    for int_attempt in range(int_attempts):
        str_reply = client.complete(str_prompt, (str_run, int_period, int_firm, int_attempt))
        try:
            decision, str_plans, str_insights = parse_response(str_reply, model, int_firm,
                                                              list_events)
        except ParseFailure as e:
            logger.warning("Firm %d period %d attempt %d: %s", int_firm, int_period,
                           int_attempt + 1, e)
            continue
        if int_attempt > 0 and list_events is not None:
            list_events.append({"firm": int_firm, "event": "retry", "attempts": int_attempt + 1})
        if int_attempt > 0:
            logger.info("Firm %d parsed on attempt %d", int_firm, int_attempt + 1)
        return (decision,
                ctx.plans_text if str_plans is None else str_plans,
                ctx.insights_text if str_insights is None else str_insights)

    if decision_prev is None:
        decision_prev = make_decision(model, int_firm, model.baseline_quantities[int_firm],
                                      100.0 * model.spec.invest_fraction_cap)
    logger.warning("Firm %d period %d: no parseable reply after %d attempts, repeating %s",
                   int_firm, int_period, int_attempts, decision_prev.as_pair())
    if list_events is not None:
        list_events.append({"firm": int_firm, "event": "fallback", "attempts": int_attempts,
                            "quantity": decision_prev.quantity,
                            "invest_percent": decision_prev.invest_percent})
    return decision_prev, ctx.plans_text, ctx.insights_text
