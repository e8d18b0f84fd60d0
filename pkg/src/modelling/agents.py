"""Stateful agents wrapping the decision policies for use inside a run.

Each agent sees only its own Observations. decide() is called once per period
before any same-period decision is known; observe() delivers the period's
feedback afterwards.
"""
import logging
import os

from errors import ConfigError
from modelling.models import best_response as br
from modelling.models import llm_agent
from modelling.models.nash import nash_decide
from modelling.models.scripted import scripted_decide
from objects.decisions import make_decision

logger = logging.getLogger(__name__)


class NashAgent:
    def __init__(self, model, int_firm):
        self.model = model
        self.int_firm = int_firm

    def decide(self, int_period):
        return nash_decide(self.model, self.int_firm), []

    def observe(self, observation):
        pass


class BestResponseAgent:
    """Responds to the opponents' production of the previous period, or to the
    baseline Q_hat - q_hat_i before any period has been played."""

    def __init__(self, model, int_firm):
        self.model = model
        self.int_firm = int_firm
        self.fl_others_prev = model.total_baseline - model.baseline_quantities[int_firm]

    def decide(self, int_period):
        result = br.solve_best_response(self.model, self.int_firm, self.fl_others_prev)
        return result.decision, [{"firm": self.int_firm, "event": "br_path", "path": result.path}]

    def observe(self, observation):
        self.fl_others_prev = observation.total_quantity - observation.own_quantity


class ScriptedAgent:
    def __init__(self, model, int_firm, list_script):
        self.model = model
        self.int_firm = int_firm
        self.list_script = list_script

    def decide(self, int_period):
        return scripted_decide(self.list_script, int_period), []

    def observe(self, observation):
        pass


class LlmAgent:
    """LLM-backed firm. PLANS and INSIGHTS are its only memory between calls;
    when str_memory_dir is set they are also written to disk every period."""

    def __init__(self, model, int_firm, endpoint, client, str_run_id="", str_memory_dir=""):
        self.model = model
        self.int_firm = int_firm
        self.endpoint = endpoint
        self.client = client
        self.str_run_id = str_run_id
        self.str_memory_dir = str_memory_dir
        self.str_plans = ""
        self.str_insights = ""
        self.list_observations = []
        self.decision_prev = None

    def decide(self, int_period):
        list_events = []
        ctx = llm_agent.build_prompt_context(self.model, self.int_firm, self.str_plans,
                                             self.str_insights, self.list_observations)
        decision, self.str_plans, self.str_insights = llm_agent.llm_decide(
            self.endpoint, ctx, self.client, self.model, self.int_firm,
            decision_prev=self.decision_prev,
            tup_key=(self.str_run_id, int_period, self.int_firm),
            list_events=list_events)
        self.decision_prev = decision
        self._persist_memory(int_period)
        return decision, list_events

    def observe(self, observation):
        self.list_observations.append(observation)

    def _persist_memory(self, int_period):
        if not self.str_memory_dir:
            return
        os.makedirs(self.str_memory_dir, exist_ok=True)
        str_stem = os.path.join(self.str_memory_dir, f"firm_{self.int_firm}")
        for str_name, str_content in (("PLANS", self.str_plans), ("INSIGHTS", self.str_insights)):
            with open(f"{str_stem}_{str_name}.txt", "w", encoding="utf-8") as fp:
                fp.write(str_content)
            with open(f"{str_stem}_{str_name}_HISTORY.txt", "a", encoding="utf-8") as fp:
                fp.write(f"=== PERIOD {int_period} ===\n{str_content}\n\n")


def resolve_script(model, int_firm, tup_entries):
    """Turns script entries into Decisions for one firm.

    Entries give either an absolute "quantity" or a "quantity_fraction" of the
    firm's baseline, plus "invest_percent".
    """
    list_script = []
    for dict_entry in tup_entries:
        if "quantity" in dict_entry:
            fl_quantity = float(dict_entry["quantity"])
        elif "quantity_fraction" in dict_entry:
            fl_quantity = float(dict_entry["quantity_fraction"]) * model.baseline_quantities[int_firm]
        else:
            raise ConfigError("Script entry needs quantity or quantity_fraction: " + str(dict_entry))
        fl_percent = float(dict_entry.get("invest_percent", 100.0 * model.spec.invest_fraction_cap))
        list_script.append(make_decision(model, int_firm, fl_quantity, fl_percent))
    return list_script


def create_agent(agent_kind, model, int_firm, endpoint=None, client=None, str_run_id="",
                 str_memory_dir=""):
    """Shell function for selecting an agent by its configured kind.

    Parameters
    ----------
    agent_kind : AgentKind
    model : MarketModel
    int_firm : int
    endpoint : LlmEndpointConfig, optional
        Required for LLM agents.
    client : chat client, optional
        Required for LLM agents.

    Returns
    ----------
    agent
        Object with decide(int_period) and observe(observation).
    """
    str_kind = agent_kind.kind
    if str_kind == "nash":
        return NashAgent(model, int_firm)
    elif str_kind == "best_response":
        return BestResponseAgent(model, int_firm)
    elif str_kind == "scripted":
        return ScriptedAgent(model, int_firm, resolve_script(model, int_firm, agent_kind.script))
    elif str_kind == "llm":
        if endpoint is None or client is None:
            raise ConfigError(f"LLM agent for firm {int_firm} needs an endpoint and a client")
        return LlmAgent(model, int_firm, endpoint, client, str_run_id, str_memory_dir)
    raise ConfigError("Unknown agent kind " + repr(str_kind))
