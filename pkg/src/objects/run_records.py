"""Run configuration, per-period records and run results."""
import hashlib
import json
from dataclasses import dataclass, field, asdict, replace
from enum import Enum

from errors import ConfigError
from objects.decisions import decision_from_dict, decision_to_dict

TUP_AGENT_KINDS = ("nash", "best_response", "scripted", "llm")


class Termination(str, Enum):
    MAX_PERIODS = "MaxPeriods"
    STALLED = "Stalled"


@dataclass(frozen=True)
class AgentKind:
    """Policy controlling one firm.

    Scripted agents carry their script entries, each a dict with either
    "quantity" or "quantity_fraction" (of the firm's baseline) and
    "invest_percent".
    """
    kind: str
    script: tuple = ()
    source: str = ""

    @property
    def label(self):
        if self.kind == "scripted" and self.source:
            return "scripted:" + self.source
        return self.kind


@dataclass(frozen=True)
class RunConfig:
    market: object
    roster: tuple
    max_periods: int = 150
    stall_window: int = 10
    seed: int = 0
    output_path: str = "out_data/"
    endpoint: object = None
    mock_llm_dir: str = ""
    name: str = ""


@dataclass
class PeriodRecord:
    period_index: int
    decisions: list
    unit_costs: list
    total_quantity: float
    price: float
    profits: list
    flags: list = field(default_factory=list)


@dataclass
class RunResult:
    config_digest: str
    run_id: str
    model: object
    history: list
    termination: Termination
    wall_clock: float
    roster_labels: list = field(default_factory=list)
    log_path: str = ""


def validate_run_config(config):
    """Raises ConfigError unless the roster matches the market and the run
    lengths are sensible."""
    if len(config.roster) != len(config.market.baseline_quantities):
        raise ConfigError(
            f"Roster has {len(config.roster)} agents but the market has "
            f"{len(config.market.baseline_quantities)} firms")
    for agent_kind in config.roster:
        if agent_kind.kind not in TUP_AGENT_KINDS:
            raise ConfigError("Unknown agent kind " + repr(agent_kind.kind))
        if agent_kind.kind == "scripted" and not agent_kind.script:
            raise ConfigError("Scripted agent without script entries: " + agent_kind.label)
    if config.max_periods < 1:
        raise ConfigError("max_periods must be at least 1, got " + str(config.max_periods))
    if config.stall_window < 0:
        raise ConfigError("stall_window must be >= 0, got " + str(config.stall_window))
    if any(agent_kind.kind == "llm" for agent_kind in config.roster) and config.endpoint is None:
        raise ConfigError("Roster contains LLM agents but no [llm] endpoint is configured")


def config_to_canonical_dict(config):
    """Content of a run config that determines its outcome."""
    dict_content = {
        "market": asdict(config.market),
        "roster": [{"kind": a.kind, "script": list(a.script)} for a in config.roster],
        "max_periods": config.max_periods,
        "stall_window": config.stall_window,
        "seed": config.seed,
    }
    if any(a.kind == "llm" for a in config.roster) and config.endpoint is not None:
        dict_endpoint = asdict(config.endpoint)
        dict_endpoint.pop("api_key_env", None)
        dict_content["llm"] = dict_endpoint
    return dict_content


def config_digest(config):
    """sha256 of the canonical JSON of the config content and seed."""
    str_canonical = json.dumps(config_to_canonical_dict(config), sort_keys=True,
                               separators=(",", ":"))
    return hashlib.sha256(str_canonical.encode("utf-8")).hexdigest()


def run_id_from_digest(str_digest):
    return str_digest[:12]


def with_seed(config, int_seed):
    return replace(config, seed=int_seed)


def record_to_dict(record):
    return {
        "period_index": record.period_index,
        "decisions": [decision_to_dict(d) for d in record.decisions],
        "unit_costs": list(record.unit_costs),
        "total_quantity": record.total_quantity,
        "price": record.price,
        "profits": list(record.profits),
        "flags": list(record.flags),
    }


def record_from_dict(dict_record):
    return PeriodRecord(
        period_index=int(dict_record["period_index"]),
        decisions=[decision_from_dict(d) for d in dict_record["decisions"]],
        unit_costs=[float(x) for x in dict_record["unit_costs"]],
        total_quantity=float(dict_record["total_quantity"]),
        price=float(dict_record["price"]),
        profits=[float(x) for x in dict_record["profits"]],
        flags=list(dict_record.get("flags", [])),
    )
