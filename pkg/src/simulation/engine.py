"""Repeated-game engine: simultaneous decisions, market resolution, feedback.

A run is a sequence of periods separated by a barrier. Within a period every
agent decides from the same history, the market resolves all decisions at
once, and each agent then receives its own Observation. Every PeriodRecord is
on disk before the next period starts.
"""
import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict

from errors import MarketSimError, MarketSpecError, QuantityFloorError, RunAborted
from modelling.agents import LlmAgent, create_agent
from modelling.llm_client import create_chat_client
from modelling.models.llm_agent import DICT_HISTORY_PRECISION
from objects.decisions import Observation
from objects.market import derive_model, model_to_dict, price, unit_cost
from objects.run_records import (PeriodRecord, RunResult, Termination, config_digest,
                                 run_id_from_digest, validate_run_config)
from simulation.run_log import RunLogWriter

logger = logging.getLogger(__name__)

FL_QUANTITY_FLOOR = 1e-6


def step(model, list_decisions, int_period=0):
    """Resolves one period.

    Parameters
    ----------
    model : MarketModel
    list_decisions : list(Decision)
        One decision per firm, in firm order.
    int_period : int, default=0

    Returns
    ----------
    record : PeriodRecord
        Unit costs, total production, price and profits. Flags are empty.

    Raises
    ----------
    MarketSpecError
        If the number of decisions does not match the number of firms.
    QuantityFloorError
        If total production is below 1e-6 * Q_hat.
    """
    if len(list_decisions) != model.n_firms:
        raise MarketSpecError(
            f"Expected {model.n_firms} decisions, got {len(list_decisions)}")
    fl_total = float(sum(d.quantity for d in list_decisions))
    fl_floor = FL_QUANTITY_FLOOR * model.total_baseline
    if fl_total < fl_floor:
        raise QuantityFloorError(
            f"Total production {fl_total} in period {int_period} is below the floor {fl_floor}")
    fl_price = price(model, fl_total)
    list_costs = [unit_cost(model, i, d.investment) for i, d in enumerate(list_decisions)]
    list_profits = [(fl_price - fl_cost) * d.quantity - d.investment
                    for d, fl_cost in zip(list_decisions, list_costs)]
    return PeriodRecord(
        period_index=int_period,
        decisions=list(list_decisions),
        unit_costs=list_costs,
        total_quantity=fl_total,
        price=fl_price,
        profits=list_profits,
        flags=[],
    )


def observations_from_record(record):
    """Per-firm feedback of one period."""
    return [
        Observation(
            period_index=record.period_index,
            own_quantity=d.quantity,
            own_invest_percent=d.invest_percent,
            own_unit_cost=record.unit_costs[i],
            total_quantity=record.total_quantity,
            market_price=record.price,
            own_profit=record.profits[i],
        )
        for i, d in enumerate(record.decisions)
    ]


def _collect_decisions(list_agents, int_period):
    """Asks every agent for its decision. LLM agents are queried concurrently;
    results are applied in firm order."""
    list_llm = [i for i, agent in enumerate(list_agents) if isinstance(agent, LlmAgent)]
    list_results = [None] * len(list_agents)
    if len(list_llm) > 1:
        with ThreadPoolExecutor(max_workers=len(list_llm)) as executor:
            dict_futures = {i: executor.submit(list_agents[i].decide, int_period) for i in list_llm}
            for i, future in dict_futures.items():
                list_results[i] = future.result()
    for i, agent in enumerate(list_agents):
        if list_results[i] is None:
            list_results[i] = agent.decide(int_period)
    list_decisions = [tup[0] for tup in list_results]
    list_flags = [dict_event for tup in list_results for dict_event in tup[1]]
    return list_decisions, list_flags


def build_header(config, model, str_digest, str_run_id):
    return {
        "run_id": str_run_id,
        "config_digest": str_digest,
        "name": config.name,
        "market": asdict(config.market),
        "model": model_to_dict(model),
        "roster": [agent_kind.label for agent_kind in config.roster],
        "max_periods": config.max_periods,
        "stall_window": config.stall_window,
        "seed": config.seed,
        "history_precision": DICT_HISTORY_PRECISION,
    }


def run_directory(config, str_run_id):
    return os.path.join(config.output_path, str_run_id)


def run(config, client=None):
    """Executes one repeated-game run.

    Parameters
    ----------
    config : RunConfig
    client : chat client, optional
        Used by LLM agents. Built from config.endpoint / config.mock_llm_dir
        when omitted.

    Returns
    ----------
    result : RunResult

    Raises
    ----------
    ConfigError
        If the config is invalid.
    RunAborted
        If a period cannot be completed (endpoint failure, degenerate market
        state). The periods played so far are kept on the exception and in the
        run log.
    """
    validate_run_config(config)
    model = derive_model(config.market)
    str_digest = config_digest(config)
    str_run_id = run_id_from_digest(str_digest)
    str_run_dir = run_directory(config, str_run_id)
    str_log_path = os.path.join(str_run_dir, f"history_{str_run_id}.jsonl")

    if client is None and any(a.kind == "llm" for a in config.roster):
        client = create_chat_client(config.endpoint, config.mock_llm_dir)
    list_agents = [
        create_agent(agent_kind, model, i, endpoint=config.endpoint, client=client,
                     str_run_id=str_run_id, str_memory_dir=os.path.join(str_run_dir, "memory"))
        for i, agent_kind in enumerate(config.roster)
    ]

    logger.info("Starting run %s (%s) with roster %s", str_run_id, config.name or "unnamed",
                [a.label for a in config.roster])
    fl_start = time.perf_counter()
    list_history = []
    termination = Termination.MAX_PERIODS
    int_unchanged = 0
    with RunLogWriter(str_log_path, build_header(config, model, str_digest, str_run_id)) as writer:
        for int_period in range(config.max_periods):
            try:
                list_decisions, list_flags = _collect_decisions(list_agents, int_period)
                record = step(model, list_decisions, int_period)
            except MarketSimError as e:
                logger.error("Run %s aborted in period %d: %s", str_run_id, int_period, e)
                raise RunAborted(f"Run {str_run_id} aborted in period {int_period}: {e}",
                                 list_history, str_log_path, e) from e
            record.flags = list_flags
            writer.append(record)
            list_history.append(record)
            logger.debug("Period %d: price %.4f, total production %.2f", int_period,
                         record.price, record.total_quantity)

            for agent, observation in zip(list_agents, observations_from_record(record)):
                agent.observe(observation)

            if len(list_history) > 1:
                bool_same = ([d.as_pair() for d in list_history[-2].decisions]
                             == [d.as_pair() for d in record.decisions])
                int_unchanged = int_unchanged + 1 if bool_same else 0
            if config.stall_window and int_unchanged >= config.stall_window:
                termination = Termination.STALLED
                logger.info("Run %s stalled after period %d", str_run_id, int_period)
                break

    fl_wall = time.perf_counter() - fl_start
    logger.info("Finished run %s: %d periods, %s, %.2f s", str_run_id, len(list_history),
                termination.value, fl_wall)
    return RunResult(
        config_digest=str_digest,
        run_id=str_run_id,
        model=model,
        history=list_history,
        termination=termination,
        wall_clock=fl_wall,
        roster_labels=[a.label for a in config.roster],
        log_path=str_log_path,
    )


def write_run_summary(result, str_path):
    """JSON summary of a run. Wall-clock time is left out so that repeated
    runs produce identical files."""
    record_last = result.history[-1]
    dict_summary = {
        "run_id": result.run_id,
        "config_digest": result.config_digest,
        "roster": result.roster_labels,
        "termination": result.termination.value,
        "periods": len(result.history),
        "last_period": {
            "quantities": [d.quantity for d in record_last.decisions],
            "invest_percents": [d.invest_percent for d in record_last.decisions],
            "price": record_last.price,
            "profits": record_last.profits,
        },
        "log_path": os.path.basename(result.log_path),
        "model": model_to_dict(result.model),
    }
    with open(str_path, "w", encoding="utf-8") as fp:
        json.dump(dict_summary, fp, indent=2, sort_keys=True)
        fp.write("\n")
    return dict_summary
