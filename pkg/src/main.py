"""Command-line entry point of the market simulator.

    python src/main.py derive   --config in_data/presets/two_firm.toml
    python src/main.py run      --config in_data/presets/five_firm.toml --regulate-top 2
    python src/main.py validate --config in_data/presets/five_firm.toml
    python src/main.py analyze  out_data/<run_id>/history_<run_id>.jsonl
    python src/main.py export   out_data/
"""
import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import utilities
from analysis import history_analysis, validation
from errors import (ConfigError, MarketSimError, MarketSpecError, RunAborted,
                    SchemaVersionError, ShortSeriesError, TransportError)
from init import data_loading
from objects.market import derive_model, model_to_dict
from objects.run_records import Termination, with_seed
from plot_data import export_plot_data
from simulation import engine
from simulation.regulation import regulation_roster

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 3
EXIT_IO_ERROR = 4
EXIT_TRANSPORT_ERROR = 5
EXIT_VALIDATION_FAILED = 6
EXIT_SCHEMA_ERROR = 7
EXIT_MARKET_ERROR = 8
EXIT_DATA_ERROR = 9
EXIT_STALLED = 10


def print_banner(str_title):
    print()
    print("#" * 79)
    print("##" + str_title.center(75) + "##")
    print("#" * 79)
    print()


def load_merged_config(args):
    """Loads every --config file in order (later files win per key) and applies
    the --set overrides. Returns the config and the directory of the first file."""
    dict_config = {}
    list_paths = args.config or []
    for str_path in list_paths:
        for str_section, value in data_loading.load_config(str_path).items():
            if isinstance(value, dict) and isinstance(dict_config.get(str_section), dict):
                dict_config[str_section].update(value)
            else:
                dict_config[str_section] = value
    data_loading.apply_overrides(dict_config, args.set)
    if args.verbose:
        data_loading.print_config(dict_config)
    str_config_dir = os.path.dirname(os.path.abspath(list_paths[0])) if list_paths else ""
    return dict_config, str_config_dir


def require_config(args):
    if not args.config:
        raise ConfigError(f"'{args.command}' needs --config")
    return load_merged_config(args)


def output_dir(args, dict_config):
    if args.out:
        return args.out
    return str(data_loading.get_section(dict_config, "run")["output_path"])


# Subcommands

def cmd_derive(args):
    dict_config, _ = require_config(args)
    model = derive_model(data_loading.market_spec_from_config(dict_config))
    utilities.print_table(
        ["firm", "q_hat", "w_hat", "pi_hat", "b_hat"],
        [(i, model.baseline_quantities[i], model.baseline_costs[i], model.baseline_profits[i],
          model.baseline_investments[i]) for i in range(model.n_firms)])
    print()
    print("A  =", model.scale_A)
    print("k1 =", model.cobb_k1, " k2 =", model.cobb_k2, " k3 =", model.cobb_k3)
    str_path = os.path.join(output_dir(args, dict_config), "derived_model.json")
    utilities.write_json(model_to_dict(model), str_path)
    print("Successfully stored derived model in", str_path)
    return EXIT_OK


def _execute_run(config):
    """Runs one config and reports the outcome as plain data, so that it can
    travel back from a worker process."""
    try:
        result = engine.run(config)
    except RunAborted as e:
        int_code = (EXIT_TRANSPORT_ERROR if isinstance(e.exc_cause, TransportError)
                    else EXIT_MARKET_ERROR)
        return {"seed": config.seed, "exit_code": int_code, "message": str(e),
                "log_path": e.str_log_path, "periods": len(e.list_history)}
    except MarketSimError as e:
        return {"seed": config.seed, "exit_code": EXIT_CONFIG_ERROR, "message": str(e),
                "log_path": "", "periods": 0}
    str_summary = os.path.join(os.path.dirname(result.log_path), f"summary_{result.run_id}.json")
    engine.write_run_summary(result, str_summary)
    return {"seed": config.seed, "exit_code": EXIT_OK, "run_id": result.run_id,
            "termination": result.termination.value, "periods": len(result.history),
            "log_path": result.log_path, "summary_path": str_summary}


def cmd_run(args):
    dict_config, str_config_dir = require_config(args)
    dict_run = dict_config.setdefault("run", {})
    if args.roster:
        dict_run["roster"] = args.roster
    if args.periods is not None:
        dict_run["max_periods"] = args.periods
    if args.seed is not None:
        dict_run["seed"] = args.seed
    if args.out:
        dict_run["output_path"] = args.out
    config = data_loading.build_run_config(dict_config, str_config_dir, args.mock_llm or "")
    if args.regulate_top is not None:
        config = regulation_roster(config, args.regulate_top)

    list_configs = [with_seed(config, config.seed + k) for k in range(max(args.repeats, 1))]
    print("Starting", len(list_configs), "run(s) with roster",
          ", ".join(a.label for a in config.roster))
    if args.jobs > 1 and len(list_configs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as executor:
            list_outcomes = list(executor.map(_execute_run, list_configs))
    else:
        list_outcomes = [_execute_run(c) for c in list_configs]

    # A failed run outranks a stalled one
    list_failures = []
    bool_stalled = False
    for dict_outcome in list_outcomes:
        if dict_outcome["exit_code"] != EXIT_OK:
            print("Run with seed", dict_outcome["seed"], "failed:", dict_outcome["message"])
            list_failures.append(dict_outcome["exit_code"])
            continue
        print("Successfully finished run", dict_outcome["run_id"] + ":",
              dict_outcome["termination"], "after", dict_outcome["periods"], "periods")
        print("  History:", dict_outcome["log_path"])
        print("  Summary:", dict_outcome["summary_path"])
        bool_stalled |= dict_outcome["termination"] == Termination.STALLED.value
    if list_failures:
        return list_failures[0]
    return EXIT_STALLED if bool_stalled else EXIT_OK


def cmd_validate(args):
    dict_config, _ = require_config(args)
    model = derive_model(data_loading.market_spec_from_config(dict_config))
    dict_report = validation.validate_model(model, data_loading.get_section(dict_config,
                                                                            "validation"))
    for dict_check in dict_report["checks"]:
        print(f"{dict_check['check']:<28}", "PASS" if dict_check["passed"] else "FAIL")
        for str_key, value in sorted(dict_check.items()):
            if str_key not in ("check", "passed", "firms"):
                print("    ", str_key + ":", value)
    str_path = os.path.join(output_dir(args, dict_config), "validation_report.json")
    utilities.write_json(dict(dict_report, market=model_to_dict(model)), str_path)
    if not dict_report["passed"]:
        print("Validation FAILED, report stored in", str_path)
        return EXIT_VALIDATION_FAILED
    print("Successfully validated the market model, report stored in", str_path)
    return EXIT_OK


def cmd_analyze(args):
    dict_config = load_merged_config(args)[0] if args.config else data_loading.apply_overrides(
        {}, args.set)
    str_out = args.out or os.path.join(os.path.dirname(os.path.abspath(args.history_path)),
                                       "analysis")
    history_analysis.analyze_history(args.history_path, dict_config, str_out)
    return EXIT_OK


def cmd_export(args):
    dict_config = load_merged_config(args)[0] if args.config else data_loading.apply_overrides(
        {}, args.set)
    str_base = (args.history_path if os.path.isdir(args.history_path)
                else os.path.dirname(os.path.abspath(args.history_path)))
    str_out = args.out or os.path.join(str_base, "plot_data")
    export_plot_data(args.history_path, str_out,
                     int(data_loading.get_section(dict_config, "export")["last_n"]))
    return EXIT_OK


DICT_COMMANDS = {
    "derive": cmd_derive,
    "run": cmd_run,
    "validate": cmd_validate,
    "analyze": cmd_analyze,
    "export": cmd_export,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="main.py",
                                     description="Augmented Cournot market simulator")
    subparsers = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", action="append",
                        help="TOML config file; may be given several times, later files win")
    common.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override a config value")
    common.add_argument("--out", help="output directory")
    common.add_argument("--verbose", action="store_true", help="log at DEBUG level")

    subparsers.add_parser("derive", parents=[common], help="print the baseline equilibrium")
    parser_run = subparsers.add_parser("run", parents=[common], help="simulate a repeated game")
    parser_run.add_argument("--roster", help="comma-separated agent kinds, one per firm")
    parser_run.add_argument("--regulate-top", type=int, dest="regulate_top",
                            help="replace the K largest firms by best-response agents")
    parser_run.add_argument("--periods", type=int, help="maximum number of periods")
    parser_run.add_argument("--seed", type=int)
    parser_run.add_argument("--repeats", type=int, default=1,
                            help="number of runs with consecutive seeds")
    parser_run.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    parser_run.add_argument("--mock-llm", dest="mock_llm", metavar="DIR",
                            help="replay LLM replies from a directory instead of an endpoint")
    subparsers.add_parser("validate", parents=[common], help="numerically validate the model")
    for str_name, str_help in (("analyze", "analyze a run log"),
                               ("export", "export plot data of run logs")):
        parser_sub = subparsers.add_parser(str_name, parents=[common], help=str_help)
        parser_sub.add_argument("history_path", help="run log, or directory of run logs")
    return parser


def main(list_argv=None):
    args = build_parser().parse_args(list_argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    print_banner("Augmented Cournot Market Simulator")
    try:
        return DICT_COMMANDS[args.command](args)
    except SchemaVersionError as e:
        logger.error("%s", e)
        return EXIT_SCHEMA_ERROR
    except ShortSeriesError as e:
        logger.error("%s", e)
        return EXIT_DATA_ERROR
    except (ConfigError, MarketSpecError) as e:
        logger.error("%s", e)
        return EXIT_CONFIG_ERROR
    except TransportError as e:
        logger.error("%s", e)
        return EXIT_TRANSPORT_ERROR
    except OSError as e:
        logger.error("%s", e)
        return EXIT_IO_ERROR


if __name__ == "__main__":
    sys.exit(main())
