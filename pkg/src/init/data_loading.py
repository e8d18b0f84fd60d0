import json
import logging
import os

import toml

from errors import ConfigError
from modelling.llm_client import endpoint_from_dict
from objects.market import spec_from_dict
from objects.run_records import AgentKind, RunConfig
from utilities import print_dictionary_recursive

logger = logging.getLogger(__name__)

DICT_ROSTER_ALIASES = {
    "nash": "nash",
    "best_response": "best_response",
    "br": "best_response",
    "llm": "llm",
}

DICT_DEFAULTS = {
    "run": {"max_periods": 150, "stall_window": 10, "seed": 0, "output_path": "out_data/"},
    "analysis": {"convergence_window": 100, "convergence_band": 0.10,
                 "convergence_rule": "containment", "summary_last_n": 50,
                 "average_price_last_n": 100, "br_update_rule": "simultaneous"},
    "validation": {"grid_radius": 0.5, "grid_points": 201, "nash_tolerance": 1e-9,
                   "br_starts": 100, "br_start_low": 0.3, "br_start_high": 2.0,
                   "br_tolerance": 0.01, "br_max_iter": 50, "br_update_rule": "simultaneous",
                   "br_max_mean_iterations": 3.0, "investment_states": 500,
                   "investment_quantity_low": 0.4, "investment_quantity_high": 2.0},
    "export": {"last_n": 50},
}


def load_config(str_config_path):
    """Loads a config.toml.

    Returns
    ----------
    dict_config : dict
        Dictionary containing loaded configuration-file.

    Raises
    ----------
    FileNotFoundError
        If the file does not exist.
    ConfigError
        If the file is not valid TOML.

    Notes
    ----------
    Requires toml as dependency.
    """
    try:
        dict_config = toml.load(str_config_path)
    except toml.TomlDecodeError as e:
        raise ConfigError(f"Could not parse {str_config_path}: {e}") from e
    logger.debug("Loaded config %s", str_config_path)
    return dict_config


def parse_override_value(str_value):
    """TOML scalar or array if it parses as one, plain string otherwise."""
    try:
        return toml.loads("v = " + str_value)["v"]
    except toml.TomlDecodeError:
        return str_value


def apply_overrides(dict_config, list_overrides):
    """Applies "section.key=value" overrides in place and returns the config."""
    for str_override in list_overrides or []:
        if "=" not in str_override:
            raise ConfigError("Override must look like section.key=value: " + str_override)
        str_path, str_value = str_override.split("=", 1)
        list_keys = str_path.strip().split(".")
        dict_target = dict_config
        for str_key in list_keys[:-1]:
            dict_target = dict_target.setdefault(str_key, {})
            if not isinstance(dict_target, dict):
                raise ConfigError("Override path runs through a non-section: " + str_path)
        dict_target[list_keys[-1]] = parse_override_value(str_value.strip())
    return dict_config


def get_section(dict_config, str_section):
    """Config section with defaults filled in."""
    dict_section = dict(DICT_DEFAULTS.get(str_section, {}))
    dict_section.update(dict_config.get(str_section, {}) or {})
    return dict_section


def resolve_path(str_path, str_base_dir):
    """Paths are looked up relative to the config file first, then the
    working directory."""
    if os.path.isabs(str_path):
        return str_path
    str_candidate = os.path.join(str_base_dir or "", str_path)
    if os.path.exists(str_candidate):
        return str_candidate
    return str_path


def load_script(str_path, str_base_dir=""):
    """Loads a script of decisions from JSON.

    The file holds a list whose entries are either objects with "quantity" or
    "quantity_fraction" (of the firm's baseline) and "invest_percent", or
    [quantity, invest_percent] pairs.

    Returns
    ----------
    tup_entries : tuple(dict)
    """
    str_full = resolve_path(str_path, str_base_dir)
    try:
        with open(str_full, "r", encoding="utf-8") as fp:
            list_raw = json.load(fp)
    except FileNotFoundError:
        raise ConfigError("Script file not found: " + str_path)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Script {str_path} is not valid JSON: {e}") from e
    if not isinstance(list_raw, list) or not list_raw:
        raise ConfigError(f"Script {str_path} must be a non-empty list")
    list_entries = []
    for entry in list_raw:
        if isinstance(entry, (list, tuple)) and len(entry) == 2:
            list_entries.append({"quantity": float(entry[0]), "invest_percent": float(entry[1])})
        elif isinstance(entry, dict):
            list_entries.append(dict(entry))
        else:
            raise ConfigError(f"Unreadable script entry in {str_path}: {entry!r}")
    return tuple(list_entries)


def parse_roster(roster, str_base_dir=""):
    """Parses a roster given as "nash,best_response,scripted:file.json,llm" or
    as a list of such tokens.

    Returns
    ----------
    tup_roster : tuple(AgentKind)
    """
    list_tokens = roster.split(",") if isinstance(roster, str) else list(roster)
    list_roster = []
    for str_token in list_tokens:
        str_token = str(str_token).strip()
        if str_token.startswith("scripted:"):
            str_source = str_token[len("scripted:"):]
            list_roster.append(AgentKind("scripted", load_script(str_source, str_base_dir),
                                         str_source))
        elif str_token in DICT_ROSTER_ALIASES:
            list_roster.append(AgentKind(DICT_ROSTER_ALIASES[str_token]))
        else:
            raise ConfigError("Unknown roster entry " + repr(str_token))
    return tuple(list_roster)


def market_spec_from_config(dict_config):
    if "market" not in dict_config:
        raise ConfigError("Config has no [market] section")
    try:
        return spec_from_dict(dict_config["market"])
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError("Invalid [market] section: " + str(e)) from e


def build_run_config(dict_config, str_config_dir="", str_mock_llm_dir=""):
    """Assembles a RunConfig from a loaded (and overridden) config.

    Raises
    ----------
    ConfigError
        If a section is missing or malformed.
    """
    spec = market_spec_from_config(dict_config)
    dict_run = get_section(dict_config, "run")
    if "roster" not in dict_run:
        raise ConfigError("Config has no roster in [run]")
    tup_roster = parse_roster(dict_run["roster"], str_config_dir)
    endpoint = endpoint_from_dict(dict_config.get("llm")) if "llm" in dict_config or any(
        a.kind == "llm" for a in tup_roster) else None
    try:
        return RunConfig(
            market=spec,
            roster=tup_roster,
            max_periods=int(dict_run["max_periods"]),
            stall_window=int(dict_run["stall_window"]),
            seed=int(dict_run["seed"]),
            output_path=str(dict_run["output_path"]),
            endpoint=endpoint,
            mock_llm_dir=str_mock_llm_dir or str(dict_run.get("mock_llm_dir", "")),
            name=str(dict_config.get("name", "")),
        )
    except (TypeError, ValueError) as e:
        raise ConfigError("Invalid [run] section: " + str(e)) from e


def print_config(dict_config):
    print("Loaded the following config-file:")
    print("----------------------------------------")
    print_dictionary_recursive(dict_config)
    print("----------------------------------------")
