import os

import pytest

from objects.market import MarketSpec, derive_model
from objects.run_records import AgentKind, RunConfig

STR_REPO_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
STR_PRESETS_DIR = os.path.join(STR_REPO_DIR, "in_data", "presets")

TUP_TWO_FIRM = (150.0, 150.0)
TUP_FIVE_FIRM = (350.0, 250.0, 200.0, 150.0, 50.0)
TUP_PERCENT = (35.0, 25.0, 20.0, 15.0, 5.0)


@pytest.fixture
def two_firm_model():
    return derive_model(MarketSpec(TUP_TWO_FIRM))


@pytest.fixture
def five_firm_model():
    return derive_model(MarketSpec(TUP_FIVE_FIRM))


@pytest.fixture
def percent_model():
    return derive_model(MarketSpec(TUP_PERCENT))


@pytest.fixture
def presets_dir():
    return STR_PRESETS_DIR


def scripted(list_entries, str_source="test"):
    return AgentKind("scripted", tuple(list_entries), str_source)


def make_run_config(tup_quantities, list_roster, tmp_path, **kwargs):
    return RunConfig(market=MarketSpec(tuple(tup_quantities)), roster=tuple(list_roster),
                     output_path=str(tmp_path), **kwargs)


def history_of(model, list_periods):
    """Resolves a list of periods, each a list of (quantity, invest_percent)
    pairs in firm order."""
    from objects.decisions import make_decision
    from simulation.engine import step
    return [step(model, [make_decision(model, i, q, pct) for i, (q, pct) in enumerate(pairs)], t)
            for t, pairs in enumerate(list_periods)]
