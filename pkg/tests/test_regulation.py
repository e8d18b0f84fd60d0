import pytest

from conftest import TUP_FIVE_FIRM, make_run_config, scripted
from errors import ConfigError
from objects.run_records import AgentKind
from simulation import engine
from simulation.regulation import regulated_firms, regulation_roster

COLLUDE = scripted([{"quantity_fraction": 0.5, "invest_percent": 20.0}], "collude.json")


def five_firm_colluders(tmp_path):
    return make_run_config(TUP_FIVE_FIRM, [COLLUDE] * 5, tmp_path, max_periods=60)


def test_regulated_firms_by_share():
    assert regulated_firms(TUP_FIVE_FIRM, 1) == [0]
    assert regulated_firms(TUP_FIVE_FIRM, 2) == [0, 1]
    assert regulated_firms((50.0, 350.0, 250.0), 2) == [1, 2]
    assert regulated_firms((100.0, 100.0, 50.0), 1) == [0]


def test_regulation_roster(tmp_path):
    base = five_firm_colluders(tmp_path)
    assert regulation_roster(base, 0) == base
    config = regulation_roster(base, 2)
    assert [a.kind for a in config.roster] == ["best_response", "best_response", "scripted",
                                               "scripted", "scripted"]
    assert config.market == base.market
    with pytest.raises(ConfigError):
        regulation_roster(base, 6)
    with pytest.raises(ConfigError):
        regulation_roster(base, -1)


def test_collusion_without_regulation(tmp_path):
    result = engine.run(five_firm_colluders(tmp_path))
    for record in result.history:
        assert record.price == pytest.approx(2.0)


def test_regulating_top_firm(tmp_path):
    result = engine.run(regulation_roster(five_firm_colluders(tmp_path), 1))
    for record in result.history[1:]:
        assert record.decisions[0].quantity == pytest.approx(382.107, abs=1e-3)
        assert record.price == pytest.approx(1.41421, abs=1e-5)


def test_prices_fall_with_more_regulation(tmp_path):
    list_prices = []
    for int_top_k in (0, 1, 2):
        result = engine.run(regulation_roster(five_firm_colluders(tmp_path / str(int_top_k)),
                                              int_top_k))
        list_prices.append(result.history[-1].price)
    assert list_prices[0] > list_prices[1] > list_prices[2]
    assert list_prices[2] == pytest.approx(1.140, abs=5e-3)


def test_full_regulation_of_duopoly_reaches_nash(tmp_path):
    base = make_run_config((150.0, 150.0), [scripted([{"quantity": 75.0}])] * 2, tmp_path,
                           max_periods=30)
    result = engine.run(regulation_roster(base, 2))
    assert [a.kind for a in regulation_roster(base, 2).roster] == ["best_response"] * 2
    for decision in result.history[-1].decisions:
        assert decision.quantity == pytest.approx(150.0, rel=0.01)
        assert decision.invest_percent == 20.0
    assert AgentKind("best_response").label == "best_response"


def test_regulating_every_firm_restores_baseline_price(tmp_path):
    config = regulation_roster(five_firm_colluders(tmp_path), 5)
    assert [a.kind for a in config.roster] == ["best_response"] * 5
    result = engine.run(config)
    assert result.history[-1].price == pytest.approx(1.0, rel=0.01)
