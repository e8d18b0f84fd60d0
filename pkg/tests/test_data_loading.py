import os

import pytest

from errors import ConfigError
from init import data_loading


def test_overrides_parse_toml_values():
    dict_config = {"run": {"max_periods": 150}}
    data_loading.apply_overrides(dict_config, ["run.max_periods=20", "run.roster=[\"nash\", \"br\"]",
                                               "llm.model_name=gpt-4o-mini", "name=x"])
    assert dict_config["run"]["max_periods"] == 20
    assert dict_config["run"]["roster"] == ["nash", "br"]
    assert dict_config["llm"]["model_name"] == "gpt-4o-mini"
    assert dict_config["name"] == "x"
    with pytest.raises(ConfigError):
        data_loading.apply_overrides(dict_config, ["run.max_periods"])


def test_section_defaults():
    dict_section = data_loading.get_section({"analysis": {"convergence_window": 50}}, "analysis")
    assert dict_section["convergence_window"] == 50
    assert dict_section["convergence_band"] == 0.10
    assert dict_section["convergence_rule"] == "containment"


def test_parse_roster(tmp_path):
    (tmp_path / "script.json").write_text('[[75, 20], {"quantity_fraction": 0.5}]',
                                          encoding="utf-8")
    tup_roster = data_loading.parse_roster("nash, br,scripted:script.json,llm", str(tmp_path))
    assert [a.kind for a in tup_roster] == ["nash", "best_response", "scripted", "llm"]
    assert tup_roster[2].script == ({"quantity": 75.0, "invest_percent": 20.0},
                                    {"quantity_fraction": 0.5})
    assert tup_roster[2].label == "scripted:script.json"
    with pytest.raises(ConfigError):
        data_loading.parse_roster("nash,oracle")
    with pytest.raises(ConfigError):
        data_loading.parse_roster("scripted:missing.json", str(tmp_path))


def test_bad_script_files(tmp_path):
    (tmp_path / "empty.json").write_text("[]", encoding="utf-8")
    (tmp_path / "broken.json").write_text("[{", encoding="utf-8")
    for str_name in ("empty.json", "broken.json"):
        with pytest.raises(ConfigError):
            data_loading.load_script(str_name, str(tmp_path))


def test_build_run_config_from_preset(presets_dir):
    str_path = os.path.join(presets_dir, "five_firm.toml")
    config = data_loading.build_run_config(data_loading.load_config(str_path), presets_dir)
    assert config.market.baseline_quantities == (350.0, 250.0, 200.0, 150.0, 50.0)
    assert [a.label for a in config.roster] == ["scripted:collude.json"] * 5
    assert config.roster[0].script == ({"quantity_fraction": 0.5, "invest_percent": 20.0},)
    assert config.max_periods == 300
    assert config.endpoint is None


def test_llm_preset_has_endpoint(presets_dir):
    str_path = os.path.join(presets_dir, "two_firm_llm_vs_nash.toml")
    config = data_loading.build_run_config(data_loading.load_config(str_path), presets_dir)
    assert config.endpoint.temperature == 1.0
    assert config.endpoint.api_key_env == "OPENAI_API_KEY"


def test_missing_sections():
    with pytest.raises(ConfigError):
        data_loading.build_run_config({"run": {"roster": ["nash", "nash"]}})
    with pytest.raises(ConfigError):
        data_loading.build_run_config({"market": {"baseline_quantities": [150, 150]}})
    with pytest.raises(ConfigError):
        data_loading.market_spec_from_config({"market": {"baseline_price": 1.0}})


def test_invalid_toml(tmp_path):
    (tmp_path / "bad.toml").write_text("[market\nbaseline_quantities = ", encoding="utf-8")
    with pytest.raises(ConfigError):
        data_loading.load_config(str(tmp_path / "bad.toml"))
