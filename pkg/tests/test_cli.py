import glob
import json
import os
from dataclasses import replace

import httpx
import openai
import pytest

import main
from conftest import STR_PRESETS_DIR
from objects.market import derive_model as real_derive_model
from simulation.run_log import load_run_log

STR_TWO_FIRM = os.path.join(STR_PRESETS_DIR, "two_firm.toml")
STR_FIVE_FIRM = os.path.join(STR_PRESETS_DIR, "five_firm.toml")
STR_LLM_VS_NASH = os.path.join(STR_PRESETS_DIR, "two_firm_llm_vs_nash.toml")


def only_log(str_dir):
    list_paths = glob.glob(os.path.join(str_dir, "*", "history_*.jsonl"))
    assert len(list_paths) == 1
    return list_paths[0]


def run_nash_pair(tmp_path, int_periods):
    int_code = main.main(["run", "--config", STR_TWO_FIRM, "--out", str(tmp_path / "runs"),
                          "--periods", str(int_periods), "--set", "run.stall_window=0"])
    assert int_code == main.EXIT_OK
    return only_log(str(tmp_path / "runs"))


def test_derive_writes_model(tmp_path, capsys):
    assert main.main(["derive", "--config", STR_TWO_FIRM, "--out", str(tmp_path)]) == 0
    assert "A  = 300.0" in capsys.readouterr().out
    with open(tmp_path / "derived_model.json", encoding="utf-8") as fp:
        dict_model = json.load(fp)
    assert dict_model["baseline_costs"] == pytest.approx([0.5, 0.5])
    assert dict_model["baseline_investments"] == pytest.approx([15.0, 15.0])


def test_nash_pair_stalls(tmp_path):
    int_code = main.main(["run", "--config", STR_TWO_FIRM, "--roster", "nash,nash",
                          "--out", str(tmp_path)])
    assert int_code == main.EXIT_STALLED
    str_log = only_log(str(tmp_path))
    _, _, list_history = load_run_log(str_log)
    assert len(list_history) == 11
    assert len({tuple(d.as_pair() for d in r.decisions) for r in list_history}) == 1
    str_run_dir = os.path.dirname(str_log)
    str_run_id = os.path.basename(str_run_dir)
    assert os.path.isfile(os.path.join(str_run_dir, f"summary_{str_run_id}.json"))


def test_repeats_use_consecutive_seeds(tmp_path):
    int_code = main.main(["run", "--config", STR_TWO_FIRM, "--out", str(tmp_path),
                          "--repeats", "2", "--periods", "5"])
    assert int_code == main.EXIT_OK
    list_logs = sorted(glob.glob(os.path.join(str(tmp_path), "*", "history_*.jsonl")))
    assert len(list_logs) == 2
    assert sorted(load_run_log(p)[0]["seed"] for p in list_logs) == [0, 1]


def test_regulate_top_two(tmp_path):
    int_code = main.main(["run", "--config", STR_FIVE_FIRM, "--regulate-top", "2",
                          "--periods", "40", "--out", str(tmp_path)])
    assert int_code in (main.EXIT_OK, main.EXIT_STALLED)
    dict_header, _, list_history = load_run_log(only_log(str(tmp_path)))
    assert dict_header["roster"][:2] == ["best_response", "best_response"]
    assert dict_header["roster"][2:] == ["scripted:collude.json"] * 3
    assert list_history[-1].price == pytest.approx(1.14005, abs=1e-3)


def test_missing_config_file(tmp_path):
    assert main.main(["derive", "--config", str(tmp_path / "missing.toml")]) == main.EXIT_IO_ERROR


def test_missing_config_argument():
    assert main.main(["derive"]) == main.EXIT_CONFIG_ERROR


def test_bad_market(tmp_path):
    str_path = tmp_path / "bad.toml"
    str_path.write_text("[market]\nbaseline_quantities = [150.0, 150.0]\nelasticity = 0.5\n",
                        encoding="utf-8")
    int_code = main.main(["derive", "--config", str(str_path), "--out", str(tmp_path)])
    assert int_code == main.EXIT_CONFIG_ERROR


def test_unknown_roster_entry(tmp_path):
    int_code = main.main(["run", "--config", STR_TWO_FIRM, "--roster", "nash,oracle",
                          "--out", str(tmp_path)])
    assert int_code == main.EXIT_CONFIG_ERROR


def test_validate(tmp_path):
    int_code = main.main(["validate", "--config", STR_TWO_FIRM, "--out", str(tmp_path),
                          "--set", "validation.br_starts=20",
                          "--set", "validation.investment_states=100"])
    assert int_code == main.EXIT_OK
    with open(tmp_path / "validation_report.json", encoding="utf-8") as fp:
        dict_report = json.load(fp)
    assert dict_report["passed"]
    assert len(dict_report["checks"]) == 5


def test_validate_fails_on_broken_model(tmp_path, monkeypatch):
    monkeypatch.setattr(main, "derive_model",
                        lambda spec: replace(real_derive_model(spec), cobb_k3=0.6))
    int_code = main.main(["validate", "--config", STR_TWO_FIRM, "--out", str(tmp_path),
                          "--set", "validation.br_starts=10",
                          "--set", "validation.investment_states=50"])
    assert int_code == main.EXIT_VALIDATION_FAILED


def test_analyze_nash_history(tmp_path):
    str_log = run_nash_pair(tmp_path, 120)
    str_out = str(tmp_path / "analysis")
    assert main.main(["analyze", str_log, "--out", str_out]) == main.EXIT_OK
    with open(os.path.join(str_out, "analysis_summary.json"), encoding="utf-8") as fp:
        dict_summary = json.load(fp)
    assert dict_summary["periods"] == 120
    assert dict_summary["convergence"]["converged_count"] == 7
    assert dict_summary["convergence"]["verdict_count"] == 7
    assert dict_summary["average_price"]["value"] == pytest.approx(1.0)
    assert dict_summary["probes"]["investment_optimal_fraction"] == 1.0
    assert dict_summary["probes"]["br_iterations_max"] == 0
    assert os.path.isfile(os.path.join(str_out, "convergence_verdicts.csv"))
    assert os.path.isfile(os.path.join(str_out, "normalized_summary.csv"))


def test_analyze_short_history(tmp_path):
    str_log = run_nash_pair(tmp_path, 50)
    assert main.main(["analyze", str_log, "--out", str(tmp_path / "a")]) == main.EXIT_DATA_ERROR
    int_code = main.main(["analyze", str_log, "--out", str(tmp_path / "a"),
                          "--set", "analysis.convergence_window=40"])
    assert int_code == main.EXIT_OK


def test_analyze_schema_mismatch(tmp_path):
    str_log = tmp_path / "history_old.jsonl"
    str_log.write_text(json.dumps({"schema_version": 2}) + "\n", encoding="utf-8")
    assert main.main(["analyze", str(str_log)]) == main.EXIT_SCHEMA_ERROR


def test_export(tmp_path):
    run_nash_pair(tmp_path, 20)
    str_out = str(tmp_path / "plots")
    assert main.main(["export", str(tmp_path / "runs"), "--out", str_out]) == main.EXIT_OK
    for str_name in ("decisions", "prices", "profits", "price_curve", "cost_curves",
                     "nash_points", "boxplot_summary"):
        assert os.path.isfile(os.path.join(str_out, str_name + ".csv"))


def test_export_without_logs(tmp_path):
    assert main.main(["export", str(tmp_path)]) == main.EXIT_IO_ERROR


def test_transport_failure(tmp_path, monkeypatch):
    monkeypatch.setenv("MARKET_SIM_TEST_KEY", "sk-test")

    def fake_create(self, **kwargs):
        raise openai.APIConnectionError(request=httpx.Request("POST", "http://localhost:9/v1"))

    monkeypatch.setattr(openai.resources.chat.Completions, "create", fake_create)
    int_code = main.main(["run", "--config", STR_LLM_VS_NASH, "--out", str(tmp_path),
                          "--set", "llm.api_key_env=MARKET_SIM_TEST_KEY",
                          "--set", "llm.base_url=http://localhost:9/v1"])
    assert int_code == main.EXIT_TRANSPORT_ERROR


def test_mock_llm_run(tmp_path):
    str_mock = os.path.join(os.path.dirname(STR_PRESETS_DIR), "example_data", "mock_llm")
    int_code = main.main(["run", "--config", STR_LLM_VS_NASH, "--out", str(tmp_path),
                          "--mock-llm", str_mock, "--periods", "5"])
    assert int_code == main.EXIT_OK
    _, _, list_history = load_run_log(only_log(str(tmp_path)))
    assert [d.quantity for d in list_history[-1].decisions] == [150.0, 150.0]


def test_derive_percent_space(tmp_path, capsys):
    int_code = main.main(["derive", "--config", os.path.join(STR_PRESETS_DIR, "percent_space.toml"),
                          "--out", str(tmp_path)])
    assert int_code == main.EXIT_OK
    assert "k1 = -0.2236" in capsys.readouterr().out


def test_best_response_against_colluder(tmp_path):
    int_code = main.main(["run", "--config", STR_TWO_FIRM, "--out", str(tmp_path),
                          "--roster", "scripted:collude.json,best_response"])
    assert int_code == main.EXIT_STALLED
    _, _, list_history = load_run_log(only_log(str(tmp_path)))
    for record in list_history[1:]:
        assert record.decisions[0].quantity == pytest.approx(75.0)
        assert record.decisions[1].quantity == pytest.approx((600.0 * 75.0) ** 0.5 - 75.0)
        assert record.decisions[1].invest_percent == pytest.approx(20.0)


def test_analyze_constant_collusion(tmp_path):
    str_script = tmp_path / "half.json"
    str_script.write_text("[[75, 20]]", encoding="utf-8")
    str_roster = f"scripted:{str_script},scripted:{str_script}"
    assert main.main(["run", "--config", STR_TWO_FIRM, "--out", str(tmp_path / "runs"),
                      "--roster", str_roster, "--set", "run.stall_window=0"]) == main.EXIT_OK
    str_out = str(tmp_path / "analysis")
    assert main.main(["analyze", only_log(str(tmp_path / "runs")), "--out", str_out]) == 0
    with open(os.path.join(str_out, "analysis_summary.json"), encoding="utf-8") as fp:
        dict_summary = json.load(fp)
    assert not dict_summary["convergence"]["price_converged"]
    assert dict_summary["last_period_normalized"]["price"] == pytest.approx(2.0)


def test_analyze_five_firm_collusion(tmp_path):
    assert main.main(["run", "--config", STR_FIVE_FIRM, "--out", str(tmp_path / "runs"),
                      "--periods", "100", "--set", "run.stall_window=0"]) == main.EXIT_OK
    str_out = str(tmp_path / "analysis")
    int_code = main.main(["analyze", only_log(str(tmp_path / "runs")), "--config", STR_FIVE_FIRM,
                          "--out", str_out])
    assert int_code == main.EXIT_OK
    with open(os.path.join(str_out, "analysis_summary.json"), encoding="utf-8") as fp:
        dict_summary = json.load(fp)
    assert dict_summary["probes"]["br_converged_fraction"] == 1.0
    assert dict_summary["probes"]["investment_optimal_fraction"] == 1.0
    assert dict_summary["average_price"]["value"] == pytest.approx(2.0)
