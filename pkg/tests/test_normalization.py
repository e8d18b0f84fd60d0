import numpy as np
import pytest

from analysis.methods.normalization import denormalize, history_arrays, normalize
from conftest import history_of


def test_nash_period_normalizes_to_one(five_firm_model):
    list_pairs = [(q, 20.0) for q in five_firm_model.baseline_quantities]
    dict_norm = normalize(five_firm_model, history_of(five_firm_model, [list_pairs]))
    for str_key in ("quantity", "investment", "profit"):
        np.testing.assert_allclose(dict_norm[str_key], np.ones((1, 5)), rtol=1e-12)
    assert dict_norm["price"] == pytest.approx([1.0])


def test_collusion_period(two_firm_model):
    dict_norm = normalize(two_firm_model, history_of(two_firm_model, [[(75, 20), (75, 20)]]))
    np.testing.assert_allclose(dict_norm["quantity"], [[0.5, 0.5]])
    np.testing.assert_allclose(dict_norm["profit"], [[1.625, 1.625]])
    assert dict_norm["price"] == pytest.approx([2.0])


def test_zero_production(two_firm_model):
    dict_norm = normalize(two_firm_model, history_of(two_firm_model, [[(0, 0), (150, 20)]]))
    assert dict_norm["quantity"][0, 0] == 0.0
    assert dict_norm["investment"][0, 0] == 0.0


def test_denormalize_restores_raw(two_firm_model):
    list_history = history_of(two_firm_model, [[(75, 20), (150, 10)], [(100, 5), (120, 20)]])
    dict_raw = history_arrays(list_history)
    dict_back = denormalize(two_firm_model, normalize(two_firm_model, list_history))
    for str_key in ("quantity", "investment", "profit", "price"):
        np.testing.assert_allclose(dict_back[str_key], dict_raw[str_key], rtol=1e-12)
