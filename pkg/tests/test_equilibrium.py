from dataclasses import replace

import numpy as np
import pytest

from analysis.methods import equilibrium
from errors import MarketSpecError


@pytest.mark.parametrize("str_fixture", ["two_firm_model", "five_firm_model"])
def test_baseline_is_nash(request, str_fixture):
    model = request.getfixturevalue(str_fixture)
    report = equilibrium.verify_nash(model, 0.5, 201)
    assert report.passed
    assert report.max_gain <= 1e-9
    for firm in report.firms:
        assert firm.nash_profit == pytest.approx(0.8 * model.baseline_profits[firm.firm_index])


def test_corrupted_cost_curve_fails(two_firm_model):
    model = replace(two_firm_model, cobb_k1=2.0 * two_firm_model.cobb_k1)
    report = equilibrium.verify_nash(model)
    assert not report.passed
    assert report.max_gain > 1.0


def test_verify_nash_needs_grid(two_firm_model):
    with pytest.raises(MarketSpecError):
        equilibrium.verify_nash(two_firm_model, 0.5, 2)


def test_critical_quantity():
    assert equilibrium.critical_quantity(20.0 ** 1.5) == pytest.approx(0.0, abs=1e-9)
    assert equilibrium.critical_quantity(5.0) == pytest.approx(20.0 * 5.0 ** (1 / 3) - 5.0)


@pytest.mark.parametrize("fl_others", [5.0, 17.0, 31.7, 60.0, 94.0])
def test_h_on_critical_curve(fl_others):
    fl_q = equilibrium.critical_quantity(fl_others)
    assert equilibrium.proof_h(fl_others, fl_q) == pytest.approx(
        equilibrium.h_at_critical(fl_others), abs=1e-12)


def test_h_reference_values():
    """The exact coefficient along the critical curve is 0.75; the commonly
    quoted 0.7521 is rounded, which shifts 31.7 by about 6e-3. At 94 the exact
    value is 0.0602, not the quoted 0.056."""
    assert equilibrium.h_at_critical(5.0) == pytest.approx(0.162, abs=5e-3)
    assert equilibrium.h_at_critical(31.7) == pytest.approx(0.5875, abs=1e-2)
    assert equilibrium.h_at_critical(94.0) == pytest.approx(0.0602, abs=5e-3)


def test_h_undefined_at_zero_total():
    with pytest.raises(ZeroDivisionError):
        equilibrium.proof_h(0.0, 0.0)


def test_h_positivity_sweep():
    report = equilibrium.h_positivity_sweep()
    assert report.passed
    assert report.extreme_value > 0
    assert report.boundary_points == 1
    assert equilibrium.proof_h(100.0, 0.0) == 0.0


def test_zero_investment_never_better():
    report = equilibrium.zero_investment_sweep()
    assert report.passed
    assert report.extreme_at == (100.0,)
    assert report.extreme_value == pytest.approx(0.0, abs=1e-12)
    assert np.all(equilibrium.zero_investment_gap(np.arange(5.0, 99.5, 0.5)) < 0)
