import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from detune_sim.analysis import (
    COLLECTIVE,
    RAMAN,
    SweepSpec,
    condition_report,
    effective_fidelity,
    min_detuning,
    min_detuning_bisection,
    numeric_max_leakage,
    scaling_exponent,
    sweep,
)
from detune_sim.errors import DomainError, InsufficientPoints, UnknownMetric, ValidationError
from detune_sim.models import LambdaParams, TwoLevelParams
from detune_sim.propagators import max_leakage_two_level, two_level_period


def test_condition_report_discrepancy():
    rep = condition_report(TwoLevelParams(25, 1.0, 10.0), threshold=10)
    assert rep.legacy_verdict
    assert not rep.verdicts[COLLECTIVE]
    assert rep.ratios[COLLECTIVE] == pytest.approx(2.0)
    assert "FAIL" in rep.format()


def test_condition_report_raman(fig5_params):
    rep = condition_report(fig5_params)
    assert rep.ratios[RAMAN] == pytest.approx(3.0)
    assert not rep.verdicts[RAMAN]
    assert rep.verdicts[COLLECTIVE]


def test_condition_report_threshold_domain():
    with pytest.raises(DomainError):
        condition_report(TwoLevelParams(1, 1.0, 10.0), threshold=1)


def test_condition_report_uncoupled():
    rep = condition_report(LambdaParams(1, 0.0, 0.0, 10.0))
    assert rep.ratios[COLLECTIVE] == math.inf
    assert rep.verdicts[COLLECTIVE]


def test_min_detuning_single_atom():
    assert min_detuning(1, 1.0, 0.01) == pytest.approx(2 * math.sqrt(99), abs=1e-12)


@given(st.integers(1, 500), st.floats(0.01, 10), st.floats(1e-4, 0.9))
def test_min_detuning_round_trip(n, g, tol):
    d = min_detuning(n, g, tol)
    assert max_leakage_two_level(TwoLevelParams(n, g, d)) == pytest.approx(tol, rel=1e-9)


@given(st.integers(1, 200), st.integers(2, 10))
def test_min_detuning_sqrt_law(n, k):
    assert min_detuning(k * k * n, 1.0, 0.05) == pytest.approx(k * min_detuning(n, 1.0, 0.05), rel=1e-12)


@pytest.mark.parametrize("tol", [0.0, 1.0, -0.1])
def test_min_detuning_domain(tol):
    with pytest.raises(DomainError):
        min_detuning(1, 1.0, tol)


def test_bisection_agrees():
    assert min_detuning_bisection(4, 1.0, 0.01) == pytest.approx(min_detuning(4, 1.0, 0.01), abs=1e-3)


def test_numeric_leakage_scan():
    assert numeric_max_leakage(TwoLevelParams(5, 1.0, 10.0)) == pytest.approx(1 / 6, abs=1e-6)
    assert numeric_max_leakage(TwoLevelParams(5, 0.0, 10.0)) == 0.0


def test_scaling_exponent():
    assert scaling_exponent(1.0, 0.01, [1, 4, 16, 64]) == pytest.approx(0.5, abs=1e-12)
    assert 0.495 <= scaling_exponent(1.0, 0.01, [1, 4, 16, 64], method="bisection") <= 0.505
    with pytest.raises(InsufficientPoints):
        scaling_exponent(1.0, 0.01, [1, 4, 4])
    with pytest.raises(ValueError):
        scaling_exponent(1.0, 0.01, [1, 4, 16], method="guess")


def test_fidelity_uncoupled_is_one():
    f = effective_fidelity(TwoLevelParams(3, 0.0, 10.0), np.linspace(0, 10, 11))
    assert np.allclose(f, 1, atol=1e-14)


def test_fidelity_at_time_zero():
    assert effective_fidelity(TwoLevelParams(25, 1.0, 10.0), 0.0) == pytest.approx(1.0, abs=1e-14)


def test_fidelity_at_peak_leakage():
    # theta = 1: halfway through the fast period the exact state has lost half its weight
    p = TwoLevelParams(25, 1.0, 10.0)
    assert effective_fidelity(p, two_level_period(p) / 2) == pytest.approx(0.5, abs=1e-12)


@given(st.integers(1, 50), st.floats(5, 100))
def test_fidelity_envelope(n, delta):
    p = TwoLevelParams(n, 1.0, delta)
    f = effective_fidelity(p, np.linspace(0, 3 * two_level_period(p), 301))
    assert f.min() >= 1 - max_leakage_two_level(p) - 1e-12


def two_level_spec(**kw):
    return SweepSpec(axes={"N": [1, 5, 25]}, metrics=["max_leakage"],
                     base={"g": 1.0, "Delta": 10.0}, **kw)


def test_sweep_values():
    res = sweep(two_level_spec())
    assert np.allclose(res.values("max_leakage"), [1 / 26, 1 / 6, 0.5], atol=1e-14)
    assert res.columns == ["N", "metric", "value"]


def test_sweep_errors():
    with pytest.raises(ValidationError):
        sweep(SweepSpec(axes={"N": [1]}, metrics=[]))
    with pytest.raises(UnknownMetric):
        sweep(SweepSpec(axes={"N": [1]}, metrics=["nope"]))
    with pytest.raises(ValidationError):
        sweep(SweepSpec(axes={"N": []}, metrics=["max_leakage"]))


def test_sweep_single_point_matches_direct():
    spec = SweepSpec(axes={"Delta": [10.0]}, metrics=["min_detuning", "avg_pop_plus"],
                     base={"N": 5, "g": 1.0, "kappa": 0.1, "gamma": 0.01}, t_max=20.0,
                     grid_points=201)
    res = sweep(spec)
    assert res.values("min_detuning")[0] == min_detuning(5, 1.0, 0.01)
    assert 0 < res.values("avg_pop_plus")[0] < 1


def test_sweep_order_and_jobs_independence():
    spec = SweepSpec(axes={"N": [1, 4], "Delta": [10.0, 20.0]},
                     metrics=["max_leakage", "fidelity_min", "raman_max"],
                     base={"g": 1.0, "Omega": 1.0}, t_max=5.0, grid_points=101)
    a, b = sweep(spec), sweep(spec, jobs=4)
    assert a.rows == b.rows and a.provenance == b.provenance
    assert [r[0] for r in a.rows[::3]] == [
        {"Delta": 10.0, "N": 1}, {"Delta": 10.0, "N": 4},
        {"Delta": 20.0, "N": 1}, {"Delta": 20.0, "N": 4},
    ]
    assert sweep(spec).rows == a.rows
