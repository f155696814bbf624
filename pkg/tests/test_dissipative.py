import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from detune_sim.dissipative import (
    DecayModel,
    collective_generators,
    simulate,
    simulate_collective_decay,
    simulate_full_lindblad,
)
from detune_sim.errors import ValidationError
from detune_sim.models import TwoLevelParams
from detune_sim.propagators import two_level_u


def test_decay_model_validation():
    with pytest.raises(ValidationError):
        DecayModel(mode="bogus")
    with pytest.raises(ValidationError):
        DecayModel(gamma_scaling=2)
    assert DecayModel(gamma_scaling="N").scale(7) == 7.0
    assert DecayModel().scale(7) == 1.0


def test_generators_skip_zero_rates():
    _, ops = collective_generators(TwoLevelParams(2, 1.0, 10.0))
    assert ops == []
    _, ops = collective_generators(TwoLevelParams(2, 1.0, 10.0, 0.1, 0.01))
    assert len(ops) == 2


def test_closed_system_matches_closed_form():
    p = TwoLevelParams(5, 1.0, 10.0)
    t = np.linspace(0, 20, 201)
    tr = simulate_collective_decay(p, DecayModel(), t)
    exact = np.abs(two_level_u(p, t)[:, 0, 0]) ** 2
    assert np.max(np.abs(tr.series["pop_plus"] - exact)) <= 1e-8
    assert np.max(np.abs(tr.series["pop_ground"])) <= 1e-12


def test_pure_atomic_decay():
    p = TwoLevelParams(3, 0.0, 10.0, 0.0, 0.01)
    tr = simulate_collective_decay(p, DecayModel(), np.linspace(0, 100, 101))
    assert tr.series["pop_plus"][-1] == pytest.approx(math.exp(-1), abs=1e-5)
    assert np.all(np.diff(tr.series["pop_plus"]) <= 0)


def test_superradiant_scaling_speeds_decay():
    p = TwoLevelParams(4, 0.0, 10.0, 0.0, 0.01)
    tr = simulate_collective_decay(p, DecayModel(gamma_scaling="N"), np.linspace(0, 25, 51))
    assert tr.series["pop_plus"][-1] == pytest.approx(math.exp(-1), abs=1e-5)


def test_fig2_ordering(fig2_params):
    t = np.linspace(0, 100, 2001)
    for scaling in (1, "N"):
        trs = [simulate_collective_decay(fig2_params(n), DecayModel(gamma_scaling=scaling), t)
               for n in (1, 5, 25)]
        mins = [tr.series["pop_plus"].min() for tr in trs]
        avgs = [tr.time_average("pop_plus") for tr in trs]
        assert mins[0] > mins[1] > mins[2]
        assert avgs[0] > avgs[1] > avgs[2]


def test_hygiene(fig2_params):
    tr = simulate_collective_decay(fig2_params(25), DecayModel(), np.linspace(0, 100, 1001))
    assert np.max(np.abs(tr.diagnostics["trace"] - 1)) <= 1e-8
    assert tr.diagnostics["min_eig"].min() >= -1e-8
    total = tr.series["pop_plus"] + tr.series["pop_minus"] + tr.series["pop_ground"]
    assert_allclose(total, 1, atol=1e-8)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_full_matches_collective(n):
    p = TwoLevelParams(n, 1.0, 10.0, 0.1, 0.01)
    t = np.linspace(0, 20, 201)
    full = simulate_full_lindblad(p, 2, t)
    coll = simulate_collective_decay(p, DecayModel(), t)
    for name in ("pop_plus", "pop_minus", "pop_ground"):
        assert np.max(np.abs(full.series[name] - coll.series[name])) <= 1e-7


def test_full_unitary_limit_stays_in_subspace():
    p = TwoLevelParams(2, 1.0, 10.0)
    t = np.linspace(0, 10, 101)
    full = simulate_full_lindblad(p, 2, t)
    assert full.metadata["max_leakage"] <= 1e-10
    exact = np.abs(two_level_u(p, t)[:, 0, 0]) ** 2
    assert np.max(np.abs(full.series["pop_plus"] - exact)) <= 1e-8


def test_full_leakage_bound():
    p = TwoLevelParams(2, 1.0, 10.0, 0.1, 0.05)
    full = simulate_full_lindblad(p, 2, np.linspace(0, 5, 51))
    assert full.metadata["max_leakage"] <= full.metadata["leakage_bound"] + 1e-9


def test_dispatch():
    p = TwoLevelParams(1, 1.0, 10.0, 0.1, 0.01)
    t = np.linspace(0, 2, 21)
    a = simulate(p, DecayModel(mode="full"), t)
    b = simulate(p, DecayModel(), t)
    assert a.metadata["decay_mode"] == "full"
    assert_allclose(a.series["pop_plus"], b.series["pop_plus"], atol=1e-8)
