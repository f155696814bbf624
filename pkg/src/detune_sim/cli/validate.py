"""Quick self-checks run by ``detune-sim validate``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..analysis import min_detuning, scaling_exponent
from ..dissipative import DecayModel, simulate_collective_decay, simulate_full_lindblad
from ..models import LambdaParams, TwoLevelParams, lambda_resonant_h, two_level_collective_h
from ..numerics import unitary_propagator
from ..propagators import (
    lambda_resonant_u,
    max_leakage_two_level,
    two_level_trajectory,
    two_level_u,
)


@dataclass
class CheckResult:
    name: str
    value: float
    limit: float
    passed: bool


def _le(name, value, limit):
    return CheckResult(name, float(value), float(limit), bool(value <= limit))


def run_checks() -> list[CheckResult]:
    t = np.linspace(0.0, 5.0, 50)
    out = []

    p2 = TwoLevelParams(25, 1.0, 10.0)
    err = np.max(np.abs(two_level_u(p2, t) - unitary_propagator(two_level_collective_h(p2), t)))
    out.append(_le("two_level_closed_vs_numeric", err, 1e-9))

    pl = LambdaParams(25, 1.0, 1.0, 10.0)
    numeric = unitary_propagator(lambda_resonant_h(pl), t) * np.exp(0.5j * pl.Delta * t)[:, None, None]
    out.append(_le("lambda_closed_vs_numeric", np.max(np.abs(lambda_resonant_u(pl, t) - numeric)), 1e-9))

    u = two_level_u(p2, t)
    unit = np.max(np.abs(np.conj(np.swapaxes(u, 1, 2)) @ u - np.eye(2)))
    out.append(_le("unitarity", unit, 1e-12))

    out.append(_le("max_leakage_N25", abs(max_leakage_two_level(p2) - 0.5), 1e-12))
    out.append(_le("scaling_exponent", abs(scaling_exponent(1.0, 0.01, [1, 4, 16, 64]) - 0.5), 1e-3))
    out.append(_le("min_detuning_N1", abs(min_detuning(1, 1.0, 0.01) - 2 * np.sqrt(99)), 1e-9))

    grid = np.linspace(0.0, 10.0, 401)
    pd = TwoLevelParams(2, 1.0, 10.0, 0.1, 0.01)
    full = simulate_full_lindblad(pd, 2, grid)
    coll = simulate_collective_decay(pd, DecayModel(), grid)
    out.append(_le("full_vs_collective_N2", np.max(np.abs(full.series["pop_plus"] - coll.series["pop_plus"])), 1e-6))
    out.append(_le("trace_drift", np.max(np.abs(coll.diagnostics["trace"] - 1)), 1e-8))
    out.append(_le("negativity", max(0.0, -np.min(coll.diagnostics["min_eig"])), 1e-8))

    pu = TwoLevelParams(2, 1.0, 10.0)
    closed = two_level_trajectory(pu, grid).series["pop_plus"]
    oracle = simulate_full_lindblad(pu, 2, grid).series["pop_plus"]
    out.append(_le("oracle_unitary_limit", np.max(np.abs(closed - oracle)), 1e-8))
    return out
