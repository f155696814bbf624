"""Cavity and atomic decay of the singly excited two-level ensemble.

Two models are provided. ``collective3`` works on the three states
``(|+>, |->, |G0>)`` with both decay channels feeding the absorbing ground
state ``|G0>``. ``full`` integrates the master equation on the whole
``2^N x (fock_cutoff + 1)`` space with per-atom emission and serves as an
oracle for small ``N``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .models import (
    DEFAULT_FOCK_CUTOFF,
    GROUND,
    EXCITED,
    TwoLevelParams,
    annihilation,
    embed_atom_op,
    embed_field_op,
    transition,
    two_level_basis,
    two_level_collective_h,
    two_level_full_h,
)
from .numerics import integrate_lindblad
from .trajectory import Trajectory

PLUS, MINUS, GROUND0 = 0, 1, 2
POPULATION_COLUMNS = ("pop_plus", "pop_minus", "pop_ground")


@dataclass(frozen=True)
class DecayModel:
    """How decay is modelled; the rates themselves live on the parameters.

    ``gamma_scaling`` is the factor applied to ``gamma`` for decay of the
    collective state ``|E>``: ``1`` (single-atom rate) or ``"N"``
    (superradiant rate ``N gamma``). It only affects ``collective3``.
    """

    mode: str = "collective3"
    gamma_scaling: int | str = 1
    fock_cutoff: int = DEFAULT_FOCK_CUTOFF
    step: float | None = None

    def __post_init__(self):
        if self.mode not in ("collective3", "full"):
            raise ValidationError(f"unknown decay mode {self.mode!r}", key="mode")
        if self.gamma_scaling not in (1, "N"):
            raise ValidationError("gamma_scaling must be 1 or 'N'", key="gamma_scaling")

    def scale(self, n_atoms: int) -> float:
        return float(n_atoms) if self.gamma_scaling == "N" else 1.0


def _projector(dim, i):
    p = np.zeros((dim, dim), dtype=complex)
    p[i, i] = 1.0
    return p


def collective_generators(params: TwoLevelParams, model: DecayModel = DecayModel()):
    """Hamiltonian and collapse operators on ``(|+>, |->, |G0>)``."""
    h = np.zeros((3, 3), dtype=complex)
    h[:2, :2] = two_level_collective_h(params)
    ops = []
    if params.kappa > 0:
        op = np.zeros((3, 3), dtype=complex)
        op[GROUND0, MINUS] = math.sqrt(params.kappa)
        ops.append(op)
    rate = model.scale(params.N) * params.gamma
    if rate > 0:
        op = np.zeros((3, 3), dtype=complex)
        op[GROUND0, PLUS] = math.sqrt(rate)
        ops.append(op)
    return h, ops


def simulate_collective_decay(params: TwoLevelParams, model: DecayModel = DecayModel(),
                              t_grid=None, *, initial=None) -> Trajectory:
    """Populations of ``|+>``, ``|->`` and ``|G0>`` under cavity and atomic decay.

    Starts from ``|+>`` unless ``initial`` (a 3x3 density matrix) is given.
    """
    h, ops = collective_generators(params, model)
    rho0 = _projector(3, PLUS) if initial is None else np.asarray(initial, dtype=complex)
    traj = integrate_lindblad(
        rho0, h, ops, t_grid, step=model.step,
        populations={name: _projector(3, i) for i, name in enumerate(POPULATION_COLUMNS)},
    )
    traj.metadata.update(
        model="two_level", decay_mode="collective3",
        gamma_scaling=model.gamma_scaling, params=params,
    )
    return traj


def full_generators(params: TwoLevelParams, fock_cutoff=DEFAULT_FOCK_CUTOFF):
    """Full-space Hamiltonian with ``sqrt(kappa) a`` and per-atom ``sqrt(gamma) s-_j``."""
    h = two_level_full_h(params, fock_cutoff)
    N = params.N
    ops = []
    if params.kappa > 0:
        ops.append(math.sqrt(params.kappa) * embed_field_op(annihilation(fock_cutoff), N, 2))
    if params.gamma > 0:
        lower = transition(2, GROUND, EXCITED)
        ops += [math.sqrt(params.gamma) * embed_atom_op(lower, j, N, fock_cutoff)
                for j in range(N)]
    return h, ops


def simulate_full_lindblad(params: TwoLevelParams, fock_cutoff=DEFAULT_FOCK_CUTOFF,
                           t_grid=None, *, step=None) -> Trajectory:
    """Full Hilbert-space oracle for :func:`simulate_collective_decay`.

    Reports the same three populations (via projectors on the embedded
    collective states) plus ``leakage``: population outside their span.
    """
    h, ops = full_generators(params, fock_cutoff)
    basis = two_level_basis(params.N, fock_cutoff)
    projectors = {
        name: np.outer(basis[:, i], basis[:, i].conj())
        for i, name in enumerate(POPULATION_COLUMNS)
    }
    span = sum(projectors.values())
    rho0 = projectors["pop_plus"]
    traj = integrate_lindblad(
        rho0, h, ops, t_grid, step=step,
        populations={**projectors, "leakage": np.eye(h.shape[0]) - span},
    )
    leakage = traj.series.pop("leakage")
    traj.diagnostics["leakage"] = leakage
    t_span = float(traj.times[-1] - traj.times[0])
    traj.metadata.update(
        model="two_level", decay_mode="full", fock_cutoff=fock_cutoff, params=params,
        max_leakage=float(np.max(np.abs(leakage))),
        leakage_bound=params.gamma * t_span,
    )
    return traj


def simulate(params: TwoLevelParams, model: DecayModel = DecayModel(), t_grid=None) -> Trajectory:
    if model.mode == "full":
        return simulate_full_lindblad(params, model.fock_cutoff, t_grid, step=model.step)
    return simulate_collective_decay(params, model, t_grid)
