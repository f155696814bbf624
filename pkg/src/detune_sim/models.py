"""Hamiltonians and collective states for cavity-coupled atom ensembles.

Two families are covered:

* two-level atoms (``g``, ``e``) dispersively coupled to one cavity mode,
  collective basis ``(|+>, |->, |G0>) = (|E>|0>, |G>|1>, |G>|0>)``;
* three-level Lambda atoms (``g``, ``e``, ``s``) coupled to the cavity on
  ``g <-> e`` and driven classically on ``s <-> e``, collective basis
  ``(|u1>, |u2>, |u3>) = (|E>|0>, |G>|1>, |S>|0>)``.

Full tensor-product spaces are ordered atom 1 (slowest index), ..., atom N,
field (fastest index). Single-atom levels are indexed ``g=0, e=1, s=2``.
All energies are in units of the single-atom coupling ``g``; hbar = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import DimensionCap, ExpectedResonance, ValidationError

GROUND, EXCITED, STORAGE = 0, 1, 2
DIMENSION_CAP = 10**6
MAX_ORACLE_ATOMS = 3
DEFAULT_FOCK_CUTOFF = 2

TWO_LEVEL_BASIS = ("plus", "minus", "ground")
LAMBDA_BASIS = ("u1", "u2", "u3")


@dataclass(frozen=True)
class TwoLevelParams:
    N: int
    g: float
    Delta: float
    kappa: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        _check_atoms(self.N)
        if not self.g >= 0:
            raise ValidationError("g must be >= 0", key="g")
        if self.Delta == 0 or not math.isfinite(self.Delta):
            raise ValidationError("Delta must be finite and nonzero", key="Delta")
        if not self.kappa >= 0:
            raise ValidationError("kappa must be >= 0", key="kappa")
        if not self.gamma >= 0:
            raise ValidationError("gamma must be >= 0", key="gamma")

    @property
    def coupling(self) -> float:
        """Collective coupling sqrt(N) g."""
        return math.sqrt(self.N) * self.g


@dataclass(frozen=True)
class LambdaParams:
    N: int
    g: float
    Omega: float
    Delta: float
    delta: float = 0.0

    def __post_init__(self):
        _check_atoms(self.N)
        if not self.g >= 0:
            raise ValidationError("g must be >= 0", key="g")
        if not self.Omega >= 0:
            raise ValidationError("Omega must be >= 0", key="Omega")
        if self.Delta == 0 or not math.isfinite(self.Delta):
            raise ValidationError("Delta must be finite and nonzero", key="Delta")
        if not math.isfinite(self.delta):
            raise ValidationError("delta must be finite", key="delta")

    @property
    def coupling(self) -> float:
        return math.sqrt(self.N) * self.g


def _check_atoms(n):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValidationError("N must be ≥ 1", key="N")


# ---------------------------------------------------------------- full space


def _full_dim(levels, n_atoms, fock_cutoff, cap=DIMENSION_CAP):
    dim = levels**n_atoms * (fock_cutoff + 1)
    if dim > cap:
        raise DimensionCap(
            f"full Hilbert space dimension {dim} exceeds cap {cap} "
            f"({n_atoms} atoms, {levels} levels, fock cutoff {fock_cutoff})"
        )
    return dim


def _check_oracle(n_atoms, fock_cutoff, max_atoms):
    if n_atoms > max_atoms:
        raise DimensionCap(
            f"full-space model limited to N <= {max_atoms}, got N = {n_atoms}"
        )
    if fock_cutoff < 1:
        raise ValueError("fock_cutoff must be >= 1")


def _kron_all(factors):
    return reduce(np.kron, factors)


def ket(levels, index):
    v = np.zeros(levels, dtype=complex)
    v[index] = 1.0
    return v


def transition(levels, to, frm):
    """Single-site operator ``|to><frm|``."""
    m = np.zeros((levels, levels), dtype=complex)
    m[to, frm] = 1.0
    return m


def annihilation(fock_cutoff):
    n = np.arange(1, fock_cutoff + 1)
    return np.diag(np.sqrt(n).astype(complex), k=1)


def embed_atom_op(op, site, n_atoms, fock_cutoff):
    """Place a single-atom operator on ``site`` of the full space."""
    levels = op.shape[0]
    factors = [np.eye(levels)] * n_atoms + [np.eye(fock_cutoff + 1)]
    factors[site] = op
    return _kron_all(factors)


def embed_field_op(op, n_atoms, levels):
    return np.kron(np.eye(levels**n_atoms), op)


def collective_state(N, kind, fock=0, fock_cutoff=DEFAULT_FOCK_CUTOFF, *,
                     levels=None, cap=DIMENSION_CAP) -> np.ndarray:
    """Collective atomic state tensored with a Fock state, in the full space.

    ``kind`` is ``"G"`` (all atoms in g), ``"E"`` or ``"S"`` (the symmetric
    superposition with exactly one atom in e or s). ``levels`` defaults to 3
    for ``"S"`` and 2 otherwise; pass 3 to embed ``E``/``G`` in Lambda space.
    """
    _check_atoms(N)
    kind = kind.upper()
    if kind not in ("E", "G", "S"):
        raise ValueError(f"kind must be E, G or S, got {kind!r}")
    if levels is None:
        levels = 3 if kind == "S" else 2
    if kind == "S" and levels < 3:
        raise ValueError("the S state needs three atomic levels")
    if not 0 <= fock <= fock_cutoff:
        raise ValueError(f"fock={fock} outside 0..{fock_cutoff}")
    _full_dim(levels, N, fock_cutoff, cap)

    field = ket(fock_cutoff + 1, fock)
    g = ket(levels, GROUND)
    if kind == "G":
        atoms = _kron_all([g] * N)
    else:
        flipped = ket(levels, EXCITED if kind == "E" else STORAGE)
        atoms = sum(
            _kron_all([flipped if j == k else g for j in range(N)]) for k in range(N)
        ) / math.sqrt(N)
    return np.kron(atoms, field)


def two_level_basis(N, fock_cutoff=DEFAULT_FOCK_CUTOFF) -> np.ndarray:
    """Columns ``|+>, |->, |G0>`` embedded in the two-level full space."""
    return np.column_stack([
        collective_state(N, "E", 0, fock_cutoff),
        collective_state(N, "G", 1, fock_cutoff),
        collective_state(N, "G", 0, fock_cutoff),
    ])


def lambda_basis(N, fock_cutoff=DEFAULT_FOCK_CUTOFF) -> np.ndarray:
    """Columns ``|u1>, |u2>, |u3>`` embedded in the Lambda full space."""
    return np.column_stack([
        collective_state(N, "E", 0, fock_cutoff, levels=3),
        collective_state(N, "G", 1, fock_cutoff, levels=3),
        collective_state(N, "S", 0, fock_cutoff, levels=3),
    ])


def restrict(op, basis) -> np.ndarray:
    """Matrix of ``op`` in the (orthonormal) columns of ``basis``."""
    return basis.conj().T @ op @ basis


def excitation_number(N, fock_cutoff, levels=2) -> np.ndarray:
    """Total excitation ``sum_j |e_j><e_j| + a^+ a``."""
    _full_dim(levels, N, fock_cutoff)
    a = annihilation(fock_cutoff)
    total = embed_field_op(a.conj().T @ a, N, levels)
    proj_e = transition(levels, EXCITED, EXCITED)
    for j in range(N):
        total = total + embed_atom_op(proj_e, j, N, fock_cutoff)
    return total


def photon_number(N, fock_cutoff, levels=2) -> np.ndarray:
    a = annihilation(fock_cutoff)
    return embed_field_op(a.conj().T @ a, N, levels)


def two_level_full_h(params: TwoLevelParams, fock_cutoff=DEFAULT_FOCK_CUTOFF, *,
                     max_atoms=MAX_ORACLE_ATOMS) -> np.ndarray:
    """Rotating-frame Hamiltonian ``sum_j [Delta sz_j / 2 + g (s-_j a^+ + s+_j a)]``."""
    N = params.N
    _check_oracle(N, fock_cutoff, max_atoms)
    _full_dim(2, N, fock_cutoff)
    a = embed_field_op(annihilation(fock_cutoff), N, 2)
    a_dag = a.conj().T
    sz = transition(2, EXCITED, EXCITED) - transition(2, GROUND, GROUND)
    lower = transition(2, GROUND, EXCITED)
    h = np.zeros_like(a)
    for j in range(N):
        sm = embed_atom_op(lower, j, N, fock_cutoff)
        h += 0.5 * params.Delta * embed_atom_op(sz, j, N, fock_cutoff)
        h += params.g * (sm @ a_dag + sm.conj().T @ a)
    return h


def two_level_effective_h(params: TwoLevelParams, fock_cutoff=DEFAULT_FOCK_CUTOFF, *,
                          max_atoms=MAX_ORACLE_ATOMS) -> np.ndarray:
    """Dispersive Hamiltonian with Stark shifts and atom-atom exchange.

    ``lam * sum_j (|e_j><e_j| a a^+ - |g_j><g_j| a^+ a)
    + lam * sum_{j != k} s+_j s-_k`` with ``lam = g^2 / Delta``.
    ``a a^+`` is taken in the truncated Fock space.
    """
    N = params.N
    _check_oracle(N, fock_cutoff, max_atoms)
    _full_dim(2, N, fock_cutoff)
    lam = params.g**2 / params.Delta
    a = embed_field_op(annihilation(fock_cutoff), N, 2)
    a_dag = a.conj().T
    lowers = [embed_atom_op(transition(2, GROUND, EXCITED), j, N, fock_cutoff)
              for j in range(N)]
    h = np.zeros_like(a)
    for j in range(N):
        pe = embed_atom_op(transition(2, EXCITED, EXCITED), j, N, fock_cutoff)
        pg = embed_atom_op(transition(2, GROUND, GROUND), j, N, fock_cutoff)
        h += lam * (pe @ a @ a_dag - pg @ a_dag @ a)
    for j in range(N):
        for k in range(N):
            if j != k:
                h += lam * lowers[j].conj().T @ lowers[k]
    return h


def lambda_full_h(params: LambdaParams, fock_cutoff=DEFAULT_FOCK_CUTOFF, *,
                  max_atoms=MAX_ORACLE_ATOMS) -> np.ndarray:
    """Rotating-frame Lambda Hamiltonian on the full space.

    ``sum_j [-(delta+Delta)|g_j><g_j| - Delta|s_j><s_j|
    + (g |e_j><g_j| a + Omega |e_j><s_j| + h.c.)]``
    """
    N = params.N
    _check_oracle(N, fock_cutoff, max_atoms)
    _full_dim(3, N, fock_cutoff)
    a = embed_field_op(annihilation(fock_cutoff), N, 3)
    h = np.zeros_like(a)
    for j in range(N):
        site = lambda op: embed_atom_op(op, j, N, fock_cutoff)  # noqa: E731
        h -= (params.delta + params.Delta) * site(transition(3, GROUND, GROUND))
        h -= params.Delta * site(transition(3, STORAGE, STORAGE))
        up = params.g * site(transition(3, EXCITED, GROUND)) @ a
        up = up + params.Omega * site(transition(3, EXCITED, STORAGE))
        h += up + up.conj().T
    return h


# ---------------------------------------------------------------- collective


def two_level_collective_h(params: TwoLevelParams, *, global_phase=False) -> np.ndarray:
    """2x2 Hamiltonian on ``(|+>, |->)``: ``[[D/2, sqrt(N) g], [sqrt(N) g, -D/2]]``.

    The uniform shift ``-(N-1) Delta / 2`` only contributes a global phase
    and is omitted unless ``global_phase`` is set.
    """
    c = params.coupling
    half = 0.5 * params.Delta
    h = np.array([[half, c], [c, -half]], dtype=complex)
    if global_phase:
        h -= 0.5 * (params.N - 1) * params.Delta * np.eye(2)
    return h


def two_level_effective_collective_h(params: TwoLevelParams) -> np.ndarray:
    """Dispersive Hamiltonian restricted to ``(|+>, |->)``: ``diag(Ng^2/D, -Ng^2/D)``."""
    shift = params.coupling**2 / params.Delta
    return np.diag([shift, -shift]).astype(complex)


def lambda_resonant_h(params: LambdaParams) -> np.ndarray:
    """3x3 Hamiltonian on ``(|u1>, |u2>, |u3>)`` at two-photon resonance."""
    if params.delta != 0:
        raise ExpectedResonance(
            f"two-photon resonance requires delta = 0, got {params.delta}"
        )
    c, om = params.coupling, params.Omega
    return np.array([[params.Delta, c, om], [c, 0, 0], [om, 0, 0]], dtype=complex)


def lambda_nonresonant_h(params: LambdaParams, *, global_phase=False) -> np.ndarray:
    """3x3 Hamiltonian ``[[delta+Delta, sqrt(N) g, Omega], [sqrt(N) g, 0, 0], [Omega, 0, delta]]``.

    The omitted uniform shift is ``-N (delta + Delta)``.
    """
    c, om, d = params.coupling, params.Omega, params.delta
    h = np.array([[d + params.Delta, c, om], [c, 0, 0], [om, 0, d]], dtype=complex)
    if global_phase:
        h -= params.N * (d + params.Delta) * np.eye(3)
    return h
