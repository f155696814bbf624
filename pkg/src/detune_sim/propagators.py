"""Closed-form propagators and the nonresonant Lambda solution.

All propagators act on the collective bases of :mod:`detune_sim.models`
and drop the uniform (global-phase) part of the Hamiltonian.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguousBranches, DegenerateScale, ExpectedResonance, NonPhysicalState
from .models import LambdaParams, TwoLevelParams, lambda_nonresonant_h
from .numerics import hermitian_eig
from .trajectory import Trajectory

SCAN_POINTS = 4001
EPSILON_WARN = 0.2


# ---------------------------------------------------------------- two-level


@dataclass(frozen=True)
class TwoLevelClosedForm:
    theta: float
    alpha: float
    beta: float


def two_level_closed_form(params: TwoLevelParams) -> TwoLevelClosedForm:
    theta = 2.0 * params.coupling / params.Delta
    alpha = math.sqrt(1.0 + theta * theta)
    return TwoLevelClosedForm(theta, alpha, abs(theta) / alpha)


def two_level_u(params: TwoLevelParams, t) -> np.ndarray:
    """Exact 2x2 propagator on ``(|+>, |->)``.

    ``[[A-, B], [B, A+]]`` with ``A± = cos x ± (i/alpha) sin x``,
    ``B = -i beta sin x`` and ``x = alpha Delta t / 2``. For negative
    detuning ``B`` picks up the sign of ``theta``. ``t`` may be an array.
    """
    cf = two_level_closed_form(params)
    x = 0.5 * cf.alpha * params.Delta * np.asarray(t, dtype=float)
    cos, sin = np.cos(x), np.sin(x)
    a_minus = cos - 1j * sin / cf.alpha
    a_plus = cos + 1j * sin / cf.alpha
    b = -1j * (cf.theta / cf.alpha) * sin
    u = np.empty(x.shape + (2, 2), dtype=complex)
    u[..., 0, 0] = a_minus
    u[..., 0, 1] = b
    u[..., 1, 0] = b
    u[..., 1, 1] = a_plus
    return u


def max_leakage_two_level(params: TwoLevelParams) -> float:
    """Peak ``|+> -> |->`` transfer probability ``theta^2 / (1 + theta^2)``."""
    theta = 2.0 * params.coupling / params.Delta
    return theta * theta / (1.0 + theta * theta)


def two_level_period(params: TwoLevelParams) -> float:
    """Period ``2 pi / (alpha |Delta|)`` of the fast oscillation."""
    cf = two_level_closed_form(params)
    return 2.0 * math.pi / (cf.alpha * abs(params.Delta))


def scan_grid(period, points=SCAN_POINTS) -> np.ndarray:
    return np.linspace(0.0, period, points)


# ---------------------------------------------------------------- Lambda, resonant


@dataclass(frozen=True)
class LambdaClosedForm:
    eta: float
    alpha: float
    beta: float
    gamma: float


def lambda_closed_form(params: LambdaParams) -> LambdaClosedForm:
    c, om, d = params.coupling, params.Omega, params.Delta
    root = math.sqrt(4 * c * c + 4 * om * om + d * d)
    eta = c / om if om > 0 else math.inf
    return LambdaClosedForm(eta, root / d, 2 * c / root, 2 * om / root)


def lambda_resonant_u(params: LambdaParams, t) -> np.ndarray:
    """Exact 3x3 propagator at two-photon resonance, global factor stripped.

    ``exp(-i t H) = exp(-i t Delta / 2) * U(t)``. ``U`` is symmetric; the
    cavity/drive couplings enter through the bright-state weights
    ``Ng^2/(Ng^2 + Omega^2)`` and ``Omega^2/(Ng^2 + Omega^2)``, which stay
    finite for ``Omega = 0`` (and for ``g = Omega = 0``, where the two
    lower states evolve identically).
    """
    if params.delta != 0:
        raise ExpectedResonance(
            f"two-photon resonance requires delta = 0, got {params.delta}"
        )
    cf = lambda_closed_form(params)
    c, om = params.coupling, params.Omega
    r2 = c * c + om * om
    if r2 > 0:
        w_cav, w_drive, w_cross = c * c / r2, om * om / r2, c * om / r2
    else:
        w_cav, w_drive, w_cross = 0.5, 0.5, 0.0

    t = np.asarray(t, dtype=float)
    x = 0.5 * params.Delta * cf.alpha * t
    cos, sin = np.cos(x), np.sin(x)
    a_minus = cos - 1j * sin / cf.alpha
    a_plus = cos + 1j * sin / cf.alpha
    dark = np.exp(0.5j * params.Delta * t)

    u = np.empty(t.shape + (3, 3), dtype=complex)
    u[..., 0, 0] = a_minus
    u[..., 0, 1] = u[..., 1, 0] = -1j * cf.beta * sin
    u[..., 0, 2] = u[..., 2, 0] = -1j * cf.gamma * sin
    u[..., 1, 1] = w_cav * a_plus + w_drive * dark
    u[..., 2, 2] = w_drive * a_plus + w_cav * dark
    u[..., 1, 2] = u[..., 2, 1] = w_cross * (a_plus - dark)
    return u


def lambda_resonant_max_excited(params: LambdaParams) -> float:
    """Peak population of ``|u1>`` starting from ``|u2>``: ``4Ng^2 / (4Ng^2 + 4 Omega^2 + Delta^2)``."""
    return lambda_closed_form(params).beta ** 2


def lambda_period(params: LambdaParams) -> float:
    cf = lambda_closed_form(params)
    return 2.0 * math.pi / abs(cf.alpha * params.Delta)


# ---------------------------------------------------------------- Lambda, nonresonant


@dataclass(frozen=True)
class ReducedVariables:
    eps: float
    lam: float
    lam_c: float
    lam_l: float

    def physical_ratios(self):
        """``(delta/Delta, sqrt(N) g/Delta, Omega/Delta)``."""
        return self.lam * self.eps, self.lam_c * self.eps, self.lam_l * self.eps


def reduce_variables(params: LambdaParams) -> ReducedVariables:
    """Rescale by ``eps = max(|delta|, sqrt(N) g, Omega) / |Delta|``."""
    ratios = (
        params.delta / params.Delta,
        params.coupling / params.Delta,
        params.Omega / params.Delta,
    )
    eps = max(abs(r) for r in ratios)
    if eps == 0:
        raise DegenerateScale("delta, sqrt(N) g and Omega all vanish")
    lam, lam_c, lam_l = (r / eps for r in ratios)
    return ReducedVariables(eps, lam, lam_c, lam_l)


def characteristic_coefficients(rv: ReducedVariables):
    """``(c2, c1, c0)`` of the monic cubic whose roots are the eigenvalues over Delta."""
    e, lam, lc, ll = rv.eps, rv.lam, rv.lam_c, rv.lam_l
    c2 = -(2 * lam * e + 1)
    c1 = -(lc**2 * e**2 + ll**2 * e**2 - lam**2 * e**2 - lam * e)
    c0 = lam * lc**2 * e**3
    return c2, c1, c0


def expansion_roots(rv: ReducedVariables) -> np.ndarray:
    """First-order roots ``(1 + lam eps, 0, lam eps)``."""
    return np.array([1 + rv.lam * rv.eps, 0.0, rv.lam * rv.eps])


def assign_branches(exact, expansion, tol=1e-12) -> list[int]:
    """Map each expansion branch to one exact root by greedy nearest neighbour.

    Returns ``idx`` with ``exact[idx[j]]`` assigned to ``expansion[j]``.
    Raises :class:`AmbiguousBranches` when two exact roots are within
    ``tol`` of the same branch.
    """
    exact = np.asarray(exact, dtype=float)
    expansion = np.asarray(expansion, dtype=float)
    dist = np.abs(exact[:, None] - expansion[None, :])
    for j in range(len(expansion)):
        close = np.flatnonzero(dist[:, j] <= tol)
        if len(close) > 1:
            raise AmbiguousBranches(
                f"exact roots {exact[close]} are all within {tol} of branch {j}"
            )
    order = sorted(
        ((dist[i, j], i, j) for i in range(len(exact)) for j in range(len(expansion)))
    )
    idx = [-1] * len(expansion)
    used = set()
    for _, i, j in order:
        if idx[j] < 0 and i not in used:
            idx[j] = i
            used.add(i)
    return idx


@dataclass
class NonresonantSolution:
    """Eigenfrequencies (units of Delta) and Fourier coefficients per branch.

    Index ``j`` runs over branches ``p1 ~ 1 + lam eps``, ``p2 ~ 0``,
    ``p3 ~ lam eps``. ``alpha[j]``, ``beta[j]``, ``gamma[j]`` are the
    weights of ``exp(-i t Delta p_j)`` in the ``|u1>``, ``|u2>``, ``|u3>``
    amplitudes.
    """

    roots: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    Delta: float
    mode: str
    valid: bool = True
    notes: list[str] = field(default_factory=list)

    @property
    def coefficients(self) -> np.ndarray:
        """3x3 array: rows ``(alpha, beta, gamma)``, columns branches."""
        return np.vstack([self.alpha, self.beta, self.gamma])

    def amplitudes(self, t) -> np.ndarray:
        """State amplitudes at times ``t``; shape ``(len(t), 3)``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        phases = np.exp(-1j * self.Delta * np.multiply.outer(t, self.roots))
        return phases @ self.coefficients.T


def _initial_vector(initial) -> np.ndarray:
    psi = np.asarray(initial, dtype=complex).reshape(-1)
    if psi.shape != (3,):
        raise ValueError("initial state must have three amplitudes (alpha0, beta0, gamma0)")
    norm2 = float(np.vdot(psi, psi).real)
    if abs(norm2 - 1.0) > 1e-10:
        raise NonPhysicalState(f"initial state has squared norm {norm2!r}, expected 1")
    return psi


def _population_trajectory(times, amps, metadata) -> Trajectory:
    pops = np.abs(amps) ** 2
    return Trajectory(
        times=times,
        series={"pop_u1": pops[:, 0], "pop_u2": pops[:, 1], "pop_u3": pops[:, 2]},
        metadata=metadata,
        diagnostics={"norm": pops.sum(axis=1)},
        states=amps,
    )


def lambda_nonresonant_exact(params: LambdaParams, initial=(0, 1, 0), t_grid=None):
    """Exact evolution by diagonalizing the 3x3 rotating-frame Hamiltonian.

    Returns ``(trajectory, solution)``; ``trajectory`` is None when no
    ``t_grid`` is given.
    """
    psi0 = _initial_vector(initial)
    eig = hermitian_eig(lambda_nonresonant_h(params))
    roots = eig.eigenvalues / params.Delta
    v = eig.eigenvectors
    weights = v.conj().T @ psi0
    coeffs = v * weights  # column k: v_k <v_k|psi0>

    notes = []
    expansion = np.array([1 + params.delta / params.Delta, 0.0, params.delta / params.Delta])
    try:
        idx = assign_branches(roots, expansion)
    except AmbiguousBranches as exc:
        idx = [2, 0, 1] if params.Delta > 0 else [0, 2, 1]
        notes.append(f"branch labels arbitrary: {exc}")
    solution = NonresonantSolution(
        roots=roots[idx],
        alpha=coeffs[0, idx],
        beta=coeffs[1, idx],
        gamma=coeffs[2, idx],
        Delta=params.Delta,
        mode="exact",
        valid=not notes,
        notes=notes,
    )
    if t_grid is None:
        return None, solution
    t_grid = np.asarray(t_grid, dtype=float)
    meta = {"model": "lambda", "solver": "eigendecomposition", "params": params}
    return _population_trajectory(t_grid, solution.amplitudes(t_grid), meta), solution


def lambda_nonresonant_perturbative(params: LambdaParams, initial=(0, 1, 0)) -> NonresonantSolution:
    """First-order expansion of roots and coefficients in ``eps``.

    Coefficients dividing by ``lam`` are NaN at exact two-photon resonance.
    ``valid`` is cleared (with a note) when ``eps >= 0.2``, when
    ``|lam| eps <= |lam_c lam_l| eps^2``, or when the Stark shifts
    ``(lam_c^2 + lam_l^2) eps^2`` exceed the two-photon detuning ``|lam| eps``;
    each of these breaks the ordering the expansion relies on.
    """
    a0, b0, g0 = _initial_vector(initial)
    rv = reduce_variables(params)
    e, lam, lc, ll = rv.eps, rv.lam, rv.lam_c, rv.lam_l
    notes = []
    if e >= EPSILON_WARN:
        warnings.warn(f"eps = {e:.3g} is not small; first-order expansion unreliable",
                      stacklevel=2)
        notes.append(f"eps = {e:.3g} >= {EPSILON_WARN}")
    if abs(lam) * e <= abs(lc * ll) * e * e:
        notes.append("two-photon detuning not large against the Raman coupling")
    if (lc * lc + ll * ll) * e * e > abs(lam) * e:
        notes.append("Stark shifts exceed the two-photon detuning")

    def over_lam(num):
        if lam != 0:
            return num / lam
        return 0.0 if num == 0 else math.nan

    alpha = np.array([a0 + (b0 * lc + g0 * ll) * e, -b0 * lc * e, -g0 * ll * e])
    beta = np.array([
        a0 * lc * e,
        b0 + over_lam(lc * (g0 * ll - lam * a0) * e),
        over_lam(-g0 * lc * ll * e),
    ])
    gamma = np.array([
        a0 * ll * e,
        over_lam(b0 * lc * ll * e),
        g0 - over_lam((lam * a0 + b0 * lc) * ll * e),
    ])
    if np.isnan(beta).any() or np.isnan(gamma).any():
        notes.append("lam = 0: coefficients with 1/lam are singular")
    return NonresonantSolution(
        roots=expansion_roots(rv),
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        Delta=params.Delta,
        mode="perturbative",
        valid=not notes,
        notes=notes,
    )


# ---------------------------------------------------------------- trajectories


def two_level_trajectory(params: TwoLevelParams, t_grid, initial=(1, 0)) -> Trajectory:
    """Closed-form populations of ``|+>`` and ``|->`` without dissipation."""
    psi0 = np.asarray(initial, dtype=complex)
    t_grid = np.asarray(t_grid, dtype=float)
    amps = two_level_u(params, t_grid) @ psi0
    pops = np.abs(amps) ** 2
    return Trajectory(
        times=t_grid,
        series={"pop_plus": pops[:, 0], "pop_minus": pops[:, 1]},
        metadata={"model": "two_level", "solver": "closed_form", "params": params},
        states=amps,
    )


def lambda_trajectory(params: LambdaParams, t_grid, initial=(0, 1, 0)) -> Trajectory:
    """Lambda populations: closed form at resonance, eigen-solution otherwise."""
    if params.delta == 0:
        psi0 = _initial_vector(initial)
        t_grid = np.asarray(t_grid, dtype=float)
        amps = lambda_resonant_u(params, t_grid) @ psi0
        meta = {"model": "lambda", "solver": "closed_form", "params": params}
        return _population_trajectory(t_grid, amps, meta)
    traj, _ = lambda_nonresonant_exact(params, initial, t_grid)
    return traj
