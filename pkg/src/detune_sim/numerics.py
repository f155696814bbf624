"""Dense complex linear algebra and integration kernels.

Matrices and vectors are plain ``numpy`` arrays of dtype ``complex128``.
Everything here is a pure function of its inputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonHermitian, NonPhysicalState
from .trajectory import Trajectory

HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class EigDecomposition:
    eigenvalues: np.ndarray  # real, ascending
    eigenvectors: np.ndarray  # columns are orthonormal eigenvectors

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    return a


def hermitian_violation(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def is_hermitian(m, tol=HERMITIAN_TOL) -> bool:
    a = as_matrix(m)
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    return hermitian_violation(a) <= tol * max(scale, 1e-300)


def check_hermitian(m, tol=HERMITIAN_TOL) -> np.ndarray:
    a = as_matrix(m)
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    violation = hermitian_violation(a)
    if violation > tol * scale:
        raise NonHermitian(violation, scale)
    return a


def hermitian_eig(m, tol=HERMITIAN_TOL) -> EigDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Raises :class:`NonHermitian` when ``max|M - M^H| > tol * max|M|``.
    """
    a = check_hermitian(m, tol)
    if a.shape[0] == 0:
        raise DimensionMismatch("cannot diagonalize an empty matrix")
    # symmetrize so tiny asymmetries below tolerance do not bias LAPACK
    w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
    return EigDecomposition(w, v)


def unitary_propagator(h, t) -> np.ndarray:
    """``exp(-i t H)`` for Hermitian ``H``.

    ``t`` may be a scalar or a 1-d array; an array gives a stack of
    propagators with time along the first axis.
    """
    eig = hermitian_eig(h)
    v = eig.eigenvectors
    t_arr = np.asarray(t, dtype=float)
    phases = np.exp(-1j * np.multiply.outer(t_arr, eig.eigenvalues))
    return np.einsum("ij,...j,kj->...ik", v, phases, v.conj())


# ---------------------------------------------------------------- Lindblad


def lindblad_rhs(rho, h, collapse_ops=()) -> np.ndarray:
    """Right-hand side of the Lindblad equation evaluated directly."""
    out = -1j * (h @ rho - rho @ h)
    for op in collapse_ops:
        op_dag = op.conj().T
        n = op_dag @ op
        out = out + op @ rho @ op_dag - 0.5 * (n @ rho + rho @ n)
    return out


def lindblad_superoperator(h, collapse_ops=()) -> np.ndarray:
    """Generator acting on row-major ``rho.reshape(-1)``.

    Uses ``vec(A rho B) = (A kron B^T) vec(rho)`` for row-major vectorization.
    """
    h = as_matrix(h)
    d = h.shape[0]
    eye = np.eye(d)
    gen = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for op in collapse_ops:
        op = as_matrix(op)
        n = op.conj().T @ op
        gen += np.kron(op, op.conj()) - 0.5 * (np.kron(n, eye) + np.kron(eye, n.T))
    return gen


def rk4_step_matrix(generator: np.ndarray, h: float) -> np.ndarray:
    """One classical RK4 step for ``dy/dt = G y`` written as a matrix.

    For a constant linear generator the four RK4 stages collapse to the
    degree-4 Taylor polynomial of ``exp(h G)``.
    """
    a = h * generator
    eye = np.eye(a.shape[0], dtype=complex)
    a2 = a @ a
    return eye + a + a2 / 2 + a2 @ a / 6 + a2 @ a2 / 24


def default_step(h, t_grid) -> float:
    """``min(0.01 / ||H||_rowsum, (t_end - t_0) / 2000)``."""
    span = float(t_grid[-1] - t_grid[0])
    norm = float(np.max(np.sum(np.abs(h), axis=1))) if h.size else 0.0
    candidates = [span / 2000.0] if span > 0 else []
    if norm > 0:
        candidates.append(0.01 / norm)
    return min(candidates) if candidates else 1.0


def _validate_density_matrix(rho, tol=1e-10):
    if hermitian_violation(rho) > tol * max(1.0, float(np.max(np.abs(rho)))):
        raise NonPhysicalState("initial density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol:
        raise NonPhysicalState(f"initial density matrix has trace {tr!r}, expected 1")
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    if min_eig < -tol:
        raise NonPhysicalState(
            f"initial density matrix has negative eigenvalue {min_eig:.3e}"
        )


def integrate_lindblad(
    rho0,
    h,
    collapse_ops=(),
    t_grid=None,
    *,
    step: float | None = None,
    populations: dict[str, np.ndarray] | None = None,
) -> Trajectory:
    """Fixed-step RK4 integration of the Lindblad master equation.

    Solves ``d rho/dt = -i[H, rho] + sum_k (L rho L^+ - {L^+ L, rho}/2)``
    on ``t_grid``. Each grid interval is split into the smallest number of
    equal substeps not exceeding ``step`` (default :func:`default_step`).

    ``populations`` maps output names to projectors (or any observable);
    by default one series ``p<i>`` per basis state is reported.
    Trace, minimum eigenvalue and purity are returned as diagnostics.
    """
    rho0 = as_matrix(rho0)
    h = as_matrix(h)
    d = h.shape[0]
    if rho0.shape != (d, d):
        raise DimensionMismatch(f"rho0 has shape {rho0.shape}, H has shape {h.shape}")
    ops = [as_matrix(op) for op in collapse_ops]
    for k, op in enumerate(ops):
        if op.shape != (d, d):
            raise DimensionMismatch(f"collapse operator {k} has shape {op.shape}")
    check_hermitian(h)
    _validate_density_matrix(rho0)

    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise DimensionMismatch("t_grid must be a non-empty 1-d array")
    if np.any(np.diff(t_grid) < 0):
        raise ValueError("t_grid must be ascending")

    h_max = default_step(h, t_grid) if step is None else float(step)
    if h_max <= 0:
        raise ValueError("step must be positive")

    gen = lindblad_superoperator(h, ops)
    cache: dict[tuple[int, float], np.ndarray] = {}

    def interval_propagator(dt: float) -> np.ndarray:
        n = max(1, math.ceil(dt / h_max * (1 - 1e-12)))
        # quantize the key so float noise in a uniform grid reuses one matrix
        key = (n, round(dt, 13))
        if key not in cache:
            cache[key] = np.linalg.matrix_power(rk4_step_matrix(gen, key[1] / n), n)
        return cache[key]

    rhos = np.empty((t_grid.size, d, d), dtype=complex)
    vec = rho0.reshape(-1).copy()
    rhos[0] = rho0
    for i, dt in enumerate(np.diff(t_grid), start=1):
        if dt > 0:
            vec = interval_propagator(float(dt)) @ vec
        rhos[i] = vec.reshape(d, d)

    if populations is None:
        populations = {f"p{i}": np.diag(np.eye(d)[i]) for i in range(d)}
    series = {
        name: np.einsum("ij,tji->t", as_matrix(obs), rhos).real
        for name, obs in populations.items()
    }
    herm = 0.5 * (rhos + np.conj(np.swapaxes(rhos, 1, 2)))
    diagnostics = {
        "trace": np.trace(rhos, axis1=1, axis2=2).real,
        "min_eig": np.linalg.eigvalsh(herm)[:, 0],
        "purity": np.einsum("tij,tji->t", rhos, rhos).real,
    }
    return Trajectory(
        times=t_grid,
        series=series,
        metadata={"step": h_max, "dimension": d, "collapse_ops": len(ops)},
        diagnostics=diagnostics,
        states=rhos,
    )


# ---------------------------------------------------------------- polynomials


def _companion_roots(coeffs) -> np.ndarray:
    """Roots of the monic polynomial ``p^n + c[0] p^(n-1) + ... + c[-1]``."""
    n = len(coeffs)
    comp = np.zeros((n, n), dtype=complex)
    comp[0, :] = -np.asarray(coeffs, dtype=complex)
    comp[np.arange(1, n), np.arange(n - 1)] = 1.0
    return np.linalg.eigvals(comp)


def cubic_roots(c2, c1, c0) -> np.ndarray:
    """Three complex roots of ``p^3 + c2 p^2 + c1 p + c0`` with multiplicity.

    Computed as companion-matrix eigenvalues. A vanishing constant term is
    deflated so that the root at zero is returned exactly. Roots are sorted
    by real part, then imaginary part.
    """
    for c in (c2, c1, c0):
        if not np.isfinite(c):
            raise ValueError("cubic coefficients must be finite")
    if c0 == 0:
        rest = _companion_roots([c2, c1]) if c1 != 0 else np.array([-c2, 0.0])
        roots = np.concatenate([[0.0], rest])
    else:
        roots = _companion_roots([c2, c1, c0])
    roots = np.asarray(roots, dtype=complex)
    return roots[np.lexsort((roots.imag, roots.real))]
