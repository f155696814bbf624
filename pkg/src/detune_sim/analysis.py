"""Leakage metrics, detuning thresholds, scaling fits and parameter sweeps."""
from __future__ import annotations

import hashlib
import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .dissipative import DecayModel, simulate_collective_decay
from .errors import DomainError, InsufficientPoints, UnknownMetric, ValidationError
from .models import (
    LambdaParams,
    TwoLevelParams,
    two_level_collective_h,
    two_level_effective_collective_h,
)
from .numerics import hermitian_eig, unitary_propagator
from .propagators import (
    SCAN_POINTS,
    lambda_trajectory,
    max_leakage_two_level,
    two_level_u,
)

DEFAULT_THRESHOLD = 10.0

# ---------------------------------------------------------------- conditions

COLLECTIVE = "Delta/(sqrtN g)"
LEGACY = "Delta/g"
DRIVE = "Delta/Omega"
RAMAN = "delta/(sqrtN g Omega/Delta)"


def _ratio(num, den):
    num, den = abs(num), abs(den)
    if den == 0:
        return math.inf if num > 0 else math.nan
    return num / den


@dataclass
class ConditionReport:
    ratios: dict[str, float]
    threshold: float
    verdicts: dict[str, bool]
    legacy_verdict: bool

    def format(self) -> str:
        lines = [f"threshold (>>): {self.threshold:g}"]
        for name, value in self.ratios.items():
            if name == LEGACY:
                continue
            mark = "pass" if self.verdicts[name] else "FAIL"
            lines.append(f"  {name:<28} = {value:<12.6g} {mark}")
        mark = "pass" if self.legacy_verdict else "FAIL"
        lines.append(f"  {LEGACY:<28} = {self.ratios[LEGACY]:<12.6g} {mark} (single-atom condition)")
        return "\n".join(lines)


def condition_report(params, threshold=DEFAULT_THRESHOLD) -> ConditionReport:
    """Evaluate the large-detuning conditions as ratios against ``threshold``.

    A ratio ``x`` passes when ``x >= threshold``. The legacy verdict applies
    the same threshold to ``Delta/g`` alone.
    """
    if not threshold > 1:
        raise DomainError("threshold must be > 1")
    ratios = {
        COLLECTIVE: _ratio(params.Delta, params.coupling),
        LEGACY: _ratio(params.Delta, params.g),
    }
    if isinstance(params, LambdaParams):
        ratios[DRIVE] = _ratio(params.Delta, params.Omega)
        raman_rabi = params.coupling * params.Omega / params.Delta
        ratios[RAMAN] = _ratio(params.delta, raman_rabi)
    verdicts = {k: bool(v >= threshold) for k, v in ratios.items() if k != LEGACY}
    return ConditionReport(ratios, threshold, verdicts, bool(ratios[LEGACY] >= threshold))


# ---------------------------------------------------------------- thresholds


def min_detuning(N, g, leak_tol) -> float:
    """Smallest detuning whose peak leakage does not exceed ``leak_tol``.

    Inverts ``theta^2 / (1 + theta^2) = leak_tol`` with ``theta = 2 sqrt(N) g / Delta``.
    """
    if not 0 < leak_tol < 1:
        raise DomainError(f"leak_tol must lie in (0, 1), got {leak_tol}")
    delta_star = 2.0 * math.sqrt(N) * g * math.sqrt((1.0 - leak_tol) / leak_tol)
    if g > 0:
        at = max_leakage_two_level(TwoLevelParams(N, g, delta_star))
        below = max_leakage_two_level(TwoLevelParams(N, g, 0.99 * delta_star))
        if at > leak_tol + 1e-12 or not below > leak_tol:
            raise ArithmeticError("analytic threshold failed its own leakage check")
    return delta_star


def numeric_max_leakage(params: TwoLevelParams, points=SCAN_POINTS) -> float:
    """Peak ``|<-|U(t)|+>|^2`` from a dense scan of the numeric propagator.

    The scan covers one period of the fast oscillation, read off the
    numeric eigenvalue gap; accuracy is limited by the scan resolution.
    """
    h = two_level_collective_h(params)
    gap = np.ptp(hermitian_eig(h).eigenvalues)
    if gap == 0:
        return 0.0
    t = np.linspace(0.0, 2.0 * math.pi / gap, points)
    return float(np.max(np.abs(unitary_propagator(h, t)[:, 1, 0]) ** 2))


def min_detuning_bisection(N, g, leak_tol, tol=1e-4, points=SCAN_POINTS) -> float:
    """Cross-check of :func:`min_detuning` by bisection on the numeric scan."""
    if not 0 < leak_tol < 1:
        raise DomainError(f"leak_tol must lie in (0, 1), got {leak_tol}")

    def leak(delta):
        return numeric_max_leakage(TwoLevelParams(N, g, delta), points)

    lo = hi = max(g * math.sqrt(N), 1e-12)
    while leak(lo) <= leak_tol:
        lo /= 2
    while leak(hi) > leak_tol:
        hi *= 2
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if leak(mid) > leak_tol:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def scaling_exponent(g, leak_tol, N_list, method="analytic") -> float:
    """Least-squares slope of ``log Delta*`` against ``log N``."""
    ns = sorted(set(int(n) for n in N_list))
    if len(ns) < 3:
        raise InsufficientPoints(f"need at least 3 distinct N, got {ns}")
    if method == "analytic":
        finder = min_detuning
    elif method == "bisection":
        finder = min_detuning_bisection
    else:
        raise ValueError(f"unknown method {method!r}")
    x = np.log(ns)
    y = np.log([finder(n, g, leak_tol) for n in ns])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


# ---------------------------------------------------------------- fidelity


def effective_fidelity(params: TwoLevelParams, t, initial=(1, 0)):
    """Overlap of exact and dispersive evolution in the interaction frame.

    The exact state is ``diag(e^{i D t/2}, e^{-i D t/2}) U(t) psi0``, which
    restores the rotating-frame and global phases dropped from ``U``; the
    effective state evolves under ``diag(Ng^2/D, -Ng^2/D)``. Accepts scalar
    or array ``t``.
    """
    psi0 = np.asarray(initial, dtype=complex)
    psi0 = psi0 / np.linalg.norm(psi0)
    t_arr = np.asarray(t, dtype=float)
    frame = np.exp(0.5j * params.Delta * np.multiply.outer(t_arr, [1.0, -1.0]))
    exact = frame * (two_level_u(params, t_arr) @ psi0)
    shifts = np.diag(two_level_effective_collective_h(params)).real
    eff = np.exp(-1j * np.multiply.outer(t_arr, shifts)) * psi0
    overlap = np.sum(exact.conj() * eff, axis=-1)
    fid = np.clip(np.abs(overlap) ** 2, 0.0, 1.0)
    return float(fid) if fid.ndim == 0 else fid


# ---------------------------------------------------------------- sweeps


@dataclass
class SweepSpec:
    """One sweep: base parameters, swept axes and the metrics to record.

    Axis and base keys are parameter names (``N``, ``g``, ``Delta``,
    ``kappa``, ``gamma``, ``Omega``, ``delta``) or ``leak_tol``.
    """

    axes: dict[str, list]
    metrics: list[str]
    base: dict[str, Any] = field(default_factory=dict)
    t_max: float | None = None
    grid_points: int = 2001
    leak_tol: float = 0.01
    gamma_scaling: int | str = 1

    def canonical(self) -> dict:
        return {
            "axes": {k: list(self.axes[k]) for k in sorted(self.axes)},
            "metrics": list(self.metrics),
            "base": {k: self.base[k] for k in sorted(self.base)},
            "t_max": self.t_max,
            "grid_points": self.grid_points,
            "leak_tol": self.leak_tol,
            "gamma_scaling": self.gamma_scaling,
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class SweepResult:
    axes: dict[str, list]
    rows: list[tuple[dict, str, float]]
    provenance: str

    @property
    def columns(self) -> list[str]:
        return [*self.axes, "metric", "value"]

    def values(self, metric: str) -> list[float]:
        return [v for _, m, v in self.rows if m == metric]


TWO_LEVEL_KEYS = ("N", "g", "Delta", "kappa", "gamma")
LAMBDA_KEYS = ("N", "g", "Omega", "Delta", "delta")


def _two_level(point) -> TwoLevelParams:
    return TwoLevelParams(**{k: point[k] for k in TWO_LEVEL_KEYS if k in point})


def _lambda(point) -> LambdaParams:
    return LambdaParams(**{k: point[k] for k in LAMBDA_KEYS if k in point})


def _time_grid(point, spec: SweepSpec):
    t_max = spec.t_max if spec.t_max is not None else 100.0 / point.get("g", 1.0)
    return np.linspace(0.0, t_max, spec.grid_points)


def _metric_max_leakage(point, spec):
    return max_leakage_two_level(_two_level(point))


def _metric_fidelity_min(point, spec):
    return float(np.min(effective_fidelity(_two_level(point), _time_grid(point, spec))))


def _metric_min_detuning(point, spec):
    return min_detuning(int(point["N"]), point["g"], point.get("leak_tol", spec.leak_tol))


def _metric_raman_max(point, spec):
    traj = lambda_trajectory(_lambda(point), _time_grid(point, spec))
    return float(np.max(traj.series["pop_u3"]))


def _metric_avg_pop_plus(point, spec):
    traj = simulate_collective_decay(
        _two_level(point), DecayModel(gamma_scaling=spec.gamma_scaling),
        _time_grid(point, spec),
    )
    return traj.time_average("pop_plus")


METRICS: dict[str, Callable[[dict, SweepSpec], float]] = {
    "max_leakage": _metric_max_leakage,
    "fidelity_min": _metric_fidelity_min,
    "min_detuning": _metric_min_detuning,
    "raman_max": _metric_raman_max,
    "avg_pop_plus": _metric_avg_pop_plus,
}


def sweep(spec: SweepSpec, jobs: int = 1) -> SweepResult:
    """Evaluate every metric at every grid point.

    Rows are ordered lexicographically over the axes (sorted by name), then
    by metric in the order given. The result does not depend on ``jobs``.
    """
    if not spec.metrics:
        raise ValidationError("sweep needs at least one metric", key="metrics")
    for name in spec.metrics:
        if name not in METRICS:
            raise UnknownMetric(f"unknown metric {name!r}; known: {sorted(METRICS)}")
    if not spec.axes or any(len(v) == 0 for v in spec.axes.values()):
        raise ValidationError("sweep axes must be non-empty", key="axes")

    names = sorted(spec.axes)
    points = [
        {**spec.base, **dict(zip(names, combo))}
        for combo in itertools.product(*(spec.axes[n] for n in names))
    ]
    tasks = [(p, m) for p in points for m in spec.metrics]

    def evaluate(task):
        point, metric = task
        return float(METRICS[metric](point, spec))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            values = list(pool.map(evaluate, tasks))
    else:
        values = [evaluate(t) for t in tasks]
    rows = [({n: p[n] for n in names}, m, v) for (p, m), v in zip(tasks, values)]
    return SweepResult({n: list(spec.axes[n]) for n in names}, rows, spec.config_hash())
