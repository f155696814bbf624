"""Container for time-resolved simulation output."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np


@dataclass
class Trajectory:
    """Time grid plus named real-valued series sampled on it.

    ``series`` holds the physical outputs (populations, expectation values)
    and is what gets written to CSV. ``diagnostics`` holds integrator
    health checks (trace, minimum eigenvalue, purity) on the same grid.
    ``states`` optionally keeps the raw amplitudes or density matrices,
    indexed by time along the first axis.
    """

    times: np.ndarray
    series: dict[str, np.ndarray]
    metadata: dict[str, Any] = field(default_factory=dict)
    diagnostics: dict[str, np.ndarray] = field(default_factory=dict)
    states: np.ndarray | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        n = self.times.shape[0]
        for name, values in {**self.series, **self.diagnostics}.items():
            if len(values) != n:
                raise ValueError(
                    f"series {name!r} has length {len(values)}, grid has {n}"
                )

    def __len__(self):
        return self.times.shape[0]

    @property
    def columns(self) -> list[str]:
        return ["t", *self.series]

    def check_populations(self, tol=1e-8) -> bool:
        """True if every series value lies in [-tol, 1 + tol]."""
        return all(
            bool(np.all((v >= -tol) & (v <= 1.0 + tol))) for v in self.series.values()
        )

    def time_average(self, name: str) -> float:
        """Trapezoidal time average of one series over the whole grid."""
        y = np.asarray(self.series[name], dtype=float)
        t = self.times
        if len(t) < 2:
            return float(y[0])
        return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(t)) / (t[-1] - t[0]))
