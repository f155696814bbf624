"""Run configuration: loading, defaulting, validation and hashing."""
from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..errors import ParseError, ValidationError

log = logging.getLogger(__name__)

COMMANDS = ("simulate", "sweep", "figure", "threshold", "validate")
MODELS = ("two_level", "lambda")
PARAM_KEYS = ("N", "g", "Delta", "kappa", "gamma", "Omega", "delta")
INITIAL_STATES = {
    "two_level": ("plus",),
    "lambda": ("u1", "u2", "u3"),
}

KNOWN_KEYS = {
    "command", "model", *PARAM_KEYS, "t_max", "grid_points", "decay_mode",
    "gamma_scaling", "fock_cutoff", "step", "initial", "figure", "leak_tol",
    "threshold", "axes", "metrics", "svg", "jobs", "out",
}

# Parameters exactly as stated in the figure captions, in units of g.
# The atom numbers for fig4 and fig5 are a chosen default: the captions only
# say the atom number grows.
FIGURE_PRESETS: dict[str, dict[str, Any]] = {
    "fig2": {
        "model": "two_level", "N": [1, 5, 25], "g": 1.0, "Delta": 10.0,
        "kappa": 0.1, "gamma": 0.01, "t_max": 100.0, "grid_points": 2001,
        "initial": "plus",
    },
    "fig4": {
        "model": "lambda", "N": [1, 5, 25], "g": 1.0, "Omega": 1.0,
        "Delta": 10.0, "delta": 0.0, "t_max": 10.0, "grid_points": 2001,
        "initial": "u2",
    },
    "fig5": {
        "model": "lambda", "N": [1, 5, 25], "g": 1.0, "Omega": 10.0,
        "Delta": 100.0, "delta": 0.3, "t_max": 60.0, "grid_points": 6001,
        "initial": "u2",
    },
}


@dataclass
class RunConfig:
    command: str
    model: str = "two_level"
    N: list[int] = field(default_factory=lambda: [1])
    g: float = 1.0
    Delta: float | None = None
    kappa: float = 0.0
    gamma: float = 0.0
    Omega: float | None = None
    delta: float = 0.0
    t_max: float | None = None
    grid_points: int = 2001
    decay_mode: str = "collective3"
    gamma_scaling: int | str = 1
    fock_cutoff: int = 2
    step: float | None = None
    initial: str | None = None
    figure: str | None = None
    leak_tol: float = 0.01
    threshold: float = 10.0
    axes: dict[str, list] | None = None
    metrics: list[str] | None = None
    svg: bool = True
    jobs: int = 1
    out: str = "out"
    defaults_applied: list[str] = field(default_factory=list, compare=False)

    def resolved(self) -> dict[str, Any]:
        """Every field that influences results, in a stable order."""
        d = {k: getattr(self, k) for k in sorted(KNOWN_KEYS) if k not in ("jobs", "out")}
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.resolved(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def parse_config_text(text: str, source="<config>") -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: {exc.msg}", exc.lineno, exc.colno) from None
    if not isinstance(data, dict):
        raise ParseError(f"{source}: top level must be an object", 1, 1)
    return data


def load_config(path=None, overrides: dict | None = None, *, command=None) -> RunConfig:
    """Read a JSON config, layer CLI overrides on top and validate.

    Precedence: figure preset < file < overrides < ``command`` argument.
    """
    raw: dict[str, Any] = {}
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
        raw.update(parse_config_text(text, str(path)))
    raw.update(overrides or {})
    if command is not None:
        raw["command"] = command
    return build_config(raw)


def build_config(raw: dict) -> RunConfig:
    unknown = sorted(set(raw) - KNOWN_KEYS)
    if unknown:
        raise ValidationError(f"unknown key {unknown[0]!r}", key=unknown[0])
    if "command" not in raw:
        raise ValidationError("missing required key 'command'", key="command")
    command = raw["command"]
    if command not in COMMANDS:
        raise ValidationError(f"command must be one of {COMMANDS}, got {command!r}", key="command")

    merged: dict[str, Any] = {}
    if command == "figure":
        fig = raw.get("figure")
        if fig not in FIGURE_PRESETS:
            raise ValidationError(
                f"figure must be one of {sorted(FIGURE_PRESETS)}, got {fig!r}", key="figure"
            )
        merged.update(FIGURE_PRESETS[fig])
    merged.update(raw)

    defaults = [k for k in ("model", "N", "g", "kappa", "gamma", "delta", "t_max",
                            "grid_points", "decay_mode", "gamma_scaling", "leak_tol",
                            "threshold") if k not in merged]
    cfg = RunConfig(command=command)
    for key, value in merged.items():
        if key != "command":
            setattr(cfg, key, value)
    cfg.defaults_applied = defaults
    _normalize(cfg)
    _validate(cfg)
    for key in defaults:
        log.info("default %s = %r", key, getattr(cfg, key))
    return cfg


def _number(cfg, key, positive=False, nonneg=False, allow_none=False):
    value = getattr(cfg, key)
    if value is None and allow_none:
        return
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{key} must be a number, got {value!r}", key=key)
    if positive and not value > 0:
        raise ValidationError(f"{key} must be > 0", key=key)
    if nonneg and not value >= 0:
        raise ValidationError(f"{key} must be ≥ 0", key=key)
    setattr(cfg, key, float(value))


def _normalize(cfg: RunConfig):
    n = cfg.N
    n_list = n if isinstance(n, list) else [n]
    if not n_list:
        raise ValidationError("N must not be empty", key="N")
    for v in n_list:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v:
            raise ValidationError(f"N must be an integer, got {v!r}", key="N")
        if v < 1:
            raise ValidationError("N must be ≥ 1", key="N")
    cfg.N = [int(v) for v in n_list]
    if cfg.gamma_scaling in ("1", 1.0):
        cfg.gamma_scaling = 1


def _validate(cfg: RunConfig):
    if cfg.model not in MODELS:
        raise ValidationError(f"model must be one of {MODELS}, got {cfg.model!r}", key="model")
    _number(cfg, "g", positive=True)
    _number(cfg, "kappa", nonneg=True)
    _number(cfg, "gamma", nonneg=True)
    _number(cfg, "delta")
    _number(cfg, "Delta", allow_none=True)
    _number(cfg, "Omega", nonneg=True, allow_none=True)
    _number(cfg, "t_max", positive=True, allow_none=True)
    _number(cfg, "step", positive=True, allow_none=True)
    _number(cfg, "threshold")
    _number(cfg, "leak_tol")
    if cfg.Delta == 0:
        raise ValidationError("Delta must be nonzero", key="Delta")
    if not 0 < cfg.leak_tol < 1:
        raise ValidationError("leak_tol must lie in (0, 1)", key="leak_tol")
    if not cfg.threshold > 1:
        raise ValidationError("threshold must be > 1", key="threshold")
    if isinstance(cfg.grid_points, bool) or not isinstance(cfg.grid_points, int) or cfg.grid_points < 2:
        raise ValidationError("grid_points must be an integer ≥ 2", key="grid_points")
    if cfg.decay_mode not in ("collective3", "full"):
        raise ValidationError("decay_mode must be 'collective3' or 'full'", key="decay_mode")
    if cfg.gamma_scaling not in (1, "N"):
        raise ValidationError("gamma_scaling must be 1 or 'N'", key="gamma_scaling")
    if not isinstance(cfg.fock_cutoff, int) or cfg.fock_cutoff < 1:
        raise ValidationError("fock_cutoff must be an integer ≥ 1", key="fock_cutoff")
    if not isinstance(cfg.jobs, int) or cfg.jobs < 1:
        raise ValidationError("jobs must be an integer ≥ 1", key="jobs")
    if not isinstance(cfg.svg, bool):
        raise ValidationError("svg must be true or false", key="svg")
    if cfg.initial is not None and cfg.initial not in INITIAL_STATES[cfg.model]:
        raise ValidationError(
            f"initial must be one of {INITIAL_STATES[cfg.model]} for model {cfg.model}",
            key="initial",
        )
    if cfg.t_max is None:
        cfg.t_max = 100.0 / cfg.g

    if cfg.command in ("simulate", "figure"):
        if cfg.Delta is None:
            raise ValidationError("missing required key 'Delta'", key="Delta")
        if cfg.model == "lambda" and cfg.Omega is None:
            raise ValidationError("missing required key 'Omega' for model lambda", key="Omega")
    if cfg.command == "threshold" and cfg.model != "two_level":
        raise ValidationError("threshold supports model two_level only", key="model")
    if cfg.command == "sweep":
        if not isinstance(cfg.axes, dict) or not cfg.axes:
            raise ValidationError("sweep needs a non-empty 'axes' object", key="axes")
        for name, values in cfg.axes.items():
            if name not in (*PARAM_KEYS, "leak_tol"):
                raise ValidationError(f"cannot sweep over {name!r}", key="axes")
            if not isinstance(values, list) or not values:
                raise ValidationError(f"axis {name!r} must be a non-empty list", key="axes")
        if not isinstance(cfg.metrics, list) or not cfg.metrics:
            raise ValidationError("sweep needs a non-empty 'metrics' list", key="metrics")
