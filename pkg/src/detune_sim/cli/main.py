"""``detune-sim`` command-line entry point."""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import __version__
from ..analysis import (
    SweepSpec,
    condition_report,
    min_detuning,
    min_detuning_bisection,
    scaling_exponent,
    sweep,
)
from ..dissipative import DecayModel, simulate
from ..errors import DetuneSimError
from ..models import LambdaParams, TwoLevelParams
from ..propagators import lambda_trajectory
from .config import COMMANDS, RunConfig, load_config
from .output import atomic_write, render_manifest, write_csv, write_svg
from .validate import run_checks

log = logging.getLogger("detune_sim")

UNITS = "times in 1/g; energies, detunings and rates in g (hbar = 1)"
INITIAL_VECTORS = {
    "u1": (1, 0, 0), "u2": (0, 1, 0), "u3": (0, 0, 1),
}
FIGURE_PLOTS = {
    "fig2": [("pop_plus", "P+")],
    "fig4": [("pop_u1", "P(u1)")],
    "fig5": [("pop_u3", "P(u3)"), ("pop_u2", "P(u2)"), ("pop_u1", "P(u1)")],
}


@dataclass
class RunOutcome:
    status: int
    files: list[Path] = field(default_factory=list)
    summary: list[tuple[str, object]] = field(default_factory=list)


def _map(fn, items, jobs):
    if jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _t_grid(cfg: RunConfig):
    return np.linspace(0.0, cfg.t_max, cfg.grid_points)


def _two_level_params(cfg, n):
    return TwoLevelParams(n, cfg.g, cfg.Delta, cfg.kappa, cfg.gamma)


def _lambda_params(cfg, n):
    return LambdaParams(n, cfg.g, cfg.Omega, cfg.Delta, cfg.delta)


def _trajectories(cfg: RunConfig):
    t = _t_grid(cfg)
    if cfg.model == "two_level":
        model = DecayModel(cfg.decay_mode, cfg.gamma_scaling, cfg.fock_cutoff, cfg.step)
        if cfg.initial not in (None, "plus"):
            raise DetuneSimError("two_level simulations start from |+>; initial must be 'plus'")
        def one(n):
            return simulate(_two_level_params(cfg, n), model, t)
        reports = [condition_report(_two_level_params(cfg, n), cfg.threshold) for n in cfg.N]
    else:
        psi0 = INITIAL_VECTORS[cfg.initial or "u2"]
        def one(n):
            return lambda_trajectory(_lambda_params(cfg, n), t, psi0)
        reports = [condition_report(_lambda_params(cfg, n), cfg.threshold) for n in cfg.N]
    return _map(one, cfg.N, cfg.jobs), reports


def _run_trajectories(cfg: RunConfig, out: Path, outcome: RunOutcome, prefix: str):
    trajs, reports = _trajectories(cfg)
    curves = []
    plot = FIGURE_PLOTS.get(cfg.figure) if cfg.command == "figure" else None
    for n, traj, report in zip(cfg.N, trajs, reports):
        outcome.files.append(write_csv(traj, out / f"{prefix}_N{n}.csv"))
        print(f"N = {n}\n{report.format()}")
        outcome.summary.append((f"N{n}_min_pop", {k: float(np.min(v)) for k, v in traj.series.items()}))
        for column, label in plot or [(next(iter(traj.series)), next(iter(traj.series)))]:
            curves.append((f"{label} N={n}", traj.times, traj.series[column]))
    if cfg.svg:
        title = cfg.figure if cfg.command == "figure" else f"{cfg.model} simulation"
        outcome.files.append(write_svg(curves, out / f"{prefix}.svg", title=title,
                                       xlabel="t (1/g)"))


def _run_threshold(cfg: RunConfig, out: Path, outcome: RunOutcome):
    rows = []
    for n in cfg.N:
        analytic = min_detuning(n, cfg.g, cfg.leak_tol)
        numeric = min_detuning_bisection(n, cfg.g, cfg.leak_tol)
        rows.append([n, cfg.g, cfg.leak_tol, analytic, numeric, analytic / (np.sqrt(n) * cfg.g)])
    header = ["N", "g", "leak_tol", "delta_star", "delta_star_bisection", "delta_star_over_sqrtN_g"]
    outcome.files.append(write_csv((header, rows), out / "threshold.csv"))
    if len(set(cfg.N)) >= 3:
        slope = scaling_exponent(cfg.g, cfg.leak_tol, cfg.N)
        outcome.summary.append(("scaling_exponent", format(slope, ".17g")))
        print(f"log-log slope of Delta* vs N: {slope:.6f}")
    for row in rows:
        print(f"N = {row[0]:>4}  Delta* = {row[3]:.6f}  (bisection {row[4]:.6f})")


def _run_sweep(cfg: RunConfig, out: Path, outcome: RunOutcome):
    base = {"g": cfg.g, "kappa": cfg.kappa, "gamma": cfg.gamma, "delta": cfg.delta,
            "N": cfg.N[0]}
    if cfg.Delta is not None:
        base["Delta"] = cfg.Delta
    if cfg.Omega is not None:
        base["Omega"] = cfg.Omega
    spec = SweepSpec(axes=cfg.axes, metrics=cfg.metrics, base=base, t_max=cfg.t_max,
                     grid_points=cfg.grid_points, leak_tol=cfg.leak_tol,
                     gamma_scaling=cfg.gamma_scaling)
    result = sweep(spec, jobs=cfg.jobs)
    outcome.files.append(write_csv(result, out / "sweep.csv"))
    outcome.summary.append(("sweep_hash", result.provenance))
    print(f"sweep: {len(result.rows)} rows")


def _run_validate(cfg: RunConfig, out: Path, outcome: RunOutcome):
    results = run_checks()
    header = ["check", "value", "limit", "passed"]
    rows = [[r.name, r.value, r.limit, r.passed] for r in results]
    outcome.files.append(write_csv((header, rows), out / "validate.csv"))
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.value:.3e} (limit {r.limit:.3e})")
    if not all(r.passed for r in results):
        outcome.status = 1


def run(cfg: RunConfig) -> RunOutcome:
    """Execute one command and write its outputs plus ``manifest.txt`` to ``cfg.out``."""
    start = time.perf_counter()
    out = Path(cfg.out)
    outcome = RunOutcome(status=0)
    if cfg.command in ("simulate", "figure"):
        prefix = cfg.figure if cfg.command == "figure" else f"simulate_{cfg.model}"
        _run_trajectories(cfg, out, outcome, prefix)
    elif cfg.command == "threshold":
        _run_threshold(cfg, out, outcome)
    elif cfg.command == "sweep":
        _run_sweep(cfg, out, outcome)
    elif cfg.command == "validate":
        _run_validate(cfg, out, outcome)

    entries = [
        ("tool", f"detune-sim {__version__}"),
        ("command", cfg.command),
        ("config_hash", cfg.config_hash()),
        ("config", json.dumps(cfg.resolved(), sort_keys=True)),
        ("units", UNITS),
        ("outputs", ", ".join(p.name for p in outcome.files)),
        *[(k, v) for k, v in outcome.summary],
        ("status", "ok" if outcome.status == 0 else "validation failed"),
    ]
    volatile = [
        ("timestamp", _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")),
        ("wall_time_s", f"{time.perf_counter() - start:.3f}"),
    ]
    outcome.files.append(atomic_write(out / "manifest.txt", render_manifest(entries, volatile)))
    return outcome


# ---------------------------------------------------------------- argv


def parse_value(text: str):
    """Override values: JSON literals first, then comma lists of numbers."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        pass
    if "," in text:
        return [parse_value(part) for part in text.split(",") if part]
    return text


def parse_overrides(tokens: list[str]) -> dict:
    overrides = {}
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if not tok.startswith("--") or len(tok) == 2:
            raise DetuneSimError(f"unexpected argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, value = key.split("=", 1)
            i += 1
        else:
            if i + 1 >= len(tokens):
                raise DetuneSimError(f"option {tok} needs a value")
            value = tokens[i + 1]
            i += 2
        overrides[key.replace("-", "_")] = parse_value(value)
    if isinstance(overrides.get("N"), (int, float)):
        overrides["N"] = [overrides["N"]]
    return overrides


def build_parser() -> argparse.ArgumentParser:
    """Parser used for help text; free-form overrides are handled separately."""
    parser = argparse.ArgumentParser(
        prog="detune-sim",
        description="Large-detuning dynamics of atom ensembles in a cavity.",
        epilog="Any other --key value pair overrides the config key of the same name "
               "(e.g. --N 1,4,16 --leak-tol 0.01 --Delta 10).",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("figure", nargs="?", help="figure id for the figure command")
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--out", help="output directory (default ./out)")
    parser.add_argument("--jobs", type=int, help="parallel workers")
    parser.add_argument("-v", "--verbose", action="store_true", help="echo applied defaults")
    return parser


def split_args(argv):
    """``(command, figure, flags, override_tokens)`` from a raw argument list."""
    command, rest = argv[0], list(argv[1:])
    figure = rest.pop(0) if rest and not rest[0].startswith("-") else None
    flags = {"config": None, "out": None, "jobs": None, "verbose": False}
    tokens = []
    i = 0
    while i < len(rest):
        name, eq, inline = rest[i].partition("=")
        if name in ("--config", "--out", "--jobs"):
            if eq:
                value, i = inline, i + 1
            elif i + 1 < len(rest):
                value, i = rest[i + 1], i + 2
            else:
                raise DetuneSimError(f"{name} needs a value")
            flags[name[2:]] = value
        elif rest[i] in ("-v", "--verbose"):
            flags["verbose"] = True
            i += 1
        else:
            tokens.append(rest[i])
            i += 1
    if flags["jobs"] is not None:
        try:
            flags["jobs"] = int(flags["jobs"])
        except ValueError:
            raise DetuneSimError(f"--jobs needs an integer, got {flags['jobs']!r}") from None
    return command, figure, flags, tokens


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    if not argv or argv[0] in ("-h", "--help") or "-h" in argv or "--help" in argv:
        parser.print_help()
        return 0 if argv else 1
    try:
        command, figure, flags, tokens = split_args(argv)
        logging.basicConfig(level=logging.INFO if flags["verbose"] else logging.WARNING,
                            format="%(levelname)s %(message)s")
        if command not in COMMANDS:
            raise DetuneSimError(f"unknown command {command!r}; choose from {', '.join(COMMANDS)}")
        overrides = parse_overrides(tokens)
        if figure is not None:
            overrides["figure"] = figure
        for key in ("out", "jobs"):
            if flags[key] is not None:
                overrides[key] = flags[key]
        cfg = load_config(flags["config"], overrides, command=command)
        outcome = run(cfg)
    except (DetuneSimError, OSError, ValueError) as exc:
        print(f"detune-sim: error: {exc}", file=sys.stderr)
        return 1
    return outcome.status


if __name__ == "__main__":
    sys.exit(main())
