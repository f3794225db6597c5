"""Config-driven parameter sweeps with deterministic CSV/JSON emission.

A sweep is a dense grid over photon number (or coherent amplitude),
pulse bandwidth, detuning, and inter-atom phase, evaluated in both
propagation directions at every point.  Rows come back in grid order no
matter how the work was scheduled, and the writers format floats as
shortest round-trip decimals, so a repeated run produces byte-identical
output.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product

from .errors import ConfigError, QdiodeError
from .model import COHERENT, FOCK, DeviceParams, InputState, PulseSpec, mean_flux
from .observables import simulate_point
from .solver import STEADY_STATE, TIME_DOMAIN, SolverConfig

WORKERS_ENV = "QDIODE_WORKERS"
CONFIG_SCHEMA = 1

CSV_COLUMNS = (
    "n",
    "nbar",
    "omega_over_gamma",
    "delta_over_gamma",
    "theta_over_2pi",
    "flux_over_gamma",
    "t_fwd",
    "t_bwd",
    "r1",
    "r2",
    "r3",
    "r4",
    "solver_mode",
    "converged",
)

# Work below a pool's startup cost runs inline even when workers > 1.
_SERIAL_CUTOFF = 32


@dataclass(frozen=True)
class SweepGrid:
    """Axes of one sweep; the cross product is the set of solved points."""

    input_kind: str
    photons: tuple
    omega_ratios: tuple
    delta_ratios: tuple
    theta_fractions: tuple
    solver_mode: str = STEADY_STATE

    def __post_init__(self):
        if self.input_kind not in (FOCK, COHERENT):
            raise ConfigError(f"unsupported input kind {self.input_kind!r}")
        if self.solver_mode not in (STEADY_STATE, TIME_DOMAIN):
            raise ConfigError(f"unknown solver mode {self.solver_mode!r}")
        axes = {
            "photon axis": self.photons,
            "omega_over_gamma": self.omega_ratios,
            "delta_over_gamma": self.delta_ratios,
            "theta_over_2pi": self.theta_fractions,
        }
        for name, axis in axes.items():
            if len(axis) == 0:
                raise ConfigError(f"{name} is empty")
        if self.input_kind == FOCK:
            bad = [x for x in self.photons if x != int(x) or x < 1]
            if bad:
                raise ConfigError(f"Fock axis must hold positive integers, got {bad}")
        else:
            bad = [x for x in self.photons if not x > 0.0]
            if bad:
                raise ConfigError(f"nbar axis must be positive, got {bad}")
        bad = [x for x in self.omega_ratios if not x > 0.0]
        if bad:
            raise ConfigError(f"omega_over_gamma must be positive, got {bad}")

    @property
    def n_points(self) -> int:
        return (
            len(self.photons)
            * len(self.omega_ratios)
            * len(self.delta_ratios)
            * len(self.theta_fractions)
        )

    def tasks(self) -> list[tuple]:
        """Immutable point descriptors, in the order rows are emitted."""
        return [
            (self.input_kind, self.solver_mode, ph, om, de, th)
            for ph, om, de, th in product(
                self.photons, self.omega_ratios, self.delta_ratios, self.theta_fractions
            )
        ]


@dataclass(frozen=True)
class SweepRow:
    """One grid point of output, mirroring the CSV schema field for field.

    A row with ``converged = False`` records a solver failure at that
    point; its transmittivities and metrics are NaN.  A blocked point
    (both directions dark, metrics undefined) keeps ``converged = True``
    with NaN metrics only.

    The two defect fields are solver diagnostics, not part of the
    emitted schema: the worst steady flux-balance violation and the
    worst window-count bookkeeping error across both directions.
    """

    n: int | None
    nbar: float | None
    omega_over_gamma: float
    delta_over_gamma: float
    theta_over_2pi: float
    flux_over_gamma: float
    t_fwd: float
    t_bwd: float
    r1: float
    r2: float
    r3: float
    r4: float
    solver_mode: str
    converged: bool
    rate_defect: float = float("nan")
    balance_defect: float = float("nan")

    def to_dict(self) -> dict:
        def scrub(v):
            if isinstance(v, float) and not math.isfinite(v):
                return None
            return v

        return {name: scrub(getattr(self, name)) for name in CSV_COLUMNS}

    def csv_cells(self) -> list[str]:
        cells = []
        for name in CSV_COLUMNS:
            v = getattr(self, name)
            if v is None:
                cells.append("")
            elif isinstance(v, bool):
                cells.append("true" if v else "false")
            elif isinstance(v, float):
                cells.append(repr(v))
            else:
                cells.append(str(v))
        return cells


def evaluate_task(task: tuple) -> SweepRow:
    """Solve one grid point; failures become rows, never exceptions."""
    input_kind, solver_mode, ph, om, de, th = task
    gamma = 1.0
    params = DeviceParams(gamma=gamma, delta=de * gamma, theta=2.0 * math.pi * th)
    pulse = PulseSpec(omega=om * gamma)
    if input_kind == FOCK:
        n, nbar = int(ph), None
        state = InputState.fock(int(ph))
    else:
        n, nbar = None, float(ph)
        state = InputState.coherent(float(ph))
    flux = mean_flux(state, pulse) / gamma
    nan = float("nan")
    try:
        res = simulate_point(params, state, pulse, SolverConfig(mode=solver_mode))
    except QdiodeError:
        return SweepRow(
            n, nbar, om, de, th, flux, nan, nan, nan, nan, nan, nan,
            solver_mode, False,
        )
    m = res.metrics
    return SweepRow(
        n,
        nbar,
        om,
        de,
        th,
        flux,
        res.t_fwd,
        res.t_bwd,
        m.r1 if m else nan,
        m.r2 if m else nan,
        m.r3 if m else nan,
        m.r4 if m else nan,
        solver_mode,
        res.converged,
        # the steady fixed point only exists on the closed-form path
        res.worst_rate_defect if solver_mode == STEADY_STATE else nan,
        max(
            abs(res.forward.balance_defect), abs(res.backward.balance_defect)
        ),
    )


def worker_count(requested: int | None = None) -> int:
    """Resolve the worker count: argument, then environment, then CPUs."""
    if requested is not None:
        value = requested
    else:
        raw = os.environ.get(WORKERS_ENV, "")
        try:
            value = int(raw) if raw else (os.cpu_count() or 1)
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV}={raw!r} is not an integer")
    if value < 1:
        raise ConfigError(f"worker count must be >= 1, got {value}")
    return value


def run_sweep(grid: SweepGrid, workers: int | None = None) -> list[SweepRow]:
    """Evaluate the whole grid, rows in grid order regardless of scheduling."""
    tasks = grid.tasks()
    nworkers = worker_count(workers)
    if nworkers == 1 or len(tasks) <= _SERIAL_CUTOFF:
        return [evaluate_task(t) for t in tasks]
    chunk = max(1, len(tasks) // (nworkers * 8))
    with ProcessPoolExecutor(max_workers=nworkers) as pool:
        return list(pool.map(evaluate_task, tasks, chunksize=chunk))


def write_csv(rows: list[SweepRow], fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(row.csv_cells())


def write_json(rows: list[SweepRow], fh) -> None:
    json.dump([row.to_dict() for row in rows], fh, indent=1)
    fh.write("\n")


def grid_from_config(doc: dict) -> SweepGrid:
    """Build a grid from the flat key-value config document."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a key-value document")
    schema = doc.get("schema")
    if schema != CONFIG_SCHEMA:
        raise ConfigError(
            f"config schema must be {CONFIG_SCHEMA}, got {schema!r}"
        )
    known = {
        "schema", "input", "n", "nbar", "omega_over_gamma",
        "delta_over_gamma", "theta_over_2pi", "solver",
    }
    unknown = sorted(set(doc) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    kind = doc.get("input", FOCK)
    if kind == FOCK:
        photons = doc.get("n")
        if photons is None:
            raise ConfigError("Fock sweep needs an 'n' axis")
    elif kind == COHERENT:
        photons = doc.get("nbar")
        if photons is None:
            raise ConfigError("coherent sweep needs an 'nbar' axis")
    else:
        raise ConfigError(f"unsupported input kind {kind!r}")

    def axis(key):
        value = doc.get(key)
        if value is None:
            raise ConfigError(f"config is missing the {key!r} axis")
        if not isinstance(value, (list, tuple)):
            value = [value]
        return tuple(value)

    return SweepGrid(
        input_kind=kind,
        photons=tuple(photons) if isinstance(photons, (list, tuple)) else (photons,),
        omega_ratios=axis("omega_over_gamma"),
        delta_ratios=axis("delta_over_gamma"),
        theta_fractions=axis("theta_over_2pi"),
        solver_mode=doc.get("solver", STEADY_STATE),
    )


def config_from_grid(grid: SweepGrid) -> dict:
    doc = {
        "schema": CONFIG_SCHEMA,
        "input": grid.input_kind,
        "omega_over_gamma": list(grid.omega_ratios),
        "delta_over_gamma": list(grid.delta_ratios),
        "theta_over_2pi": list(grid.theta_fractions),
        "solver": grid.solver_mode,
    }
    key = "n" if grid.input_kind == FOCK else "nbar"
    doc[key] = list(grid.photons)
    return doc
