"""Command-line interface.

Subcommands mirror the library layers: ``simulate`` for one point,
``sweep`` for config-driven grids, ``preset`` to materialize the named
figure configurations, ``oracle`` for the independent transfer-matrix
curves, and ``suite`` for the consistency checks.  Exit codes: 0 on
success, 1 for validation problems, 2 for runtime failures; errors go to
stderr as one JSON object per failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import oracle
from .errors import ConfigError, QdiodeError, ZeroFlux
from .model import DeviceParams, InputState, PulseSpec
from .observables import simulate_point
from .presets import preset_config, preset_names
from .solver import STEADY_STATE, TIME_DOMAIN, SolverConfig
from .sweep import grid_from_config, run_sweep, write_csv, write_json


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as validation errors."""

    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="qdiode", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="solve one parameter point")
    group = sim.add_mutually_exclusive_group(required=True)
    group.add_argument("--n", type=int, help="Fock photon number")
    group.add_argument("--nbar", type=float, help="coherent mean photon number")
    group.add_argument(
        "--coeffs",
        help="comma-separated Fock amplitudes of a superposition, e.g. 0,0.7071,0.7071",
    )
    sim.add_argument("--omega-ratio", type=float, required=True,
                     help="pulse bandwidth over the decay rate")
    sim.add_argument("--delta-ratio", type=float, required=True,
                     help="detuning of the first atom over the decay rate")
    sim.add_argument("--theta", type=float, required=True,
                     help="inter-atom phase as a fraction of 2*pi")
    sim.add_argument("--mode", choices=(STEADY_STATE, TIME_DOMAIN),
                     default=STEADY_STATE)
    sim.add_argument("--json", action="store_true", help="machine-readable output")

    sw = sub.add_parser("sweep", help="run a sweep from a config document")
    sw.add_argument("--config", default="-",
                    help="config path, or - for stdin (default)")
    sw.add_argument("--out", default="-", help="output path, or - for stdout")
    sw.add_argument("--format", choices=("csv", "json"), default="csv")
    sw.add_argument("--workers", type=int, default=None,
                    help="worker processes (default: QDIODE_WORKERS or all CPUs)")

    pre = sub.add_parser("preset", help="print a named sweep config")
    pre.add_argument("name", nargs="?", help="|".join(preset_names()))
    pre.add_argument("--list", action="store_true", help="list preset names")

    orc = sub.add_parser("oracle", help="transfer-matrix transmission curves")
    orc.add_argument("--delta-ratio", type=float, required=True)
    orc.add_argument("--theta", type=float, required=True,
                     help="inter-atom phase as a fraction of 2*pi")
    orc.add_argument("--span", type=float, default=2.0,
                     help="frequency half-range around the carrier, in decay rates")
    orc.add_argument("--points", type=int, default=401)
    orc.add_argument("--out", default="-")

    su = sub.add_parser("suite", help="run the consistency suite")
    su.add_argument("--out", default=None, help="also write the JSON report here")
    su.add_argument("--points", type=int, default=None,
                    help="run only the first N default points")
    return parser


def _open_out(path: str):
    if path == "-":
        return sys.stdout, False
    return open(path, "w"), True


def _cmd_simulate(args) -> int:
    if args.n is not None:
        state = InputState.fock(args.n)
    elif args.nbar is not None:
        state = InputState.coherent(args.nbar)
    else:
        coeffs = np.array([float(c) for c in args.coeffs.split(",")])
        norm = float(np.linalg.norm(coeffs))
        if norm == 0.0:
            raise ConfigError("superposition coefficients are all zero")
        state = InputState.superposition(list(coeffs / norm))
    params = DeviceParams(
        gamma=1.0, delta=args.delta_ratio, theta=2.0 * math.pi * args.theta
    )
    pulse = PulseSpec(omega=args.omega_ratio)
    res = simulate_point(params, state, pulse, SolverConfig(mode=args.mode))
    m = res.metrics
    fields = {
        "t_fwd": res.t_fwd,
        "t_bwd": res.t_bwd,
        "r1": m.r1 if m else None,
        "r2": m.r2 if m else None,
        "r3": m.r3 if m else None,
        "r4": m.r4 if m else None,
        "solver_mode": res.solver_mode,
        "converged": res.converged,
    }
    if args.json:
        json.dump(fields, sys.stdout)
        sys.stdout.write("\n")
    else:
        for key, value in fields.items():
            print(f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}")
    return 0


def _cmd_sweep(args) -> int:
    if args.config == "-":
        raw = sys.stdin.read()
    else:
        with open(args.config) as fh:
            raw = fh.read()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    grid = grid_from_config(doc)
    rows = run_sweep(grid, workers=args.workers)
    fh, close = _open_out(args.out)
    try:
        if args.format == "csv":
            write_csv(rows, fh)
        else:
            write_json(rows, fh)
    finally:
        if close:
            fh.close()
    return 0


def _cmd_preset(args) -> int:
    if args.list or args.name is None:
        for name in preset_names():
            print(name)
        return 0
    doc = preset_config(args.name)
    json.dump(doc, sys.stdout, indent=1)
    sys.stdout.write("\n")
    return 0


def _cmd_oracle(args) -> int:
    device = DeviceParams(
        gamma=1.0, delta=args.delta_ratio, theta=2.0 * math.pi * args.theta
    )
    if args.points < 2 or args.span <= 0:
        raise ConfigError("oracle needs span > 0 and at least two points")
    nus = np.linspace(-args.span, args.span, args.points)
    fh, close = _open_out(args.out)
    try:
        fh.write("nu_over_gamma,t_power_fwd,t_power_bwd,r_power_left,r_power_right\n")
        for nu in nus:
            amp = oracle.single_photon_amplitudes(oracle.at_offset(device, float(nu)))
            cells = (
                float(nu),
                float(amp.transmission_fwd),
                float(amp.transmission_bwd),
                float(abs(amp.r_left) ** 2),
                float(abs(amp.r_right) ** 2),
            )
            fh.write(",".join(repr(c) for c in cells) + "\n")
    finally:
        if close:
            fh.close()
    return 0


def _cmd_suite(args) -> int:
    points = None
    if args.points is not None:
        if args.points < 0:
            raise ConfigError("--points must be >= 0")
        points = list(oracle.DEFAULT_SUITE_POINTS[: args.points])
    report = oracle.run_consistency_suite(points)
    by_check: dict[str, list] = {}
    for outcome in report.outcomes:
        by_check.setdefault(outcome.check, []).append(outcome)
    for name, outcomes in by_check.items():
        good = sum(o.passed for o in outcomes)
        print(f"{name:24s} {good}/{len(outcomes)} pass")
    total = len(report.outcomes)
    print(f"suite: {total - len(report.failures)}/{total} checks passed")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report.to_dict(), fh, indent=1)
            fh.write("\n")
    return 0 if report.passed else 2


_COMMANDS = {
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "preset": _cmd_preset,
    "oracle": _cmd_oracle,
    "suite": _cmd_suite,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except (ConfigError, ZeroFlux, ValueError) as exc:
        json.dump({"error": str(exc), "kind": "validation"}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    except QdiodeError as exc:
        json.dump({"error": str(exc), "kind": "runtime"}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    except BrokenPipeError:
        # downstream consumer closed the pipe; silence the interpreter's
        # complaint about the unflushed buffer on exit
        import os

        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0
    except OSError as exc:
        json.dump({"error": str(exc), "kind": "runtime"}, sys.stderr)
        sys.stderr.write("\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
