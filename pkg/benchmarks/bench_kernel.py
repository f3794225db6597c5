"""Times the compiled chain solver against the pure-python reference.

Run from the repository root:

    python3 benchmarks/bench_kernel.py

The workload is the production steady-state solve: one drift-matrix
factorization plus a banded sweep over all (p, q) clusters of the
hierarchy for each photon number.
"""

from __future__ import annotations

import math
import time

import numpy as np

from qdiode import _kernel_py
from qdiode import eom
from qdiode.model import DeviceParams, PulseSpec

try:
    from qdiode import _kernel
except ImportError:
    _kernel = None


def workload():
    params = DeviceParams(gamma=1.0, delta=-0.08, theta=2.0 * math.pi * 0.5065)
    pulse = PulseSpec(omega=0.01)
    coeffs = eom.constant_tables(params, "left")
    return (
        coeffs.drift18(),
        coeffs.source18(),
        coeffs.ann18(),
        coeffs.cre18(),
        complex(pulse.height),
    )


def time_solve(solver, args, n_max, repeats):
    m, src, ka, kc, xi = args
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        solver(m, src, ka, kc, n_max, xi)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    args = workload()
    print(f"{'n_max':>6} {'python':>12} {'compiled':>12} {'speedup':>8}")
    for n_max in (1, 2, 5, 10, 22):
        repeats = 5 if n_max < 10 else 3
        t_py = time_solve(_kernel_py.solve_chain, args, n_max, repeats)
        if _kernel is None:
            print(f"{n_max:>6} {t_py * 1e3:>10.3f}ms {'not built':>12} {'-':>8}")
            continue
        t_c = time_solve(_kernel.solve_chain, args, n_max, repeats)
        print(
            f"{n_max:>6} {t_py * 1e3:>10.3f}ms {t_c * 1e3:>10.3f}ms "
            f"{t_py / t_c:>7.1f}x"
        )


if __name__ == "__main__":
    main()
