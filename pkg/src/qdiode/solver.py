"""Steady-state and time-domain solvers for the cluster hierarchy.

The steady path factorizes the shared 18x18 drift block once and sweeps
the cluster DAG in level order (one triangular solve per cluster).  The
time-domain path integrates the same equations with DOP853, split at the
envelope breakpoints so the integrator never steps across a jump.

The chain sweep exists twice: a compiled Cython kernel and the numpy
reference in ``_kernel_py``.  Set QDIODE_KERNEL=c or =python to force
one; the default prefers the compiled one and falls back silently.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from . import eom
from .errors import SingularLevel, StepFailure
from .hierarchy import Hierarchy, HierarchyState, band_clusters
from .model import (
    COHERENT,
    FOCK,
    LEFT,
    SUPERPOSITION,
    DeviceParams,
    InputState,
    PulseSpec,
    envelope,
)

STEADY_STATE = "steady_state"
TIME_DOMAIN = "time_domain"

COND_LIMIT = 1e12


def _load_kernel():
    choice = os.environ.get("QDIODE_KERNEL", "").strip().lower()
    if choice not in ("", "c", "python"):
        raise ValueError(f"QDIODE_KERNEL must be 'c' or 'python', got {choice!r}")
    if choice in ("", "c"):
        try:
            from . import _kernel

            return _kernel, "c"
        except ImportError:
            if choice == "c":
                raise RuntimeError(
                    "QDIODE_KERNEL=c but the compiled kernel is not built"
                )
    from . import _kernel_py

    return _kernel_py, "python"


_KERNEL, KERNEL_NAME = _load_kernel()


@dataclass(frozen=True)
class SolverConfig:
    mode: str = STEADY_STATE
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    settle_margin: float = 0.25

    def __post_init__(self):
        if self.mode not in (STEADY_STATE, TIME_DOMAIN):
            raise ValueError(f"unknown solver mode {self.mode!r}")
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if not 0 < self.settle_margin <= 0.5:
            raise ValueError("settle_margin must lie in (0, 0.5]")


@dataclass
class SteadySolution:
    """Steady response of the driven pair for one input.

    ``expectations`` holds the nine operator expectation values in the
    prepared input state (number-diagonal weighting for Fock and
    superposition inputs, the semiclassical values for coherent ones).
    Fock-side solutions also keep the full cluster grid.
    """

    params: DeviceParams
    input: InputState
    pulse: PulseSpec
    expectations: np.ndarray
    residual: float
    cond: float
    kernel: str
    converged: bool = True
    state: HierarchyState | None = None
    clusters: dict | None = field(default=None, repr=False)

    @property
    def direction(self) -> str:
        return self.input.direction

    def expectation(self, op) -> complex:
        if isinstance(op, str):
            op = eom.LABELS.index(op)
        return complex(self.expectations[op])

    def element(self, p: int, q: int, op) -> complex:
        if self.state is None:
            raise ValueError("coherent solutions carry no Fock cluster grid")
        return self.state.element(p, q, op)


def _weighted_diagonal(state: HierarchyState, input_state: InputState) -> np.ndarray:
    if input_state.kind == FOCK:
        return state.values[input_state.n, input_state.n, :].copy()
    weights = np.abs(np.asarray(input_state.coefficients)) ** 2
    out = np.zeros(eom.N_OPS, dtype=complex)
    for k, w in enumerate(weights):
        out += w * state.values[k, k, :]
    return out


def solve_steady_fock(
    hierarchy: Hierarchy, config: SolverConfig | None = None
) -> SteadySolution:
    """Steady state under the flat part of the pulse, exact in photon number."""
    if config is None:
        config = SolverConfig()
    coeffs = hierarchy.coeffs
    m = coeffs.drift18()
    src = coeffs.source18()
    k_ann = coeffs.ann18()
    k_cre = coeffs.cre18()
    xi = complex(hierarchy.pulse.height)

    try:
        cond = float(np.abs(np.linalg.cond(m, 1)))
    except np.linalg.LinAlgError:
        cond = float("inf")
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularLevel(level=0, cond=cond)

    u = _KERNEL.solve_chain(m, src, k_ann, k_cre, hierarchy.n_max, xi)
    u = np.asarray(u)

    # Residual against the assembled equations, on the solved band.
    scale = 0.0
    worst = 0.0
    xic = np.conj(xi)
    for p, q in band_clusters(hierarchy.n_max):
        rhs = src.copy() if p == q else np.zeros(18, dtype=complex)
        if q >= 1 and abs(p - (q - 1)) <= 2:
            rhs += np.sqrt(q) * xi * (k_ann @ u[p, q - 1])
        if p >= 1 and abs((p - 1) - q) <= 2:
            rhs += np.sqrt(p) * xic * (k_cre @ u[p - 1, q])
        scale = max(scale, float(np.abs(rhs).max(initial=0.0)))
        worst = max(worst, float(np.abs(m @ u[p, q] + rhs).max(initial=0.0)))
    residual = worst / max(scale, 1e-300)

    state = HierarchyState(n_max=hierarchy.n_max, values=u[:, :, :9].copy())
    clusters = {pq: u[pq[0], pq[1]].copy() for pq in band_clusters(hierarchy.n_max)}
    return SteadySolution(
        params=hierarchy.params,
        input=hierarchy.input,
        pulse=hierarchy.pulse,
        expectations=_weighted_diagonal(state, hierarchy.input),
        residual=residual,
        cond=cond,
        kernel=_KERNEL.NAME,
        converged=residual < 1e-6,
        state=state,
        clusters=clusters,
    )


def solve_coherent(
    params: DeviceParams,
    input_state: InputState,
    pulse: PulseSpec,
    config: SolverConfig | None = None,
) -> SteadySolution:
    """Semiclassical steady state for a coherent input.

    A coherent drive displaces the input mode to a c-number amplitude, so
    the doubled 18-vector closes on itself: the neighbor couplings act on
    the same cluster with weight sqrt(nbar) xi.
    """
    if input_state.kind != COHERENT:
        raise ValueError("solve_coherent expects a coherent input state")
    coeffs = eom.constant_tables(params, input_state.direction)
    eta = np.sqrt(input_state.nbar) * pulse.height
    m = coeffs.drift18() + eta * coeffs.ann18() + np.conj(eta) * coeffs.cre18()
    src = coeffs.source18()

    try:
        cond = float(np.abs(np.linalg.cond(m, 1)))
    except np.linalg.LinAlgError:
        cond = float("inf")
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularLevel(level=0, cond=cond)

    u = np.linalg.solve(m, -src)
    residual = float(np.abs(m @ u + src).max()) / max(float(np.abs(src).max()), 1e-300)
    return SteadySolution(
        params=params,
        input=input_state,
        pulse=pulse,
        expectations=u[:9].copy(),
        residual=residual,
        cond=cond,
        kernel="dense",
        converged=residual < 1e-6,
    )


@dataclass
class TimeDomainResult:
    """Sampled cluster trajectories over one pulse."""

    hierarchy: Hierarchy
    times: np.ndarray
    cluster_values: np.ndarray  # (nt, n_clusters, 18)
    order: tuple

    def state_at(self, k: int) -> HierarchyState:
        n = self.hierarchy.n_max
        vals = np.zeros((n + 1, n + 1, eom.N_OPS), dtype=complex)
        for i, (p, q) in enumerate(self.order):
            vals[p, q, :] = self.cluster_values[k, i, :9]
        return HierarchyState(n_max=n, values=vals)

    @property
    def final_state(self) -> HierarchyState:
        return self.state_at(len(self.times) - 1)

    def expectations_series(self) -> np.ndarray:
        """(nt, 9) expectation values in the prepared input state."""
        inp = self.hierarchy.input
        n = self.hierarchy.n_max
        if inp.kind == FOCK:
            weights = {(inp.n, inp.n): 1.0}
        else:
            weights = {
                (k, k): abs(c) ** 2 for k, c in enumerate(inp.coefficients)
            }
        out = np.zeros((len(self.times), eom.N_OPS), dtype=complex)
        for i, pq in enumerate(self.order):
            w = weights.get(pq)
            if w:
                out += w * self.cluster_values[:, i, :9]
        return out

    def settled_window(self, margin: float) -> np.ndarray:
        """Indices of samples inside the trailing fraction of the pulse."""
        dur = self.hierarchy.pulse.duration
        lo = dur * (1.0 - margin)
        return np.nonzero((self.times >= lo) & (self.times <= dur + 1e-12 * dur))[0]


def _atom2_shift(hierarchy: Hierarchy) -> float:
    p = hierarchy.params
    if not p.mu_envelope_delay or p.gamma_mu == 0.0:
        return 0.0
    mu = p.gamma_mu / p.gamma
    # Input from the left passes atom 2 late; from the right, early.
    return -mu if hierarchy.direction == LEFT else +mu


def solve_time_domain(
    hierarchy: Hierarchy,
    config: SolverConfig | None = None,
    t_end: float | None = None,
    samples: int = 1201,
) -> TimeDomainResult:
    """Integrate the full hierarchy through the pulse.

    The square envelope is discontinuous, so the span is cut at every
    point where any atom's drive switches and DOP853 runs per segment.
    """
    if config is None:
        config = SolverConfig(mode=TIME_DOMAIN)
    pulse = hierarchy.pulse
    dur = pulse.duration
    if t_end is None:
        t_end = dur
    order = tuple(band_clusters(hierarchy.n_max))
    nc = len(order)
    slot = {pq: i for i, pq in enumerate(order)}

    coeffs = hierarchy.coeffs
    m_t = coeffs.drift18().T.copy()
    src = coeffs.source18()
    shift2 = _atom2_shift(hierarchy)
    split_atoms = shift2 != 0.0
    if split_atoms:
        ann_t = (coeffs.ann18(atom=1).T.copy(), coeffs.ann18(atom=2).T.copy())
        cre_t = (coeffs.cre18(atom=1).T.copy(), coeffs.cre18(atom=2).T.copy())
    else:
        ann_t = (coeffs.ann18().T.copy(),)
        cre_t = (coeffs.cre18().T.copy(),)

    diag_src = np.zeros((nc, 18), dtype=complex)
    down = np.full(nc, -1)
    up = np.full(nc, -1)
    sq_down = np.zeros(nc)
    sq_up = np.zeros(nc)
    for i, (p, q) in enumerate(order):
        if p == q:
            diag_src[i] = src
        j = slot.get((p, q - 1))
        if j is not None:
            down[i] = j
            sq_down[i] = np.sqrt(q)
        j = slot.get((p - 1, q))
        if j is not None:
            up[i] = j
            sq_up[i] = np.sqrt(p)

    has_down = down >= 0
    has_up = up >= 0

    def gather(y, idx, mask):
        out = np.zeros_like(y)
        out[mask] = y[idx[mask]]
        return out

    def rhs(t, flat):
        y = flat.reshape(nc, 18)
        dy = y @ m_t + diag_src
        y_down = gather(y, down, has_down)
        y_up = gather(y, up, has_up)
        shifts = (0.0, shift2) if split_atoms else (0.0,)
        for blk_a, blk_c, dt0 in zip(ann_t, cre_t, shifts):
            xi = complex(envelope(pulse, t + dt0))
            if xi != 0.0:
                dy += (sq_down * xi)[:, None] * (y_down @ blk_a)
                dy += (sq_up * np.conj(xi))[:, None] * (y_up @ blk_c)
        return dy.ravel()

    # Cut points where any envelope switches on or off.
    cuts = {0.0, t_end}
    for edge in (0.0, dur):
        for dt0 in ((0.0, shift2) if split_atoms else (0.0,)):
            c = edge - dt0
            if 0.0 < c < t_end:
                cuts.add(c)
    if dur < t_end:
        cuts.add(dur)
    cuts = sorted(cuts)

    grid = np.linspace(0.0, t_end, samples)
    y0 = np.zeros((nc, 18), dtype=complex)
    for i, (p, q) in enumerate(order):
        if p == q:
            y0[i, :9] = eom.vacuum_values()
            y0[i, 9:] = np.conj(eom.vacuum_values())

    times = [np.array([0.0])]
    values = [y0.reshape(1, nc, 18).copy()]
    y = y0.ravel().copy()
    for a, b in zip(cuts[:-1], cuts[1:]):
        inner = grid[(grid > a + 1e-15 * t_end) & (grid < b - 1e-15 * t_end)]
        t_eval = np.concatenate([inner, [b]])
        sol = solve_ivp(
            rhs,
            (a, b),
            y,
            method="DOP853",
            t_eval=t_eval,
            rtol=config.rel_tol,
            atol=config.abs_tol,
        )
        if not sol.success:
            raise StepFailure(time=float(sol.t[-1]) if len(sol.t) else a, detail=sol.message)
        y = sol.y[:, -1].copy()
        times.append(sol.t)
        values.append(sol.y.T.reshape(-1, nc, 18))

    return TimeDomainResult(
        hierarchy=hierarchy,
        times=np.concatenate(times),
        cluster_values=np.concatenate(values, axis=0),
        order=order,
    )
