"""Photon-number cluster hierarchy.

For an input pulse prepared with at most N photons in one mode, every
observable reduces to matrix elements E_{p,q}[O] = <p|O(t)|q> between
photon-number states of that mode.  Charge conservation kills every
cluster with |p - q| > 2 for the nine-operator basis, and the drive only
couples a cluster to (p, q-1) and (p-1, q), so the clusters form a DAG
ordered by level s = p + q.  Steady states are then solved level by
level with one shared 18x18 factorization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import eom
from .model import COHERENT, LEFT, DeviceParams, InputState, PulseSpec

CONSTANT_FRAME = "constant"
RAW_FRAME = "raw"


@dataclass
class HierarchyState:
    """Matrix elements of the nine operators on the (n_max+1)^2 grid.

    ``values[p, q, i]`` is E_{p,q}[O_i]; entries outside the |p-q| <= 2
    band are structurally zero and stay zero.
    """

    n_max: int
    values: np.ndarray

    @classmethod
    def ground(cls, n_max: int) -> "HierarchyState":
        vals = np.zeros((n_max + 1, n_max + 1, eom.N_OPS), dtype=complex)
        idx = np.arange(n_max + 1)
        vals[idx, idx, :] = eom.vacuum_values()
        return cls(n_max=n_max, values=vals)

    def element(self, p: int, q: int, op) -> complex:
        if isinstance(op, str):
            op = eom.LABELS.index(op)
        return complex(self.values[p, q, op])

    def diagonal(self, op) -> np.ndarray:
        if isinstance(op, str):
            op = eom.LABELS.index(op)
        idx = np.arange(self.n_max + 1)
        return self.values[idx, idx, op]


def band_clusters(n_max: int):
    """All clusters with support, ordered by level then bra index."""
    out = []
    for s in range(2 * n_max + 1):
        for p in range(max(0, s - n_max), min(n_max, s) + 1):
            q = s - p
            if abs(p - q) <= 2:
                out.append((p, q))
    return out


@dataclass(frozen=True)
class LinearLevelSystem:
    """The linear system governing one level s = p + q of the hierarchy.

    All clusters share the same 18x18 block, so the level matrix is block
    diagonal; ``matrix`` materializes it for inspection.  ``sources``
    marks which clusters carry the identity inhomogeneity (p == q).
    """

    level: int
    clusters: tuple
    block: np.ndarray
    identity_source: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        k = len(self.clusters)
        dim = 18 * k
        out = np.zeros((dim, dim), dtype=complex)
        for i in range(k):
            out[18 * i : 18 * (i + 1), 18 * i : 18 * (i + 1)] = self.block
        return out

    @property
    def source(self) -> np.ndarray:
        out = np.zeros(18 * len(self.clusters), dtype=complex)
        for i, (p, q) in enumerate(self.clusters):
            if p == q:
                out[18 * i : 18 * (i + 1)] = self.identity_source
        return out


@dataclass(frozen=True)
class Hierarchy:
    """Level systems plus the shared context the solvers need."""

    params: DeviceParams
    input: InputState
    pulse: PulseSpec
    n_max: int
    frame: str
    coeffs: eom.CoefficientSet
    levels: tuple = field(default=())

    def __iter__(self):
        return iter(self.levels)

    def __len__(self):
        return len(self.levels)

    def __getitem__(self, i):
        return self.levels[i]

    @property
    def direction(self) -> str:
        return self.input.direction

    def clusters(self):
        return band_clusters(self.n_max)

    def coeffs_at(self, t: float) -> eom.CoefficientSet:
        if self.frame == CONSTANT_FRAME:
            return self.coeffs
        return eom.raw_tables(self.params, self.direction, t)

    def initial_state(self) -> HierarchyState:
        return HierarchyState.ground(self.n_max)


def build_hierarchy(
    params: DeviceParams,
    input_state: InputState,
    pulse: PulseSpec,
    n_max: int | None = None,
    frame: str = CONSTANT_FRAME,
    flip_drive_phase: bool = False,
) -> Hierarchy:
    """Assemble the cluster hierarchy for a Fock or superposition input.

    Coherent inputs have no Fock truncation and take the semiclassical
    path (``solver.solve_coherent``); they are rejected here.
    """
    if input_state.kind == COHERENT:
        raise ValueError("coherent inputs are handled by solve_coherent, not the hierarchy")
    if n_max is None:
        n_max = input_state.max_fock
    if n_max < 0:
        raise ValueError(f"n_max must be nonnegative, got {n_max}")
    if n_max < input_state.max_fock:
        raise ValueError(
            f"n_max={n_max} cannot hold the input (needs {input_state.max_fock})"
        )
    if frame not in (CONSTANT_FRAME, RAW_FRAME):
        raise ValueError(f"unknown frame {frame!r}")

    coeffs = eom.constant_tables(
        params, input_state.direction, flip_drive_phase=flip_drive_phase
    )
    block = coeffs.drift18()
    src = coeffs.source18()

    by_level: dict[int, list] = {}
    for p, q in band_clusters(n_max):
        by_level.setdefault(p + q, []).append((p, q))
    levels = tuple(
        LinearLevelSystem(
            level=s, clusters=tuple(cl), block=block, identity_source=src
        )
        for s, cl in sorted(by_level.items())
    )
    return Hierarchy(
        params=params,
        input=input_state,
        pulse=pulse,
        n_max=n_max,
        frame=frame,
        coeffs=coeffs,
        levels=levels,
    )


def residual_time_dependence(hierarchy: Hierarchy, times=None) -> float:
    """Max relative drift of the generator across the pulse.

    The default frame absorbs every oscillating factor, so this must come
    back at numerical zero; the raw frame fails it whenever delta != 0.
    """
    if times is None:
        dur = hierarchy.pulse.duration
        times = (0.1 * dur, 0.35 * dur, 0.6 * dur, 0.85 * dur)

    def flat(cs: eom.CoefficientSet) -> np.ndarray:
        return np.concatenate(
            [
                cs.drift18().ravel(),
                cs.ann18().ravel(),
                cs.cre18().ravel(),
                cs.source18(),
            ]
        )

    ref = flat(hierarchy.coeffs_at(times[0]))
    scale = np.abs(ref).max()
    worst = 0.0
    for t in times[1:]:
        worst = max(worst, float(np.abs(flat(hierarchy.coeffs_at(t)) - ref).max()))
    return worst / scale


def conjugate_pair_residual(clusters: dict) -> float:
    """Consistency of independently solved mirror clusters.

    ``clusters`` maps (p, q) to the solved 18-vector.  The second half of
    u_{p,q} should equal the conjugate of the first half of u_{q,p}; both
    were obtained from separate linear solves, so this is a real check.
    """
    worst = 0.0
    for (p, q), u in clusters.items():
        v = clusters.get((q, p))
        if v is None:
            continue
        worst = max(worst, float(np.abs(u[9:] - v[:9].conj()).max()))
    return worst
