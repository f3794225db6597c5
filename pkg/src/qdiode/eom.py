"""Coupled operator equations for the two-emitter system.

The dynamics closes on nine emitter operators (plus the identity):

    index  operator            charge  rotation
    0      sm1                 1       -1
    1      sz1                 0        0
    2      sm2                 1        0
    3      sz2                 0        0
    4      sz1*sm2             1        0
    5      sm1*sz2             1       -1
    6      sp1*sm2             0       +1
    7      sm1*sm2             2       -1
    8      sz1*sz2             0        0

"charge" is how many photons the operator absorbs net; a matrix element
<p|O|q> vanishes unless q - p equals the operator's charge.  "rotation" is
the multiple of exp(i*delta*t) the operator carries in the frame of the
appendix-style mixed-reference equations; this module works in the frame
where those factors are absorbed, so every coefficient below is constant
in time.  ``raw_tables`` re-applies the factors for diagnostics.

Matrix elements are organized per cluster (p, q) as an 18-vector: the
first half holds E_{p,q}[O_i], the second half conj(E_{q,p}[O_i]).  The
cluster evolves as

    du/dt = M u + delta_{pq} S
            + sqrt(q) xi(t) K_ann u_{p,q-1}
            + sqrt(p) conj(xi(t)) K_cre u_{p-1,q}

with the stacked matrices assembled by CoefficientSet.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .model import LEFT, RIGHT, DeviceParams

N_OPS = 9

LABELS = ("sm1", "sz1", "sm2", "sz2", "sz1_sm2", "sm1_sz2", "sp1_sm2", "sm1_sm2", "sz1_sz2")

CHARGE = np.array([1, 0, 1, 0, 1, 1, 0, 2, 0], dtype=int)

ROTATION = np.array([-1, 0, 0, 0, 0, -1, 1, -1, 0], dtype=int)

# convenient index names
SM1, SZ1, SM2, SZ2, Z1M2, M1Z2, P1M2, M1M2, Z1Z2 = range(N_OPS)


@dataclass(frozen=True)
class CoefficientSet:
    """Constant coefficients of one input direction's cluster equations.

    ``drift`` couples a cluster to itself, ``drift_conj`` to its own
    conjugate half.  The six drive blocks are kept per emitter so the
    time-domain solver can retard the envelope seen by emitter 2; the
    steady-state path just sums them.
    """

    drift: np.ndarray
    drift_conj: np.ndarray
    source: np.ndarray
    ann1: np.ndarray
    ann2: np.ndarray
    ann_conj1: np.ndarray
    ann_conj2: np.ndarray
    cre1: np.ndarray
    cre2: np.ndarray

    def drift18(self) -> np.ndarray:
        a, b = self.drift, self.drift_conj
        return np.block([[a, b], [b.conj(), a.conj()]])

    def source18(self) -> np.ndarray:
        return np.concatenate([self.source, self.source.conj()])

    def _pick(self, one, two, atom):
        if atom is None:
            return one + two
        return one if atom == 1 else two

    def ann18(self, atom=None) -> np.ndarray:
        """Stacked coupling to the cluster one photon down, times sqrt(q)*xi."""
        d = self._pick(self.ann1, self.ann2, atom)
        dt = self._pick(self.ann_conj1, self.ann_conj2, atom)
        e = self._pick(self.cre1, self.cre2, atom)
        z = np.zeros_like(d)
        return np.block([[d, dt], [z, e.conj()]])

    def cre18(self, atom=None) -> np.ndarray:
        """Stacked coupling to the cluster one photon up, times sqrt(p)*conj(xi)."""
        d = self._pick(self.ann1, self.ann2, atom)
        dt = self._pick(self.ann_conj1, self.ann_conj2, atom)
        e = self._pick(self.cre1, self.cre2, atom)
        z = np.zeros_like(d)
        return np.block([[e, z], [dt.conj(), d.conj()]])


def retarded_theta(params: DeviceParams) -> float:
    """Propagation phase at the detuned emitter's frequency."""
    return params.theta - params.delta_mu


def constant_tables(
    params: DeviceParams, direction: str = LEFT, flip_drive_phase: bool = False
) -> CoefficientSet:
    """Build the constant-frame coefficient tables for one input direction.

    ``flip_drive_phase`` conjugates the propagation phase on emitter 2's
    drive only.  It exists for the validation suite, which must be able
    to detect such a sign error; never set it otherwise.
    """
    g = params.gamma
    d = params.delta
    p = cmath.exp(1j * params.theta)
    p1 = cmath.exp(1j * retarded_theta(params))
    pc, p1c = p.conjugate(), p1.conjugate()

    a = np.zeros((N_OPS, N_OPS), dtype=complex)
    b = np.zeros((N_OPS, N_OPS), dtype=complex)
    f = np.zeros(N_OPS, dtype=complex)

    # every cross term's phase belongs to the emitting atom: exchanges fed
    # by emitter 2 carry theta, those fed by emitter 1 carry theta_1
    a[SM1, SM1] = 1j * d - g
    a[SM1, Z1M2] = g * p

    a[SZ1, SZ1] = -2 * g
    a[SZ1, P1M2] = -2 * g * p
    b[SZ1, P1M2] = -2 * g * pc
    f[SZ1] = -2 * g

    a[SM2, SM2] = -g
    a[SM2, M1Z2] = g * p1

    a[SZ2, SZ2] = -2 * g
    a[SZ2, P1M2] = -2 * g * p1c
    b[SZ2, P1M2] = -2 * g * p1
    f[SZ2] = -2 * g

    a[Z1M2, Z1M2] = -3 * g
    a[Z1M2, SM2] = -2 * g
    a[Z1M2, SM1] = -g * pc
    a[Z1M2, M1Z2] = -g * (pc + p1)

    a[M1Z2, M1Z2] = 1j * d - 3 * g
    a[M1Z2, SM1] = -2 * g
    a[M1Z2, SM2] = -g * p1c
    a[M1Z2, Z1M2] = -g * (p + p1c)

    a[P1M2, P1M2] = -2 * g - 1j * d
    a[P1M2, SZ1] = g * pc / 2
    a[P1M2, SZ2] = g * p1 / 2
    a[P1M2, Z1Z2] = g * (pc + p1) / 2

    a[M1M2, M1M2] = 1j * d - 2 * g

    a[Z1Z2, Z1Z2] = -4 * g
    a[Z1Z2, SZ1] = -2 * g
    a[Z1Z2, SZ2] = -2 * g
    a[Z1Z2, P1M2] = 2 * g * (p + p1c)
    b[Z1Z2, P1M2] = 2 * g * (p1 + pc)

    # input coupling: the phase on emitter 2 is the propagation phase at
    # the carrier, exactly; right-side input conjugates it
    q2 = pc if direction == RIGHT else p
    if flip_drive_phase:
        q2 = q2.conjugate()
    q2c = q2.conjugate()
    rg = np.sqrt(g)

    ann1 = np.zeros((N_OPS, N_OPS), dtype=complex)
    ann2 = np.zeros((N_OPS, N_OPS), dtype=complex)
    annc1 = np.zeros((N_OPS, N_OPS), dtype=complex)
    annc2 = np.zeros((N_OPS, N_OPS), dtype=complex)
    cre1 = np.zeros((N_OPS, N_OPS), dtype=complex)
    cre2 = np.zeros((N_OPS, N_OPS), dtype=complex)

    ann1[SM1, SZ1] = rg
    ann1[Z1M2, P1M2] = -2 * rg
    ann1[M1Z2, Z1Z2] = rg
    ann1[M1M2, Z1M2] = rg

    ann2[SM2, SZ2] = rg * q2
    ann2[Z1M2, Z1Z2] = rg * q2
    ann2[M1M2, M1Z2] = rg * q2

    annc1[SZ1, SM1] = -2 * rg
    annc1[Z1Z2, M1Z2] = -2 * rg

    annc2[SZ2, SM2] = -2 * rg * q2
    annc2[M1Z2, P1M2] = -2 * rg * q2
    annc2[P1M2, M1Z2] = rg * q2
    annc2[Z1Z2, Z1M2] = -2 * rg * q2

    cre1[SZ1, SM1] = -2 * rg
    cre1[Z1M2, M1M2] = -2 * rg
    cre1[P1M2, Z1M2] = rg
    cre1[Z1Z2, M1Z2] = -2 * rg

    cre2[SZ2, SM2] = -2 * rg * q2c
    cre2[M1Z2, M1M2] = -2 * rg * q2c
    cre2[Z1Z2, Z1M2] = -2 * rg * q2c

    return CoefficientSet(
        drift=a,
        drift_conj=b,
        source=f,
        ann1=ann1,
        ann2=ann2,
        ann_conj1=annc1,
        ann_conj2=annc2,
        cre1=cre1,
        cre2=cre2,
    )


def raw_tables(params: DeviceParams, direction: str, t: float) -> CoefficientSet:
    """Coefficients with the rotating factors left in, evaluated at time t.

    This is the appendix-style frame where the detuned emitter's operators
    still oscillate.  Useful only as a diagnostic: the residual time
    dependence check must flag this frame as non-constant whenever
    delta != 0.
    """
    cs = constant_tables(params, direction)
    rot = np.exp(1j * ROTATION * params.delta * t)

    def minus(mat):  # row weight minus column weight
        return mat * rot[:, None] * rot.conj()[None, :]

    def plus(mat):  # conjugate-channel blocks add the column weight
        return mat * rot[:, None] * rot[None, :]

    drift = minus(cs.drift)
    drift = drift + 1j * params.delta * np.diag(ROTATION.astype(float))
    return CoefficientSet(
        drift=drift,
        drift_conj=plus(cs.drift_conj),
        source=cs.source * rot,
        ann1=minus(cs.ann1),
        ann2=minus(cs.ann2),
        ann_conj1=plus(cs.ann_conj1),
        ann_conj2=plus(cs.ann_conj2),
        cre1=minus(cs.cre1),
        cre2=minus(cs.cre2),
    )


def vacuum_values() -> np.ndarray:
    """Nine-operator expectations in the joint ground state."""
    v = np.zeros(N_OPS, dtype=complex)
    v[SZ1] = -1.0
    v[SZ2] = -1.0
    v[Z1Z2] = 1.0
    return v
