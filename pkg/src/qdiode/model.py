"""Problem definition: device parameters, input pulses, and input states.

Conventions used throughout the package:

* The two emitters sit on a one-dimensional waveguide.  The left one
  (index 1) is detuned by ``delta`` from the pulse carrier, the right one
  (index 2) is resonant with it.
* ``gamma`` is the decay rate into each propagation direction, so an
  emitter's total waveguide decay rate is ``2 * gamma``.
* ``theta`` is the propagation phase accumulated by a carrier-frequency
  photon travelling between the emitters.  Adding a multiple of ``2 * pi``
  never changes any observable.
* ``delta_mu`` is the (small) extra phase ``delta * travel_time`` that
  distinguishes the detuned emitter's phase from the carrier's.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

LEFT = "left"
RIGHT = "right"

FOCK = "fock"
COHERENT = "coherent"
SUPERPOSITION = "superposition"

SQUARE = "square"

_DIRECTIONS = (LEFT, RIGHT)
_NORM_TOL = 1e-12


@dataclass(frozen=True)
class DeviceParams:
    """Physical parameters of the two-emitter device.

    ``gamma_mu`` is the inter-emitter travel time in units of ``1/gamma``.
    It only matters when ``mu_envelope_delay`` is set, in which case the
    time-domain solver offsets the envelope seen by the second emitter.
    For the pulse lengths of interest the offset is negligible, which is
    why it defaults to off.
    """

    gamma: float = 1.0
    delta: float = 0.0
    theta: float = 0.0
    delta_mu: float = 0.0
    mu_envelope_delay: bool = False
    gamma_mu: float = 0.0

    def __post_init__(self):
        if not (self.gamma > 0.0):
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.mu_envelope_delay and self.gamma_mu < 0.0:
            raise ValueError("gamma_mu must be nonnegative")

    @property
    def detuning_splitting(self) -> float:
        """Frequency splitting of emitter 1 relative to emitter 2 (= -delta)."""
        return -self.delta


@dataclass(frozen=True)
class PulseSpec:
    """Square pulse with unit-normalized envelope.

    The envelope is ``sqrt(omega / 2)`` on ``[0, 2 / omega)`` and zero
    outside, so ``integral |envelope|^2 dt = 1`` exactly.
    """

    omega: float
    shape: str = SQUARE

    def __post_init__(self):
        if not (self.omega > 0.0):
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.shape != SQUARE:
            raise ValueError(f"unsupported pulse shape {self.shape!r}")

    @property
    def duration(self) -> float:
        return 2.0 / self.omega

    @property
    def height(self) -> float:
        return math.sqrt(self.omega / 2.0)


def envelope(pulse: PulseSpec, t) -> complex:
    """Pulse envelope at time ``t`` (vectorizes over numpy arrays)."""
    import numpy as np

    inside = (np.asarray(t) >= 0.0) & (np.asarray(t) < pulse.duration)
    return np.where(inside, pulse.height, 0.0) + 0.0j


@dataclass(frozen=True)
class InputState:
    """Input photon state: Fock, coherent, or a Fock superposition.

    ``coefficients`` are amplitudes c_k on Fock layers |k>, k = 0..N; they
    must be normalized.  ``direction`` selects which end of the waveguide
    the pulse enters from.
    """

    kind: str
    direction: str = LEFT
    n: int = 0
    nbar: float = 0.0
    coefficients: tuple = field(default=())

    def __post_init__(self):
        if self.direction not in _DIRECTIONS:
            raise ValueError(f"direction must be one of {_DIRECTIONS}")
        if self.kind == FOCK:
            if not isinstance(self.n, int) or self.n < 0:
                raise ValueError(f"fock n must be a nonnegative integer, got {self.n}")
        elif self.kind == COHERENT:
            if self.nbar < 0.0:
                raise ValueError(f"nbar must be nonnegative, got {self.nbar}")
        elif self.kind == SUPERPOSITION:
            coeffs = tuple(complex(c) for c in self.coefficients)
            if not coeffs:
                raise ValueError("superposition needs at least one coefficient")
            norm = sum(abs(c) ** 2 for c in coeffs)
            if abs(norm - 1.0) > _NORM_TOL:
                raise ValueError(f"coefficients not normalized: sum |c|^2 = {norm!r}")
            object.__setattr__(self, "coefficients", coeffs)
        else:
            raise ValueError(f"unknown input kind {self.kind!r}")

    @staticmethod
    def fock(n: int, direction: str = LEFT) -> "InputState":
        return InputState(kind=FOCK, direction=direction, n=n)

    @staticmethod
    def coherent(nbar: float, direction: str = LEFT) -> "InputState":
        return InputState(kind=COHERENT, direction=direction, nbar=float(nbar))

    @staticmethod
    def superposition(coefficients, direction: str = LEFT) -> "InputState":
        return InputState(
            kind=SUPERPOSITION, direction=direction, coefficients=tuple(coefficients)
        )

    @property
    def mean_photons(self) -> float:
        if self.kind == FOCK:
            return float(self.n)
        if self.kind == COHERENT:
            return self.nbar
        return sum(abs(c) ** 2 * k for k, c in enumerate(self.coefficients))

    @property
    def max_fock(self) -> int:
        """Highest Fock layer with support (coherent states have none)."""
        if self.kind == FOCK:
            return self.n
        if self.kind == SUPERPOSITION:
            return len(self.coefficients) - 1
        raise ValueError("coherent states are not truncated at a Fock layer")


def mean_flux(state: InputState, pulse: PulseSpec) -> float:
    """Mean photon flux during the pulse: mean photon number over duration."""
    return state.mean_photons / pulse.duration


def opposite(direction: str) -> str:
    return RIGHT if direction == LEFT else LEFT
