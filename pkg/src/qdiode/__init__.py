"""qdiode: photon transport through a two-emitter waveguide rectifier.

Solves the closed operator-moment hierarchy for Fock, coherent, and
superposition input pulses, in steady state or full time domain, and
reduces the solutions to window-integrated photon counts, directional
transmittivities, and contrast metrics.  A transfer-matrix oracle
provides an independent check in the single-photon narrowband limit.
"""

from .counts import PulseCounts, pulse_counts
from .errors import (
    BothBlocked,
    ConfigError,
    QdiodeError,
    SingularLevel,
    StepFailure,
    ZeroFlux,
)
from .model import (
    COHERENT,
    FOCK,
    LEFT,
    RIGHT,
    SQUARE,
    SUPERPOSITION,
    DeviceParams,
    InputState,
    PulseSpec,
    envelope,
    mean_flux,
)
from .observables import (
    Metrics,
    ScatterResult,
    metrics_from_transmissions,
    simulate_point,
)
from .sweep import SweepGrid, SweepRow, run_sweep

__version__ = "0.1.0"

__all__ = [
    "BothBlocked",
    "COHERENT",
    "ConfigError",
    "DeviceParams",
    "FOCK",
    "InputState",
    "LEFT",
    "Metrics",
    "PulseCounts",
    "PulseSpec",
    "QdiodeError",
    "RIGHT",
    "SQUARE",
    "SUPERPOSITION",
    "ScatterResult",
    "SingularLevel",
    "StepFailure",
    "SweepGrid",
    "SweepRow",
    "ZeroFlux",
    "envelope",
    "mean_flux",
    "metrics_from_transmissions",
    "pulse_counts",
    "run_sweep",
    "simulate_point",
    "__version__",
]
