"""Pulse-sequence compiler and verifier for finite-level ladder systems.

Factor a target unitary into adjacent-transition rotations, synthesize a
schedule of simple resonant pulses whose areas realize those rotations,
and verify the schedule by numerical propagation.
"""

from .decompose import (
    DecompositionResult,
    FactorSpec,
    decompose,
    phase_flip_probe,
    reconstruct,
    target_inversion,
    target_observable_max,
    target_population_transfer,
    target_superposition,
)
from .linalg import (
    HermitianEigensystem,
    embedded_rotation,
    gram_schmidt,
    hermitian_eigensystem,
    unitary_distance,
)
from .pulses import (
    Pulse,
    PulseSchedule,
    PulseShape,
    detuning_guard,
    envelope,
    field_value,
    pulse_area,
    synthesize,
)
from .simulate import (
    SimulationTrace,
    piecewise_trace,
    propagate_labframe,
    propagate_piecewise,
    propagate_rwa,
    trace_metrics,
    write_trace_csv,
)
from .system import (
    EnsembleState,
    Observable,
    SystemModel,
    boltzmann_ensemble,
    expectation,
    free_evolution,
    kinematical_bounds,
    morse_system,
    transition_dipole_observable,
)

__version__ = "0.1.0"
