"""Time dilation of lattice-trapped clocks prepared in motional cat states.

The coupling between a clock's internal energy and its motion in a harmonic
lattice well makes the elapsed clock time depend on the motional state.  This
package evaluates that dependence for a superposition of two coherent states
and for the matching classical mixture, with and without motional noise.

Layers, bottom up:

* :mod:`~lattice_dilation.units`      constants, atoms, lattice coefficients
* :mod:`~lattice_dilation.algebra`    normal-ordered ladder polynomials and channel rules
* :mod:`~lattice_dilation.integrals`  exact time integrals of evolved polynomials
* :mod:`~lattice_dilation.closedform` secular closed forms per noise channel
* :mod:`~lattice_dilation.oracle`     truncated Fock-space Lindblad reference
* :mod:`~lattice_dilation.clock`      Ramsey fringes, detectability, idealized clocks
* :mod:`~lattice_dilation.cli`        command-line sweeps and verification
"""

__version__ = "0.1.0"

from .algebra import ChannelKind, NoiseChannel, NormalOrderedPoly, multiply_normal_order
from .clock import (
    FringeModel,
    classical_proper_time,
    combined_noise_report,
    detectability,
    fringe_model,
    fringe_probability,
    idealized_clock_moments,
)
from .closedform import (
    DilationReport,
    amplitude_report,
    channel_report,
    diffusion_report,
    free_report,
    oscillating_delta1,
    phase_report,
)
from .integrals import compute_I1, compute_I2, compute_I2_prime, engine_report
from .states import StateKind, SuperposedCoherentState, coherence_factor
from .units import (
    MG24,
    PRESETS,
    SR87,
    AtomSpec,
    DimensionlessRegime,
    DomainError,
    LatticeSpec,
    PhysicalConstants,
    derive_lattice,
    displacement_to_alpha,
)

__all__ = [
    "AtomSpec",
    "ChannelKind",
    "DilationReport",
    "DimensionlessRegime",
    "DomainError",
    "FringeModel",
    "LatticeSpec",
    "MG24",
    "NoiseChannel",
    "NormalOrderedPoly",
    "PRESETS",
    "PhysicalConstants",
    "SR87",
    "StateKind",
    "SuperposedCoherentState",
    "amplitude_report",
    "channel_report",
    "classical_proper_time",
    "coherence_factor",
    "combined_noise_report",
    "compute_I1",
    "compute_I2",
    "compute_I2_prime",
    "derive_lattice",
    "detectability",
    "diffusion_report",
    "displacement_to_alpha",
    "engine_report",
    "free_report",
    "fringe_model",
    "fringe_probability",
    "idealized_clock_moments",
    "multiply_normal_order",
    "oscillating_delta1",
    "phase_report",
]
