"""Two coupled two-level dipoles in a quantised field.

Coupling coefficients, Coulomb-dressed eigenstates, Lindblad/Redfield-type
generators, quantum-regression correlations and emission spectra.
"""

from .coupling import CouplingSet, couplings
from .dressed import DressedBasis, dressed_basis, jump_operators
from .errors import (ConfigError, DegenerateSteadyStateError, DipoleKitError, DomainError,
                     NumericalError)
from .liouvillian import (BUILDERS, Liouvillian, Trajectory, build_full_secular,
                          build_partial_secular, build_standard, initial_state, propagate,
                          steady_state)
from .regression import (SpectrumCurve, correlation_array, spectrum_new, spectrum_numeric,
                         spectrum_standard, two_time_correlation)
from .units import NaturalParams, ScenarioConfig, rydberg_defaults, to_natural, to_si

__all__ = [
    "BUILDERS", "ConfigError", "CouplingSet", "DegenerateSteadyStateError", "DipoleKitError",
    "DomainError", "DressedBasis", "Liouvillian", "NaturalParams", "NumericalError",
    "ScenarioConfig", "SpectrumCurve", "Trajectory", "build_full_secular",
    "build_partial_secular", "build_standard", "correlation_array", "couplings",
    "dressed_basis", "initial_state", "jump_operators", "propagate", "rydberg_defaults",
    "spectrum_new", "spectrum_numeric", "spectrum_standard", "steady_state", "to_natural",
    "to_si", "two_time_correlation",
]
