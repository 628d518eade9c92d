"""Driven dissipative harmonic oscillator coupled to a finite bosonic bath.

The Heisenberg-picture route: ``Propagator`` gives the linear coefficients,
``reduced_density`` turns them into Fock-basis matrix elements,
``observables`` and ``wigner`` post-process, ``oracle`` brute-forces the same
problem in a truncated Fock box, and ``magnus`` handles general
time-dependent generators.
"""

from .errors import (
    DimensionOverflow,
    EigendecompositionFailure,
    HeisenbergOQSError,
    NumericalError,
    ProbabilityVectorInvalid,
    QuadratureNonConvergence,
    SeriesNonConvergence,
    ValidationError,
)
from .model import (
    BathMode,
    BathSpec,
    CoherentState,
    ConstantDrive,
    FockMatrixState,
    GaussianPulse,
    HarmonicDrive,
    NumberState,
    Numerics,
    OscillatorSpec,
    PiecewiseConstantDrive,
    Scenario,
    SyntheticCoefficients,
    ThermalBathState,
    ZeroDrive,
    validate,
)
from .observables import energy, mean_heat, mean_number
from .propagator import CoefficientSet, Propagator
from .reduced_density import (
    DensityMatrix,
    InitialMoments,
    rho_element,
    rho_matrix,
    rho_matrix_auto,
    rho_matrix_from_coefficients,
    transition_probability,
)

__all__ = [
    "BathMode",
    "BathSpec",
    "CoefficientSet",
    "CoherentState",
    "ConstantDrive",
    "DensityMatrix",
    "DimensionOverflow",
    "EigendecompositionFailure",
    "FockMatrixState",
    "GaussianPulse",
    "HarmonicDrive",
    "HeisenbergOQSError",
    "InitialMoments",
    "NumberState",
    "NumericalError",
    "Numerics",
    "OscillatorSpec",
    "PiecewiseConstantDrive",
    "ProbabilityVectorInvalid",
    "Propagator",
    "QuadratureNonConvergence",
    "Scenario",
    "SeriesNonConvergence",
    "SyntheticCoefficients",
    "ThermalBathState",
    "ValidationError",
    "ZeroDrive",
    "energy",
    "mean_heat",
    "mean_number",
    "rho_element",
    "rho_matrix",
    "rho_matrix_auto",
    "rho_matrix_from_coefficients",
    "transition_probability",
    "validate",
]
