"""Operator-norm error bounds for time-dependent quantum evolutions, checked against numerical propagators."""

from . import bounds, errors, hamiltonian, linalg, propagator, spectral
from .bounds import BoundReport
from .hamiltonian import (
    Constant,
    Envelope,
    PiecewiseConstant,
    Sampler,
    TermSum,
    TimeDepHamiltonian,
    TimeWindow,
    from_json,
    parse_hamiltonian,
)
from .kernels import BACKEND
from .propagator import EvolutionResult, dyson_oracle, evolve, evolve_at, sup_distance

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoundReport",
    "Constant",
    "Envelope",
    "EvolutionResult",
    "PiecewiseConstant",
    "Sampler",
    "TermSum",
    "TimeDepHamiltonian",
    "TimeWindow",
    "bounds",
    "dyson_oracle",
    "errors",
    "evolve",
    "evolve_at",
    "from_json",
    "hamiltonian",
    "linalg",
    "parse_hamiltonian",
    "propagator",
    "spectral",
    "sup_distance",
]
