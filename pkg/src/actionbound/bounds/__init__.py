"""Bound evaluators. Each returns a :class:`BoundReport` pairing a bound with the quantity it controls."""

from .adiabatic import (
    adiabatic_bound,
    adiabatic_value,
    generalized_adiabatic_bound,
    generalized_adiabatic_value,
    strong_coupling_bound,
)
from .core import (
    average_bound_value,
    converse_action_bound,
    eternal_bound_value,
    eternal_periodic_bound,
    floquet_identity_residual,
    isospectral_divergence,
    rotated_action_path,
    rotating_frame_bound,
    universal_bound,
)
from .products import (
    DiscreteEnsemble,
    bangbang_bound,
    bangbang_value,
    ergodic_deviation,
    ergodic_trotter_value,
    group_average_holds,
    gtf_bound,
    gtf_g,
    gtf_g_cap,
    gtf_value,
    kicks_bound,
    periodic_trotter_value,
    random_trotter_bound,
    random_trotter_value,
    trotter_bound,
    trotter_product,
)
from .report import DOMINANCE_SLACK, BoundReport
from .rwa import (
    piecewise_envelope_value,
    qubit_lab_hamiltonian,
    qubit_rotating_frame,
    qubit_rwa_lab_hamiltonian,
    rwa_envelope_bound,
    rwa_general_bound,
    rwa_qubit_bound,
    rwa_qubit_value,
    rwa_two_timescale_bound,
    smooth_envelope_value,
)
from ._common import THETA

__all__ = [name for name in dir() if not name.startswith("_")]
