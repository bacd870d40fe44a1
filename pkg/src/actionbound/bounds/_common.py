"""Shared helpers for the bound evaluators."""

from __future__ import annotations

import math

import numpy as np

from ..hamiltonian import Constant, TimeDepHamiltonian, TimeWindow
from ..linalg import as_matrix, spectral_norms

#: 1 + 2 log 2, the constant of the eternal and ergodic-rate bounds.
THETA = 1.0 + 2.0 * math.log(2.0)


def as_hamiltonian(h) -> TimeDepHamiltonian:
    if isinstance(h, TimeDepHamiltonian):
        return h
    return Constant(as_matrix(h))


def as_window(window, default_points: int = 1001) -> TimeWindow:
    if isinstance(window, TimeWindow):
        return window
    return TimeWindow(float(window), default_points)


def sup_norm_of_stack(stack) -> float:
    stack = np.asarray(stack)
    if len(stack) == 0:
        return 0.0
    return float(np.max(spectral_norms(stack)))
