"""Second-order split-step time evolution.

One step over dt sweeps the terms forward applying exp(-i c_k P_k dt/2)
each, then sweeps them in reverse. The symmetric sweep cancels the
first-order commutator error, so the step error is O(dt^3) and the
full-interval error O(tau^2 / steps^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .pauli import PauliSum, PauliTerm, apply_axes, dense_matrix
from .state import StateVector


@dataclass(frozen=True)
class TrotterPlan:
    """Step count for a split-step evolution."""

    steps: int

    def __post_init__(self) -> None:
        if not isinstance(self.steps, int) or self.steps < 1:
            raise ValueError(f"step count must be a positive integer, got {self.steps!r}")


def _rotate(amplitudes: np.ndarray, term: PauliTerm, angle: float) -> np.ndarray:
    # exp(-i angle P) psi = cos(angle) psi - i sin(angle) P psi
    return math.cos(angle) * amplitudes - 1.0j * math.sin(angle) * apply_axes(amplitudes, term.axes)


def evolve_trotter(state: StateVector, op: PauliSum, tau: float, steps: int) -> StateVector:
    """Approximate exp(-i tau op) with ``steps`` symmetric sweeps."""
    TrotterPlan(steps)
    if state.n_qubits != op.n_qubits:
        raise ValueError("state and operator act on different registers")
    if not math.isfinite(tau):
        raise ValueError(f"evolution time {tau!r} must be finite")
    dt = tau / steps
    amps = np.array(state.amplitudes, dtype=complex)
    for _ in range(steps):
        for term in op.terms:
            amps = _rotate(amps, term, term.coeff * dt / 2.0)
        for term in reversed(op.terms):
            amps = _rotate(amps, term, term.coeff * dt / 2.0)
    return StateVector(state.n_qubits, amps)


def trotter_error(op: PauliSum, tau: float, steps: int) -> float:
    """Operator-norm distance between the split-step and exact propagators."""
    TrotterPlan(steps)
    if not math.isfinite(tau):
        raise ValueError(f"evolution time {tau!r} must be finite")
    matrix = dense_matrix(op)
    values, vectors = np.linalg.eigh(matrix)
    exact = (vectors * np.exp(-1.0j * tau * values)) @ vectors.conj().T
    dt = tau / steps
    dim = matrix.shape[0]
    factors = []
    for term in op.terms:
        dense_term = dense_matrix(PauliSum(op.n_qubits, (PauliTerm(1.0, term.axes),)))
        angle = term.coeff * dt / 2.0
        factors.append(math.cos(angle) * np.eye(dim) - 1.0j * math.sin(angle) * dense_term)
    step = reduce(np.matmul, factors + factors[::-1])
    approx = np.linalg.matrix_power(step, steps)
    return float(np.linalg.norm(approx - exact, 2))
