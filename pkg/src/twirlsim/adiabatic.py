"""Ramped state preparation between two Hamiltonians.

The ramp freezes the interpolated operator on each of ``steps`` equal
slices of the total time, evaluating the mix at the slice midpoint, and
evolves exactly (or with the chosen backend) under that frozen operator.
Slow ramps from the ground state of the start operator land close to
the ground state of the target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .pauli import PauliSum, PauliTerm
from .state import StateVector
from .twirl import Backend


@dataclass(frozen=True)
class AdiabaticSchedule:
    """Total ramp time and number of frozen slices."""

    total_time: float = 20.0
    steps: int = 400

    def __post_init__(self) -> None:
        if not math.isfinite(self.total_time) or self.total_time <= 0:
            raise ValueError(f"total time must be positive, got {self.total_time!r}")
        if not isinstance(self.steps, int) or self.steps < 1:
            raise ValueError(f"step count must be a positive integer, got {self.steps!r}")


def staggered_start(n_qubits: int) -> PauliSum:
    """Alternating-sign Z chain whose ground state is a basis state."""
    terms = []
    for qubit in range(n_qubits):
        axes = "".join("Z" if q == qubit else "I" for q in range(n_qubits))
        terms.append(PauliTerm(1.0 if qubit % 2 == 0 else -1.0, axes))
    return PauliSum(n_qubits, tuple(terms))


def staggered_start_label(n_qubits: int) -> str:
    """Basis label of the staggered-start ground state, e.g. "101"."""
    return "".join("1" if qubit % 2 == 0 else "0" for qubit in range(n_qubits))


def adiabatic_prepare(
    initial: StateVector | str,
    start_op: PauliSum,
    target_op: PauliSum,
    schedule: AdiabaticSchedule = AdiabaticSchedule(),
    backend: Backend = Backend(),
) -> StateVector:
    """Ramp ``initial`` from ``start_op`` to ``target_op``."""
    state = StateVector.basis(initial) if isinstance(initial, str) else initial
    if start_op.n_qubits != target_op.n_qubits:
        raise ValueError("start and target operators act on different registers")
    if state.n_qubits != start_op.n_qubits:
        raise ValueError("initial state and operators act on different registers")
    dt = schedule.total_time / schedule.steps
    for k in range(schedule.steps):
        s = (k + 0.5) / schedule.steps
        frozen = (1.0 - s) * start_op + s * target_op
        state = backend.evolve(state, frozen, dt)
    return state
