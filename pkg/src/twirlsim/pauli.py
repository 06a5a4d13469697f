"""Pauli-string operators with real coefficients.

A :class:`PauliTerm` is one coefficient times a tensor product of
single-qubit Paulis written as a string over "IXYZ", with position 0
acting on qubit 0 (the most significant bit of the basis index). A
:class:`PauliSum` is an ordered sum of such terms; term order is part of
the value and is preserved by arithmetic and JSON round-trips.

Dense matrices are only materialized up to a register-size cap so that
an accidental large build fails fast instead of exhausting memory. The
cap defaults to 12 qubits and can be overridden through the
``TWIRL_DENSE_LIMIT`` environment variable.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .state import StateVector

AXES = "IXYZ"

DENSE_LIMIT_ENV = "TWIRL_DENSE_LIMIT"
DENSE_LIMIT_DEFAULT = 12

HERMITICITY_TOL = 1e-12
IMAG_RESIDUE_TOL = 1e-10
COMMUTATOR_TOL = 1e-12

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


def dense_limit() -> int:
    """Current register-size cap for dense matrix construction."""
    raw = os.environ.get(DENSE_LIMIT_ENV)
    if raw is None:
        return DENSE_LIMIT_DEFAULT
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"{DENSE_LIMIT_ENV}={raw!r} is not an integer") from exc
    if value < 1:
        raise ValueError(f"{DENSE_LIMIT_ENV} must be positive, got {value}")
    return value


@dataclass(frozen=True)
class PauliTerm:
    """One real coefficient times a Pauli string such as 1.5 * "XZI"."""

    coeff: float
    axes: str

    def __post_init__(self) -> None:
        if not isinstance(self.coeff, (int, float)) or not math.isfinite(self.coeff):
            raise ValueError(f"coefficient {self.coeff!r} must be a finite real number")
        object.__setattr__(self, "coeff", float(self.coeff))
        if not self.axes or any(c not in AXES for c in self.axes):
            raise ValueError(f"axes {self.axes!r} must be a nonempty string over {AXES!r}")

    @property
    def n_qubits(self) -> int:
        return len(self.axes)

    def to_dict(self) -> dict:
        return {"coeff": self.coeff, "axes": self.axes}

    @classmethod
    def from_dict(cls, data: dict) -> PauliTerm:
        return cls(coeff=data["coeff"], axes=data["axes"])


@dataclass(frozen=True)
class PauliSum:
    """Ordered sum of Pauli terms acting on a fixed register."""

    n_qubits: int
    terms: tuple[PauliTerm, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.n_qubits < 1:
            raise ValueError("operator needs at least one qubit")
        if not self.terms:
            raise ValueError("operator needs at least one term")
        for term in self.terms:
            if term.n_qubits != self.n_qubits:
                raise ValueError(
                    f"term {term.axes!r} acts on {term.n_qubits} qubit(s), "
                    f"operator is on {self.n_qubits}"
                )

    def __add__(self, other: PauliSum) -> PauliSum:
        if not isinstance(other, PauliSum):
            return NotImplemented
        if other.n_qubits != self.n_qubits:
            raise ValueError("cannot add operators on different registers")
        return PauliSum(self.n_qubits, self.terms + other.terms)

    def __mul__(self, scalar: float) -> PauliSum:
        if not isinstance(scalar, (int, float)):
            return NotImplemented
        return PauliSum(
            self.n_qubits,
            tuple(PauliTerm(scalar * t.coeff, t.axes) for t in self.terms),
        )

    __rmul__ = __mul__

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "terms": [t.to_dict() for t in self.terms],
        }

    @classmethod
    def from_dict(cls, data: dict) -> PauliSum:
        return cls(
            n_qubits=data["n_qubits"],
            terms=tuple(PauliTerm.from_dict(t) for t in data["terms"]),
        )


def apply_axes(amplitudes: np.ndarray, axes: str) -> np.ndarray:
    """Apply a Pauli string to raw amplitudes without building a matrix."""
    n = len(axes)
    out = np.asarray(amplitudes, dtype=complex).reshape((2,) * n)
    touched = False
    for qubit, axis in enumerate(axes):
        if axis == "I":
            continue
        lo = tuple(0 if q == qubit else slice(None) for q in range(n))
        hi = tuple(1 if q == qubit else slice(None) for q in range(n))
        new = np.empty_like(out)
        if axis == "X":
            new[lo] = out[hi]
            new[hi] = out[lo]
        elif axis == "Y":
            new[lo] = -1.0j * out[hi]
            new[hi] = 1.0j * out[lo]
        else:
            new[lo] = out[lo]
            new[hi] = -out[hi]
        out = new
        touched = True
    if not touched:
        out = out.copy()
    return out.reshape(amplitudes.shape)


def apply_operator(amplitudes: np.ndarray, op: PauliSum) -> np.ndarray:
    """Apply a Pauli sum to raw amplitudes, term by term."""
    acc = np.zeros_like(amplitudes, dtype=complex)
    for term in op.terms:
        acc += term.coeff * apply_axes(amplitudes, term.axes)
    return acc


def dense_matrix(op: PauliSum) -> np.ndarray:
    """Dense matrix of a Pauli sum, qubit 0 as the leading kron factor."""
    limit = dense_limit()
    if op.n_qubits > limit:
        raise ValueError(
            f"dense matrix for {op.n_qubits} qubits exceeds the {limit}-qubit cap; "
            f"raise {DENSE_LIMIT_ENV} to override"
        )
    dim = 2**op.n_qubits
    matrix = np.zeros((dim, dim), dtype=complex)
    for term in op.terms:
        factors = [_SINGLE[c] for c in term.axes]
        matrix += term.coeff * reduce(np.kron, factors)
    deviation = float(np.max(np.abs(matrix - matrix.conj().T)))
    if deviation > HERMITICITY_TOL:
        raise ValueError(f"dense matrix deviates from Hermitian by {deviation:.3e}")
    return matrix


def expectation(state: StateVector, op: PauliSum) -> float:
    """Real expectation value <state|op|state>."""
    if state.n_qubits != op.n_qubits:
        raise ValueError(
            f"state on {state.n_qubits} qubit(s) does not match operator on {op.n_qubits}"
        )
    value = complex(np.vdot(state.amplitudes, apply_operator(state.amplitudes, op)))
    if abs(value.imag) > IMAG_RESIDUE_TOL:
        raise ValueError(f"expectation has imaginary residue {value.imag:.3e}")
    return float(value.real)


def commutes(a: PauliSum, b: PauliSum) -> bool:
    """Whether two operators commute, checked on dense matrices."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("commutator needs operators on the same register")
    ma, mb = dense_matrix(a), dense_matrix(b)
    return float(np.max(np.abs(ma @ mb - mb @ ma))) < COMMUTATOR_TOL


def schwinger_hamiltonian(n_qubits: int, coupling: float) -> PauliSum:
    """Staggered lattice gauge chain at dimensionless coupling J.

    The supported sizes and their term lists, in fixed order:

    * 1 qubit:  X + J Z
    * 2 qubits: (X0 X1)/2 + (Y0 Y1)/2 + J Z0
    * 3 qubits: (X0 X1)/2 + (X1 X2)/2 + (Y0 Y1)/2 + (Y1 Y2)/2 + J Z0 + J Z0 Z1

    J is the squared gauge coupling times the squared lattice spacing and
    must be a finite non-negative real; the bundled scenarios use J in
    [0, 4].
    """
    if not isinstance(coupling, (int, float)) or not math.isfinite(coupling):
        raise ValueError(f"coupling {coupling!r} must be a finite real number")
    if coupling < 0:
        raise ValueError(f"coupling must be non-negative, got {coupling!r}")
    j = float(coupling)
    if n_qubits == 1:
        terms = [PauliTerm(1.0, "X"), PauliTerm(j, "Z")]
    elif n_qubits == 2:
        terms = [
            PauliTerm(0.5, "XX"),
            PauliTerm(0.5, "YY"),
            PauliTerm(j, "ZI"),
        ]
    elif n_qubits == 3:
        terms = [
            PauliTerm(0.5, "XXI"),
            PauliTerm(0.5, "IXX"),
            PauliTerm(0.5, "YYI"),
            PauliTerm(0.5, "IYY"),
            PauliTerm(j, "ZII"),
            PauliTerm(j, "ZZI"),
        ]
    else:
        raise ValueError(f"unsupported system size {n_qubits}, supported sizes are 1, 2, 3")
    return PauliSum(n_qubits, tuple(terms))


def hamiltonian_by_name(name: str, coupling: float) -> PauliSum:
    """Resolve a built-in Hamiltonian name such as "schwinger-3q"."""
    sizes = {"schwinger-1q": 1, "schwinger-2q": 2, "schwinger-3q": 3}
    if name not in sizes:
        known = ", ".join(sorted(sizes))
        raise ValueError(f"unknown hamiltonian {name!r}, known names: {known}")
    return schwinger_hamiltonian(sizes[name], coupling)


def single_z(n_qubits: int, qubit: int) -> PauliSum:
    """Z on one qubit of an ``n_qubits`` register."""
    if not 0 <= qubit < n_qubits:
        raise ValueError(f"qubit {qubit} out of range for {n_qubits} qubit(s)")
    axes = "".join("Z" if q == qubit else "I" for q in range(n_qubits))
    return PauliSum(n_qubits, (PauliTerm(1.0, axes),))


def observable_zbar() -> PauliSum:
    """Staggered charge proxy (Z0 - Z1 + Z2) / 3 on three qubits."""
    return PauliSum(
        3,
        (
            PauliTerm(1.0 / 3.0, "ZII"),
            PauliTerm(-1.0 / 3.0, "IZI"),
            PauliTerm(1.0 / 3.0, "IIZ"),
        ),
    )


def named_observable(name: str, n_qubits: int) -> PauliSum:
    """Resolve an observable name used in manifests and CLI output.

    "H" is resolved by the caller (it depends on the Hamiltonian); this
    handles "Z" (single qubit), "Z0".."Z9", and "Zbar".
    """
    if name == "Zbar":
        if n_qubits != 3:
            raise ValueError("Zbar is defined on three qubits")
        return observable_zbar()
    if name == "Z":
        if n_qubits != 1:
            raise ValueError('observable "Z" is only unambiguous on one qubit, use "Z<k>"')
        return single_z(1, 0)
    if len(name) == 2 and name[0] == "Z" and name[1].isdigit():
        return single_z(n_qubits, int(name[1]))
    raise ValueError(f"unknown observable {name!r}")
