"""Exact spectral analysis: eigensystems, closed forms, exact evolution.

Eigenpairs are reported in a canonical order so that repeated runs and
the analytic forms line up: ascending eigenvalue, and inside a
near-degenerate run (gap below ``DEGENERACY_TOL``) ascending first
supported basis index. Each eigenvector is rescaled so its first
supported amplitude is positive real, which removes the arbitrary
global phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .pauli import PauliSum, dense_matrix, schwinger_hamiltonian
from .state import StateVector

DEGENERACY_TOL = 1e-8
SUPPORT_TOL = 1e-8
ORTHONORMAL_TOL = 1e-9
# Full orthonormality checks are quadratic in dimension; beyond this the
# constructor trusts the factorization that produced the columns.
ORTHONORMAL_CHECK_DIM = 64


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues (ascending) and matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.eigenvalues, dtype=float)
        vectors = np.array(self.eigenvectors, dtype=complex)
        if values.ndim != 1 or vectors.shape != (values.size, values.size):
            raise ValueError("need a square eigenvector matrix matching the eigenvalues")
        dim = values.size
        if dim < 2 or dim & (dim - 1):
            raise ValueError("dimension must be a power of two of at least one qubit")
        if np.any(np.diff(values) < -DEGENERACY_TOL):
            raise ValueError("eigenvalues must be in ascending order")
        if dim <= ORTHONORMAL_CHECK_DIM:
            gram = vectors.conj().T @ vectors
            if float(np.max(np.abs(gram - np.eye(dim)))) > ORTHONORMAL_TOL:
                raise ValueError("eigenvector columns are not orthonormal")
        values.setflags(write=False)
        vectors.setflags(write=False)
        object.__setattr__(self, "eigenvalues", values)
        object.__setattr__(self, "eigenvectors", vectors)

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def n_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def eigenstate(self, index: int) -> StateVector:
        """Eigenvector ``index`` as a state."""
        return StateVector(self.n_qubits, self.eigenvectors[:, index])


@dataclass(frozen=True, eq=False)
class OverlapDecomposition:
    """A state resolved against an eigenbasis."""

    decomposition: SpectralDecomposition
    amplitudes: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex)
        weights = np.array(self.weights, dtype=float)
        if amps.shape != weights.shape or amps.shape != (self.decomposition.dim,):
            raise ValueError("overlap arrays must match the decomposition dimension")
        amps.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "weights", weights)

    def dominant_index(self) -> int:
        """Index of the eigencomponent carrying the most weight."""
        return int(np.argmax(self.weights))


def _first_support(column: np.ndarray) -> int:
    hits = np.flatnonzero(np.abs(column) > SUPPORT_TOL)
    return int(hits[0]) if hits.size else 0


def _canonical_order(values: np.ndarray, vectors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    perm: list[int] = []
    start = 0
    for k in range(1, values.size + 1):
        if k == values.size or values[k] - values[k - 1] > DEGENERACY_TOL:
            group = sorted(range(start, k), key=lambda i: _first_support(vectors[:, i]))
            perm.extend(group)
            start = k
    return values[perm], vectors[:, perm]


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    fixed = vectors.copy()
    for i in range(fixed.shape[1]):
        lead = fixed[_first_support(fixed[:, i]), i]
        if abs(lead) > 0:
            fixed[:, i] *= lead.conjugate() / abs(lead)
    return fixed


@lru_cache(maxsize=256)
def _eigensystem(op: PauliSum) -> SpectralDecomposition:
    values, vectors = np.linalg.eigh(dense_matrix(op))
    values, vectors = _canonical_order(values, vectors)
    return SpectralDecomposition(values, _fix_phases(vectors))


def eigendecompose(op: PauliSum) -> SpectralDecomposition:
    """Numeric eigensystem of a Pauli sum, cached per operator."""
    return _eigensystem(op)


def _assemble(pairs: list[tuple[float, np.ndarray]], dim: int) -> SpectralDecomposition:
    values = np.array([e for e, _ in pairs], dtype=float)
    vectors = np.zeros((dim, len(pairs)), dtype=complex)
    for i, (_, vec) in enumerate(pairs):
        vectors[:, i] = vec / np.linalg.norm(vec)
    values, vectors = _canonical_order(values, vectors)
    return SpectralDecomposition(values, _fix_phases(vectors))


def closed_form_spectrum(n_qubits: int, coupling: float) -> SpectralDecomposition:
    """Analytic eigensystem of the built-in chain at coupling J.

    The one- and two-qubit spectra are +-sqrt(1 + J^2) plus, on two
    qubits, the decoupled |00> and |11> levels at +-J. The three-qubit
    operator splits over two hopping triples and two frozen corners,
    giving -(J + c), -s, a threefold zero level, c - J, 2J, and s with
    c = sqrt(2 + J^2) and s = sqrt(2 + 4 J^2).
    """
    # coupling validation matches the operator builder
    schwinger_hamiltonian(n_qubits, coupling)
    j = float(coupling)
    if n_qubits == 1:
        root = math.sqrt(1.0 + j * j)
        pairs = [
            (-root, np.array([1.0, -j - root], dtype=complex)),
            (root, np.array([1.0, root - j], dtype=complex)),
        ]
        return _assemble(pairs, 2)
    if n_qubits == 2:
        root = math.sqrt(1.0 + j * j)

        def pair_state(second: float) -> np.ndarray:
            vec = np.zeros(4, dtype=complex)
            vec[1] = 1.0
            vec[2] = second
            return vec

        corner00 = np.zeros(4, dtype=complex)
        corner00[0] = 1.0
        corner11 = np.zeros(4, dtype=complex)
        corner11[3] = 1.0
        pairs = [
            (-root, pair_state(-j - root)),
            (-j, corner11),
            (j, corner00),
            (root, pair_state(root - j)),
        ]
        return _assemble(pairs, 4)
    # three qubits: hopping acts inside {001, 010, 100} and {011, 101, 110}
    c = math.sqrt(2.0 + j * j)
    s = math.sqrt(2.0 + 4.0 * j * j)

    def odd_triple(a: float, b: float, d: float) -> np.ndarray:
        vec = np.zeros(8, dtype=complex)
        vec[1], vec[2], vec[4] = a, b, d
        return vec

    def even_triple(a: float, b: float, d: float) -> np.ndarray:
        vec = np.zeros(8, dtype=complex)
        vec[3], vec[5], vec[6] = a, b, d
        return vec

    corner000 = np.zeros(8, dtype=complex)
    corner000[0] = 1.0
    corner111 = np.zeros(8, dtype=complex)
    corner111[7] = 1.0
    pairs = [
        (-(j + c), even_triple(1.0, -(j + c), 1.0)),
        (-s, odd_triple(2.0 * j - s, 2.0, -(s + 2.0 * j))),
        (0.0, odd_triple(1.0, -2.0 * j, -1.0)),
        (0.0, even_triple(1.0, 0.0, -1.0)),
        (0.0, corner111),
        (c - j, even_triple(1.0, c - j, 1.0)),
        (2.0 * j, corner000),
        (s, odd_triple(s + 2.0 * j, 2.0, s - 2.0 * j)),
    ]
    return _assemble(pairs, 8)


def evolve_exact(state: StateVector, op: PauliSum, tau: float) -> StateVector:
    """Apply exp(-i tau op) through the cached eigensystem."""
    if state.n_qubits != op.n_qubits:
        raise ValueError("state and operator act on different registers")
    if not math.isfinite(tau):
        raise ValueError(f"evolution time {tau!r} must be finite")
    dec = _eigensystem(op)
    coords = dec.eigenvectors.conj().T @ state.amplitudes
    coords *= np.exp(-1.0j * tau * dec.eigenvalues)
    return StateVector(state.n_qubits, dec.eigenvectors @ coords)


def overlap_decomposition(state: StateVector, dec: SpectralDecomposition) -> OverlapDecomposition:
    """Resolve a state against an eigenbasis; weights sum to one."""
    if state.n_qubits != dec.n_qubits:
        raise ValueError("state and decomposition act on different registers")
    amps = dec.eigenvectors.conj().T @ state.amplitudes
    weights = np.abs(amps) ** 2
    total = float(np.sum(weights))
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"overlap weights sum to {total!r}, expected 1")
    return OverlapDecomposition(dec, amps, weights)
