"""Ancilla-filtered projection toward Hamiltonian eigenstates.

One filtering round attaches a number of fresh ancillas in sequence.
Each ancilla applies (I + phi U(tau)) / 2 to the register, where U is
the time evolution over tau and phi is a unit-modulus prefactor, and
only runs in which the ancilla reads 0 are kept. An eigencomponent at
energy e picks up the kept-amplitude factor exp(i theta/2) cos(theta/2)
per ancilla, with theta = arg(phi) - tau e wrapped to (-pi, pi], so
components with theta = 0 pass untouched and the rest are damped.

The period tau comes from an energy estimate E for the wanted state:

* quarter mode: tau = pi / (2 E) with phi = i, the sharpest filter
  around E itself;
* full mode: tau = 2 pi / E with phi = 1, which passes E, its
  harmonics, and zero. Passing zero makes it the only mode that can
  target a zero-energy state, driven by a nonzero E borrowed from
  elsewhere in the spectrum.

Neither mode has a usable period at E = 0, so a vanishing estimate is
rejected; rounds aimed at zero-energy states must carry an explicit
``energy_override``.

Shot-noise emulation draws the surviving-run count of round k as a
binomial over the cumulative keep probability, and estimates each
observable term from a binomial over its exact outcome probability on
the current state. Draws come from per-(round, stream) seed sequences,
so a full protocol is reproducible from its seed alone and insensitive
to evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .pauli import PauliSum, apply_axes, expectation, named_observable
from .spectral import eigendecompose, evolve_exact, overlap_decomposition
from .state import StateVector
from .trotter import evolve_trotter

ZERO_ENERGY_TOL = 1e-12
EXTINCTION_TOL = 1e-14
PREFACTOR_TOL = 1e-12


class ZeroEnergyError(ValueError):
    """Raised when a round's energy estimate is too close to zero."""


class PostSelectionError(RuntimeError):
    """Raised when post-selection has no surviving probability or shots."""


class TauMode(Enum):
    """How a round turns an energy estimate into a period."""

    QUARTER = "quarter"
    FULL = "full"


def choose_tau(energy: float, mode: TauMode) -> tuple[float, complex]:
    """Period and prefactor for one filtering round at energy E."""
    if not isinstance(energy, (int, float)) or not math.isfinite(energy):
        raise ValueError(f"energy estimate {energy!r} must be a finite real number")
    if abs(energy) < ZERO_ENERGY_TOL:
        raise ZeroEnergyError(
            "energy estimate is zero within tolerance; a zero-energy target "
            "needs an explicit energy_override (full mode) instead"
        )
    if mode is TauMode.QUARTER:
        return math.pi / (2.0 * energy), 1.0j
    if mode is TauMode.FULL:
        return 2.0 * math.pi / energy, 1.0 + 0.0j
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class Backend:
    """Time-evolution strategy: exact or split-step with a step count."""

    kind: str = "exact"
    steps: int | None = None

    def __post_init__(self) -> None:
        if self.kind == "exact":
            if self.steps is not None:
                raise ValueError("exact backend takes no step count")
        elif self.kind == "trotter":
            if not isinstance(self.steps, int) or self.steps < 1:
                raise ValueError("trotter backend needs a positive step count")
        else:
            raise ValueError(f"unknown backend kind {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> Backend:
        """Parse "exact" or "trotter:<steps>"."""
        if text == "exact":
            return cls()
        if text.startswith("trotter:"):
            raw = text.split(":", 1)[1]
            try:
                steps = int(raw)
            except ValueError as exc:
                raise ValueError(f"backend {text!r} has a non-integer step count") from exc
            return cls("trotter", steps)
        raise ValueError(f'unknown backend {text!r}, expected "exact" or "trotter:<steps>"')

    def label(self) -> str:
        return "exact" if self.kind == "exact" else f"trotter:{self.steps}"

    def evolve(self, state: StateVector, op: PauliSum, tau: float) -> StateVector:
        if self.kind == "exact":
            return evolve_exact(state, op, tau)
        return evolve_trotter(state, op, tau, self.steps)


@dataclass(frozen=True, eq=False)
class PhaseProfile:
    """Per-eigencomponent filter angles and input weights."""

    angles: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        angles = np.array(self.angles, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if angles.shape != weights.shape:
            raise ValueError("angles and weights must have matching shapes")
        angles.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "weights", weights)

    def post_selection_probability(self, ancillas: int = 1) -> float:
        """Keep probability of one round with the given ancilla count."""
        if ancillas < 1:
            raise ValueError("ancilla count must be positive")
        return float(np.sum(self.weights * np.cos(self.angles / 2.0) ** (2 * ancillas)))


def _wrap_angle(x: np.ndarray) -> np.ndarray:
    wrapped = (x + np.pi) % (2.0 * np.pi) - np.pi
    return np.where(wrapped == -np.pi, np.pi, wrapped)


def phase_profile(state: StateVector, op: PauliSum, tau: float, prefactor: complex) -> PhaseProfile:
    """Filter angles theta_j = arg(phi) - tau e_j against the eigenbasis."""
    dec = eigendecompose(op)
    overlap = overlap_decomposition(state, dec)
    angles = _wrap_angle(np.angle(prefactor) - tau * dec.eigenvalues)
    return PhaseProfile(angles, overlap.weights)


def twirl_round(
    state: StateVector,
    op: PauliSum,
    tau: float,
    prefactor: complex,
    ancillas: int = 1,
    backend: Backend = Backend(),
) -> tuple[StateVector, float]:
    """One filtering round; returns the posterior and its keep probability."""
    if abs(abs(prefactor) - 1.0) > PREFACTOR_TOL:
        raise ValueError(f"prefactor {prefactor!r} must have unit modulus")
    if ancillas < 1:
        raise ValueError(f"ancilla count must be positive, got {ancillas}")
    current = state
    probability = 1.0
    for _ in range(ancillas):
        evolved = backend.evolve(current, op, tau)
        mixed = 0.5 * (current.amplitudes + prefactor * evolved.amplitudes)
        kept = float(np.vdot(mixed, mixed).real)
        if kept < EXTINCTION_TOL:
            raise PostSelectionError(
                f"post-selection probability collapsed to {kept:.3e}; "
                "the filter left no support"
            )
        current = StateVector(state.n_qubits, mixed / math.sqrt(kept))
        probability *= kept
    return current, probability


@dataclass(frozen=True)
class RoundSpec:
    """One protocol round: mode, optional energy override, ancilla count."""

    mode: TauMode
    energy_override: float | None = None
    ancillas: int = 1

    def __post_init__(self) -> None:
        if not isinstance(self.mode, TauMode):
            raise ValueError(f"mode must be a TauMode, got {self.mode!r}")
        if self.energy_override is not None and not math.isfinite(self.energy_override):
            raise ValueError(f"energy override {self.energy_override!r} must be finite")
        if not isinstance(self.ancillas, int) or self.ancillas < 1:
            raise ValueError(f"ancilla count must be a positive integer, got {self.ancillas!r}")


@dataclass(frozen=True)
class TwirlConfig:
    """Protocol-level settings shared by every round."""

    rounds: tuple[RoundSpec, ...]
    backend: Backend = Backend()
    shots: int | None = None
    seed: int = 0
    observables: tuple[str, ...] = ("H",)
    noisy_energy: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "rounds", tuple(self.rounds))
        object.__setattr__(self, "observables", tuple(self.observables))
        if not self.rounds:
            raise ValueError("protocol needs at least one round")
        if self.shots is not None and (not isinstance(self.shots, int) or self.shots < 1):
            raise ValueError(f"shot count must be a positive integer, got {self.shots!r}")
        if not self.observables:
            raise ValueError("protocol needs at least one observable")
        if self.noisy_energy and self.shots is None:
            raise ValueError("noisy_energy needs a shot count")


@dataclass(frozen=True)
class RoundRecord:
    """Everything measured after one round; round 0 is the initial state."""

    round_index: int
    energy_used: float | None
    tau: float | None
    prefactor: complex | None
    p_round: float
    p_cumulative: float
    expectations: dict[str, float]
    active_count: int | None = None


def _stream(seed: int, round_index: int, stream: int) -> np.random.Generator:
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(round_index, stream))
    return np.random.default_rng(sequence)


def _outcome_probability(state: StateVector, axes: str) -> float:
    value = float(np.real(np.vdot(state.amplitudes, apply_axes(state.amplitudes, axes))))
    return min(1.0, max(0.0, (1.0 + value) / 2.0))


def sample_shots(
    state: StateVector,
    ops: list[tuple[str, PauliSum]],
    active: int,
    seed: int,
    round_index: int,
    stream_base: int = 1,
) -> dict[str, float]:
    """Binomial estimates of named observables from ``active`` runs.

    Term t of the flattened operator list draws from stream
    ``stream_base + t`` of the given round, so estimates do not depend
    on when or in what order they are computed.
    """
    if active < 1:
        raise PostSelectionError(f"no active runs left in round {round_index}")
    estimates: dict[str, float] = {}
    offset = stream_base
    for name, op in ops:
        total = 0.0
        for term in op.terms:
            p_plus = _outcome_probability(state, term.axes)
            hits = int(_stream(seed, round_index, offset).binomial(active, p_plus))
            total += term.coeff * (2.0 * hits / active - 1.0)
            offset += 1
        estimates[name] = total
    return estimates


def resolve_observables(names: tuple[str, ...], op: PauliSum) -> list[tuple[str, PauliSum]]:
    """Resolve observable names against a Hamiltonian, keeping order."""
    resolved: list[tuple[str, PauliSum]] = []
    for name in names:
        resolved.append((name, op if name == "H" else named_observable(name, op.n_qubits)))
    return resolved


def run_protocol(
    initial: StateVector | str,
    op: PauliSum,
    config: TwirlConfig,
) -> list[RoundRecord]:
    """Run a full protocol and report one record per round.

    Record 0 describes the initial state before any filtering. Unless a
    round carries an override, its energy estimate is the current <H>:
    the exact expectation by default, or a sampled estimate when both
    ``shots`` and ``noisy_energy`` are set.
    """
    state = StateVector.basis(initial) if isinstance(initial, str) else initial
    if state.n_qubits != op.n_qubits:
        raise ValueError("initial state and Hamiltonian act on different registers")
    observables = resolve_observables(config.observables, op)
    n_obs_streams = sum(len(o.terms) for _, o in observables)

    def measure(current: StateVector, round_index: int, active: int | None) -> dict[str, float]:
        if config.shots is None:
            return {name: expectation(current, obs) for name, obs in observables}
        return sample_shots(current, observables, active, config.seed, round_index)

    records: list[RoundRecord] = []
    active = config.shots
    records.append(
        RoundRecord(
            round_index=0,
            energy_used=None,
            tau=None,
            prefactor=None,
            p_round=1.0,
            p_cumulative=1.0,
            expectations=measure(state, 0, active),
            active_count=active,
        )
    )
    p_cumulative = 1.0
    for index, spec in enumerate(config.rounds, start=1):
        if spec.energy_override is not None:
            energy = spec.energy_override
        elif config.shots is not None and config.noisy_energy:
            # energy streams sit above the observable streams of this round
            estimate = sample_shots(
                state, [("H", op)], active, config.seed, index, stream_base=1 + n_obs_streams
            )
            energy = estimate["H"]
        else:
            energy = expectation(state, op)
        try:
            tau, prefactor = choose_tau(energy, spec.mode)
        except ZeroEnergyError as exc:
            raise ZeroEnergyError(f"round {index}: {exc}") from None
        state, p_round = twirl_round(state, op, tau, prefactor, spec.ancillas, config.backend)
        p_cumulative *= p_round
        if config.shots is not None:
            active = int(_stream(config.seed, index, 0).binomial(config.shots, p_cumulative))
        records.append(
            RoundRecord(
                round_index=index,
                energy_used=float(energy),
                tau=float(tau),
                prefactor=prefactor,
                p_round=p_round,
                p_cumulative=p_cumulative,
                expectations=measure(state, index, active),
                active_count=active,
            )
        )
    return records
