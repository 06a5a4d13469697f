"""Ancilla-filtered eigenstate preparation on small Pauli-string chains.

The package simulates a measurement-based filtering protocol: repeated
rounds of conditional time evolution, post-selected on an ancilla, that
steer a register toward an energy eigenstate of a Pauli-string
Hamiltonian. It ships exact and split-step propagators, analytic
spectra for the built-in chains, an adiabatic ramp, shot-noise
emulation, and a scenario runner driven by JSON manifests.
"""

__version__ = "0.1.0"

from .adiabatic import (
    AdiabaticSchedule,
    adiabatic_prepare,
    staggered_start,
    staggered_start_label,
)
from .manifest import (
    Manifest,
    ManifestError,
    TargetSpec,
    bundled_names,
    load_manifest,
    parse_manifest,
    validate_manifest,
)
from .pauli import (
    PauliSum,
    PauliTerm,
    commutes,
    dense_matrix,
    expectation,
    hamiltonian_by_name,
    named_observable,
    observable_zbar,
    schwinger_hamiltonian,
    single_z,
)
from .spectral import (
    OverlapDecomposition,
    SpectralDecomposition,
    closed_form_spectrum,
    eigendecompose,
    evolve_exact,
    overlap_decomposition,
)
from .state import StateVector
from .trotter import TrotterPlan, evolve_trotter, trotter_error
from .twirl import (
    Backend,
    PhaseProfile,
    PostSelectionError,
    RoundRecord,
    RoundSpec,
    TauMode,
    TwirlConfig,
    ZeroEnergyError,
    choose_tau,
    phase_profile,
    run_protocol,
    sample_shots,
    twirl_round,
)

__all__ = [
    "__version__",
    "AdiabaticSchedule",
    "Backend",
    "Manifest",
    "ManifestError",
    "OverlapDecomposition",
    "PauliSum",
    "PauliTerm",
    "PhaseProfile",
    "PostSelectionError",
    "RoundRecord",
    "RoundSpec",
    "SpectralDecomposition",
    "StateVector",
    "TargetSpec",
    "TauMode",
    "TrotterPlan",
    "TwirlConfig",
    "ZeroEnergyError",
    "adiabatic_prepare",
    "bundled_names",
    "choose_tau",
    "closed_form_spectrum",
    "commutes",
    "dense_matrix",
    "eigendecompose",
    "evolve_exact",
    "evolve_trotter",
    "expectation",
    "hamiltonian_by_name",
    "load_manifest",
    "named_observable",
    "observable_zbar",
    "overlap_decomposition",
    "parse_manifest",
    "phase_profile",
    "run_protocol",
    "sample_shots",
    "schwinger_hamiltonian",
    "single_z",
    "staggered_start",
    "staggered_start_label",
    "trotter_error",
    "twirl_round",
    "validate_manifest",
]
