"""Tests for the filtering rounds and the protocol driver."""

import math

import numpy as np
import pytest

from twirlsim import (
    Backend,
    PhaseProfile,
    PostSelectionError,
    RoundSpec,
    TauMode,
    TwirlConfig,
    ZeroEnergyError,
    choose_tau,
    eigendecompose,
    expectation,
    phase_profile,
    run_protocol,
    schwinger_hamiltonian,
    twirl_round,
)
from twirlsim.state import StateVector

ROOT2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# period selection


def test_choose_tau_quarter_and_full():
    tau, prefactor = choose_tau(2.0, TauMode.QUARTER)
    assert tau == pytest.approx(math.pi / 4.0)
    assert prefactor == 1.0j
    tau, prefactor = choose_tau(4.0, TauMode.FULL)
    assert tau == pytest.approx(math.pi / 2.0)
    assert prefactor == 1.0 + 0.0j
    tau, _ = choose_tau(-2.0, TauMode.QUARTER)
    assert tau == pytest.approx(-math.pi / 4.0)


def test_choose_tau_rejects_zero_and_junk():
    with pytest.raises(ZeroEnergyError, match="energy_override"):
        choose_tau(0.0, TauMode.QUARTER)
    with pytest.raises(ZeroEnergyError):
        choose_tau(1e-13, TauMode.FULL)
    with pytest.raises(ValueError, match="finite"):
        choose_tau(float("nan"), TauMode.QUARTER)
    with pytest.raises(ValueError, match="finite"):
        choose_tau("2", TauMode.QUARTER)


# ---------------------------------------------------------------------------
# phase profiles


def test_phase_profile_on_flat_superposition():
    # J=0 chain has levels -1 and +1; |0> splits evenly between them
    op = schwinger_hamiltonian(1, 0.0)
    profile = phase_profile(StateVector.basis("0"), op, math.pi / 2.0, 1.0j)
    np.testing.assert_allclose(profile.angles, [math.pi, 0.0], atol=1e-12)
    np.testing.assert_allclose(profile.weights, [0.5, 0.5], atol=1e-12)
    assert profile.post_selection_probability() == pytest.approx(0.5)
    assert profile.post_selection_probability(3) == pytest.approx(0.5)


def test_phase_wrap_lands_on_positive_pi():
    # raw angle -pi must wrap to +pi, not stay on the open edge
    op = schwinger_hamiltonian(1, 0.0)
    profile = phase_profile(StateVector.basis("0"), op, math.pi, 1.0 + 0.0j)
    np.testing.assert_allclose(profile.angles, [math.pi, math.pi], atol=1e-12)
    assert profile.post_selection_probability() == pytest.approx(0.0, abs=1e-15)


def test_phase_profile_validation():
    with pytest.raises(ValueError, match="matching shapes"):
        PhaseProfile(np.array([0.0, 1.0]), np.array([1.0]))
    profile = PhaseProfile(np.array([0.0]), np.array([1.0]))
    with pytest.raises(ValueError, match="positive"):
        profile.post_selection_probability(0)


# ---------------------------------------------------------------------------
# single rounds


def test_eigenstate_is_a_fixed_point():
    op = schwinger_hamiltonian(1, 1.0)
    ground = eigendecompose(op).eigenstate(0)
    tau, prefactor = choose_tau(-ROOT2, TauMode.QUARTER)
    posterior, p = twirl_round(ground, op, tau, prefactor)
    assert p == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(posterior.amplitudes, ground.amplitudes, atol=1e-10)


def test_keep_probability_matches_phase_profile():
    op = schwinger_hamiltonian(3, 1.0)
    state = StateVector.basis("101")
    energy = expectation(state, op)
    assert energy == pytest.approx(-2.0)
    tau, prefactor = choose_tau(energy, TauMode.QUARTER)
    for ancillas in (1, 2, 4):
        _, p = twirl_round(state, op, tau, prefactor, ancillas=ancillas)
        predicted = phase_profile(state, op, tau, prefactor).post_selection_probability(ancillas)
        assert p == pytest.approx(predicted, abs=1e-10)


def test_four_ancilla_round_reference_probability():
    # frozen reference for the ground-suite first round
    op = schwinger_hamiltonian(3, 1.0)
    state = StateVector.basis("101")
    tau, prefactor = choose_tau(-2.0, TauMode.QUARTER)
    _, p = twirl_round(state, op, tau, prefactor, ancillas=4)
    assert p == pytest.approx(0.564614, abs=1e-6)


def test_full_extinction_raises():
    # tau = pi on the J=0 chain sends |0> to minus itself
    op = schwinger_hamiltonian(1, 0.0)
    with pytest.raises(PostSelectionError, match="no support"):
        twirl_round(StateVector.basis("0"), op, math.pi, 1.0 + 0.0j)


def test_round_argument_validation():
    op = schwinger_hamiltonian(1, 1.0)
    state = StateVector.basis("0")
    with pytest.raises(ValueError, match="unit modulus"):
        twirl_round(state, op, 1.0, 0.5j)
    with pytest.raises(ValueError, match="positive"):
        twirl_round(state, op, 1.0, 1.0j, ancillas=0)


# ---------------------------------------------------------------------------
# configuration containers


def test_backend_parse_and_label():
    assert Backend.parse("exact") == Backend()
    assert Backend.parse("trotter:64") == Backend("trotter", 64)
    assert Backend.parse("trotter:64").label() == "trotter:64"
    assert Backend().label() == "exact"
    with pytest.raises(ValueError, match="non-integer"):
        Backend.parse("trotter:lots")
    with pytest.raises(ValueError, match="unknown backend"):
        Backend.parse("magic")
    with pytest.raises(ValueError, match="no step count"):
        Backend("exact", 5)
    with pytest.raises(ValueError, match="positive step count"):
        Backend("trotter", 0)


def test_round_spec_validation():
    with pytest.raises(ValueError, match="TauMode"):
        RoundSpec("quarter")
    with pytest.raises(ValueError, match="finite"):
        RoundSpec(TauMode.FULL, energy_override=float("inf"))
    with pytest.raises(ValueError, match="positive integer"):
        RoundSpec(TauMode.QUARTER, ancillas=0)


def test_config_validation():
    quarter = RoundSpec(TauMode.QUARTER)
    with pytest.raises(ValueError, match="at least one round"):
        TwirlConfig(rounds=())
    with pytest.raises(ValueError, match="shot count"):
        TwirlConfig(rounds=(quarter,), shots=0)
    with pytest.raises(ValueError, match="at least one observable"):
        TwirlConfig(rounds=(quarter,), observables=())
    with pytest.raises(ValueError, match="noisy_energy"):
        TwirlConfig(rounds=(quarter,), noisy_energy=True)


# ---------------------------------------------------------------------------
# full protocol runs


def test_protocol_record_structure():
    op = schwinger_hamiltonian(1, 1.0)
    config = TwirlConfig(rounds=(RoundSpec(TauMode.QUARTER),) * 3, observables=("H", "Z"))
    records = run_protocol("0", op, config)
    assert len(records) == 4
    first = records[0]
    assert first.round_index == 0
    assert first.energy_used is None and first.tau is None and first.prefactor is None
    assert first.p_round == 1.0 and first.p_cumulative == 1.0
    assert first.active_count is None
    assert list(first.expectations) == ["H", "Z"]
    assert first.expectations["H"] == pytest.approx(1.0)
    assert records[1].energy_used == pytest.approx(1.0)
    assert records[1].tau == pytest.approx(math.pi / 2.0)
    assert records[1].prefactor == 1.0j
    assert records[1].p_round == pytest.approx(0.7813200, abs=1e-6)
    running = 1.0
    for record in records[1:]:
        running *= record.p_round
        assert record.p_cumulative == pytest.approx(running, abs=1e-12)


def test_protocol_converges_toward_nearest_level():
    op = schwinger_hamiltonian(1, 1.0)
    config = TwirlConfig(rounds=(RoundSpec(TauMode.QUARTER),) * 3)
    up = run_protocol("0", op, config)
    down = run_protocol("1", op, config)
    assert up[-1].expectations["H"] == pytest.approx(ROOT2, abs=1e-3)
    assert down[-1].expectations["H"] == pytest.approx(-ROOT2, abs=1e-3)


def test_protocol_replay_is_consistent():
    # replaying the recorded taus reproduces every probability and value
    op = schwinger_hamiltonian(3, 1.0)
    config = TwirlConfig(
        rounds=(RoundSpec(TauMode.QUARTER, ancillas=2),) * 3, observables=("H", "Zbar")
    )
    records = run_protocol("001", op, config)
    state = StateVector.basis("001")
    for record in records[1:]:
        state, p = twirl_round(state, op, record.tau, record.prefactor, ancillas=2)
        assert p == pytest.approx(record.p_round, abs=1e-12)
        assert expectation(state, op) == pytest.approx(record.expectations["H"], abs=1e-12)


def test_energy_override_takes_precedence():
    op = schwinger_hamiltonian(3, 1.0)
    config = TwirlConfig(rounds=(RoundSpec(TauMode.FULL, energy_override=-0.2),))
    records = run_protocol("111", op, config)
    assert records[1].energy_used == pytest.approx(-0.2)
    assert records[1].tau == pytest.approx(2.0 * math.pi / -0.2)
    # |111> is a zero mode, so the full-period filter keeps it intact
    assert records[1].p_round == pytest.approx(1.0, abs=1e-12)
    assert records[1].expectations["H"] == pytest.approx(0.0, abs=1e-12)


def test_zero_energy_estimate_names_the_round():
    op = schwinger_hamiltonian(3, 1.0)
    config = TwirlConfig(rounds=(RoundSpec(TauMode.QUARTER),))
    with pytest.raises(ZeroEnergyError, match="round 1: energy estimate is zero"):
        run_protocol("010", op, config)


def test_trotter_backend_tracks_exact_at_high_steps():
    op = schwinger_hamiltonian(1, 1.0)
    rounds = (RoundSpec(TauMode.QUARTER),) * 2
    exact = run_protocol("0", op, TwirlConfig(rounds=rounds))
    split = run_protocol("0", op, TwirlConfig(rounds=rounds, backend=Backend("trotter", 1024)))
    assert split[-1].expectations["H"] == pytest.approx(exact[-1].expectations["H"], abs=1e-6)
    assert split[-1].p_cumulative == pytest.approx(exact[-1].p_cumulative, abs=1e-6)


def test_protocol_register_mismatch():
    op = schwinger_hamiltonian(2, 1.0)
    config = TwirlConfig(rounds=(RoundSpec(TauMode.QUARTER),))
    with pytest.raises(ValueError, match="different registers"):
        run_protocol("0", op, config)
