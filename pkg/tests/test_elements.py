import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dualrail import elements
from dualrail.elements import (BeamSplitter, Circuit, ImpossibleOutcome,
                               KerrCrossPhase, LeakageError, Loss, PhaseShift,
                               PostSelect, beamsplitter_unitary,
                               circuit_from_json, circuit_to_json,
                               kerr_unitary, phase_unitary, post_select,
                               run_circuit)
from dualrail.fock import (FockError, FockSpace, PureState, pure_to_density,
                           states_equal, total_number)

ANGLES = st.floats(-2 * np.pi, 2 * np.pi, allow_nan=False)


def safe_subspace(space, modes):
    return [i for i, occ in enumerate(space.occupations())
            if sum(occ[m] for m in modes) <= space.cutoff - 1]


def test_beamsplitter_50_50_on_single_photon():
    space = FockSpace(2, 2)
    u = beamsplitter_unitary(space, (0, 1), np.pi / 4)
    out = u @ PureState.basis(space, (1, 0)).amplitudes
    expected = np.zeros(4)
    expected[space.index((0, 1))] = expected[space.index((1, 0))] = 1 / np.sqrt(2)
    assert np.allclose(out, expected, atol=1e-12)


def test_beamsplitter_splitting_convention():
    # U(theta)|10> = cos(theta)|01> + sin(theta)|10>
    space = FockSpace(2, 2)
    theta = 0.3
    out = beamsplitter_unitary(space, (0, 1), theta) \
        @ PureState.basis(space, (1, 0)).amplitudes
    assert out[space.index((0, 1))] == pytest.approx(np.cos(theta), abs=1e-12)
    assert out[space.index((1, 0))] == pytest.approx(np.sin(theta), abs=1e-12)


@settings(max_examples=30)
@given(theta=ANGLES)
def test_beamsplitter_inverse_pair(theta):
    space = FockSpace(2, 3)
    u = beamsplitter_unitary(space, (0, 1), theta)
    assert np.allclose(u @ u.conj().T, np.eye(space.dim), atol=1e-12)
    # the "undo" splitter is the one at pi - theta
    inv = beamsplitter_unitary(space, (0, 1), np.pi - theta)
    assert np.allclose(inv @ u, np.eye(space.dim), atol=1e-12)


def test_hong_ou_mandel():
    space = FockSpace(2, 3)
    u = beamsplitter_unitary(space, (0, 1), np.pi / 4)
    out = u @ PureState.basis(space, (1, 1)).amplitudes
    assert abs(out[space.index((1, 1))]) < 1e-12
    two0 = abs(out[space.index((2, 0))]) ** 2
    zero2 = abs(out[space.index((0, 2))]) ** 2
    assert two0 == pytest.approx(0.5, abs=1e-12)
    assert zero2 == pytest.approx(0.5, abs=1e-12)


@settings(max_examples=20)
@given(theta=ANGLES)
def test_beamsplitter_conserves_photon_number(theta):
    space = FockSpace(2, 3)
    u = beamsplitter_unitary(space, (0, 1), theta)
    n_tot = total_number(space)
    assert np.max(np.abs(u @ n_tot - n_tot @ u)) < 1e-12


def test_beamsplitter_unitary_on_safe_subspace_cutoff3():
    space = FockSpace(2, 3)
    u = beamsplitter_unitary(space, (0, 1), 0.77)
    idx = safe_subspace(space, (0, 1))
    block = u[np.ix_(idx, idx)]
    assert np.allclose(block.conj().T @ block, np.eye(len(idx)), atol=1e-12)


def test_kerr_pi_flips_11():
    space = FockSpace(2, 2)
    u = kerr_unitary(space, (0, 1), np.pi)
    assert u[space.index((1, 1)), space.index((1, 1))] == pytest.approx(-1.0)
    assert u[space.index((0, 1)), space.index((0, 1))] == pytest.approx(1.0)


def test_kerr_pi_on_21_is_trivial():
    space = FockSpace(2, 3)
    u = kerr_unitary(space, (0, 1), np.pi)
    i21 = space.index((2, 1))
    assert u[i21, i21] == pytest.approx(1.0, abs=1e-12)  # e^{2 pi i}


def test_kerr_is_diagonal_and_unitary():
    space = FockSpace(2, 3)
    u = kerr_unitary(space, (0, 1), 1.234)
    assert np.allclose(u, np.diag(np.diag(u)), atol=0)
    assert np.allclose(u @ u.conj().T, np.eye(space.dim), atol=1e-12)


def test_phase_shift_vacuum_invariant():
    space = FockSpace(2, 2)
    u = phase_unitary(space, 0, 1.3)
    psi = PureState.basis(space, (0, 1))  # mode 0 empty
    assert np.allclose(u @ psi.amplitudes, psi.amplitudes, atol=0)


def test_executor_linearity():
    space = FockSpace(2, 3)
    u = beamsplitter_unitary(space, (0, 1), 0.9)
    a = PureState.basis(space, (1, 0)).amplitudes
    b = PureState.basis(space, (0, 1)).amplitudes
    combo = 0.6 * a + 0.8j * b
    assert np.allclose(u @ combo, 0.6 * (u @ a) + 0.8j * (u @ b), atol=1e-12)


def test_post_select_certain_probe_outcome():
    # c0|0101> + c1|1001>, select probe (0,1) -> certainty
    space = FockSpace(4, 2)
    c0, c1 = 0.6, 0.8
    amps = np.zeros(space.dim, dtype=complex)
    amps[space.index((0, 1, 0, 1))] = c0
    amps[space.index((1, 0, 0, 1))] = c1
    state, prob = post_select(PureState(space, amps), (2, 3), (0, 1))
    assert prob == pytest.approx(1.0, abs=1e-12)
    assert state.amplitude((0, 1, 0, 1)) == pytest.approx(c0)
    assert state.amplitude((1, 0, 0, 1)) == pytest.approx(c1)


def test_post_select_impossible_outcome():
    space = FockSpace(4, 2)
    psi = PureState.basis(space, (0, 0, 1, 0))
    with pytest.raises(ImpossibleOutcome):
        post_select(psi, (2, 3), (0, 1))


def test_post_select_half_probability():
    space = FockSpace(4, 2)
    amps = np.zeros(space.dim, dtype=complex)
    amps[space.index((0, 1, 0, 1))] = 1 / np.sqrt(2)
    amps[space.index((0, 1, 1, 0))] = 1 / np.sqrt(2)
    state, prob = post_select(PureState(space, amps), (2, 3), (0, 1))
    assert prob == pytest.approx(0.5, abs=1e-12)
    assert state.amplitude((0, 1, 0, 1)) == pytest.approx(1.0)


def test_post_select_probabilities_sum_to_one(rng):
    space = FockSpace(4, 2)
    v = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
    psi = PureState(space, v / np.linalg.norm(v))
    total = 0.0
    for occ in FockSpace(2, 2).occupations():
        total += elements.outcome_probability(psi, (2, 3), occ)
    assert total == pytest.approx(1.0, abs=1e-12)


def test_loss_on_pure_state_requires_rng():
    space = FockSpace(2, 2)
    circuit = Circuit(space, (Loss((0, 1), 0.2),))
    with pytest.raises(FockError):
        run_circuit(PureState.basis(space, (0, 1)), circuit)


def test_leakage_error_at_cutoff2():
    space = FockSpace(2, 2)
    circuit = Circuit(space, (BeamSplitter((0, 1), np.pi / 4),))
    with pytest.raises(LeakageError):
        run_circuit(PureState.basis(space, (1, 1)), circuit)


def test_loss_on_density_matches_channel():
    from dualrail.channels import apply_channel, balanced_damping_channel
    space = FockSpace(2, 2)
    rho = pure_to_density(PureState(space, np.array([0, 0.6, 0.8, 0])))
    out, _ = elements.apply_element(rho, Loss((0, 1), 0.4))
    expected = apply_channel(rho, balanced_damping_channel(space, (0, 1), 0.4))
    assert np.allclose(out.matrix, expected.matrix, atol=1e-14)


def test_circuit_element_validation():
    space = FockSpace(2, 2)
    with pytest.raises(ValueError):
        Circuit(space, (BeamSplitter((0, 0), 0.1),))
    with pytest.raises(ValueError):
        Circuit(space, (PhaseShift(5, 0.1),))
    with pytest.raises(ValueError):
        Loss((0,), -1.0)
    with pytest.raises(ValueError):
        Circuit(space, (BeamSplitter((0, 1), np.inf),))


def test_circuit_json_round_trip(tmp_path):
    space = FockSpace(4, 3)
    circuit = Circuit(space, (
        BeamSplitter((2, 3), np.pi / 4),
        PhaseShift(0, 0.25),
        KerrCrossPhase((0, 2), np.pi),
        Loss((0, 1), 0.1),
        PostSelect((2, 3), (0, 1)),
    ))
    back = circuit_from_json(circuit_to_json(circuit))
    assert back == circuit

    path = tmp_path / "circuit.json"
    elements.save_circuit(circuit, path)
    assert elements.load_circuit(path) == circuit


def test_circuit_json_unknown_type():
    with pytest.raises(ValueError):
        circuit_from_json({"modes": 2, "cutoff": 2,
                           "elements": [{"type": "squeezer", "modes": [0]}]})
