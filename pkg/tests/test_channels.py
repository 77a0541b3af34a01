import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dualrail.channels import (KrausChannel, amplitude_damping_channel,
                               apply_channel, balanced_damping_channel,
                               channel_matrices_equal, compose,
                               identity_channel, single_mode_damping_kraus)
from dualrail.fock import DensityMatrix, FockError, FockSpace, PureState, \
    pure_to_density
from conftest import eq2_matrix, random_density

GAMMAS = st.floats(0.0, 10.0, allow_nan=False)


def _apply_to_matrix_unit(space, gamma, i, j):
    """Channel action on |i><j| (linearity probe for the damping map)."""
    mat = np.zeros((space.dim, space.dim), dtype=complex)
    mat[i, j] = 1.0
    ch = amplitude_damping_channel(space, 0, gamma)
    return apply_channel(DensityMatrix(space, mat), ch).matrix


def test_single_mode_action_on_vacuum():
    space = FockSpace(1, 2)
    out = _apply_to_matrix_unit(space, 0.7, 0, 0)
    expected = np.zeros((2, 2))
    expected[0, 0] = 1.0
    assert np.allclose(out, expected, atol=1e-12)


def test_single_mode_action_on_coherence():
    # |0><1| picks up the half-exponent survival amplitude
    space = FockSpace(1, 2)
    gamma = 0.7
    out = _apply_to_matrix_unit(space, gamma, 0, 1)
    expected = np.zeros((2, 2))
    expected[0, 1] = np.exp(-gamma / 2)
    assert np.allclose(out, expected, atol=1e-12)


def test_single_mode_action_on_one_photon():
    space = FockSpace(1, 2)
    gamma = np.log(2.0)
    out = _apply_to_matrix_unit(space, gamma, 1, 1)
    expected = np.array([[0.5, 0], [0, 0.5]])
    assert np.allclose(out, expected, atol=1e-12)


def test_gamma_zero_is_identity(rng):
    space = FockSpace(2, 3)
    rho = random_density(space, rng)
    ch = balanced_damping_channel(space, (0, 1), 0.0)
    assert np.allclose(apply_channel(rho, ch).matrix, rho.matrix, atol=1e-12)


def test_cutoff2_kraus_closed_form():
    gamma = 0.3
    k0, k1 = single_mode_damping_kraus(2, gamma)
    assert np.allclose(k0, np.diag([1.0, np.exp(-gamma / 2)]), atol=1e-12)
    expected_k1 = np.zeros((2, 2))
    expected_k1[0, 1] = np.sqrt(1 - np.exp(-gamma))
    assert np.allclose(k1, expected_k1, atol=1e-12)


def test_negative_gamma_rejected():
    with pytest.raises(ValueError):
        amplitude_damping_channel(FockSpace(1, 2), 0, -0.1)


@settings(max_examples=40)
@given(gamma=GAMMAS, cutoff=st.integers(2, 4))
def test_kraus_completeness(gamma, cutoff):
    ch = amplitude_damping_channel(FockSpace(1, cutoff), 0, gamma)
    assert ch.completeness_defect() < 1e-12


@settings(max_examples=20)
@given(gamma=GAMMAS)
def test_trace_preservation(gamma):
    rng = np.random.default_rng(7)
    space = FockSpace(2, 3)
    rho = random_density(space, rng)
    out = apply_channel(rho, balanced_damping_channel(space, (0, 1), gamma))
    assert abs(out.trace() - 1.0) < 1e-12
    out.validate(atol=1e-10)


def test_eq2_balanced_loss(rng):
    space = FockSpace(2, 2)
    for gamma in (0.1, 0.5, 1.0):
        for _ in range(5):
            v = rng.normal(size=2) + 1j * rng.normal(size=2)
            c0, c1 = v / np.linalg.norm(v)
            amps = np.array([0, c0, c1, 0])
            rho = pure_to_density(PureState(space, amps))
            out = apply_channel(rho, balanced_damping_channel(space, (0, 1),
                                                              gamma))
            assert np.max(np.abs(out.matrix - eq2_matrix(c0, c1, gamma))) \
                < 1e-12


def test_coherence_preserved_exactly():
    # off-diagonal <01|rho'|10> = e^{-gamma} c0 c1* under balanced loss
    space = FockSpace(2, 2)
    c0, c1 = 0.6, 0.8j
    gamma = 0.9
    rho = pure_to_density(PureState(space, np.array([0, c0, c1, 0])))
    out = apply_channel(rho, balanced_damping_channel(space, (0, 1), gamma))
    assert out.matrix[1, 2] == pytest.approx(np.exp(-gamma) * c0 * np.conj(c1),
                                             abs=1e-14)


def test_strong_damping_limit(rng):
    space = FockSpace(2, 2)
    rho = pure_to_density(PureState(space, np.array([0, 0.6, 0.8, 0])))
    out = apply_channel(rho, balanced_damping_channel(space, (0, 1), 50.0))
    vacuum = np.zeros((4, 4))
    vacuum[0, 0] = 1.0
    assert np.allclose(out.matrix, vacuum, atol=1e-12)


def test_compose_with_identity():
    space = FockSpace(1, 2)
    ch = amplitude_damping_channel(space, 0, 0.4)
    assert channel_matrices_equal(compose(identity_channel(space), ch), ch)
    assert channel_matrices_equal(compose(ch, identity_channel(space)), ch)


def test_damping_semigroup():
    space = FockSpace(1, 3)
    g1, g2 = 0.3, 1.1
    composed = compose(amplitude_damping_channel(space, 0, g1),
                       amplitude_damping_channel(space, 0, g2))
    direct = amplitude_damping_channel(space, 0, g1 + g2)
    assert channel_matrices_equal(composed, direct, atol=1e-12)
    composed.check_completeness()


def test_two_mode_factorization_gives_eq2():
    space = FockSpace(2, 2)
    gamma = 0.5
    c0, c1 = 0.6, 0.8
    factored = compose(amplitude_damping_channel(space, 0, gamma),
                       amplitude_damping_channel(space, 1, gamma))
    rho = pure_to_density(PureState(space, np.array([0, c0, c1, 0])))
    out = apply_channel(rho, factored)
    assert np.max(np.abs(out.matrix - eq2_matrix(c0, c1, gamma))) < 1e-12


def test_compose_space_mismatch():
    ch2 = amplitude_damping_channel(FockSpace(1, 2), 0, 0.1)
    ch3 = amplitude_damping_channel(FockSpace(1, 3), 0, 0.1)
    with pytest.raises(FockError):
        compose(ch2, ch3)


def test_apply_space_mismatch(rng):
    rho = random_density(FockSpace(2, 2), rng)
    ch = amplitude_damping_channel(FockSpace(1, 2), 0, 0.1)
    with pytest.raises(FockError):
        apply_channel(rho, ch)


def test_cutoff3_kraus_restricts_to_two_level_channel():
    # on the 0/1 subspace the binomial-loss operators must reproduce the
    # cutoff-2 channel entry for entry
    gamma = 0.8
    ops3 = single_mode_damping_kraus(3, gamma)
    ops2 = single_mode_damping_kraus(2, gamma)
    for k3, k2 in zip(ops3[:2], ops2):
        assert np.allclose(k3[:2, :2], k2, atol=1e-12)
    # and stay complete including the two-photon level
    acc = sum(k.conj().T @ k for k in ops3)
    assert np.allclose(acc, np.eye(3), atol=1e-12)
