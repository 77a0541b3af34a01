import numpy as np
import pytest

from dualrail.fock import DensityMatrix, FockSpace


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_qubit_amplitudes(rng):
    """Haar-random (c0, c1)."""
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    v /= np.linalg.norm(v)
    return complex(v[0]), complex(v[1])


def random_density(space: FockSpace, rng) -> DensityMatrix:
    a = rng.normal(size=(space.dim, space.dim)) \
        + 1j * rng.normal(size=(space.dim, space.dim))
    mat = a @ a.conj().T
    return DensityMatrix(space, mat / np.trace(mat))


def eq2_matrix(c0: complex, c1: complex, gamma: float) -> np.ndarray:
    """The closed-form damped dual-rail density matrix, in the basis
    |00>, |01>, |10>, |11> (frozen oracle for the channel tests)."""
    e = np.exp(-gamma)
    alpha = abs(c0) ** 2
    beta = c0 * np.conj(c1)
    return np.array([
        [1 - e, 0, 0, 0],
        [0, alpha * e, beta * e, 0],
        [0, np.conj(beta) * e, (1 - alpha) * e, 0],
        [0, 0, 0, 0],
    ], dtype=complex)
