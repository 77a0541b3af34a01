"""Truncated multi-mode Fock space: basis bookkeeping, states, operators.

Basis convention (stable, file formats depend on it): occupation vectors are
enumerated lexicographically with mode 0 most significant, i.e. for a space
with M modes and cutoff d,

    index(occ) = sum_i occ[i] * d**(M - 1 - i).

With d = 2 this is just the binary expansion of the occupation string.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Sequence

import numpy as np

ATOL_ALG = 1e-12   # algebraic identities (norms, traces, hermiticity)
ATOL_PSD = 1e-10   # eigenvalue floor for positive semidefiniteness


class FockError(Exception):
    """Base class for errors raised by this package."""


class CutoffViolation(FockError):
    """An occupation number is outside 0..cutoff-1."""


class NormalizationError(FockError):
    """A state that must be normalized is not."""


@dataclass(frozen=True)
class FockSpace:
    """M bosonic modes, each truncated to occupations 0..cutoff-1."""

    num_modes: int
    cutoff: int = 3

    def __post_init__(self):
        if self.num_modes < 1:
            raise ValueError("num_modes must be positive")
        if self.cutoff < 1:
            raise ValueError("cutoff must be positive")

    @property
    def dim(self) -> int:
        return self.cutoff ** self.num_modes

    def index(self, occ: Sequence[int]) -> int:
        """Basis index of an occupation vector (mode 0 most significant)."""
        if len(occ) != self.num_modes:
            raise CutoffViolation(
                f"occupation vector has {len(occ)} entries, space has "
                f"{self.num_modes} modes")
        idx = 0
        for n in occ:
            if not 0 <= n < self.cutoff:
                raise CutoffViolation(
                    f"occupation {n} outside 0..{self.cutoff - 1}")
            idx = idx * self.cutoff + n
        return idx

    def occupation(self, index: int) -> tuple[int, ...]:
        """Inverse of :meth:`index`."""
        if not 0 <= index < self.dim:
            raise CutoffViolation(f"index {index} outside basis")
        occ = []
        for _ in range(self.num_modes):
            occ.append(index % self.cutoff)
            index //= self.cutoff
        return tuple(reversed(occ))

    def occupations(self) -> Iterator[tuple[int, ...]]:
        """All occupation vectors, in basis order."""
        return product(range(self.cutoff), repeat=self.num_modes)


def _single_mode_annihilation(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff)), k=1).astype(complex)


def _embed(space: FockSpace, mode: int, op: np.ndarray) -> np.ndarray:
    """Kron a single-mode operator into the full space (mode 0 leftmost)."""
    if not 0 <= mode < space.num_modes:
        raise ValueError(f"mode {mode} out of range")
    full = np.eye(1, dtype=complex)
    eye = np.eye(space.cutoff, dtype=complex)
    for m in range(space.num_modes):
        full = np.kron(full, op if m == mode else eye)
    return full


def annihilation(space: FockSpace, mode: int) -> np.ndarray:
    """Annihilation operator a for one mode, on the full space."""
    return _embed(space, mode, _single_mode_annihilation(space.cutoff))


def creation(space: FockSpace, mode: int) -> np.ndarray:
    return annihilation(space, mode).conj().T


def number(space: FockSpace, mode: int) -> np.ndarray:
    a = annihilation(space, mode)
    return a.conj().T @ a


def total_number(space: FockSpace, modes: Sequence[int] | None = None) -> np.ndarray:
    """Sum of number operators over the given modes (default: all)."""
    if modes is None:
        modes = range(space.num_modes)
    out = np.zeros((space.dim, space.dim), dtype=complex)
    for m in modes:
        out += number(space, m)
    return out


@dataclass(frozen=True)
class PureState:
    """Complex amplitude vector over the occupation basis of `space`.

    Normalized unless `allow_unnormalized` was set at construction (used only
    for post-selection intermediates).
    """

    space: FockSpace
    amplitudes: np.ndarray
    allow_unnormalized: bool = field(default=False, compare=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.space.dim,):
            raise ValueError(
                f"amplitude vector has shape {amps.shape}, expected "
                f"({self.space.dim},)")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)
        if not self.allow_unnormalized and abs(self.norm() - 1.0) > 1e-6:
            raise NormalizationError(f"state norm {self.norm()} != 1")

    @classmethod
    def basis(cls, space: FockSpace, occ: Sequence[int]) -> "PureState":
        amps = np.zeros(space.dim, dtype=complex)
        amps[space.index(occ)] = 1.0
        return cls(space, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "PureState":
        n = self.norm()
        if n < 1e-14:
            raise NormalizationError("cannot normalize a zero state")
        return PureState(self.space, self.amplitudes / n)

    def overlap(self, other: "PureState") -> complex:
        """<self|other>."""
        _check_same_space(self.space, other.space)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def amplitude(self, occ: Sequence[int]) -> complex:
        return complex(self.amplitudes[self.space.index(occ)])


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, PSD, unit-trace operator over the occupation basis."""

    space: FockSpace
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        d = self.space.dim
        if mat.shape != (d, d):
            raise ValueError(f"matrix has shape {mat.shape}, expected ({d},{d})")
        mat = mat.copy()
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    def validate(self, atol: float = ATOL_ALG) -> None:
        """Raise if not Hermitian / unit trace / PSD within tolerances."""
        if np.max(np.abs(self.matrix - self.matrix.conj().T)) > atol:
            raise FockError("density matrix not Hermitian")
        if abs(self.trace() - 1.0) > atol:
            raise FockError(f"density matrix trace {self.trace()} != 1")
        evals = np.linalg.eigvalsh(self.matrix)
        if evals.min() < -ATOL_PSD:
            raise FockError(f"density matrix has eigenvalue {evals.min()}")

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


State = PureState | DensityMatrix


def _check_same_space(s1: FockSpace, s2: FockSpace) -> None:
    if s1 != s2:
        raise FockError(f"space mismatch: {s1} vs {s2}")


def tensor(s1: PureState, s2: PureState) -> PureState:
    """Tensor product; s1's modes come first (most significant)."""
    if s1.space.cutoff != s2.space.cutoff:
        raise FockError("cutoff mismatch in tensor product")
    space = FockSpace(s1.space.num_modes + s2.space.num_modes, s1.space.cutoff)
    return PureState(space, np.kron(s1.amplitudes, s2.amplitudes))


def tensor_density(r1: DensityMatrix, r2: DensityMatrix) -> DensityMatrix:
    if r1.space.cutoff != r2.space.cutoff:
        raise FockError("cutoff mismatch in tensor product")
    space = FockSpace(r1.space.num_modes + r2.space.num_modes, r1.space.cutoff)
    return DensityMatrix(space, np.kron(r1.matrix, r2.matrix))


def pure_to_density(s: PureState) -> DensityMatrix:
    if abs(s.norm() - 1.0) > 1e-9:
        raise NormalizationError("pure_to_density requires a normalized state")
    return DensityMatrix(s.space, np.outer(s.amplitudes, s.amplitudes.conj()))


def as_density(state: State) -> DensityMatrix:
    return state if isinstance(state, DensityMatrix) else pure_to_density(state)


def expectation(observable: np.ndarray, state: State) -> float:
    """<O> for a Hermitian observable given as a matrix on the state's space."""
    obs = np.asarray(observable, dtype=complex)
    if np.max(np.abs(obs - obs.conj().T)) > ATOL_ALG:
        raise FockError("observable is not Hermitian")
    if isinstance(state, PureState):
        return float(np.real(np.vdot(state.amplitudes, obs @ state.amplitudes)))
    return float(np.real(np.trace(obs @ state.matrix)))


def partial_trace(rho: DensityMatrix, keep_modes: Sequence[int]) -> DensityMatrix:
    """Trace out all modes not listed in keep_modes.

    The reduced state's mode order follows keep_modes.
    """
    keep = list(keep_modes)
    if not keep:
        raise FockError("keep_modes must be non-empty")
    m_tot = rho.space.num_modes
    if len(set(keep)) != len(keep) or any(not 0 <= m < m_tot for m in keep):
        raise FockError(f"invalid keep_modes {keep}")
    d = rho.space.cutoff
    t = rho.matrix.reshape([d] * (2 * m_tot))
    row = list(range(m_tot))
    col = [m_tot + m if m in keep else m for m in range(m_tot)]
    out_sub = [m for m in keep] + [m_tot + m for m in keep]
    reduced = np.einsum(t, row + col, out_sub)
    dim = d ** len(keep)
    return DensityMatrix(FockSpace(len(keep), d), reduced.reshape(dim, dim))


def states_equal(s1: PureState, s2: PureState, atol: float = 1e-10,
                 up_to_phase: bool = True) -> bool:
    """Amplitude-wise equality, by default after aligning the global phase."""
    _check_same_space(s1.space, s2.space)
    a1, a2 = s1.amplitudes, s2.amplitudes
    if up_to_phase:
        ov = np.vdot(a1, a2)
        if abs(ov) > 1e-14:
            a2 = a2 * (ov.conjugate() / abs(ov))
    return bool(np.max(np.abs(a1 - a2)) <= atol)


def fidelity(a: State, b: State) -> float:
    """|<a|b>|^2 for pure states, Uhlmann fidelity when a side is mixed."""
    if isinstance(a, PureState) and isinstance(b, PureState):
        return abs(a.overlap(b)) ** 2
    if isinstance(a, PureState):
        return float(np.real(np.vdot(a.amplitudes,
                                     b.matrix @ a.amplitudes)))
    if isinstance(b, PureState):
        return fidelity(b, a)
    from scipy.linalg import sqrtm
    sq = sqrtm(a.matrix)
    inner = sqrtm(sq @ b.matrix @ sq)
    return float(np.real(np.trace(inner)) ** 2)


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    _check_same_space(a.space, b.space)
    evals = np.linalg.eigvalsh(a.matrix - b.matrix)
    return float(0.5 * np.sum(np.abs(evals)))


# ---------------------------------------------------------------------------
# JSON serialization (documented basis order; see module docstring)

def pure_to_json(s: PureState) -> dict:
    return {
        "modes": s.space.num_modes,
        "cutoff": s.space.cutoff,
        "amplitudes": [[float(a.real), float(a.imag)] for a in s.amplitudes],
    }


def pure_from_json(obj: dict) -> PureState:
    space = FockSpace(int(obj["modes"]), int(obj["cutoff"]))
    amps = np.array([complex(re, im) for re, im in obj["amplitudes"]])
    return PureState(space, amps)


def density_to_json(r: DensityMatrix) -> dict:
    return {
        "modes": r.space.num_modes,
        "cutoff": r.space.cutoff,
        "matrix": [[[float(x.real), float(x.imag)] for x in row]
                   for row in r.matrix],
    }


def density_from_json(obj: dict) -> DensityMatrix:
    space = FockSpace(int(obj["modes"]), int(obj["cutoff"]))
    mat = np.array([[complex(re, im) for re, im in row]
                    for row in obj["matrix"]])
    return DensityMatrix(space, mat)
