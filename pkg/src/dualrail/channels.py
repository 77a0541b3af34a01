"""Amplitude damping (T = 0) as a CPTP map in Kraus form.

The channel is parameterized by the total integrated damping exponent gamma:
a single photon survives with probability exp(-gamma) (amplitude exp(-gamma/2)).
For cutoff 2 the Kraus pair is the textbook

    K0 = diag(1, e^{-gamma/2}),   K1 = sqrt(1 - e^{-gamma}) |0><1|,

and for larger cutoffs the binomial-loss generalization

    K_k |n> = sqrt(C(n,k)) (1-eta)^{k/2} eta^{(n-k)/2} |n-k>,   eta = e^{-gamma}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import comb

from .fock import (ATOL_ALG, DensityMatrix, FockError, FockSpace, _embed,
                   _check_same_space)


@dataclass(frozen=True)
class DampingParams:
    """Total damping exponent; survival amplitude is exp(-gamma/2)."""

    gamma: float

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")

    @property
    def survival(self) -> float:
        return float(np.exp(-self.gamma))


@dataclass(frozen=True)
class KrausChannel:
    space: FockSpace
    operators: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.operators)
        d = self.space.dim
        for k in ops:
            if k.shape != (d, d):
                raise ValueError(f"Kraus operator shape {k.shape} != ({d},{d})")
            k.flags.writeable = False
        object.__setattr__(self, "operators", ops)

    def completeness_defect(self) -> float:
        """max |sum_i K_i^dag K_i - I|, should be ~0 for a CPTP map."""
        acc = sum(k.conj().T @ k for k in self.operators)
        return float(np.max(np.abs(acc - np.eye(self.space.dim))))

    def check_completeness(self, atol: float = ATOL_ALG) -> None:
        defect = self.completeness_defect()
        if defect > atol:
            raise FockError(f"Kraus completeness violated by {defect}")


def identity_channel(space: FockSpace) -> KrausChannel:
    return KrausChannel(space, (np.eye(space.dim, dtype=complex),))


def single_mode_damping_kraus(cutoff: int, gamma: float) -> list[np.ndarray]:
    """Binomial-loss Kraus operators on one truncated mode."""
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    eta = np.exp(-gamma)
    ops = []
    for k in range(cutoff):
        mat = np.zeros((cutoff, cutoff), dtype=complex)
        for n in range(k, cutoff):
            mat[n - k, n] = np.sqrt(comb(n, k, exact=True)
                                    * (1 - eta) ** k * eta ** (n - k))
        ops.append(mat)
    return ops


def amplitude_damping_channel(space: FockSpace, mode: int,
                              gamma: float) -> KrausChannel:
    """Amplitude damping with exponent gamma on a single mode."""
    ops = tuple(_embed(space, mode, k)
                for k in single_mode_damping_kraus(space.cutoff, gamma))
    ch = KrausChannel(space, ops)
    ch.check_completeness()
    return ch


def balanced_damping_channel(space: FockSpace, modes, gamma: float) -> KrausChannel:
    """Equal damping gamma on each listed mode (composition of per-mode maps)."""
    ch = identity_channel(space)
    for m in modes:
        ch = compose(ch, amplitude_damping_channel(space, m, gamma))
    return ch


def apply_channel(rho: DensityMatrix, ch: KrausChannel) -> DensityMatrix:
    """rho -> sum_i K_i rho K_i^dag."""
    _check_same_space(rho.space, ch.space)
    out = np.zeros_like(rho.matrix)
    for k in ch.operators:
        out = out + k @ rho.matrix @ k.conj().T
    return DensityMatrix(rho.space, out)


def compose(ch1: KrausChannel, ch2: KrausChannel) -> KrausChannel:
    """The channel applying ch1 first, then ch2 (Kraus list: all products)."""
    _check_same_space(ch1.space, ch2.space)
    ops = tuple(k2 @ k1 for k2 in ch2.operators for k1 in ch1.operators)
    return KrausChannel(ch1.space, ops)


def channel_matrices_equal(ch1: KrausChannel, ch2: KrausChannel,
                           atol: float = ATOL_ALG) -> bool:
    """Compare two channels as superoperators (Kraus lists are not unique)."""
    _check_same_space(ch1.space, ch2.space)
    return bool(np.max(np.abs(_superoperator(ch1) - _superoperator(ch2))) <= atol)


def _superoperator(ch: KrausChannel) -> np.ndarray:
    return sum(np.kron(k, k.conj()) for k in ch.operators)
