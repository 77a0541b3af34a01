"""Circuit elements and an exact (density-matrix friendly) executor.

Beamsplitter convention
-----------------------
``beamsplitter_unitary(space, (m1, m2), theta)`` is the photon-number
conserving rotation

    U(theta) = exp[(pi/2 - theta) (a2^dag a1 - a1^dag a2)],

fixed so that a photon entering mode m1 splits as

    U(theta) |1 0> = cos(theta) |0 1> + sin(theta) |1 0>,

i.e. theta = atan(c1/c0) prepares c0|01> + c1|10> from |10>.  At theta = pi/4
this is a 50/50 splitter; U(pi - theta) is the inverse of U(theta), which is
how the "undo" splitter of an interferometer is expressed.

Truncation leakage: on basis states whose photon total over the splitter pair
exceeds cutoff - 1, the truncated generator is not the physical one.  The
executor rejects inputs with weight > 1e-9 on that sector.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from . import channels
from .fock import (DensityMatrix, FockError, FockSpace, PureState, State,
                   annihilation, _check_same_space)

LEAKAGE_TOL = 1e-9
IMPOSSIBLE_TOL = 1e-14


class LeakageError(FockError):
    """Input state has weight on the truncation-unsafe sector."""


class ImpossibleOutcome(FockError):
    """Post-selection outcome has probability ~0."""


@dataclass(frozen=True)
class BeamSplitter:
    modes: tuple[int, int]
    theta: float


@dataclass(frozen=True)
class PhaseShift:
    mode: int
    phi: float


@dataclass(frozen=True)
class KerrCrossPhase:
    modes: tuple[int, int]
    phi: float


@dataclass(frozen=True)
class Loss:
    modes: tuple[int, ...]
    gamma: float

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")


@dataclass(frozen=True)
class PostSelect:
    modes: tuple[int, ...]
    occupations: tuple[int, ...]

    def __post_init__(self):
        if len(self.modes) != len(self.occupations):
            raise ValueError("modes and occupations must have equal length")


CircuitElement = BeamSplitter | PhaseShift | KerrCrossPhase | Loss | PostSelect


@dataclass(frozen=True)
class Circuit:
    space: FockSpace
    elements: tuple[CircuitElement, ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        for elem in self.elements:
            _check_element_modes(self.space, elem)


def _element_modes(elem: CircuitElement) -> tuple[int, ...]:
    if isinstance(elem, PhaseShift):
        return (elem.mode,)
    return tuple(elem.modes)


def _check_element_modes(space: FockSpace, elem: CircuitElement) -> None:
    modes = _element_modes(elem)
    if len(set(modes)) != len(modes):
        raise ValueError(f"element references a mode twice: {elem}")
    for m in modes:
        if not 0 <= m < space.num_modes:
            raise ValueError(f"mode {m} out of range for {space}")
    for ang in (getattr(elem, "theta", 0.0), getattr(elem, "phi", 0.0)):
        if not np.isfinite(ang):
            raise ValueError(f"non-finite angle in {elem}")


# ---------------------------------------------------------------------------
# Unitaries

def beamsplitter_unitary(space: FockSpace, modes: Sequence[int],
                         theta: float) -> np.ndarray:
    m1, m2 = modes
    if m1 == m2:
        raise ValueError("beamsplitter modes must be distinct")
    if not np.isfinite(theta):
        raise ValueError("theta must be finite")
    a1 = annihilation(space, m1)
    a2 = annihilation(space, m2)
    gen = a2.conj().T @ a1 - a1.conj().T @ a2
    return expm((np.pi / 2 - theta) * gen)


def phase_unitary(space: FockSpace, mode: int, phi: float) -> np.ndarray:
    diag = np.array([np.exp(1j * phi * occ[mode])
                     for occ in space.occupations()])
    return np.diag(diag)


def kerr_unitary(space: FockSpace, modes: Sequence[int], phi: float) -> np.ndarray:
    """Cross-phase exp(i phi n1 n2); diagonal in the Fock basis."""
    m1, m2 = modes
    if m1 == m2:
        raise ValueError("Kerr modes must be distinct")
    diag = np.array([np.exp(1j * phi * occ[m1] * occ[m2])
                     for occ in space.occupations()])
    return np.diag(diag)


def element_unitary(space: FockSpace, elem: CircuitElement) -> np.ndarray:
    if isinstance(elem, BeamSplitter):
        return beamsplitter_unitary(space, elem.modes, elem.theta)
    if isinstance(elem, PhaseShift):
        return phase_unitary(space, elem.mode, elem.phi)
    if isinstance(elem, KerrCrossPhase):
        return kerr_unitary(space, elem.modes, elem.phi)
    raise TypeError(f"{type(elem).__name__} has no unitary representation")


def apply_unitary(state: State, u: np.ndarray) -> State:
    if isinstance(state, PureState):
        return PureState(state.space, u @ state.amplitudes,
                         allow_unnormalized=state.allow_unnormalized)
    return DensityMatrix(state.space, u @ state.matrix @ u.conj().T)


def leakage_weight(state: State, modes: Sequence[int]) -> float:
    """Population on basis states with pair photon total > cutoff - 1."""
    space = state.space
    unsafe = [i for i, occ in enumerate(space.occupations())
              if sum(occ[m] for m in modes) > space.cutoff - 1]
    if not unsafe:
        return 0.0
    if isinstance(state, PureState):
        return float(np.sum(np.abs(state.amplitudes[unsafe]) ** 2))
    return float(np.real(np.sum(np.diag(state.matrix)[unsafe])))


# ---------------------------------------------------------------------------
# Post-selection

def post_select(state: State, modes: Sequence[int],
                occupations: Sequence[int]) -> tuple[State, float]:
    """Project the listed modes onto the given occupations and renormalize.

    Returns the conditional state (still on all modes, with the selected
    modes collapsed) and the outcome probability.  Raises ImpossibleOutcome
    when the probability is below 1e-14.
    """
    space = state.space
    modes = tuple(modes)
    occupations = tuple(occupations)
    for n in occupations:
        if not 0 <= n < space.cutoff:
            raise FockError(f"required occupation {n} outside cutoff")
    mask = np.array([all(occ[m] == n for m, n in zip(modes, occupations))
                     for occ in space.occupations()])
    if isinstance(state, PureState):
        amps = np.where(mask, state.amplitudes, 0.0)
        prob = float(np.sum(np.abs(amps) ** 2))
        if prob < IMPOSSIBLE_TOL:
            raise ImpossibleOutcome(
                f"outcome {occupations} on modes {modes} has probability {prob}")
        return PureState(space, amps / np.sqrt(prob)), prob
    proj = np.where(mask, 1.0, 0.0)
    mat = proj[:, None] * state.matrix * proj[None, :]
    prob = float(np.real(np.trace(mat)))
    if prob < IMPOSSIBLE_TOL:
        raise ImpossibleOutcome(
            f"outcome {occupations} on modes {modes} has probability {prob}")
    return DensityMatrix(space, mat / prob), prob


def outcome_probability(state: State, modes: Sequence[int],
                        occupations: Sequence[int]) -> float:
    """Probability of a projective outcome, without conditioning."""
    try:
        _, prob = post_select(state, modes, occupations)
    except ImpossibleOutcome:
        return 0.0
    return prob


# ---------------------------------------------------------------------------
# Exact executor (density matrices; pure states as long as no Loss is hit)

def apply_element(state: State, elem: CircuitElement) -> tuple[State, float]:
    """Apply one element exactly.  Returns (state, probability factor).

    The probability factor is 1 except for PostSelect.  Loss requires a
    DensityMatrix here; sampled pure-state loss lives in `trajectories`.
    """
    _check_element_modes(state.space, elem)
    if isinstance(elem, (BeamSplitter, PhaseShift, KerrCrossPhase)):
        if isinstance(elem, BeamSplitter):
            leak = leakage_weight(state, elem.modes)
            if leak > LEAKAGE_TOL:
                raise LeakageError(
                    f"beamsplitter input has weight {leak} above the "
                    f"truncation-safe sector")
        return apply_unitary(state, element_unitary(state.space, elem)), 1.0
    if isinstance(elem, Loss):
        if isinstance(state, PureState):
            raise FockError(
                "Loss on a pure state needs a random source; use the "
                "trajectories module")
        ch = channels.balanced_damping_channel(state.space, elem.modes,
                                               elem.gamma)
        return channels.apply_channel(state, ch), 1.0
    if isinstance(elem, PostSelect):
        return post_select(state, elem.modes, elem.occupations)
    raise TypeError(f"unknown element {elem!r}")


def run_circuit(state: State, circuit: Circuit) -> tuple[State, float]:
    """Run all elements; returns the final state and the product of
    post-selection probabilities."""
    _check_same_space(state.space, circuit.space)
    prob = 1.0
    for elem in circuit.elements:
        state, p = apply_element(state, elem)
        prob *= p
    return state, prob


# ---------------------------------------------------------------------------
# Circuit JSON format (see README)

def circuit_to_json(circuit: Circuit) -> dict:
    elems = []
    for e in circuit.elements:
        if isinstance(e, BeamSplitter):
            elems.append({"type": "beamsplitter", "modes": list(e.modes),
                          "theta": e.theta})
        elif isinstance(e, PhaseShift):
            elems.append({"type": "phase", "mode": e.mode, "phi": e.phi})
        elif isinstance(e, KerrCrossPhase):
            elems.append({"type": "kerr", "modes": list(e.modes), "phi": e.phi})
        elif isinstance(e, Loss):
            elems.append({"type": "loss", "modes": list(e.modes),
                          "gamma": e.gamma})
        elif isinstance(e, PostSelect):
            elems.append({"type": "postselect", "modes": list(e.modes),
                          "occ": list(e.occupations)})
    return {"modes": circuit.space.num_modes, "cutoff": circuit.space.cutoff,
            "elements": elems}


def circuit_from_json(obj: dict) -> Circuit:
    space = FockSpace(int(obj["modes"]), int(obj["cutoff"]))
    elems: list[CircuitElement] = []
    for e in obj["elements"]:
        kind = e["type"]
        if kind == "beamsplitter":
            elems.append(BeamSplitter(tuple(e["modes"]), float(e["theta"])))
        elif kind == "phase":
            elems.append(PhaseShift(int(e["mode"]), float(e["phi"])))
        elif kind == "kerr":
            elems.append(KerrCrossPhase(tuple(e["modes"]), float(e["phi"])))
        elif kind == "loss":
            elems.append(Loss(tuple(e["modes"]), float(e["gamma"])))
        elif kind == "postselect":
            elems.append(PostSelect(tuple(e["modes"]), tuple(e["occ"])))
        else:
            raise ValueError(f"unknown element type {kind!r}")
    return Circuit(space, tuple(elems))


def load_circuit(path) -> Circuit:
    with open(path) as fh:
        return circuit_from_json(json.load(fh))


def save_circuit(circuit: Circuit, path) -> None:
    with open(path, "w") as fh:
        json.dump(circuit_to_json(circuit), fh, indent=2, sort_keys=True)
