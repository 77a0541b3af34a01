"""Dual-rail qubits and the balanced-QND regenerator.

A dual-rail qubit lives on two modes (a, abar) as c0|01> + c1|10>; balanced
loss either leaves it intact or drops it to |00>.  The regenerator adjoins a
two-mode probe prepared in |10>, entangles the total signal photon number
into the probe interferometer via two pi cross-phase gates, and reads the
probe out: probe (0,1) means "one photon still there, qubit untouched",
probe (1,0) means "photon lost, abort and resend".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import elements, trajectories
from .elements import (BeamSplitter, Circuit, KerrCrossPhase, PhaseShift,
                       PostSelect)
from .fock import (DensityMatrix, FockError, FockSpace, PureState, State,
                   expectation, fidelity, partial_trace, pure_to_density,
                   tensor, tensor_density, total_number)
from .trajectories import Exponential, LossModel, Quadratic, step_gammas

SIGNAL_MODES = (0, 1)
PROBE_MODES = (2, 3)
PROBE_ACCEPT = (0, 1)   # probe exits b bbar = 01: no jump detected
PROBE_REJECT = (1, 0)   # probe exits b bbar = 10: photon was lost

REPRESENTATION_TOL = 1e-10


class RepresentationError(FockError):
    """Signal state leaves span{|00>, |01>, |10>}."""


@dataclass(frozen=True)
class DualRailQubit:
    """Amplitudes of |01> and |10> over the signal modes."""

    c0: complex
    c1: complex

    def __post_init__(self):
        norm2 = abs(self.c0) ** 2 + abs(self.c1) ** 2
        if abs(norm2 - 1.0) > 1e-9:
            raise FockError(f"|c0|^2 + |c1|^2 = {norm2} != 1")


def encode(c0: complex, c1: complex, cutoff: int = 3) -> PureState:
    """Prepare c0|01> + c1|10> from a single photon in mode a.

    Uses a beamsplitter of angle atan(|c1|/|c0|) followed by a phase shifter,
    so the result equals the target up to a global phase.
    """
    qubit = DualRailQubit(c0, c1)  # validates normalization
    space = FockSpace(2, cutoff)
    photon_in = PureState.basis(space, (1, 0))
    state, _ = elements.run_circuit(photon_in, encoding_circuit(space, qubit))
    return state


def encoding_circuit(space: FockSpace, qubit: DualRailQubit) -> Circuit:
    theta = float(np.arctan2(abs(qubit.c1), abs(qubit.c0)))
    delta = float(np.angle(qubit.c1) - np.angle(qubit.c0))
    return Circuit(space, (BeamSplitter((0, 1), theta), PhaseShift(0, delta)))


def decoding_circuit(space: FockSpace, qubit: DualRailQubit) -> Circuit:
    """Inverse of the encoding circuit; maps the qubit back to |10>."""
    theta = float(np.arctan2(abs(qubit.c1), abs(qubit.c0)))
    delta = float(np.angle(qubit.c1) - np.angle(qubit.c0))
    return Circuit(space, (PhaseShift(0, -delta),
                           BeamSplitter((0, 1), np.pi - theta)))


def qnd_observable(space: FockSpace) -> np.ndarray:
    """Total photon number over the signal modes."""
    return total_number(space, SIGNAL_MODES)


def qnd_eigenstate_check(state: PureState) -> tuple[float | None, bool]:
    """Is the state an eigenstate of the total signal photon number?"""
    q = total_number(state.space, range(state.space.num_modes)
                     if state.space.num_modes == 2 else SIGNAL_MODES)
    q_psi = q @ state.amplitudes
    val = expectation(q, state)
    if np.linalg.norm(q_psi - val * state.amplitudes) <= 1e-10:
        return float(np.round(val)) if abs(val - round(val)) < 1e-10 else float(val), True
    return None, False


def build_regenerator(space: FockSpace) -> Circuit:
    """The four-mode regenerator (signal a, abar on modes 0,1; probe b, bbar
    on modes 2,3; probe prepared in |10>).

    Layout: 50/50 splitter on the probe, pi cross-phase from each signal mode
    onto probe mode b, the inverse 50/50 splitter, then post-selection on the
    probe reading (0, 1).
    """
    if space.num_modes != 4:
        raise FockError("regenerator needs a 4-mode space")
    b = PROBE_MODES[0]
    return Circuit(space, (
        BeamSplitter(PROBE_MODES, np.pi / 4),
        KerrCrossPhase((SIGNAL_MODES[0], b), np.pi),
        KerrCrossPhase((SIGNAL_MODES[1], b), np.pi),
        BeamSplitter(PROBE_MODES, 3 * np.pi / 4),   # inverse of the first
        PostSelect(PROBE_MODES, PROBE_ACCEPT),
    ))


@dataclass
class RegenResult:
    """Outcome probabilities of one regeneration station."""

    p_accept: float
    p_reject: float
    accepted_state: State | None   # on the 2-mode signal space


def check_representation(state: State) -> None:
    """Reject signal states outside span{|00>, |01>, |10>}."""
    space = state.space
    legal = {space.index((0, 0)), space.index((0, 1)), space.index((1, 0))}
    if isinstance(state, PureState):
        weight = sum(abs(a) ** 2 for i, a in enumerate(state.amplitudes)
                     if i not in legal)
    else:
        weight = sum(float(np.real(state.matrix[i, i]))
                     for i in range(space.dim) if i not in legal)
    if weight > REPRESENTATION_TOL:
        raise RepresentationError(
            f"signal has weight {weight} outside the dual-rail span")


def _with_probe(signal: State) -> State:
    space = signal.space
    probe = PureState.basis(FockSpace(2, space.cutoff), (1, 0))
    if isinstance(signal, PureState):
        return tensor(signal, probe)
    return tensor_density(signal, pure_to_density(probe))


def regenerate(signal: State) -> RegenResult:
    """Run one regeneration station on a 2-mode signal state (exact)."""
    if signal.space.num_modes != 2:
        raise FockError("regenerate expects a 2-mode signal state")
    check_representation(signal)
    joint = _with_probe(signal)
    circuit = build_regenerator(joint.space)
    # apply the unitary part, then examine both probe outcomes
    for elem in circuit.elements[:-1]:
        joint, _ = elements.apply_element(joint, elem)
    p_accept = elements.outcome_probability(joint, PROBE_MODES, PROBE_ACCEPT)
    p_reject = elements.outcome_probability(joint, PROBE_MODES, PROBE_REJECT)
    accepted = None
    if p_accept > elements.IMPOSSIBLE_TOL:
        cond, _ = elements.post_select(joint, PROBE_MODES, PROBE_ACCEPT)
        accepted = _drop_probe(cond)
    return RegenResult(p_accept, p_reject, accepted)


def _drop_probe(joint: State) -> State:
    if isinstance(joint, DensityMatrix):
        return partial_trace(joint, SIGNAL_MODES)
    # probe is collapsed; read the signal amplitudes off the (.., 0, 1) block
    space = joint.space
    signal_space = FockSpace(2, space.cutoff)
    amps = np.zeros(signal_space.dim, dtype=complex)
    for occ in signal_space.occupations():
        amps[signal_space.index(occ)] = joint.amplitude(occ + PROBE_ACCEPT)
    return PureState(signal_space, amps)


def regenerate_sample(signal: PureState,
                      rng: np.random.Generator) -> tuple[bool, PureState | None]:
    """One stochastic readout of the station: True = accepted."""
    result = regenerate(signal)
    if rng.random() < result.p_accept:
        return True, result.accepted_state
    return False, None


# ---------------------------------------------------------------------------
# Transmission links

@dataclass(frozen=True)
class LinkConfig:
    """n loss segments, with a regeneration station every k segments
    (k = 0 disables mid-link stations; the receiver always checks)."""

    segments: int
    loss_model: LossModel
    regenerate_every: int = 0

    def __post_init__(self):
        if self.segments < 1:
            raise ValueError("segments must be >= 1")
        if self.regenerate_every < 0:
            raise ValueError("regenerate_every must be >= 0")


@dataclass
class TransmissionReport:
    mode: str
    segments: int
    regenerate_every: int
    p_success: float
    expected_trials: float
    fidelity: float
    per_station: list[float]
    shots: int | None = None
    seed: int | None = None

    def to_json(self) -> dict:
        out = {
            "mode": self.mode,
            "segments": self.segments,
            "regenerate_every": self.regenerate_every,
            "p_success": self.p_success,
            "expected_trials": self.expected_trials,
            "fidelity": self.fidelity,
            "per_station": self.per_station,
        }
        if self.shots is not None:
            out["shots"] = self.shots
            out["seed"] = self.seed
        return out


def _station_indices(link: LinkConfig) -> set[int]:
    k = link.regenerate_every
    stations = set(range(k, link.segments + 1, k)) if k > 0 else set()
    stations.add(link.segments)   # receiver always verifies
    return stations


def _segment_gamma(link: LinkConfig, clock_steps: int) -> float:
    """Damping exponent of the next segment, given steps since last reset."""
    if isinstance(link.loss_model, Exponential):
        return link.loss_model.gamma_per_step
    dt = link.loss_model.step_duration
    return float(step_gammas(link.loss_model, 1, t_offset=clock_steps * dt)[0])


def transmit(qubit: DualRailQubit, link: LinkConfig, mode: str = "exact",
             shots: int | None = None, seed: int | None = None,
             cutoff: int = 2) -> TransmissionReport:
    """Send a dual-rail qubit through the link and report success statistics.

    Exact mode propagates the density matrix and conditions on acceptance at
    every station; trajectory mode samples `shots` independent runs.  A run
    succeeds when every station (and the receiver) accepts.
    """
    if mode == "exact":
        return _transmit_exact(qubit, link, cutoff)
    if mode == "trajectory":
        if shots is None or seed is None:
            raise ValueError("trajectory mode needs shots and seed")
        return _transmit_trajectory(qubit, link, shots, seed)
    raise ValueError(f"unknown mode {mode!r}")


def _transmit_exact(qubit: DualRailQubit, link: LinkConfig,
                    cutoff: int) -> TransmissionReport:
    psi_in = encode(qubit.c0, qubit.c1, cutoff=cutoff)
    rho = pure_to_density(psi_in)
    p_success = 1.0
    per_station = []
    stations = _station_indices(link)
    clock = 0
    for seg in range(1, link.segments + 1):
        gamma = _segment_gamma(link, clock)
        loss = elements.Loss(SIGNAL_MODES, gamma)
        rho, _ = elements.apply_element(rho, loss)
        clock += 1
        if seg in stations:
            result = regenerate(rho)
            p_success *= result.p_accept
            per_station.append(result.p_accept)
            rho = result.accepted_state
            clock = 0   # confirmed photon: the sub-exponential clock restarts
    fid = fidelity(psi_in, rho)
    return TransmissionReport("exact", link.segments, link.regenerate_every,
                              p_success, _trials_from_p(p_success), fid,
                              per_station)


def _transmit_trajectory(qubit: DualRailQubit, link: LinkConfig,
                         shots: int, seed: int) -> TransmissionReport:
    # Any jump is caught at the next station (or the receiver), so a shot
    # succeeds iff its photon survives every segment.  For dead shots the
    # clock value is irrelevant, which lets the whole ensemble share one
    # clock and vectorize over shots.
    rng = np.random.default_rng(seed)
    alive = np.ones(shots, dtype=bool)
    stations = _station_indices(link)
    per_station = []
    alive_at_last_station = shots
    clock = 0
    for seg in range(1, link.segments + 1):
        p_surv = float(np.exp(-_segment_gamma(link, clock)))
        alive &= rng.random(shots) < p_surv
        clock += 1
        if seg in stations:
            n_alive = int(alive.sum())
            per_station.append(n_alive / max(alive_at_last_station, 1))
            alive_at_last_station = n_alive
            clock = 0
    p_success = float(alive.mean())
    return TransmissionReport("trajectory", link.segments,
                              link.regenerate_every, p_success,
                              _trials_from_p(p_success), 1.0, per_station,
                              shots=shots, seed=seed)


def _trials_from_p(p: float) -> float:
    if p <= 0:
        raise FockError("success probability is zero; no finite trial count")
    return 1.0 / p


def success_probability(n: int, model: LossModel, regenerate: bool) -> float:
    """Closed-form end-to-end success probability for an n-segment link."""
    if isinstance(model, Exponential):
        return float(np.exp(-n * model.gamma_per_step))
    dt = model.step_duration
    if regenerate:
        per_step = 1.0 - model.epsilon * dt ** 2
        if per_step <= 0:
            raise FockError("quadratic model out of domain")
        return float(per_step ** n)
    p = 1.0 - model.epsilon * (n * dt) ** 2
    if p <= 0:
        raise FockError("quadratic model out of domain")
    return float(p)


def expected_trials(n: int, model: LossModel, regenerate: bool) -> float:
    """Geometric retry count 1 / p_success for a fresh-qubit-per-attempt
    protocol."""
    return _trials_from_p(success_probability(n, model, regenerate))
