"""Monte-Carlo wavefunction unraveling of amplitude damping.

Each trajectory evolves a pure state; at every loss step and for every lossy
mode, one Kraus branch is sampled with probability equal to its branch norm
(exact unraveling, so the ensemble average reproduces the channel without
time-step error).  Branch k >= 1 is a quantum jump removing k photons from
that mode; for dual-rail states a jump lands in |00>.

Per-trajectory RNG streams are derived from (seed, trajectory index), so a
run partitioned across workers is bit-identical to a serial run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import channels, elements
from .fock import (DensityMatrix, FockError, FockSpace, PureState,
                   pure_to_density)


@dataclass(frozen=True)
class Exponential:
    """Constant loss rate: survival e^{-gamma} per step."""

    gamma_per_step: float

    def __post_init__(self):
        if self.gamma_per_step < 0:
            raise ValueError("gamma_per_step must be >= 0")


@dataclass(frozen=True)
class Quadratic:
    """Sub-exponential loss: survival 1 - eps * t^2 at time t."""

    epsilon: float
    step_duration: float = 1.0

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.step_duration <= 0:
            raise ValueError("step_duration must be positive")


LossModel = Exponential | Quadratic


@dataclass(frozen=True)
class TrajectoryConfig:
    shots: int
    seed: int
    steps: int = 1
    loss_model: LossModel = Exponential(0.0)

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if isinstance(self.loss_model, Quadratic):
            t_total = self.steps * self.loss_model.step_duration
            if self.loss_model.epsilon * t_total ** 2 >= 1:
                raise ValueError(
                    "quadratic model leaves domain: eps * t_total^2 >= 1")


@dataclass
class TrajectoryRecord:
    final_state: PureState
    jump_events: list[tuple[int, int]]  # (step index, mode)

    @property
    def survived(self) -> bool:
        return not self.jump_events


@dataclass
class EnsembleResult:
    shots: int
    seed: int
    survival_fraction: float
    jump_histogram: list[int]  # index = number of jumps in the trajectory
    avg_density_matrix: DensityMatrix
    records: list[TrajectoryRecord] = field(default_factory=list)


def quadratic_jump_rate(t: float, epsilon: float) -> float:
    """Hazard rate r(t) = 2 eps t / (1 - eps t^2), so survival is 1 - eps t^2."""
    if epsilon * t * t >= 1:
        raise FockError(f"quadratic loss model undefined at eps*t^2 = "
                        f"{epsilon * t * t} >= 1")
    return 2 * epsilon * t / (1 - epsilon * t * t)


def step_gammas(model: LossModel, steps: int, t_offset: float = 0.0) -> np.ndarray:
    """Per-step damping exponents for `steps` steps of the loss model.

    For the quadratic model the hazard is integrated exactly over each step,
    so the cumulative survival is exactly 1 - eps t^2 (no discretization
    error); t_offset shifts the model clock (time since last regeneration).
    """
    if isinstance(model, Exponential):
        return np.full(steps, model.gamma_per_step)
    dt = model.step_duration
    t = t_offset + dt * np.arange(steps + 1)
    surv = 1.0 - model.epsilon * t ** 2
    if surv[-1] <= 0:
        raise FockError("quadratic loss model leaves domain within the run")
    return np.log(surv[:-1] / surv[1:])


def damping_step(state: PureState, modes: Sequence[int], gamma: float,
                 rng: np.random.Generator) -> tuple[PureState, list[int]]:
    """One stochastic damping step on each listed mode.

    Per mode, samples among the mode's Kraus branches with probabilities
    given by the branch norms, then renormalizes.  Returns the new state and
    the list of modes that jumped (with multiplicity per photon lost).
    """
    ops = _step_operators(state.space, modes, gamma)
    amps, jumped = _sample_loss(state.amplitudes, ops, rng)
    return PureState(state.space, amps), jumped


_embed_cache: dict[tuple[FockSpace, int, float], list[np.ndarray]] = {}


def _step_operators(space: FockSpace, modes: Sequence[int],
                    gamma: float) -> list[tuple[int, list[np.ndarray]]]:
    from .fock import _embed
    out = []
    for m in modes:
        key = (space, m, float(gamma))
        if key not in _embed_cache:
            _embed_cache[key] = [
                _embed(space, m, k)
                for k in channels.single_mode_damping_kraus(space.cutoff, gamma)]
        out.append((m, _embed_cache[key]))
    return out


def trajectory_step(state: PureState, mode_set: Sequence[int],
                    p_jump_per_mode: float,
                    rng: np.random.Generator) -> tuple[PureState, list[int]]:
    """Damping step parameterized by the nominal single-photon jump
    probability p = 1 - e^{-gamma} (actual branch probabilities come from the
    state norms)."""
    if not 0 <= p_jump_per_mode < 1:
        raise ValueError("p_jump must be in [0, 1)")
    gamma = -np.log(1.0 - p_jump_per_mode)
    return damping_step(state, mode_set, gamma, rng)


def _sample_loss(amps: np.ndarray, ops: list[tuple[int, list[np.ndarray]]],
                 rng: np.random.Generator) -> tuple[np.ndarray, list[int]]:
    jumped: list[int] = []
    for mode, kraus in ops:
        branches = [k @ amps for k in kraus]
        probs = np.array([float(np.vdot(b, b).real) for b in branches])
        cum = np.cumsum(probs / probs.sum())
        k_idx = int(np.searchsorted(cum, rng.random(), side="right"))
        k_idx = min(k_idx, len(branches) - 1)
        amps = branches[k_idx] / np.sqrt(probs[k_idx])
        jumped.extend([mode] * k_idx)
    return amps, jumped


def _compile_circuit(space: FockSpace, circuit: "elements.Circuit"):
    """Precompute unitaries and embedded Kraus lists, once per ensemble."""
    compiled = []
    for step, elem in enumerate(circuit.elements):
        if isinstance(elem, elements.Loss):
            compiled.append(("loss", step,
                             _step_operators(space, elem.modes, elem.gamma)))
        elif isinstance(elem, elements.PostSelect):
            raise FockError("post-selection inside trajectory ensembles is "
                            "not supported; post-select on the records")
        else:
            compiled.append(("unitary", step,
                             elements.element_unitary(space, elem)))
    return compiled


def _run_compiled(amps: np.ndarray, compiled, rng: np.random.Generator
                  ) -> tuple[np.ndarray, list[tuple[int, int]]]:
    events: list[tuple[int, int]] = []
    for kind, step, payload in compiled:
        if kind == "loss":
            amps, jumped = _sample_loss(amps, payload, rng)
            events.extend((step, m) for m in jumped)
        else:
            amps = payload @ amps
    return amps, events


def single_trajectory(initial: PureState, circuit: "elements.Circuit",
                      seed: int, index: int) -> TrajectoryRecord:
    """Run one trajectory with its own (seed, index)-derived stream."""
    compiled = _compile_circuit(initial.space, circuit)
    rng = np.random.default_rng([seed, index])
    amps, events = _run_compiled(initial.amplitudes, compiled, rng)
    return TrajectoryRecord(PureState(initial.space, amps), events)


def loss_circuit(space: FockSpace, config: TrajectoryConfig,
                 modes: Sequence[int] | None = None) -> "elements.Circuit":
    """Pure-loss circuit: `steps` balanced loss elements per the loss model."""
    if modes is None:
        modes = tuple(range(space.num_modes))
    gammas = step_gammas(config.loss_model, config.steps)
    elems = tuple(elements.Loss(tuple(modes), float(g)) for g in gammas)
    return elements.Circuit(space, elems)


def run_ensemble(initial: PureState, circuit: "elements.Circuit | None",
                 config: TrajectoryConfig,
                 keep_records: bool = False) -> EnsembleResult:
    """Average `config.shots` independent trajectories.

    With circuit=None, the circuit is `steps` balanced loss elements on all
    modes, per the config's loss model.  Deterministic for a given seed,
    independent of how trajectories are partitioned across workers.
    """
    if circuit is None:
        circuit = loss_circuit(initial.space, config)
    compiled = _compile_circuit(initial.space, circuit)
    dim = initial.space.dim
    rho_acc = np.zeros((dim, dim), dtype=complex)
    histogram: list[int] = []
    survived = 0
    records: list[TrajectoryRecord] = []
    for i in range(config.shots):
        rng = np.random.default_rng([config.seed, i])
        amps, events = _run_compiled(initial.amplitudes, compiled, rng)
        rho_acc += np.outer(amps, amps.conj())
        n_jumps = len(events)
        while len(histogram) <= n_jumps:
            histogram.append(0)
        histogram[n_jumps] += 1
        if not events:
            survived += 1
        if keep_records:
            records.append(TrajectoryRecord(PureState(initial.space, amps),
                                            events))
    avg = DensityMatrix(initial.space, rho_acc / config.shots)
    return EnsembleResult(config.shots, config.seed,
                          survived / config.shots, histogram, avg, records)


def ensemble_to_json(result: EnsembleResult) -> dict:
    from .fock import density_to_json
    return {
        "shots": result.shots,
        "seed": result.seed,
        "survival_fraction": result.survival_fraction,
        "jump_histogram": result.jump_histogram,
        "avg_density_matrix": density_to_json(result.avg_density_matrix)["matrix"],
    }
