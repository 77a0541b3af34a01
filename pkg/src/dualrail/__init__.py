"""Few-mode Fock-space simulator for dual-rail qubit regeneration."""

from .fock import (DensityMatrix, FockError, FockSpace, PureState,
                   expectation, fidelity, partial_trace, pure_to_density,
                   states_equal, tensor, trace_distance)
from .channels import (KrausChannel, amplitude_damping_channel, apply_channel,
                       balanced_damping_channel, compose)
from .elements import (BeamSplitter, Circuit, KerrCrossPhase, Loss,
                       PhaseShift, PostSelect, beamsplitter_unitary,
                       kerr_unitary, post_select, run_circuit)
from .trajectories import (Exponential, Quadratic, TrajectoryConfig,
                           quadratic_jump_rate, run_ensemble, trajectory_step)
from .regen import (DualRailQubit, LinkConfig, build_regenerator, encode,
                    expected_trials, qnd_eigenstate_check, regenerate,
                    transmit)
from .cli import classical_visibility, erasure_capacity

__version__ = "0.1.0"
