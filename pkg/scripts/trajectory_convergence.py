#!/usr/bin/env python3
"""Convergence of the Monte-Carlo wavefunction average to the exact Kraus
channel result: trace distance vs ensemble size."""

import argparse

import numpy as np

from dualrail.channels import apply_channel, balanced_damping_channel
from dualrail.fock import FockSpace, PureState, pure_to_density, trace_distance
from dualrail.trajectories import Exponential, TrajectoryConfig, run_ensemble


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gamma", type=float, default=0.5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-exponent", type=int, default=5,
                    help="largest ensemble is 10**this")
    args = ap.parse_args()

    space = FockSpace(2, 2)
    amps = np.zeros(4, dtype=complex)
    amps[space.index((0, 1))] = 0.6
    amps[space.index((1, 0))] = 0.8
    psi = PureState(space, amps)
    exact = apply_channel(pure_to_density(psi),
                          balanced_damping_channel(space, (0, 1), args.gamma))

    print(f"gamma = {args.gamma}")
    print(f"{'shots':>8} {'trace distance':>15} {'5/sqrt(N)':>11}")
    for k in range(2, args.max_exponent + 1):
        shots = 10 ** k
        cfg = TrajectoryConfig(shots=shots, seed=args.seed, steps=1,
                               loss_model=Exponential(args.gamma))
        ens = run_ensemble(psi, None, cfg)
        d = trace_distance(ens.avg_density_matrix, exact)
        print(f"{shots:>8} {d:>15.6f} {5 / np.sqrt(shots):>11.6f}")


if __name__ == "__main__":
    main()
