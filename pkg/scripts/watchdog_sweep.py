#!/usr/bin/env python3
"""Sweep link length for quadratic loss, with and without per-step
regeneration, and print the success probabilities side by side."""

import argparse

import numpy as np

from dualrail.regen import DualRailQubit, LinkConfig, transmit
from dualrail.trajectories import Quadratic


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", type=float, default=0.001)
    ap.add_argument("--max-steps", type=int, default=20)
    ap.add_argument("--shots", type=int, default=50000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    qubit = DualRailQubit(1 / np.sqrt(2), 1 / np.sqrt(2))
    model = Quadratic(args.eps)
    print(f"eps = {args.eps}, shots = {args.shots}")
    print(f"{'n':>4} {'plain (exact)':>14} {'plain (mc)':>12} "
          f"{'regen (exact)':>14} {'regen (mc)':>12}")
    for n in range(1, args.max_steps + 1):
        rows = []
        for every in (0, 1):
            link = LinkConfig(n, model, every)
            rows.append(transmit(qubit, link, mode="exact").p_success)
            rows.append(transmit(qubit, link, mode="trajectory",
                                 shots=args.shots,
                                 seed=args.seed + n).p_success)
        print(f"{n:>4} {rows[0]:>14.6f} {rows[1]:>12.5f} "
              f"{rows[2]:>14.6f} {rows[3]:>12.5f}")


if __name__ == "__main__":
    main()
