"""Command-line front end: experiment runners and analytic calculators.

Exit codes: 0 success, 2 flag validation, 3 out-of-domain parameters or
simulation errors, 4 file I/O failures.

Reports are JSON (canonical, deterministic for a fixed seed) or CSV for the
scalar entries.  Wall-clock timing is opt-in (--timing) because it would
break byte-level reproducibility of the reports.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import elements, regen, trajectories
from .fock import (DensityMatrix, FockError, FockSpace, PureState,
                   density_to_json, fidelity, pure_to_density)
from .regen import DualRailQubit, LinkConfig
from .trajectories import Exponential, Quadratic, TrajectoryConfig

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_IO = 4


# ---------------------------------------------------------------------------
# Analytic oracles

def classical_visibility(gamma_a: float, gamma_b: float) -> float:
    """Fringe visibility of a classical interferometer with arm losses
    gamma_a, gamma_b (field amplitudes scale by e^{-gamma/2}).

    V = 2 e^{-(ga+gb)/2} / (e^{-ga} + e^{-gb}); equals 1 iff the loss is
    balanced.
    """
    if gamma_a < 0 or gamma_b < 0:
        raise ValueError("losses must be >= 0")
    return float(2 * np.exp(-(gamma_a + gamma_b) / 2)
                 / (np.exp(-gamma_a) + np.exp(-gamma_b)))


def visibility_numeric(gamma_a: float, gamma_b: float,
                       points: int = 10001) -> float:
    """Visibility by brute-force extremization of the output intensity over a
    phase-delay grid (independent check of the closed form).  The grid has an
    even number of intervals so 0 and pi are sampled exactly."""
    x = np.exp(-gamma_a / 2)
    y = np.exp(-gamma_b / 2)
    phi = np.linspace(0.0, 2 * np.pi, points)
    intensity = np.abs(x * np.exp(1j * phi) + y) ** 2
    i_max, i_min = intensity.max(), intensity.min()
    return float((i_max - i_min) / (i_max + i_min))


def erasure_capacity(alpha: float) -> tuple[float, float]:
    """(classical bits, quantum lower bound in qubits) for a binary erasure
    channel with arrival probability alpha."""
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    return float(alpha), float(alpha / 2)


# ---------------------------------------------------------------------------
# Helpers

def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise ValueError(f"cannot parse complex amplitude {text!r}") from exc


def _qubit_from_args(args) -> DualRailQubit:
    c0 = _parse_complex(args.c0)
    c1 = _parse_complex(args.c1)
    norm = np.sqrt(abs(c0) ** 2 + abs(c1) ** 2)
    if abs(norm - 1.0) > 1e-9:
        if not args.allow_renormalize:
            raise ValueError(
                f"|c0|^2 + |c1|^2 = {norm**2:.6g} != 1; pass "
                "--allow-renormalize to normalize")
        c0, c1 = c0 / norm, c1 / norm
    return DualRailQubit(c0, c1)


def _cnum(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _condition_on_photon(rho: DensityMatrix) -> tuple[DensityMatrix, float]:
    """Condition on at least one photon being registered."""
    space = rho.space
    mask = np.array([1.0 if sum(occ) > 0 else 0.0
                     for occ in space.occupations()])
    mat = mask[:, None] * rho.matrix * mask[None, :]
    p = float(np.real(np.trace(mat)))
    if p < elements.IMPOSSIBLE_TOL:
        raise FockError("no-photon probability is 1; nothing to condition on")
    return DensityMatrix(space, mat / p), p


# ---------------------------------------------------------------------------
# Commands (each returns the results dict)

def cmd_visibility(args) -> dict:
    v = classical_visibility(args.gamma_a, args.gamma_b)
    return {
        "visibility": v,
        "visibility_numeric": visibility_numeric(args.gamma_a, args.gamma_b),
        "balanced": args.gamma_a == args.gamma_b,
    }


def cmd_capacity(args) -> dict:
    bits, qubits = erasure_capacity(args.alpha)
    return {"alpha": args.alpha, "classical_bits": bits,
            "quantum_lower_bound_qubits": qubits}


def cmd_interferometer(args) -> dict:
    qubit = _qubit_from_args(args)
    space = FockSpace(2, args.cutoff)
    psi = regen.encode(qubit.c0, qubit.c1, cutoff=args.cutoff)
    rho = pure_to_density(psi)
    loss = elements.Loss(regen.SIGNAL_MODES, args.gamma)
    rho, _ = elements.apply_element(rho, loss)
    rho, _ = elements.run_circuit(rho, regen.decoding_circuit(space, qubit))
    conditional, p_photon = _condition_on_photon(rho)
    target = PureState.basis(space, (1, 0))
    return {
        "gamma": args.gamma,
        "p_photon_detected": p_photon,
        "conditional_fidelity_10": fidelity(target, conditional),
        "conditional_density_matrix": density_to_json(conditional)["matrix"],
    }


def cmd_channel(args) -> dict:
    qubit = _qubit_from_args(args)
    psi = regen.encode(qubit.c0, qubit.c1, cutoff=args.cutoff)
    rho = pure_to_density(psi)
    loss = elements.Loss(regen.SIGNAL_MODES, args.gamma)
    rho, _ = elements.apply_element(rho, loss)
    space = rho.space
    i01, i10 = space.index((0, 1)), space.index((1, 0))
    return {
        "gamma": args.gamma,
        "survival": float(np.exp(-args.gamma)),
        "population_00": float(np.real(rho.matrix[0, 0])),
        "coherence_01_10": _cnum(complex(rho.matrix[i01, i10])),
        "density_matrix": density_to_json(rho)["matrix"],
    }


def cmd_regenerate(args) -> dict:
    qubit = _qubit_from_args(args)
    psi = regen.encode(qubit.c0, qubit.c1, cutoff=args.cutoff)
    if args.mode == "exact":
        rho = pure_to_density(psi)
        rho, _ = elements.apply_element(
            rho, elements.Loss(regen.SIGNAL_MODES, args.gamma))
        result = regen.regenerate(rho)
        fid = fidelity(psi, result.accepted_state)
        return {
            "mode": "exact", "gamma": args.gamma,
            "p_success": result.p_accept, "p_reject": result.p_reject,
            "fidelity": fid,
        }
    config = TrajectoryConfig(shots=args.shots, seed=args.seed, steps=1,
                              loss_model=Exponential(args.gamma))
    ensemble = trajectories.run_ensemble(psi, None, config)
    return {
        "mode": "trajectory", "gamma": args.gamma,
        "shots": args.shots, "seed": args.seed,
        "p_success": ensemble.survival_fraction,
        "fidelity": 1.0,   # survivors carry the exact input qubit
    }


def _loss_model_from_args(args):
    if args.eps is not None:
        return Quadratic(args.eps)
    return Exponential(args.gamma)


def cmd_transmit(args) -> dict:
    qubit = _qubit_from_args(args)
    link = LinkConfig(args.segments, _loss_model_from_args(args),
                      args.regenerate_every)
    report = regen.transmit(qubit, link, mode=args.mode, shots=args.shots,
                            seed=args.seed, cutoff=args.cutoff)
    return report.to_json()


def cmd_trajectories(args) -> dict:
    qubit = _qubit_from_args(args)
    psi = regen.encode(qubit.c0, qubit.c1, cutoff=args.cutoff)
    circuit = None
    if args.circuit is not None:
        circuit = elements.load_circuit(args.circuit)
        if circuit.space != psi.space:
            raise ValueError(
                "circuit space does not match the 2-mode encoded qubit "
                f"(cutoff {args.cutoff})")
    config = TrajectoryConfig(shots=args.shots, seed=args.seed,
                              steps=args.steps,
                              loss_model=_loss_model_from_args(args))
    ensemble = trajectories.run_ensemble(psi, circuit, config)
    return trajectories.ensemble_to_json(ensemble)


def cmd_watchdog(args) -> dict:
    n, eps = args.steps, args.eps
    model = Quadratic(eps)
    results = {
        "eps": eps,
        "steps": n,
        "closed_form": {
            "unregenerated": regen.success_probability(n, model, False),
            "regenerated": regen.success_probability(n, model, True),
        },
        "expected_trials": {
            "unregenerated": regen.expected_trials(n, model, False),
            "regenerated": regen.expected_trials(n, model, True),
        },
    }
    qubit = DualRailQubit(1 / np.sqrt(2), 1 / np.sqrt(2))
    exact = {}
    for label, every in (("unregenerated", 0), ("regenerated", 1)):
        link = LinkConfig(n, model, every)
        exact[label] = regen.transmit(qubit, link, mode="exact").p_success
    results["exact_simulation"] = exact
    if args.shots is not None:
        sim = {}
        for label, every in (("unregenerated", 0), ("regenerated", 1)):
            link = LinkConfig(n, model, every)
            sim[label] = regen.transmit(qubit, link, mode="trajectory",
                                        shots=args.shots,
                                        seed=args.seed).p_success
        results["trajectory_simulation"] = sim
        results["shots"] = args.shots
        results["seed"] = args.seed
    return results


# ---------------------------------------------------------------------------
# Argument parsing and dispatch

def _add_qubit_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--c0", default="0.7071067811865476",
                   help="amplitude of |01> (complex literal, e.g. 0.6+0.0j)")
    p.add_argument("--c1", default="0.7071067811865476",
                   help="amplitude of |10>")
    p.add_argument("--allow-renormalize", action="store_true",
                   help="normalize (c0, c1) instead of rejecting them")


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None, help="write report to this path")
    p.add_argument("--timing", action="store_true",
                   help="include wall-clock duration in the report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dualrail",
        description="Dual-rail qubit regeneration experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("visibility", help="classical interferometer visibility")
    p.add_argument("--gamma-a", type=float, required=True)
    p.add_argument("--gamma-b", type=float, required=True)
    _add_common_flags(p)
    p.set_defaults(func=cmd_visibility)

    p = sub.add_parser("capacity", help="binary erasure channel capacity")
    p.add_argument("--alpha", type=float, required=True)
    _add_common_flags(p)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("interferometer",
                       help="single-photon interferometer with balanced loss")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--cutoff", type=int, default=3)
    _add_qubit_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_interferometer)

    p = sub.add_parser("channel", help="balanced amplitude damping channel")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--cutoff", type=int, default=3)
    _add_qubit_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("regenerate", help="one QND regeneration station")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--mode", choices=("exact", "trajectory"), default="exact")
    p.add_argument("--shots", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cutoff", type=int, default=3)
    _add_qubit_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_regenerate)

    p = sub.add_parser("transmit", help="multi-segment transmission link")
    p.add_argument("--segments", type=int, required=True)
    p.add_argument("--gamma", type=float, default=0.0,
                   help="exponential loss per segment")
    p.add_argument("--eps", type=float, default=None,
                   help="quadratic loss parameter (overrides --gamma)")
    p.add_argument("--regenerate-every", type=int, default=0)
    p.add_argument("--mode", choices=("exact", "trajectory"), default="exact")
    p.add_argument("--shots", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cutoff", type=int, default=2)
    _add_qubit_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_transmit)

    p = sub.add_parser("trajectories",
                       help="Monte-Carlo wavefunction ensemble")
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cutoff", type=int, default=2)
    p.add_argument("--circuit", default=None,
                   help="circuit JSON file to run instead of plain loss")
    _add_qubit_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_trajectories)

    p = sub.add_parser("watchdog",
                       help="quadratic loss with and without regeneration")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    _add_common_flags(p)
    p.set_defaults(func=cmd_watchdog)

    return parser


def _emit(report: dict, args) -> None:
    if args.output == "json":
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    else:
        lines = ["key,value"]

        def _walk(prefix, obj):
            if isinstance(obj, dict):
                for k in sorted(obj):
                    _walk(f"{prefix}.{k}" if prefix else str(k), obj[k])
            elif isinstance(obj, (int, float, bool, str)):
                lines.append(f"{prefix},{obj}")
            # lists/matrices are JSON-only

        _walk("", report)
        text = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        results = args.func(args)
    except (FockError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    params = {k: v for k, v in vars(args).items()
              if k not in ("func", "output", "out", "timing") and v is not None}
    report = {"command": args.command, "parameters": params,
              "results": results}
    if args.timing:
        report["duration_s"] = time.monotonic() - started
    try:
        _emit(report, args)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
