"""Command-line front end: prepare, simulate, fixed-points, transform, verify.

Exit codes: 0 success, 1 input error, 2 numeric or tolerance failure,
3 sampled protocol failure. Output is JSON with floats at 17 significant digits.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import jsonio, preparation, protocols, spectral, verify
from .algebra import GateParams
from .dicke_space import FORMAT_VERSION, fidelity, state_from_json
from .errors import DegenerateRunError, DickeError, NumericError, SpectralError

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERIC = 2
EXIT_SAMPLED_FAILURE = 3

PREPARE_INFIDELITY = "preparation_roundtrip"


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; map that to the input-error code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _gate(text):
    try:
        return GateParams.parse(text)
    except DickeError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _tol_pair(text):
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance value {value!r} is not a number") from None


def _seed(text):
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _read_state(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None
    try:
        return state_from_json(data)
    except DickeError as exc:
        raise InputError(f"{path}: {exc}") from None


def _rng_info(args):
    rng = protocols.make_rng(args.seed)
    return rng, {
        "seed": args.seed,
        "nondeterministic": args.seed is None,
        "rng_algorithm": protocols.RNG_ALGORITHM,
    }


def _tolerances(args):
    overrides = dict(args.tol or [])
    try:
        return verify.load_tolerances(overrides)
    except DickeError as exc:
        raise InputError(str(exc)) from None


# ---------------------------------------------------------------------------
# commands

def cmd_prepare(args):
    tol = _tolerances(args)
    target = _read_state(args.target)
    if not target.is_normalized:
        raise InputError("target state must be normalized")
    schedule = preparation.compile_schedule(target)
    out = {
        "format_version": FORMAT_VERSION,
        "schedule": schedule.to_json(),
        "roots": jsonio.complex_pairs(schedule.finite_roots),
        "infinity_count": schedule.infinity_count,
        "root_residuals": [float(r) for r in schedule.residuals],
        "mode": "sampled" if args.sample else "exact",
    }
    code = EXIT_OK
    if args.sample:
        rng, info = _rng_info(args)
        out.update(info)
        result = preparation.run_schedule(schedule, "sampled", rng)
    else:
        result = preparation.run_schedule(schedule)
    out["probability"] = result.cumulative_probability
    out["step_probabilities"] = result.step_probabilities
    out["completed"] = result.completed
    out["failed_step"] = result.failed_step
    if result.completed:
        out["fidelity"] = fidelity(target, result.state)
        out["state"] = result.state.to_json()
        if 1 - out["fidelity"] > tol[PREPARE_INFIDELITY]:
            code = EXIT_NUMERIC
    else:
        out["fidelity"] = None
        out["state"] = None
        code = EXIT_SAMPLED_FAILURE
    return code, out


def cmd_simulate(args):
    state = _read_state(args.state)
    if not state.is_normalized:
        raise InputError("input state must be normalized")
    mode = "sampled" if args.sample else "exact"
    rng, info = _rng_info(args) if args.sample else (None, {"seed": None, "nondeterministic": False, "rng_algorithm": None})
    if args.protocol == "both":
        log = protocols.iterate_composed(state, args.p1, args.p2, args.rounds, mode, rng, order=args.order)
    else:
        g = args.p1 if args.protocol == "1" else args.p2
        log = protocols.iterate_protocol(state, int(args.protocol), g, args.rounds, mode, rng)
    out = {"format_version": FORMAT_VERSION, "protocol": args.protocol}
    out.update(log.to_json())
    out.update(info)
    return (EXIT_OK if log.completed else EXIT_SAMPLED_FAILURE), out


def cmd_fixed_points(args):
    if args.n < 0:
        raise InputError("--n must be nonnegative")
    basis = spectral.build_fixed_point_basis(args.n, args.p1, args.p2)
    ang = basis.angles
    gate = spectral.unitary_case_gate(args.p1, args.p2)
    out = {
        "format_version": FORMAT_VERSION,
        "n": args.n,
        "method": basis.method,
        "eigenvalues": jsonio.complex_pairs(basis.eigenvalues),
        "basis_columns": [jsonio.complex_pairs(basis.B[:, j]) for j in range(args.n + 1)],
        "angles": None if ang is None else {"theta": [ang.theta.real, ang.theta.imag], "phi": [ang.phi.real, ang.phi.imag]},
        "unitary_gate": None if gate is None else {"mu": [gate[0].real, gate[0].imag], "nu": [gate[1].real, gate[1].imag]},
        "diagonalization_residual": basis.residual,
        "condition_number": float(np.linalg.cond(basis.B)),
    }
    return EXIT_OK, out


def cmd_transform(args):
    state = _read_state(args.state)
    return EXIT_OK, spectral.hadamard_transform(state).to_json()


def cmd_verify(args):
    tol = _tolerances(args)
    report = verify.run_suite(args.suite, args.max_n, args.seed if args.seed is not None else 0, tol)
    return (EXIT_OK if report["passed"] else EXIT_NUMERIC), report


def build_parser():
    parser = _Parser(prog="dicke-protocols", description=__doc__.splitlines()[0])
    parser.add_argument("--output", "-o", help="write JSON here instead of stdout")
    parser.add_argument(
        "--tol",
        action="append",
        type=_tol_pair,
        metavar="NAME=VALUE",
        help=f"override a named tolerance ('*' for all); defaults also read from ${verify.TOLERANCE_ENV}",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("prepare", help="compile and run a Protocol-2 preparation schedule")
    p.add_argument("--target", required=True, help="state JSON file")
    p.add_argument("--sample", action="store_true", help="draw measurement outcomes instead of post-selecting")
    p.add_argument("--seed", type=_seed)
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("simulate", help="run protocol rounds on a state")
    p.add_argument("--state", required=True, help="state JSON file")
    p.add_argument("--protocol", choices=("1", "2", "both"), default="both")
    p.add_argument("--rounds", type=int, default=1)
    p.add_argument("--p1", type=_gate, default=GateParams.hadamard(), help="Protocol-1 gate 'alpha,beta'")
    p.add_argument("--p2", type=_gate, default=GateParams.hadamard(), help="Protocol-2 gate 'gamma,delta'")
    p.add_argument("--order", choices=("p1_first", "p2_first"), default="p1_first")
    p.add_argument("--sample", action="store_true")
    p.add_argument("--seed", type=_seed)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fixed-points", help="fixed-point basis of the composed protocol map")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p1", type=_gate, required=True)
    p.add_argument("--p2", type=_gate, required=True)
    p.set_defaults(func=cmd_fixed_points)

    p = sub.add_parser("transform", help="Hadamard transform of a symmetric state")
    p.add_argument("--state", required=True)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("verify", help="run the invariant suites")
    p.add_argument("--suite", choices=verify.SUITES, default="all")
    p.add_argument("--max-n", type=int, default=6)
    p.add_argument("--seed", type=_seed)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, payload = args.func(args)
    except (InputError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericError, SpectralError, DegenerateRunError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DickeError as exc:
        # remaining package errors come from invalid parameters (domain, non-physical gate, ...)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = jsonio.dumps(payload) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
