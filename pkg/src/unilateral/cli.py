"""Command-line interface: ``unilateral analyze | place | verify``.

Exit status is 0 on success, 1 when the numerical analysis fails or the
agreement falls below ``--threshold``, and 2 for malformed input.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .cone import TAU_LP, reachable_cone
from .exceptions import AnalysisError
from .greedy import controllable_subset, place_inputs
from .io import (InputFormatError, analysis_report, dump_report, load_system, placement_report,
                 report_header, to_dot, to_jsonable)
from .oracle import DEFAULT_HORIZONS, DEFAULT_SAMPLES, DEFAULT_STEPS, subset_agreement, sweep_agreement
from .spectral import EIG_TOL, TAU_ZERO, compute_spectrum, select_left_chains
from .subset import node_flags
from .system import InputMatrix

EXIT_OK, EXIT_ANALYSIS, EXIT_INPUT = 0, 1, 2

log = logging.getLogger("unilateral")


class _UsageError(Exception):
    pass


def _horizons(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad horizon list {text!r}") from None
    if not vals or any(v <= 0 for v in vals):
        raise argparse.ArgumentTypeError("horizons must be positive")
    return vals


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="unilateral", description="Reachability and input placement "
                                     "for networks driven by sign-constrained inputs.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("input", help="system file: JSON {A, B, m} or dense CSV matrix")
        p.add_argument("-o", "--output", help="write the JSON report here (default: stdout)")
        p.add_argument("--tol-eig", type=float, default=EIG_TOL, help="eigenvalue clustering tolerance")
        p.add_argument("--tol-zero", type=float, default=TAU_ZERO, help="zero threshold for l^T B entries")
        p.add_argument("--tol-lp", type=float, default=TAU_LP, help="LP feasibility tolerance")

    p = sub.add_parser("analyze", help="cone, lineality and controllable node subset for a given B")
    common(p)
    p.add_argument("--inputs", help="input columns, e.g. '-e6,-e2' (overrides B in the file)")
    p.add_argument("--dot", help="also write a Graphviz file")

    p = sub.add_parser("place", help="greedy placement of m unilateral inputs")
    common(p)
    p.add_argument("-m", "--budget", type=int, help="number of input columns (default: m in the file)")
    p.add_argument("--override", help="columns forced at the first iterations, e.g. '-e6,-e2'")
    p.add_argument("--seed", type=int, help="break ties at random with this seed")
    p.add_argument("--dot", help="also write a Graphviz file")

    p = sub.add_parser("verify", help="compare the cone against the simulation oracle")
    common(p)
    p.add_argument("--inputs", help="input columns (overrides B in the file)")
    p.add_argument("--samples", type=_positive_int, default=DEFAULT_SAMPLES)
    p.add_argument("--horizon", type=_horizons, default=DEFAULT_HORIZONS, help="comma-separated horizons")
    p.add_argument("--steps", type=_positive_int, default=DEFAULT_STEPS)
    p.add_argument("--threshold", type=float, default=0.98, help="minimum agreement for exit status 0")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--subsets", action="store_true", help="also compare every node subset")
    return parser


def _tolerances(args) -> dict:
    return {"eig": args.tol_eig, "zero": args.tol_zero, "lp": args.tol_lp}


def _inputs(args, system) -> InputMatrix:
    if getattr(args, "inputs", None):
        try:
            B = InputMatrix.parse(args.inputs)
            B.check_nodes(system.A.shape[0])
        except ValueError as exc:
            raise InputFormatError(f"--inputs: {exc}") from None
        return B
    if system.B is None:
        raise InputFormatError("no input matrix: add a 'B' field or pass --inputs")
    if not len(system.B):
        raise InputFormatError("field 'B': at least one column is required")
    return system.B


def _emit(report: dict, args) -> None:
    text = dump_report(report, args.output)
    if args.output is None:
        print(text)


def cmd_analyze(args) -> int:
    system = load_system(args.input)
    B = _inputs(args, system)
    decomp = select_left_chains(compute_spectrum(system.A, tol=args.tol_eig), B, args.tol_zero)
    cone = reachable_cone(decomp, B, args.tol_zero, args.tol_lp)
    V1, Vs, Q, enlargement = controllable_subset(cone, args.tol_zero)
    _emit(analysis_report(system, B, cone, Q, V1, Vs, node_flags(cone), enlargement, _tolerances(args)), args)
    if args.dot:
        Path(args.dot).write_text(to_dot(system.A, B.driver_nodes, Vs))
    return EXIT_OK


def cmd_place(args) -> int:
    system = load_system(args.input)
    m = args.budget if args.budget is not None else system.m
    if m is None:
        raise _UsageError("input budget missing: pass -m or add an 'm' field")
    if m < 1:
        raise _UsageError(f"input budget must be at least 1, got {m}")
    try:
        result = place_inputs(system.A, m, override=args.override, seed=args.seed, tol=args.tol_eig,
                              tau_zero=args.tol_zero, tau_lp=args.tol_lp)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    _emit(placement_report(system, m, result, node_flags(result.cone), _tolerances(args)), args)
    if args.dot:
        Path(args.dot).write_text(to_dot(system.A, result.B.driver_nodes, result.Vs))
    return EXIT_OK


def cmd_verify(args) -> int:
    system = load_system(args.input)
    B = _inputs(args, system)
    rep = sweep_agreement(system.A, B, args.samples, args.horizon, args.steps, args.seed, args.tol_lp)
    out = {"header": report_header(_tolerances(args)), "input": {"A": system.A_raw, "B": B.to_json()},
           "agreement": rep.to_json(), "threshold": args.threshold}
    fraction = rep.fraction
    if args.subsets:
        s = subset_agreement(system.A, B, args.horizon, args.steps, args.seed, args.tol_lp)
        out["subset_agreement"] = {"fraction": s.fraction, "cases": s.cases, "disagreements": s.disagreements}
        fraction = min(fraction, s.fraction)
    out["passed"] = fraction >= args.threshold
    _emit(to_jsonable(out), args)
    return EXIT_OK if out["passed"] else EXIT_ANALYSIS


COMMANDS = {"analyze": cmd_analyze, "place": cmd_place, "verify": cmd_verify}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (InputFormatError, _UsageError) as exc:
        print(f"unilateral {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AnalysisError as exc:
        print(f"unilateral {args.command}: analysis failed: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS


if __name__ == "__main__":
    sys.exit(main())
