"""Command-line entry point.

Exit codes: 0 success, 2 bad input, 3 solver failure, 4 validation failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from pathlib import Path

from . import braidcore, combinatorics, spectral
from .braidcore import BraidError, BraidWord, format_braid
from .combinatorics import Composition, SignSequence

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_SOLVER = 3
EXIT_VALIDATION = 4


class BadInput(ValueError):
    pass


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _dump_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(args, text: str) -> None:
    if args.out and args.command not in ("solve",):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _parse_omega(text: str) -> SignSequence:
    try:
        return SignSequence.parse(text)
    except ValueError as exc:
        raise BadInput(str(exc)) from exc


def _parse_braid(text: str, strands: int | None) -> BraidWord:
    """``s1 s2' s3`` or signed integers ``1,-2,3``."""
    try:
        if re.fullmatch(r"[\s,+-]*\d[\d\s,+-]*", text):
            letters = tuple(int(tok) for tok in text.replace(",", " ").split())
            n = strands or max((abs(a) for a in letters), default=1) + 1
            return BraidWord(n, letters)
        return BraidWord.parse(text, strands)
    except (ValueError, BraidError) as exc:
        raise BadInput(str(exc)) from exc


# --------------------------------------------------------------------------
# commands

def cmd_compositions(args) -> int:
    N = args.N
    try:
        comps = combinatorics.enumerate_compositions(N - 1)
        reps = combinatorics.class_representatives(N)
    except ValueError as exc:
        raise BadInput(str(exc)) from exc
    formula = combinatorics.class_count_formula(N)
    if args.format == "csv":
        rows = [[str(m), str(combinatorics.theta(m)),
                 str(combinatorics.canonical_representative(combinatorics.theta(m)))] for m in comps]
        _emit(args, _dump_csv(["composition", "omega", "class_representative"], rows))
    else:
        out = {
            "N": N,
            "compositions": [{"parts": m.to_json(), "omega": str(combinatorics.theta(m))} for m in comps],
            "class_representatives": [str(w) for w in reps],
            "class_count": len(reps),
            "class_count_formula": formula,
        }
        _emit(args, _dump_json(out))
    return EXIT_OK


def cmd_table1(args) -> int:
    if not 3 <= args.N_max <= combinatorics.DEFAULT_STRAND_CAP:
        raise BadInput(f"N_max must lie in [3, {combinatorics.DEFAULT_STRAND_CAP}]")
    surveys = [spectral.extremal_survey(N, args.tol) for N in range(3, args.N_max + 1)]
    if args.format == "json":
        text = _dump_json([s.to_json() for s in surveys])
    else:
        rows = [[s.N, ";".join(str(m) for m in s.argmin), f"{s.lambda_min:.6f}",
                 ";".join(str(m) for m in s.argmax), f"{s.lambda_max:.6f}"] for s in surveys]
        text = _dump_csv(["N", "argmin", "lambda_min", "argmax", "lambda_max"], rows)
    _emit(args, text)
    if args.out:
        from .plotting import plot_table
        plot_table(surveys, Path(args.out).with_suffix(".svg"))
    return EXIT_OK


def cmd_stretch(args) -> int:
    try:
        m = Composition.parse(args.composition)
    except ValueError as exc:
        raise BadInput(str(exc)) from exc
    rep = spectral.stretch_factor(m, args.tol)
    out = rep.to_json()
    if rep.polynomial is not None:
        out["polynomial_text"] = str(rep.polynomial)
    _emit(args, _dump_json(out))
    return EXIT_OK


def cmd_classify(args) -> int:
    omega = _parse_omega(args.omega)
    kind = spectral.classify(omega)
    out = {
        "omega": str(omega),
        "classification": kind,
        "class_representative": str(combinatorics.canonical_representative(omega)),
        "loop_count": combinatorics.loop_count(omega),
        "primitive_braid": format_braid(braidcore.alpha(omega)),
    }
    if kind == spectral.PSEUDO_ANOSOV:
        rep = spectral.stretch_factor_for(omega, args.tol)
        out["composition"] = rep.composition.to_json()
        out["lambda"] = rep.value
    _emit(args, _dump_json(out))
    return EXIT_OK


def _problem(args, omega):
    from .choreography import ChoreographyProblem
    kwargs = {"M": args.grid}
    if args.tol is not None and args.tol_given:
        kwargs["gradient_tol"] = args.tol
    try:
        return ChoreographyProblem(omega, **kwargs)
    except ValueError as exc:
        raise BadInput(str(exc)) from exc


def cmd_solve(args) -> int:
    from .choreography import CollisionError, solve
    from .plotting import plot_trajectory
    omega = _parse_omega(args.omega)
    if omega.strands != args.N:
        raise BadInput(f"omega {omega} has {omega.strands} strands, expected N = {args.N}")
    problem = _problem(args, omega)
    try:
        traj = solve(problem, seed=args.seed)
    except CollisionError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    out = Path(args.out or f"choreography_N{args.N}_{str(omega).replace('+', 'p').replace('-', 'm')}.json")
    traj.save(out)
    plot_trajectory(traj, out.with_suffix(".svg"))
    summary = {
        "file": str(out),
        "N": traj.N,
        "omega": str(omega),
        "M": traj.M,
        "action": traj.action,
        "gradient_norm": traj.gradient_norm,
        "converged": traj.converged,
        "validation_passed": traj.validation["passed"],
    }
    sys.stdout.write(_dump_json(summary))
    if not traj.converged:
        print(f"solver failure: gradient norm {traj.gradient_norm:.3e} above "
              f"{problem.gradient_tol:.1e}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK if traj.validation["passed"] else EXIT_VALIDATION


def _load(path):
    from .choreography import Trajectory
    try:
        return Trajectory.load(path)
    except (OSError, ValueError, KeyError) as exc:
        raise BadInput(f"cannot read trajectory {path}: {exc}") from exc


def cmd_verify(args) -> int:
    from .choreography import ChoreographyProblem, validate
    from .extract import AmbiguousCrossing, verify_braid_type
    traj = _load(args.file)
    report = validate(traj, ChoreographyProblem(traj.omega, traj.M))
    out = {"validation": report.to_json()}
    try:
        braid = verify_braid_type(traj)
        out["braid"] = braid.to_json()
        ok = report.passed and braid.passed
    except AmbiguousCrossing as exc:
        out["braid"] = {"error": str(exc), "passed": False}
        ok = False
    out["passed"] = ok
    _emit(args, _dump_json(out))
    return EXIT_OK if ok else EXIT_VALIDATION


def cmd_extract(args) -> int:
    from .extract import AmbiguousCrossing, crossing_events, extract_braid
    traj = _load(args.file)
    try:
        word = extract_braid(traj)
        events = crossing_events(traj)
    except AmbiguousCrossing as exc:
        print(f"extraction failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    out = {
        "word": format_braid(word),
        "letters": list(word.letters),
        "events": [{"time": e.time, "strands": list(e.strands), "letter": e.letter} for e in events],
    }
    _emit(args, _dump_json(out))
    return EXIT_OK


def cmd_growth(args) -> int:
    b = _parse_braid(args.word, args.strands)
    kwargs = {"tol": args.tol} if args.tol_given else {}
    g = braidcore.growth_rate(b, method=args.method, **kwargs)
    out = {
        "word": format_braid(b),
        "strands": b.strands,
        "method": g.method,
        "growth_rate": g.value,
        "iterations": g.iterations,
        "converged": g.converged,
    }
    _emit(args, _dump_json(out))
    return EXIT_OK


# --------------------------------------------------------------------------
# parser

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol", type=float, default=None,
                   help="numeric tolerance: root enclosure width, solver gradient norm, "
                        "or growth convergence, depending on the command")
    p.add_argument("--grid", type=int, default=256, metavar="M", help="grid points per unit time")
    p.add_argument("--format", choices=["json", "csv"], default=None)
    p.add_argument("--out", default=None, help="output file (figures are written next to it)")
    p.add_argument("--seed", type=int, default=0, help="seed for the initial loop perturbation")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="choreobraid", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compositions", parents=[common], help="compositions, sign sequences, classes")
    p.add_argument("N", type=int)
    p.set_defaults(func=cmd_compositions, default_format="json")

    p = sub.add_parser("table1", parents=[common], help="smallest and largest stretch factors")
    p.add_argument("N_max", type=int, nargs="?", default=10)
    p.set_defaults(func=cmd_table1, default_format="csv")

    p = sub.add_parser("stretch", parents=[common], help="stretch factor of beta_m")
    p.add_argument("composition", help="e.g. 1,2")
    p.set_defaults(func=cmd_stretch, default_format="json")

    p = sub.add_parser("classify", parents=[common], help="braid type of a sign sequence")
    p.add_argument("omega", help="e.g. +-+")
    p.set_defaults(func=cmd_classify, default_format="json")

    p = sub.add_parser("solve", parents=[common], help="compute a choreography")
    p.add_argument("N", type=int)
    p.add_argument("omega")
    p.set_defaults(func=cmd_solve, default_format="json")

    p = sub.add_parser("verify", parents=[common], help="validate a trajectory and its braid")
    p.add_argument("file")
    p.set_defaults(func=cmd_verify, default_format="json")

    p = sub.add_parser("extract", parents=[common], help="braid word of a trajectory")
    p.add_argument("file")
    p.set_defaults(func=cmd_extract, default_format="json")

    p = sub.add_parser("growth", parents=[common], help="growth rate of a braid word")
    p.add_argument("word", help="s1 s2' s3  or  1,-2,3")
    p.add_argument("--strands", type=int, default=None)
    p.add_argument("--method", choices=sorted(braidcore.GROWTH_METHODS), default="curves")
    p.set_defaults(func=cmd_growth, default_format="json")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.tol_given = args.tol is not None
    if args.tol is None:
        args.tol = 1e-12
    if args.format is None:
        args.format = args.default_format
    try:
        return args.func(args)
    except (BadInput, BraidError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
