"""Command line entry point ``monodromic``.

Every subcommand reads a problem document (file path or stdin) and prints a
report. Exit codes: 0 analysis completed, 2 bad input, 3 hypothesis violation.
"""

from __future__ import annotations

import argparse
import sys
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .blowup import BlowupError, NonMonodromicError, polar_blowup
from .field import InputError
from .newton import DegenerateDiagramError, newton_diagram
from .oracle import OracleConfig, OracleError, integrate_poincare
from .pipeline import (
    EXIT_HYPOTHESIS,
    EXIT_INPUT,
    EXIT_OK,
    REPORT_SCHEMA_VERSION,
    StageError,
    WeightRun,
    blowup_summary,
    diagram_summary,
    run_pipeline,
    theta_summary,
)
from .problem import ProblemSpec
from .report import FORMATS, emit_report


def _weights(text: str) -> List[Tuple[int, int]]:
    out = []
    for chunk in text.split(";"):
        try:
            p, q = (int(v) for v in chunk.split(","))
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"weights must look like 'p,q' or 'p,q;p,q', got {text!r}") from exc
        if p <= 0 or q <= 0:
            raise argparse.ArgumentTypeError("weights must be positive")
        out.append((p, q))
    return out


def _floats(text: str) -> List[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}") from exc
    if not vals or any(v <= 0 for v in vals):
        raise argparse.ArgumentTypeError("radii must be positive")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", nargs="?", default="-", help="problem JSON file ('-' or omitted: stdin)")
    common.add_argument("--weights", type=_weights, help="weights to analyze, e.g. 1,1 or '1,1;1,3'")
    common.add_argument("--truncation", type=int, help="series truncation order N")
    common.add_argument("--radii", type=_floats, help="sample radii, e.g. 0.02,0.04,0.08")
    common.add_argument("--tol", type=float, help="tolerance for the constancy of G")
    common.add_argument("--format", choices=FORMATS, default="json", dest="fmt")
    common.add_argument("--out", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="monodromic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("diagram", parents=[common], help="Newton diagram and its weights")
    sub.add_parser("blowup", parents=[common], help="weighted polar blow-up per weight")
    sub.add_parser("theta", parents=[common], help="characteristic directions and the zero set of Theta")
    sub.add_parser("poincare", parents=[common], help="formal return map and classification (no oracle)")
    sub.add_parser("oracle", parents=[common], help="numerical return map at the sample radii")
    sub.add_parser("report", parents=[common], help="full analysis with oracle cross-checks")
    return parser


def _read_spec(args) -> ProblemSpec:
    if args.input == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(args.input, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {args.input}: {exc.strerror}") from exc
    spec = ProblemSpec.loads(text)
    o = spec.options
    if args.truncation is not None:
        if args.truncation < 2:
            raise InputError("truncation must be at least 2")
        o.truncation = args.truncation
    if args.radii:
        o.radii = args.radii
    if args.tol is not None:
        o.tolerances["g"] = args.tol
    if args.weights:
        o.weights = args.weights
    if args.command == "poincare":
        o.oracle = False
    return spec


def _header(spec: ProblemSpec) -> Dict[str, Any]:
    return {"schema_version": REPORT_SCHEMA_VERSION, "name": spec.name, "params": dict(spec.params),
            "truncation": spec.options.truncation}


def _per_weight(spec: ProblemSpec, stage) -> Tuple[Dict[str, Any], int]:
    """Run ``stage(X, p, q, run)`` for every selected weight, collecting errors."""
    X = spec.field()
    out = _header(spec)
    errors: List[StageError] = []
    chosen = spec.options.weights
    try:
        diag = newton_diagram(X)
        out["diagram"] = diagram_summary(diag)
        chosen = chosen or list(diag.weights)
    except DegenerateDiagramError as exc:
        errors.append(StageError("diagram", "DegenerateDiagram", str(exc), True))
    runs = []
    for p, q in chosen or []:
        run = WeightRun((p, q))
        try:
            stage(X, p, q, run)
        except NonMonodromicError as exc:
            run.errors.append(StageError("blowup", "NonMonodromic", str(exc), True))
        except BlowupError as exc:
            run.errors.append(StageError("blowup", type(exc).__name__, str(exc), True))
        except OracleError as exc:
            run.errors.append(StageError("oracle", "OracleError", str(exc)))
        runs.append(run)
    if not chosen:
        errors.append(StageError("diagram", "NoWeights", "no weight selected"))
    out["weights"] = [r.as_dict() for r in runs]
    out["errors"] = [e.as_dict() for e in errors]
    violated = any(e.hypothesis for e in errors) or not runs or all(
        any(e.hypothesis for e in r.errors) for r in runs)
    code = EXIT_HYPOTHESIS if violated else EXIT_OK
    out["exit_code"] = code
    return out, code


def _blowup_stage(X, p, q, run):
    run.data["blowup"] = blowup_summary(polar_blowup(X, p, q))


def _theta_stage(X, p, q, run):
    pe = polar_blowup(X, p, q)
    run.data["blowup"] = blowup_summary(pe)
    run.data["theta"] = theta_summary(pe)


def _oracle_stage(radii):
    def stage(X, p, q, run):
        pe = polar_blowup(X, p, q)
        run.data["blowup"] = blowup_summary(pe)
        cfg = OracleConfig(rho_max=1.0)
        for r0 in radii:
            try:
                o = integrate_poincare(pe, r0, cfg)
            except OracleError as exc:
                run.errors.append(StageError("oracle", "OracleError", f"rho0 = {r0}: {exc}"))
                continue
            run.sweep.append({"rho0": r0, "pi_oracle": o.pi_value, "pi_prime": o.pi_prime,
                              "I": o.I_value, "exp_I": o.exp_I, "steps": o.steps,
                              "error_estimate": o.error_estimate})
            run.data.setdefault("diagnostics", []).extend(o.diagnostics)

    return stage


def _diagram_only(spec: ProblemSpec) -> Tuple[Dict[str, Any], int]:
    out = _header(spec)
    try:
        out["diagram"] = diagram_summary(newton_diagram(spec.field()))
        out["errors"], code = [], EXIT_OK
    except DegenerateDiagramError as exc:
        out["errors"] = [StageError("diagram", "DegenerateDiagram", str(exc), True).as_dict()]
        code = EXIT_HYPOTHESIS
    out["weights"], out["exit_code"] = [], code
    return out, code


def run_command(args) -> Tuple[Dict[str, Any], int]:
    spec = _read_spec(args)
    if args.command == "diagram":
        return _diagram_only(spec)
    if args.command == "blowup":
        return _per_weight(spec, _blowup_stage)
    if args.command == "theta":
        return _per_weight(spec, _theta_stage)
    if args.command == "oracle":
        return _per_weight(spec, _oracle_stage(spec.options.radii))
    rep = run_pipeline(spec)
    return rep.data, rep.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        data, code = run_command(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    payload = emit_report(data, args.fmt)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
