"""End-to-end analysis of one problem: diagram, blow-up, zero set of Theta, IIF, return map."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from .blowup import (
    BlowupError,
    CharacteristicDirectionError,
    IIFError,
    NonMonodromicError,
    PolarExpansion,
    polar_blowup,
    polar_iif,
)
from .field import InputError, VectorField
from .newton import DegenerateDiagramError, NewtonDiagram, newton_diagram
from .oracle import (
    DEFAULT_ETA_SAMPLES,
    OracleConfig,
    OracleError,
    estimate_eta,
    integrate_poincare,
    verify_fundamental,
)
from .poincare import (
    GConstantError,
    LogObstructionError,
    classify_singularity,
    compute_g_constant,
    compute_xi_pq,
    g_from_return_map,
    solve_fundamental_equation,
)
from .problem import ProblemSpec
from .theta import LambdaVerdict, check_lambda_pq, classify_theta_singularity

REPORT_SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_HYPOTHESIS = 3

_SUFFICIENT = {"linear", "quadratic", "descartes"}


def measured(value, error) -> Dict[str, Any]:
    return {"value": None if value is None else float(value), "error": None if error is None else float(error)}


@dataclass
class StageError:
    stage: str
    kind: str
    message: str
    hypothesis: bool = False

    def as_dict(self):
        return {"stage": self.stage, "kind": self.kind, "message": self.message, "hypothesis_violation": self.hypothesis}


def diagram_summary(d: NewtonDiagram) -> Dict[str, Any]:
    return {
        "vertices": [list(v) for v in d.vertices],
        "edges": [{"start": list(e.start), "end": list(e.end), "weight": list(e.weight)} for e in d.edges],
        "weights": [list(w) for w in d.weights],
    }


def blowup_summary(pe: PolarExpansion) -> Dict[str, Any]:
    return {
        "weight": [pe.p, pe.q],
        "r": pe.r,
        "orientation": pe.flip,
        "leading_angular_speed": str(pe.G[pe.r].to_sympy()),
        "leading_radial_speed": str(pe.F_k(pe.r).to_sympy()),
        "characteristic_directions": [
            {"angle": w.angle, "multiplicity": w.multiplicity} for w in pe.omega
        ],
        "diagnostics": list(pe.diagnostics),
    }


def lambda_status(res) -> str:
    if res.verdict == LambdaVerdict.EMPTY:
        if not res.evidence:
            return "proven (no characteristic directions)"
        if all(ev.method in _SUFFICIENT for ev in res.evidence):
            return "sufficient-condition"
        return "proven"
    if res.verdict == LambdaVerdict.NONEMPTY:
        return "failed (zero curve of angular speed found)"
    return "inconclusive"


def theta_summary(pe: PolarExpansion) -> Dict[str, Any]:
    res = check_lambda_pq(pe)
    points = []
    for ev, w in zip(res.evidence, pe.omega):
        entry = {
            "angle": ev.angle,
            "multiplicity": ev.multiplicity,
            "verdict": ev.verdict.value,
            "method": ev.method,
            "sampled_min_theta": ev.details.get("sampled_min"),
        }
        if "branches" in ev.details:
            entry["branches"] = ev.details["branches"]
        cls = classify_theta_singularity(pe, w)
        entry["normal_form"] = {"k": cls.k, "tag": cls.form_tag.value, "delta1": cls.delta1, "delta2": cls.delta2,
                                "delta1_third_derivative": cls.delta1_printed, "notes": cls.notes}
        points.append(entry)
    return {"verdict": res.verdict.value, "status": lambda_status(res), "reason": res.reason, "directions": points}


@dataclass
class WeightRun:
    weight: Tuple[int, int]
    data: Dict[str, Any] = field(default_factory=dict)
    hypotheses: Dict[str, str] = field(default_factory=dict)
    errors: List[StageError] = field(default_factory=list)
    sweep: List[Dict[str, float]] = field(default_factory=list)
    expansion: Optional[PolarExpansion] = None
    iif: Any = None
    series: Any = None
    classification: Any = None

    def as_dict(self) -> Dict[str, Any]:
        out = dict(self.data)
        out["weight"] = list(self.weight)
        out["hypotheses"] = dict(self.hypotheses)
        out["errors"] = [e.as_dict() for e in self.errors]
        out["sweep"] = list(self.sweep)
        return out


def analyze_weight(X: VectorField, p: int, q: int, spec: ProblemSpec) -> WeightRun:
    opts = spec.options
    run = WeightRun((p, q))
    H = run.hypotheses
    # blow-up
    try:
        pe = polar_blowup(X, p, q)
    except NonMonodromicError as exc:
        H["monodromic leading angular speed"] = "failed"
        run.errors.append(StageError("blowup", "NonMonodromic", str(exc), True))
        return run
    except (BlowupError, InputError) as exc:
        run.errors.append(StageError("blowup", type(exc).__name__, str(exc), True))
        return run
    run.expansion = pe
    H["monodromic leading angular speed"] = "passed"
    H["0 not in characteristic directions"] = "failed" if pe.zero_in_omega else "passed"
    run.data["blowup"] = blowup_summary(pe)
    # zero set of Theta
    try:
        th = theta_summary(pe)
        run.data["theta"] = th
        H["critical parameters excluded (Lambda_pq empty)"] = th["status"]
    except Exception as exc:  # noqa: BLE001 - reported, analysis continues
        H["critical parameters excluded (Lambda_pq empty)"] = "inconclusive"
        run.errors.append(StageError("theta", type(exc).__name__, str(exc)))
        th = {"verdict": LambdaVerdict.INCONCLUSIVE.value}
    lam_empty = th["verdict"] == LambdaVerdict.EMPTY.value
    # first-order angular integral (reported, never used to classify)
    try:
        xi = compute_xi_pq(pe)
        run.data["xi_pq"] = {**measured(xi.xi if xi.exists else None, xi.error_estimate),
                             "exists": xi.exists, "used_for_classification": False, "note": xi.note}
    except Exception as exc:  # noqa: BLE001
        run.errors.append(StageError("xi_pq", type(exc).__name__, str(exc)))
    # inverse integrating factor
    if not X.has_iif:
        H["inverse integrating factor supplied"] = "failed"
        run.errors.append(StageError("iif", "IIFError", "no inverse integrating factor supplied", True))
        return run
    H["inverse integrating factor supplied"] = "passed"
    try:
        iif = polar_iif(X, pe, opts.truncation)
    except IIFError as exc:
        run.errors.append(StageError("iif", "IIFError", str(exc), True))
        return run
    run.iif = iif
    run.data["iif"] = {
        "m": iif.m, "n": iif.n, "leading_exponent": str(iif.exponent),
        "section_series": None if iif.V0 is None else {str(k): str(v) for k, v in iif.V0.items()},
        "normalization": iif.normalization_constant,
        "diagnostics": list(iif.diagnostics),
    }
    if iif.m <= 0:
        cls = classify_singularity(None, iif)
        run.classification = cls
        run.data["classification"] = _classification_dict(cls)
        return run
    if iif.V0 is None:
        run.errors.append(StageError("poincare", "CharacteristicSection",
                                     "section direction phi = 0 is characteristic; rotate coordinates", True))
        return run
    H["V(0, rho) nonvanishing on the sampled ray"] = (
        "failed" if any("vanishes" in d for d in iif.diagnostics) else "passed")
    # formal return map
    try:
        ps = solve_fundamental_equation(iif.V0, iif.m, opts.truncation)
    except (LogObstructionError, ValueError) as exc:
        run.errors.append(StageError("poincare", type(exc).__name__, str(exc)))
        return run
    run.series = ps
    run.data["return_map"] = {
        "free_symbol": ps.symbol,
        "meaning": ps.g_meaning.value,
        "coefficients": {f"eta_{j}": str(c) for j, c in enumerate(ps.coeffs, start=1)},
        "exact_residual_through_order": ps.residual_order,
    }
    # the constant g
    tol = opts.tolerances.get("g", 1e-6)
    g_err = None
    try:
        gres = compute_g_constant(X, pe, iif, opts.radii, tol)
        ps.g_value, g_err = gres.g, gres.error_estimate
        case = "case (i): Lambda_pq empty" if lam_empty else "case (ii), constancy checked numerically only"
        run.data["g_constant"] = {**measured(gres.g, gres.error_estimate), "per_radius": gres.values,
                                  "radii": gres.radii, "spread": gres.deviation, "hypothesis_case": case}
        H["G constant across radii"] = "passed"
    except GConstantError as exc:
        H["G constant across radii"] = "failed"
        run.errors.append(StageError("g_constant", "GConstantError", str(exc), True))
    cls = classify_singularity(ps, iif, g_err, orientation=pe.flip)
    run.classification = cls
    run.data["classification"] = _classification_dict(cls)
    if ps.g_value is not None:
        run.data["eta_from_g"] = math.exp(ps.g_value) if ps.m == 1 else ps.g_value
    if opts.oracle and ps.g_value is not None and not pe.zero_in_omega:
        _oracle_checks(run, pe, iif, ps, opts)
    return run


def _classification_dict(cls) -> Dict[str, Any]:
    return {
        "verdict": cls.verdict.value,
        "stability": cls.stability.value,
        "m": cls.m,
        "n": cls.n,
        "g_constant": measured(cls.g_constant, cls.g_error),
        "analytic": cls.analytic,
        "analytic_reason": cls.analytic_reason,
        "cyclicity": cls.cyclicity,
        "cyclicity_statement": cls.cyclicity_statement,
        "bautin_generator": cls.bautin_generator,
        "numeric_only": cls.numeric_only,
        "notes": list(cls.notes),
    }


def oracle_scale(ps, radii, reach: float = 0.2) -> float:
    """Shrink sample radii so that the predicted return stays below ``reach``."""
    growth = math.exp(ps.g_value) if ps.m == 1 else 1.0
    return min(1.0, reach / (growth * max(radii)))


def _oracle_checks(run: WeightRun, pe, iif, ps, opts) -> None:
    cfg = OracleConfig(rho_max=1.0)
    checks: Dict[str, Any] = {}
    scale = oracle_scale(ps, opts.radii)
    radii = [r * scale for r in opts.radii]
    checks["radius_scale"] = scale
    try:
        worst_fund, worst_exp = 0.0, 0.0
        for r0 in radii:
            o = integrate_poincare(pe, r0, cfg)
            series_val = float(ps.evaluate(r0))
            run.sweep.append({"rho0": r0, "pi_oracle": o.pi_value, "pi_series": series_val,
                              "residual": series_val - o.pi_value})
            if iif.n == 1:
                worst_fund = max(worst_fund, verify_fundamental(iif, o))
            worst_exp = max(worst_exp, abs(o.pi_prime - o.exp_I) / abs(o.pi_prime))
        checks["fundamental_identity_residual"] = measured(worst_fund, cfg.rtol)
        checks["derivative_vs_exp_I"] = measured(worst_exp, cfg.rtol)
        r0 = radii[0]
        o = integrate_poincare(pe, r0, cfg)
        if iif.n == 1:
            g_alt = g_from_return_map(iif, r0, o.pi_value)
            checks["g_from_return_map"] = measured(g_alt, abs(g_alt - ps.g_value))
        est = estimate_eta(pe, ps.m, [r * scale for r in DEFAULT_ETA_SAMPLES], config=cfg)
        checks["eta_fit"] = {**measured(est.value, est.error), "quantity": est.quantity, "model_ok": est.model_ok}
    except (OracleError, ValueError, GConstantError) as exc:
        run.errors.append(StageError("oracle", type(exc).__name__, str(exc)))
    run.data["oracle"] = checks


@dataclass
class AnalysisReport:
    data: Dict[str, Any]
    runs: List[WeightRun]
    exit_code: int

    def as_dict(self) -> Dict[str, Any]:
        return self.data


def run_pipeline(spec: ProblemSpec, weights: Optional[List[Tuple[int, int]]] = None) -> AnalysisReport:
    out: Dict[str, Any] = {"schema_version": REPORT_SCHEMA_VERSION, "name": spec.name,
                           "params": dict(spec.params), "truncation": spec.options.truncation}
    errors: List[StageError] = []
    runs: List[WeightRun] = []
    try:
        X = spec.field()
    except InputError as exc:
        errors.append(StageError("input", "InputError", str(exc), True))
        out.update(weights=[], errors=[e.as_dict() for e in errors], exit_code=EXIT_INPUT)
        return AnalysisReport(out, runs, EXIT_INPUT)
    try:
        diag = newton_diagram(X)
        out["diagram"] = diagram_summary(diag)
        chosen = weights if weights is not None else (spec.options.weights or list(diag.weights))
    except DegenerateDiagramError as exc:
        errors.append(StageError("diagram", "DegenerateDiagram", str(exc), True))
        chosen = weights if weights is not None else (spec.options.weights or [])
    for p, q in chosen:
        try:
            run = analyze_weight(X, p, q, spec)
        except Exception as exc:  # noqa: BLE001 - keep partial results for other weights
            run = WeightRun((p, q))
            run.errors.append(StageError("pipeline", type(exc).__name__, str(exc)))
        runs.append(run)
    out["weights"] = [r.as_dict() for r in runs]
    if not chosen:
        errors.append(StageError("diagram", "NoWeights", "no weight selected"))
    out["errors"] = [e.as_dict() for e in errors]
    violated = any(e.hypothesis for e in errors) or (runs and all(
        any(e.hypothesis for e in r.errors) for r in runs))
    code = EXIT_HYPOTHESIS if violated or not chosen else EXIT_OK
    out["exit_code"] = code
    return AnalysisReport(out, runs, code)


def check_monodromy(spec_or_field, p: int, q: int) -> Tuple[bool, str]:
    """Quick monodromy screen from the leading angular speed of one weight."""
    X = spec_or_field.field() if isinstance(spec_or_field, ProblemSpec) else spec_or_field
    try:
        pe = polar_blowup(X, p, q)
    except NonMonodromicError as exc:
        return False, str(exc)
    except CharacteristicDirectionError as exc:
        return True, str(exc)
    return True, f"leading angular speed nonnegative, {len(pe.omega)} characteristic direction(s)"
