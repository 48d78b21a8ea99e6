"""Formal return map from the section restriction of the inverse integrating factor.

The return map ``Pi(rho) = sum eta_j rho^j`` satisfies
``V0(Pi(rho)) = V0(rho) Pi'(rho)``. Solving this order by order leaves exactly
one coefficient undetermined (``eta_m``, or ``eta_1`` when ``m = 1``); it is
carried as a symbol and filled in numerically from the angular integral ``G``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy import integrate

from .algebra import LPoly
from .blowup import PolarExpansion, PolarIIF
from .field import VectorField
from .series import (
    LaurentSeries,
    derivative,
    residue,
    series_add,
    series_compose,
    series_mul,
    series_reciprocal,
    series_scale,
)
from .trig import TrigRational


class LogObstructionError(ArithmeticError):
    """A linear step of the order-by-order solve has no solution."""

    def __init__(self, order: int, message: str):
        super().__init__(f"order rho^{order}: {message}")
        self.order = order


class GConstantError(RuntimeError):
    def __init__(self, message: str, result: Optional["GResult"] = None):
        super().__init__(message)
        self.result = result


class GMeaning(str, Enum):
    ETA_M = "EtaM"
    LOG_ETA1 = "LogEta1"


# ---------------------------------------------------------------------------
# order-by-order solve
# ---------------------------------------------------------------------------


def _mul_trunc(a: List[LPoly], b: List[LPoly], top: int) -> List[LPoly]:
    out = [LPoly() for _ in range(top + 1)]
    for i, x in enumerate(a):
        if not x or i > top:
            continue
        for j in range(min(len(b), top + 1 - i)):
            if b[j]:
                out[i + j] = out[i + j] + x * b[j]
    return out


def _equation_coeff(v0: Sequence[Fraction], m: int, eta: List[LPoly], order: int) -> LPoly:
    """Coefficient of rho^order in ``V0(Pi) - V0 Pi'`` (``eta[j]`` multiplies rho^j)."""
    pi = eta[: order + 1] + [LPoly()] * max(0, order + 1 - len(eta))
    lhs = LPoly()
    power = [LPoly.const(1)] + [LPoly()] * order
    for k in range(1, order + 1):
        power = _mul_trunc(power, pi, order)
        if k >= m and k - m < len(v0) and v0[k - m]:
            lhs = lhs + power[order] * v0[k - m]
    rhs = LPoly()
    for k in range(m, order + 1):
        j = order - k + 1  # Pi' coefficient of rho^(j-1) is j eta_j
        if k - m < len(v0) and v0[k - m] and j < len(pi) and pi[j]:
            rhs = rhs + pi[j] * (j * v0[k - m])
    return lhs - rhs


@dataclass
class PoincareSeries:
    m: int
    coeffs: List[LPoly]  # coeffs[j - 1] = eta_j
    g_meaning: GMeaning
    symbol: str
    V0: LaurentSeries
    residual_order: int
    g_value: Optional[float] = None

    @property
    def N(self) -> int:
        return len(self.coeffs)

    def eta(self, j: int) -> LPoly:
        return self.coeffs[j - 1]

    def symbol_value(self, g: float) -> float:
        return math.exp(g) if self.g_meaning == GMeaning.LOG_ETA1 else g

    def numeric_coeffs(self, g: Optional[float] = None) -> List[float]:
        g = self.g_value if g is None else g
        if g is None:
            raise ValueError("no value for g: run compute_g_constant first")
        s = self.symbol_value(g)
        return [float(c.subs(s)) if c else 0.0 for c in self.coeffs]

    def evaluate(self, rho, g: Optional[float] = None):
        cs = self.numeric_coeffs(g)
        rho = np.asarray(rho, dtype=float)
        return sum(c * rho ** (j + 1) for j, c in enumerate(cs))

    def at_zero_g(self) -> List[LPoly]:
        """Coefficients with the free symbol set to 0 (m > 1 only)."""
        if self.g_meaning != GMeaning.ETA_M:
            raise ValueError("g = 0 is not meaningful when the free symbol is exp(g)")
        return [LPoly.const(c.terms.get(0, 0)) for c in self.coeffs]

    def as_series(self) -> LaurentSeries:
        return LaurentSeries(list(self.coeffs), 1, self.N, "rho", zero=LPoly(symbol=self.symbol))


def solve_fundamental_equation(V0: LaurentSeries, m: int, N: int = 12) -> PoincareSeries:
    """Solve ``V0(Pi) = V0 Pi'`` for ``eta_1..eta_N`` as Laurent polynomials in the free symbol.

    ``V0`` must start at ``rho^m`` with coefficient 1. The free coefficient is
    ``g`` (= ``eta_m``) for ``m > 1``, and ``E`` (= ``eta_1 = exp(g)``) for ``m = 1``.
    """
    if m < 1:
        raise ValueError(f"multiplicity {m} < 1: the origin is a center, no return map to solve")
    if V0.lead != m or V0.coeff(m) != 1:
        raise ValueError("V0 must be normalized: leading term rho^m with coefficient 1")
    top = m + N - 1
    if V0.trunc < top:
        raise ValueError(f"V0 known to rho^{V0.trunc}; need rho^{top} for {N} coefficients")
    v0 = [Fraction(V0.coeff(k)) for k in range(m, top + 1)]
    sym = "E" if m == 1 else "g"
    free = LPoly.gen(sym)
    eta: List[LPoly] = [LPoly(symbol=sym), LPoly()]  # eta[0] is the (absent) constant term
    if m == 1:
        eta[1] = free
        meaning = GMeaning.LOG_ETA1
    else:
        # lowest order: eta_1^m - eta_1 = 0; the return map needs the positive real root
        eta[1] = LPoly.const(1, sym)
        meaning = GMeaning.ETA_M
    if _equation_coeff(v0, m, eta, m):
        raise LogObstructionError(m, "leading order not satisfied by eta_1")
    for j in range(2, N + 1):
        order = m + j - 1
        trial = eta + [LPoly()]
        r0 = _equation_coeff(v0, m, trial, order)
        trial[j] = LPoly.const(1, sym)
        slope = _equation_coeff(v0, m, trial, order) - r0
        if not slope:
            if j == m:
                if r0:
                    raise LogObstructionError(order, f"compatibility fails at the free coefficient: {r0}")
                eta.append(free)
                continue
            raise LogObstructionError(order, f"singular linear coefficient for eta_{j}")
        if not slope.is_constant():
            raise LogObstructionError(order, f"coefficient of eta_{j} is not a constant: {slope}")
        eta.append(-r0 / slope.constant_value())
    coeffs = eta[1:]
    ps = PoincareSeries(m, coeffs, meaning, sym, V0, top)
    ps.residual_order = _residual_order(ps, top)
    return ps


def fundamental_residual(ps: PoincareSeries, top: Optional[int] = None) -> LaurentSeries:
    """``V0(Pi) - V0 Pi'`` as a series with polynomial coefficients, known to ``top``."""
    top = ps.m + ps.N - 1 if top is None else top
    zero = LPoly(symbol=ps.symbol)
    pi = LaurentSeries(list(ps.coeffs), 1, top - ps.m + 1, "rho", zero=zero)
    v0 = LaurentSeries(
        [LPoly.const(ps.V0.coeff(k), ps.symbol) for k in range(ps.m, top + 1)], ps.m, top, "rho", zero=zero
    )
    lhs = series_compose(v0, pi)
    rhs = series_mul(v0, derivative(pi))
    return series_add(lhs, series_scale(rhs, -1))


def _residual_order(ps: PoincareSeries, top: int) -> int:
    """Highest order through which the fundamental equation holds exactly."""
    res = fundamental_residual(ps, top)
    nz = [k for k, c in res.items() if c]
    return (min(nz) - 1) if nz else res.trunc


# ---------------------------------------------------------------------------
# the constant g by quadrature
# ---------------------------------------------------------------------------


@dataclass
class GResult:
    g: float
    deviation: float
    values: List[float]
    radii: List[float]
    error_estimate: float
    form: str = "angular"
    notes: List[str] = field(default_factory=list)


def angular_integrand(X: VectorField, pe: PolarExpansion, iif: PolarIIF) -> Callable[[float, float], float]:
    """``F/V`` for the normalized ``V``, written without Theta: ``c R rho^r J / v``."""
    if iif.normalization_constant is None:
        raise GConstantError("no section normalization (the section direction is characteristic)")
    p, q, r = pe.p, pe.q, pe.r
    fld = pe.as_field()
    c_norm = iif.normalization_constant

    def f(phi: float, rho: float) -> float:
        c, s = math.cos(phi), math.sin(phi)
        J = rho ** (p + q - 1) * (p * c * c + q * s * s)
        v = X.iif_value(rho**p * c, rho**q * s)
        return c_norm * fld.R(phi, rho) * rho**r * J / v

    return f


def compute_g_constant(X: VectorField, pe: PolarExpansion, iif: PolarIIF,
                       radii: Sequence[float] = (0.02, 0.04, 0.08, 0.16), tol: float = 1e-6) -> GResult:
    """``G(r) = int_0^{2 pi} F/V dphi`` at each radius; mean, spread and error."""
    integrand = angular_integrand(X, pe, iif)
    values, errs = [], []
    for rad in radii:
        samples = np.linspace(0, 2 * np.pi, 721)
        vv = np.array([X.iif_value(rad**pe.p * math.cos(t), rad**pe.q * math.sin(t)) for t in samples])
        if np.any(~np.isfinite(vv)) or np.any(vv == 0) or np.any(np.sign(vv) != np.sign(vv[0])):
            raise GConstantError(f"v vanishes on the circle of radius {rad}")
        val, err = integrate.quad(lambda t: integrand(t, rad), 0, 2 * np.pi,
                                  epsabs=1e-13, epsrel=1e-12, limit=400)
        values.append(val)
        errs.append(err)
    g = float(np.mean(values))
    dev = float(max(abs(v - g) for v in values))
    res = GResult(g, dev, values, list(radii), max(errs) + dev)
    if dev > tol:
        raise GConstantError(f"G is not constant across radii: spread {dev:.3g} > {tol:g}", res)
    return res


def g_from_return_map(iif: PolarIIF, r: float, pi_r: float) -> float:
    """``int_r^{Pi(r)} drho / V(0, rho)`` with the exact normalized section function."""
    if iif.v0_exact is None:
        raise GConstantError("no exact section function available")
    val, _ = integrate.quad(lambda t: 1.0 / iif.v0_exact(t), r, pi_r, epsabs=1e-14, epsrel=1e-13, limit=400)
    return val


# ---------------------------------------------------------------------------
# principal value of the first-order angular integral
# ---------------------------------------------------------------------------


@dataclass
class XiResult:
    xi: float
    exists: bool
    error_estimate: float
    singular_angles: List[float]
    note: str = "not used for classification: differs from log eta_1 in general when characteristic directions exist"


def first_order_coefficient(pe: PolarExpansion) -> TrigRational:
    """``F_1`` with ``F(phi, rho) = F_1(phi) rho + O(rho^2)``."""
    return pe.F_k(pe.r) / pe.G[pe.r]


def principal_value(f: Callable[[float], float], singular: Sequence[float], a: float = 0.0,
                    b: float = 2 * math.pi, delta0: float = 0.05, levels: int = 7):
    """Symmetric-excision principal value with Richardson extrapolation in the radius.

    Returns ``(value, exists, error)``.
    """
    sing = sorted({(s - a) % (b - a) + a for s in singular})
    if not sing:
        val, err = integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-12, limit=400)
        return val, True, err
    gaps = [(sing[(i + 1) % len(sing)] - sing[i]) % (b - a) or (b - a) for i in range(len(sing))]
    eps = min(min(gaps) / 3, 0.25)
    delta0 = min(delta0, eps / 2)
    # outer part (excision radius eps) is fixed; the last piece wraps around the period
    pieces = []
    for i, s in enumerate(sing):
        lo = s + eps
        hi = (sing[i + 1] if i + 1 < len(sing) else sing[0] + (b - a)) - eps
        pieces.append((lo, hi))
    outer = 0.0
    outer_err = 0.0
    for lo, hi in pieces:
        if hi > lo:
            v, e = integrate.quad(f, lo, hi, epsabs=1e-13, epsrel=1e-12, limit=400)
            outer += v
            outer_err += e

    def inner(delta: float):
        tot, err = 0.0, 0.0
        for s in sing:
            # f(s + t) + f(s - t) cancels large terms at small t; quad flags the
            # resulting roundoff, which the extrapolation error already covers
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                v, e = integrate.quad(lambda t: f(s + t) + f(s - t), delta, eps, epsabs=1e-13, epsrel=1e-12,
                                      limit=400)
            tot += v
            err += e
        return tot, err

    deltas = [delta0 / 2**k for k in range(levels)]
    vals = []
    qerr = outer_err
    for d in deltas:
        v, e = inner(d)
        vals.append(outer + v)
        qerr += e
    diffs = np.abs(np.diff(vals))
    ratios = diffs[1:] / np.maximum(diffs[:-1], 1e-300)
    converging = bool(np.all(diffs[-3:] < 1e-10) or np.all(ratios[-3:] < 0.75))
    # Neville table in delta (h -> 0)
    table = list(vals)
    for k in range(1, levels):
        for i in range(levels - 1, k - 1, -1):
            table[i] = table[i] + (table[i] - table[i - 1]) / (2**k - 1)
    best = table[-1]
    err = abs(table[-1] - table[-2]) + qerr
    return best, converging, err


def compute_xi_pq(pe: PolarExpansion) -> XiResult:
    F1 = first_order_coefficient(pe)
    singular = [w.angle for w in pe.omega]
    val, exists, err = principal_value(lambda t: float(F1(t)), singular)
    return XiResult(val if exists else float("nan"), exists, err, singular)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


class Verdict(str, Enum):
    CENTER = "Center"
    FOCUS = "Focus"
    UNDETERMINED = "Undetermined"


class Stability(str, Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    NOT_APPLICABLE = "NotApplicable"


@dataclass
class ClassificationReport:
    verdict: Verdict
    stability: Stability
    m: int
    n: int
    g_constant: Optional[float]
    g_error: Optional[float]
    analytic: Optional[bool]
    analytic_reason: str
    cyclicity: Optional[int]
    cyclicity_statement: str
    bautin_generator: str
    numeric_only: bool = False
    notes: List[str] = field(default_factory=list)


def v0_residue(V0: LaurentSeries):
    """Residue of ``1 / V0`` (coefficient of ``rho^-1``)."""
    inv = series_reciprocal(V0)
    return residue(inv)


def classify_singularity(ps: Optional[PoincareSeries], iif: PolarIIF, g_error: Optional[float] = None,
                         orientation: int = 1) -> ClassificationReport:
    """Center/focus verdict from the multiplicity, the constant g and the residue test.

    ``orientation`` is ``-1`` when the blow-up reversed time (clockwise rotation),
    which swaps stability.
    """
    m, n = iif.m, iif.n
    if m <= 0:
        return ClassificationReport(
            Verdict.CENTER, Stability.NOT_APPLICABLE, m, n, None, None, True,
            "center: trivial return map", 0, "center (multiplicity m <= 0)", "none",
        )
    gen = "eta_1 - 1" if m == 1 else f"eta_{m}"
    if ps is None:
        return ClassificationReport(Verdict.UNDETERMINED, Stability.NOT_APPLICABLE, m, n, None, None, None,
                                    "no return-map series", None, "not established", gen)
    notes: List[str] = []
    if m == 1:
        analytic, why = True, "m = 1: the return map is analytic"
    else:
        res = v0_residue(ps.V0)
        if res == 0:
            analytic, why = True, "residue of 1/V0 vanishes"
        else:
            analytic, why = False, f"residue of 1/V0 is {res} (analyticity not established)"
    if analytic:
        cyc, cyc_text = 0, "cyclicity 0 within perturbations keeping the Newton diagram fixed"
    else:
        cyc, cyc_text = None, "not established"
    g = ps.g_value
    if g is None:
        return ClassificationReport(Verdict.UNDETERMINED, Stability.NOT_APPLICABLE, m, n, None, None, analytic,
                                    why, cyc, cyc_text, gen, notes=["g not computed"])
    err = g_error if g_error is not None else 0.0
    if abs(g) <= 10 * err:
        notes.append("g indistinguishable from 0 at quadrature accuracy; numeric evidence only")
        return ClassificationReport(Verdict.CENTER, Stability.NOT_APPLICABLE, m, n, g, err, analytic, why,
                                    cyc, cyc_text, gen, numeric_only=True, notes=notes)
    contracting = g < 0
    if orientation < 0:
        contracting = not contracting
        notes.append("time reversed by the blow-up orientation; stability swapped")
    stab = Stability.STABLE if contracting else Stability.UNSTABLE
    return ClassificationReport(Verdict.FOCUS, stab, m, n, g, err, analytic, why, cyc, cyc_text, gen, notes=notes)
