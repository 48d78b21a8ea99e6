"""Weighted polar blow-up and the inverse integrating factor on the cylinder.

With ``x = rho^p cos(phi)``, ``y = rho^q sin(phi)`` the quasihomogeneous part
of degree ``k`` of the field, ``X_k = P_{p+k} d/dx + Q_{q+k} d/dy``, yields

    rho' = sum_k rho^(k+1) (c P_k + s Q_k) / D,
    phi' = sum_k rho^k     (p c Q_k - q s P_k) / D,     D = p c² + q s²,

where ``P_k(c, s) = P_{p+k}(c, s)``. Dividing both by ``rho^r`` (``r`` the
leading degree) gives ``R = sum F_k rho^(k-r+1)`` and
``Theta = sum G_k rho^(k-r)`` with ``G_r`` not identically zero.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .algebra import BivariatePolynomial, QPoly
from .field import VectorField
from .newton import newton_diagram, quasihomog_decompose
from .series import (
    LaurentSeries,
    PuiseuxSeries,
    map_coefficients,
    puiseux_to_laurent,
    series_mul,
    series_pow,
    series_reciprocal,
)
from .trig import TrigRational

DEFAULT_TRUNCATION = 12


class BlowupError(ValueError):
    """Base class for blow-up failures."""


class NonMonodromicError(BlowupError):
    """The leading angular speed changes sign, so orbits cannot turn around the origin."""

    def __init__(self, message: str, expansion: "PolarExpansion" | None = None):
        super().__init__(message)
        self.expansion = expansion


class CharacteristicDirectionError(BlowupError):
    """The section direction phi = 0 is a characteristic direction."""


class IIFError(BlowupError):
    """The inverse integrating factor cannot be expanded as required."""


@dataclass(frozen=True)
class OmegaPoint:
    """A zero of the leading angular speed ``G_r``."""

    angle: float
    multiplicity: int
    t_exact: Optional[Fraction]  # rational tan(angle/2); None if irrational or angle = pi
    at_pi: bool
    factor: Optional[QPoly]  # irreducible factor of the t-numerator carrying this root
    t_high: Optional[str] = None  # 40-digit decimal of tan(angle/2)

    def is_exact(self) -> bool:
        return self.at_pi or self.t_exact is not None


def _cs_diff(poly: BivariatePolynomial) -> BivariatePolynomial:
    """d/dphi of a polynomial in (c, s): -s d/dc + c d/ds."""
    c, s = BivariatePolynomial.x(), BivariatePolynomial.y()
    return -s * poly.diff(0) + c * poly.diff(1)


def _sympy_t_roots(num: QPoly):
    """Real roots of a t-polynomial grouped by irreducible factor: [(factor, mult, [roots])]."""
    import sympy

    t = sympy.Symbol("t")
    ints = num.primitive_integer()
    expr = sum(int(c) * t**k for k, c in enumerate(ints.c))
    _, factors = sympy.factor_list(sympy.Poly(expr, t))
    out = []
    for fac, mult in factors:
        if fac.degree() == 0:
            continue
        qp = QPoly([Fraction(int(c)) for c in reversed(fac.all_coeffs())])
        out.append((qp, mult, list(fac.real_roots())))
    return out


def characteristic_directions(G: TrigRational) -> List[OmegaPoint]:
    """Zeros of a trigonometric rational function on [0, 2 pi) with multiplicities."""
    if G.is_zero():
        raise BlowupError("leading angular speed vanishes identically")
    pts: List[OmegaPoint] = []
    for fac, mult, roots in _sympy_t_roots(G.num):
        for root in roots:
            tval = float(root.evalf(30))
            angle = (2.0 * math.atan(tval)) % (2 * math.pi)
            exact = None
            if fac.degree == 1:
                exact = -fac.c[0] / fac.c[1]
            pts.append(OmegaPoint(angle, mult, exact, False, fac, str(root.evalf(40))))
    pi_order = G.den.degree - G.num.degree
    if pi_order > 0:
        pts.append(OmegaPoint(math.pi, pi_order, None, True, None))
    return sorted(pts, key=lambda w: w.angle)


@dataclass
class PolarExpansion:
    """Blown-up field ``rho' = R``, ``phi' = Theta`` with exact trig coefficients.

    ``F[k]`` multiplies ``rho^(k-r+1)`` in ``R`` and ``G[k]`` multiplies
    ``rho^(k-r)`` in ``Theta`` (``k`` runs over quasihomogeneous degrees).
    ``A[k]``, ``B[k]`` are the (c, s)-polynomial numerators over ``D``. The
    stored data already includes the orientation flip ``flip`` (``-1`` when
    time was reversed to make ``G_r >= 0``).
    """

    p: int
    q: int
    r: int
    A: Dict[int, BivariatePolynomial]
    B: Dict[int, BivariatePolynomial]
    D: BivariatePolynomial
    F: Dict[int, TrigRational]
    G: Dict[int, TrigRational]
    omega: List[OmegaPoint]
    flip: int = 1
    field_: Optional[VectorField] = None
    diagnostics: List[str] = field(default_factory=list)

    @property
    def weights(self) -> Tuple[int, int]:
        return (self.p, self.q)

    @property
    def max_degree(self) -> int:
        return max(max(self.A, default=self.r), max(self.B, default=self.r))

    @property
    def zero_in_omega(self) -> bool:
        return any(w.angle == 0.0 or (w.t_exact is not None and w.t_exact == 0) for w in self.omega)

    def G_k(self, k: int) -> TrigRational:
        return self.G.get(k, TrigRational.const(0))

    def F_k(self, k: int) -> TrigRational:
        return self.F.get(k, TrigRational.const(0))

    def theta_coeff(self, i: int) -> TrigRational:
        """Coefficient of rho^i in Theta."""
        return self.G_k(self.r + i)

    def R_series(self, trunc: int | None = None) -> LaurentSeries:
        t = self.max_degree - self.r + 1 if trunc is None else trunc
        terms = {k - self.r + 1: v for k, v in self.F.items() if v}
        return LaurentSeries.from_dict(terms, t)

    def Theta_series(self, trunc: int | None = None) -> LaurentSeries:
        t = self.max_degree - self.r if trunc is None else trunc
        terms = {k - self.r: v for k, v in self.G.items() if v}
        return LaurentSeries.from_dict(terms, t)

    def as_field(self) -> "PolarField":
        return PolarField.from_expansion(self)

    def G_r_sign_samples(self, n: int = 1000) -> np.ndarray:
        phi = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
        return self.G[self.r](phi)


def polar_blowup(X: VectorField, p: int, q: int, check_weight: bool = True,
                 strict: bool = False) -> PolarExpansion:
    """Weighted polar blow-up of ``X`` with weights ``(p, q)``.

    Raises :class:`NonMonodromicError` if ``G_r`` changes sign. If ``phi = 0``
    is a characteristic direction the expansion is still returned with
    ``zero_in_omega`` set (a rotation of coordinates is then advisable);
    ``strict=True`` turns that into :class:`CharacteristicDirectionError`.
    """
    diags: List[str] = []
    if check_weight:
        try:
            ws = newton_diagram(X).weights
            if (p, q) not in ws:
                msg = f"weights ({p}, {q}) are not among the diagram weights {list(ws)}"
                warnings.warn(msg, stacklevel=2)
                diags.append(msg)
        except ValueError as exc:
            diags.append(f"diagram unavailable: {exc}")
    dec = quasihomog_decompose(X, p, q)
    c, s = BivariatePolynomial.x(), BivariatePolynomial.y()
    D = c * c * p + s * s * q
    A: Dict[int, BivariatePolynomial] = {}
    B: Dict[int, BivariatePolynomial] = {}
    for k, (Pk, Qk) in dec.components.items():
        a = c * Pk + s * Qk
        b = c * Qk * p - s * Pk * q
        if a:
            A[k] = a
        if b:
            B[k] = b
    if not B:
        raise BlowupError("angular speed vanishes identically (radial field)")
    r = dec.r
    if r not in B or not TrigRational.from_cs(B[r]):
        raise BlowupError(
            f"leading angular speed G_{r} vanishes identically for weights ({p}, {q}); "
            "the leading part is dicritical"
        )
    Dt = TrigRational.from_cs(D)
    F = {k: TrigRational.from_cs(v) / Dt for k, v in A.items()}
    G = {k: TrigRational.from_cs(v) / Dt for k, v in B.items()}
    omega = characteristic_directions(G[r])
    pe = PolarExpansion(p, q, r, A, B, D, F, G, omega, 1, X, diags)
    odd = [w for w in omega if w.multiplicity % 2]
    if odd:
        raise NonMonodromicError(
            f"G_{r} changes sign at angles {[round(w.angle, 12) for w in odd]}: "
            f"the origin is not monodromic for weights ({p}, {q})",
            pe,
        )
    if _leading_sign(G[r]) < 0:
        pe.A = {k: -v for k, v in A.items()}
        pe.B = {k: -v for k, v in B.items()}
        pe.F = {k: -v for k, v in F.items()}
        pe.G = {k: -v for k, v in G.items()}
        pe.flip = -1
        diags.append("time reversed so that the leading angular speed is nonnegative")
    if pe.zero_in_omega:
        msg = "phi = 0 is a characteristic direction; rotate coordinates for the section"
        if strict:
            raise CharacteristicDirectionError(msg)
        diags.append(msg)
    return pe


def _leading_sign(G: TrigRational) -> int:
    """Sign of a trig rational function that does not change sign."""
    k = 0
    while True:
        for t in (Fraction(k), Fraction(-k - 1), Fraction(1, k + 2)):
            v = G.at_t(t)
            if v:
                return 1 if v > 0 else -1
        k += 1


# ---------------------------------------------------------------------------
# numeric view of the blown-up field
# ---------------------------------------------------------------------------


class _TrigPolySum:
    """``sum_k rho^e_k * poly_k(cos phi, sin phi) / D(cos phi, sin phi)`` with derivatives."""

    def __init__(self, terms: Dict[int, BivariatePolynomial], D: BivariatePolynomial):
        self.terms = sorted(terms.items())
        self.dphi = [(e, _cs_diff(poly)) for e, poly in self.terms]
        self.D = D
        self.dD = _cs_diff(D)

    def values(self, phi: float, rho: float):
        """(value, d/drho, d/dphi) at a point."""
        c, s = math.cos(phi), math.sin(phi)
        d = self.D(c, s)
        dd = self.dD(c, s)
        val = dr = dp = 0.0
        for (e, poly), (_, dpoly) in zip(self.terms, self.dphi):
            pv = poly(c, s)
            rp = rho**e
            val += rp * pv
            dr += e * rho ** (e - 1) * pv if e else 0.0
            dp += rp * dpoly(c, s)
        return val / d, dr / d, (dp * d - val * dd) / (d * d)


@dataclass
class PolarField:
    """Callable ``R(phi, rho)``, ``Theta(phi, rho)`` and first partials."""

    R_part: _TrigPolySum
    T_part: _TrigPolySum
    p: int
    q: int

    @classmethod
    def from_expansion(cls, pe: PolarExpansion) -> "PolarField":
        R = _TrigPolySum({k - pe.r + 1: v for k, v in pe.A.items()}, pe.D)
        T = _TrigPolySum({k - pe.r: v for k, v in pe.B.items()}, pe.D)
        return cls(R, T, pe.p, pe.q)

    def R(self, phi, rho):
        return self.R_part.values(phi, rho)[0]

    def Theta(self, phi, rho):
        return self.T_part.values(phi, rho)[0]

    def full(self, phi, rho):
        """(R, R_rho, R_phi, Theta, Theta_rho, Theta_phi)."""
        return self.R_part.values(phi, rho) + self.T_part.values(phi, rho)


# ---------------------------------------------------------------------------
# inverse integrating factor on the cylinder
# ---------------------------------------------------------------------------


@dataclass
class PolarIIF:
    """Expansion ``V(phi, rho) = rho^E K(phi) S(phi, rho)``.

    ``S`` has exact trig coefficients; ``K = prod |h_i(phi)|^lambda_i`` collects
    the non-integer powers of leading Darboux parts. ``V`` is the Laurent form
    (after the Puiseux change of variable when ``n > 1``), ``m`` its leading
    exponent, ``V0`` the section restriction scaled to leading coefficient 1.
    """

    V: LaurentSeries
    m: int
    n: int
    exponent: Fraction
    K_factors: List[Tuple[TrigRational, Fraction]]
    V0: Optional[LaurentSeries]
    normalization_constant: Optional[float]
    normalization_exact: Optional[Fraction]
    v0_exact: Optional[Callable[[float], float]]
    pe: PolarExpansion
    diagnostics: List[str] = field(default_factory=list)

    @property
    def analytic_section(self) -> bool:
        return self.V0 is not None

    def K(self, phi) -> float:
        out = 1.0
        for h, lam in self.K_factors:
            out = out * np.abs(h(phi)) ** float(lam)
        return out

    def evaluate(self, phi: float, rho: float) -> float:
        """Truncated ``V`` (Laurent variable) at a point."""
        total = 0.0
        for k, c in self.V.items():
            total += c(phi) * rho**k
        return self.K(phi) * total

    def evaluate_dphi(self, phi: float, rho: float) -> float:
        if self.K_factors:
            raise NotImplementedError("phi-derivative with non-integer Darboux powers")
        return sum(c.derivative()(phi) * rho**k for k, c in self.V.items())

    def evaluate_drho(self, phi: float, rho: float) -> float:
        return self.K(phi) * sum(k * c(phi) * rho ** (k - 1) for k, c in self.V.items() if k)


def _weighted_series(f: BivariatePolynomial, p: int, q: int) -> Tuple[int, Dict[int, TrigRational]]:
    """``f(rho^p c, rho^q s) = rho^d0 sum_k h_k(phi) rho^k``; returns (d0, {k: h_k})."""
    parts = f.weighted_parts(p, q)
    d0 = None
    out: Dict[int, TrigRational] = {}
    for d, poly in parts.items():
        h = TrigRational.from_cs(poly)
        if not h:
            continue
        if d0 is None:
            d0 = d
        out[d - d0] = h
    if d0 is None:
        raise IIFError("a Darboux factor vanishes identically on the blow-up")
    return d0, out


def polar_iif(X: VectorField, pe: PolarExpansion, N: int = DEFAULT_TRUNCATION,
              rho_check: float = 0.25) -> PolarIIF:
    """Expand ``V = v(rho^p c, rho^q s) / (rho^r J Theta)`` to ``N`` terms.

    ``N`` counts terms past the leading one (relative precision), so the
    Laurent series is known to ``rho^(m + N - 1)``.
    """
    if not X.iif_factors:
        raise IIFError("no inverse integrating factor supplied")
    p, q, r = pe.p, pe.q, pe.r
    rel = N - 1
    diags: List[str] = []
    exponent = Fraction(-(r + p + q - 1))
    one = LaurentSeries([TrigRational.const(1)], 0, rel)
    S = one
    K: List[Tuple[TrigRational, Fraction]] = []
    for f, lam in X.iif_factors:
        d0, hs = _weighted_series(f, p, q)
        exponent += lam * d0
        series = LaurentSeries.from_dict(hs, rel)
        if lam.denominator == 1:
            S = series_mul(S, series_pow(series, int(lam)))
        else:
            h0 = hs[0]
            unit = LaurentSeries.from_dict({k: v / h0 for k, v in hs.items()}, rel)
            S = series_mul(S, series_pow(unit, lam))
            K.append((h0, lam))
    # J * Theta = rho^(p+q-1) * sum_k B_k rho^(k-r)  (D cancels)
    theta_num = LaurentSeries.from_dict(
        {k - r: TrigRational.from_cs(v) for k, v in pe.B.items()}, rel
    )
    S = series_mul(S, series_reciprocal(theta_num))
    if S.is_zero():
        raise IIFError("inverse integrating factor vanishes identically to the requested order")
    lead_shift = S.lead
    n = exponent.denominator
    if n == 1:
        V = LaurentSeries(
            [S.coeff(k) for k in range(S.lead, S.trunc + 1)],
            S.lead + int(exponent),
            S.trunc + int(exponent),
            "rho",
        )
        laurent = V
    else:
        # rho = sigma^n: exponents scale by n
        terms = {n * k + int(exponent * n): c for k, c in S.items()}
        base = LaurentSeries.from_dict(terms, n * S.trunc + int(exponent * n), var="sigma")
        laurent = puiseux_to_laurent(PuiseuxSeries(base, n))
        diags.append(f"fractional leading exponent {exponent}: Puiseux index {n}, variable sigma = rho^(1/{n})")
    m = laurent.lead
    # section restriction
    V0 = None
    c_norm = None
    c_exact = None
    v0_fun = None
    try:
        at0 = map_coefficients(laurent, lambda c: c.at_zero(), zero=Fraction(0))
    except ZeroDivisionError:
        at0 = None
        diags.append("V has a pole at phi = 0 in some coefficient: the section direction is characteristic")
    if at0 is not None:
        if at0.is_zero() or at0.lead != m:
            diags.append("leading coefficient of V vanishes at phi = 0: section lies on a characteristic direction")
        else:
            lead0 = at0.coeff(m)
            k0 = 1.0
            for h, lam in K:
                h0v = h.at_zero()
                if h0v == 0:
                    raise IIFError("Darboux leading part vanishes at phi = 0")
                k0 *= abs(float(h0v)) ** float(lam)
            V0 = map_coefficients(at0, lambda c: c / lead0, zero=Fraction(0))
            c_exact = lead0 if not K else None
            c_norm = float(lead0) * k0
            if n == 1:
                v0_fun = _section_function(X, pe, c_norm)
                bad = _ray_zero(v0_fun, rho_check)
                if bad is not None:
                    diags.append(f"V(0, rho) vanishes or changes sign near rho = {bad:.6g} inside (0, {rho_check}]")
    return PolarIIF(laurent, m, n, exponent, K, V0, c_norm, c_exact, v0_fun, pe, diags)


def _section_function(X: VectorField, pe: PolarExpansion, c_norm: float) -> Callable[[float], float]:
    """Exact (untruncated) ``V(0, rho) / c_norm`` as a float function."""
    p, q, r = pe.p, pe.q, pe.r
    theta0 = [(k - r, float(TrigRational.from_cs(v).at_zero())) for k, v in pe.B.items()]

    def v0(rho: float) -> float:
        vv = X.iif_value(rho**p, 0.0)
        jt = rho ** (r + p + q - 1) * sum(b * rho**e for e, b in theta0)
        return vv / jt / c_norm

    return v0


def _ray_zero(fun: Callable[[float], float], rho_max: float, samples: int = 400) -> Optional[float]:
    grid = np.geomspace(rho_max * 1e-4, rho_max, samples)
    vals = np.array([fun(float(r)) for r in grid])
    if np.any(~np.isfinite(vals)) or np.any(vals == 0):
        return float(grid[np.argmax(~np.isfinite(vals) | (vals == 0))])
    sign = np.sign(vals)
    change = np.nonzero(sign[1:] != sign[:-1])[0]
    return float(grid[change[0] + 1]) if len(change) else None


def pde_residual(iif: PolarIIF, phi: float, rho: float, h: float = 1e-6) -> float:
    """``V_phi + V_rho F - F_rho V`` for the truncated V, with F = R/Theta."""
    fld = iif.pe.as_field()
    R, Rr, _, T, Tr, _ = fld.full(phi, rho)
    F = R / T
    Fr = (Rr * T - R * Tr) / (T * T)
    V = iif.evaluate(phi, rho)
    if iif.K_factors:
        Vphi = (iif.evaluate(phi + h, rho) - iif.evaluate(phi - h, rho)) / (2 * h)
    else:
        Vphi = iif.evaluate_dphi(phi, rho)
    Vr = iif.evaluate_drho(phi, rho)
    return Vphi + Vr * F - Fr * V
