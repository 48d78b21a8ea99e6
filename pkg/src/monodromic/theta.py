"""Zero set of the angular speed near characteristic directions.

At a characteristic direction ``phi*`` write ``theta = phi - phi*`` and expand
``Theta(phi* + theta, rho) = sum c[a, i] theta^a rho^i``. Curves of zero
angular speed leaving ``(phi*, 0)`` are real positive Newton-Puiseux branches
``rho = alpha |theta|^gamma + ...`` of this local function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath

from .algebra import BivariatePolynomial, QPoly
from .blowup import OmegaPoint, PolarExpansion
from .series import LaurentSeries, series_add, series_mul, series_reciprocal
from .trig import TrigRational

MP_DPS = 60
_MP_TINY = mpmath.mpf(10) ** (-40)


class LambdaVerdict(str, Enum):
    EMPTY = "EmptyProven"
    NONEMPTY = "NonEmptyProven"
    INCONCLUSIVE = "Inconclusive"


# ---------------------------------------------------------------------------
# local Taylor data
# ---------------------------------------------------------------------------


def _to_mp(c):
    if isinstance(c, Fraction):
        return mpmath.mpf(c.numerator) / c.denominator
    return c


def _half_tan_series(order: int) -> LaurentSeries:
    """tan(theta/2) with exact rational coefficients."""
    sin_c, cos_c = [], []
    for k in range(order + 1):
        if k % 2:
            sin_c.append(Fraction((-1) ** (k // 2), math.factorial(k) * 2**k))
            cos_c.append(Fraction(0))
        else:
            sin_c.append(Fraction(0))
            cos_c.append(Fraction((-1) ** (k // 2), math.factorial(k) * 2**k))
    s = LaurentSeries(sin_c, 0, order, "theta")
    c = LaurentSeries(cos_c, 0, order, "theta")
    return series_mul(s, series_reciprocal(c))


def _poly_of_series(poly: QPoly, s: LaurentSeries, order: int, lift) -> LaurentSeries:
    acc = LaurentSeries([], 0, order, "theta")
    for coef in reversed(poly.c):
        acc = series_add(series_mul(acc, s), LaurentSeries([lift(coef)], 0, order, "theta"))
    return acc


def trig_taylor(f: TrigRational, point: OmegaPoint, order: int) -> List:
    """Taylor coefficients of ``f(phi* + theta)`` up to ``theta^order``.

    Exact (Fractions) when ``tan(phi*/2)`` is rational or ``phi* = pi``;
    otherwise mpmath numbers at :data:`MP_DPS` digits.
    """
    if f.is_zero():
        return [Fraction(0)] * (order + 1)
    tau = _half_tan_series(order)
    if point.at_pi:
        if f.pole_at_pi:
            raise ZeroDivisionError("pole at the characteristic direction")
        # cot(phi/2) = -tan(theta/2) near phi = pi
        u = LaurentSeries.from_dict({k: -v for k, v in tau.items()}, order, "theta")
        lift = lambda c: c  # noqa: E731
        num = _poly_of_series(f.num.reversed(), u, order, lift)
        den = _poly_of_series(f.den.reversed(), u, order, lift)
        shift = f.den.degree - f.num.degree
        val = series_mul(num, series_reciprocal(den))
        for _ in range(shift):
            val = series_mul(val, u)
        return [val.coeff(k) for k in range(order + 1)]
    if point.t_exact is not None:
        ts = point.t_exact
        lift = lambda c: c  # noqa: E731
    else:
        mpmath.mp.dps = MP_DPS
        ts = mpmath.mpf(point.t_high)
        lift = _to_mp
        tau = LaurentSeries.from_dict({k: _to_mp(v) for k, v in tau.items()}, order, "theta")
    # t(theta) = (t* + tau) / (1 - t* tau)
    top = LaurentSeries.from_dict({0: ts, **{k: v for k, v in tau.items()}}, order, "theta")
    bot = LaurentSeries.from_dict({0: lift(Fraction(1)), **{k: -ts * v for k, v in tau.items()}}, order, "theta")
    t_of = series_mul(top, series_reciprocal(bot))
    num = _poly_of_series(f.num, t_of, order, lift)
    den = _poly_of_series(f.den, t_of, order, lift)
    val = series_mul(num, series_reciprocal(den))
    return [val.coeff(k) for k in range(order + 1)]


def vanishing_order(f: TrigRational, point: OmegaPoint) -> Optional[int]:
    """Exact order of vanishing of ``f`` at the point; None if ``f`` is identically zero."""
    if f.is_zero():
        return None
    if point.at_pi:
        return max(f.den.degree - f.num.degree, 0)
    if point.factor is None:
        raise ValueError("characteristic direction without its irreducible factor")
    return f.num.multiplicity_of(point.factor)


@dataclass
class LocalTheta:
    """Truncated local expansion ``sum c[(a, i)] theta^a rho^i``.

    ``coeffs`` holds every coefficient with ``a <= theta_trunc``; ``orders[i]``
    is the exact theta-order of the rho^i column (None for an identically zero
    column, ``-1`` when unknown beyond the truncation).
    """

    coeffs: Dict[Tuple[int, int], object]
    theta_trunc: int
    orders: Dict[int, Optional[int]]
    exact: bool = True
    angle: float = 0.0

    @classmethod
    def from_polynomial(cls, poly: BivariatePolynomial, angle: float = 0.0) -> "LocalTheta":
        """Local data from a polynomial in (theta, rho) (x ↦ theta, y ↦ rho)."""
        coeffs = dict(poly.terms)
        trunc = max((a for a, _ in coeffs), default=0) + 16
        orders: Dict[int, Optional[int]] = {}
        for (a, i) in coeffs:
            orders[i] = min(a, orders.get(i, a))
        return cls(coeffs, trunc, orders, True, angle)

    @classmethod
    def from_expansion(cls, pe: PolarExpansion, point: OmegaPoint, theta_order: int = 12) -> "LocalTheta":
        coeffs: Dict[Tuple[int, int], object] = {}
        orders: Dict[int, Optional[int]] = {}
        for k in sorted(pe.G):
            i = k - pe.r
            f = pe.G[k]
            orders[i] = vanishing_order(f, point)
            if orders[i] is None:
                continue
            jets = trig_taylor(f, point, theta_order)
            for a in range(orders[i], theta_order + 1):
                if a == orders[i] or jets[a]:
                    coeffs[(a, i)] = jets[a]
        return cls(coeffs, theta_order, orders, point.is_exact(), point.angle)

    def coeff(self, a: int, i: int):
        if a > self.theta_trunc:
            raise IndexError(f"theta^{a} beyond local truncation {self.theta_trunc}")
        return self.coeffs.get((a, i), Fraction(0) if self.exact else mpmath.mpf(0))

    def column(self, i: int) -> List:
        return [self.coeff(a, i) for a in range(self.theta_trunc + 1)]

    @property
    def rho_degrees(self) -> List[int]:
        return sorted(i for i, o in self.orders.items() if o is not None)

    def sign_of(self, c) -> int:
        if isinstance(c, Fraction):
            return (c > 0) - (c < 0)
        if abs(c) <= _MP_TINY:
            return 0
        return 1 if c > 0 else -1

    def flipped(self, side: int) -> "LocalTheta":
        """Substitute theta -> side * theta."""
        if side == 1:
            return self
        coeffs = {(a, i): (-c if a % 2 else c) for (a, i), c in self.coeffs.items()}
        return LocalTheta(coeffs, self.theta_trunc, dict(self.orders), self.exact, self.angle)

    def evaluate(self, theta: float, rho: float) -> float:
        return float(sum(float(c) * theta**a * rho**i for (a, i), c in self.coeffs.items()))


# ---------------------------------------------------------------------------
# Newton-Puiseux branches
# ---------------------------------------------------------------------------


@dataclass
class BranchExpansion:
    """``rho = u^k1 (alpha0 + sum_j coeffs[j-1] u^j)``, ``u = |theta|^(1/k2)`` on one side."""

    base_angle: float
    side: int
    lead_exponent: Fraction
    lead_coeff: object
    coeffs: List[object]
    is_real: Optional[bool]
    is_positive: Optional[bool]
    is_simple: bool
    multiplicity: int = 1
    residual_order: Optional[Fraction] = None
    truncation_order: Optional[Fraction] = None
    children: List["BranchExpansion"] = field(default_factory=list)
    note: str = ""

    @property
    def ramification(self) -> int:
        return self.lead_exponent.denominator

    def evaluate(self, u_theta: float) -> complex:
        """Branch value at ``|theta| = u_theta`` (truncated sum)."""
        k1, k2 = self.lead_exponent.numerator, self.lead_exponent.denominator
        u = u_theta ** (1.0 / k2)
        tot = complex(self.lead_coeff)
        for j, b in enumerate(self.coeffs, start=1):
            tot += complex(b) * u**j
        return u**k1 * tot


@dataclass
class BranchReport:
    branches: List[BranchExpansion]
    rho_factor: int = 0
    theta_factor: int = 0
    resolved: bool = True
    notes: List[str] = field(default_factory=list)


def _lower_hull(points: Sequence[Tuple[int, int]]) -> List[Tuple[int, int]]:
    pts = sorted(points)
    hull: List[Tuple[int, int]] = []
    for pnt in pts:
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            if (a[0] - o[0]) * (pnt[1] - o[1]) - (a[1] - o[1]) * (pnt[0] - o[0]) <= 0:
                hull.pop()
            else:
                break
        hull.append(pnt)
    return hull


def _roots_with_multiplicity(coeffs: List, exact: bool):
    """Nonzero roots of ``sum coeffs[k] x^k`` as (value, multiplicity, is_real, exact_value)."""
    import sympy

    if exact and all(isinstance(c, Fraction) for c in coeffs):
        X = sympy.Symbol("X")
        expr = sum(sympy.Rational(c.numerator, c.denominator) * X**k for k, c in enumerate(coeffs))
        out = []
        _, facs = sympy.factor_list(sympy.Poly(expr, X))
        for fac, mult in facs:
            if fac.degree() == 0:
                continue
            if fac.degree() == 1:
                a1, a0 = fac.all_coeffs()
                root = Fraction(int(-a0), int(a1))
                if root != 0:
                    out.append((root, mult, True, root))
                continue
            # exact count of real roots, numeric values from mpmath
            n_real = fac.count_roots()
            mpmath.mp.dps = MP_DPS
            vals = mpmath.polyroots([int(a) for a in fac.all_coeffs()], maxsteps=200, extraprec=200)
            vals = sorted(vals, key=lambda z: abs(mpmath.im(z)))
            for idx, rt in enumerate(vals):
                if idx < n_real:
                    out.append((mpmath.re(rt), mult, True, None))
                else:
                    out.append((mpmath.mpc(rt), mult, False, None))
        return out
    mpmath.mp.dps = MP_DPS
    cs = [_to_mp(c) for c in coeffs]
    while cs and abs(cs[-1]) <= _MP_TINY:
        cs.pop()
    roots = mpmath.polyroots(list(reversed(cs)), maxsteps=200, extraprec=200) if len(cs) > 1 else []
    clusters: List[List] = []
    for rt in roots:
        for cl in clusters:
            if abs(cl[0] - rt) < mpmath.mpf(10) ** (-12):
                cl.append(rt)
                break
        else:
            clusters.append([rt])
    out = []
    for cl in clusters:
        val = sum(cl) / len(cl)
        is_real = abs(mpmath.im(val)) < mpmath.mpf(10) ** (-25)
        out.append((mpmath.re(val) if is_real else val, len(cl), is_real, None))
    return out


def _binomial_expand(i, alpha):
    """Coefficients of (alpha + x)^i."""
    return [math.comb(i, j) * alpha ** (i - j) for j in range(i + 1)]


def _substitute(local: LocalTheta, k1: int, k2: int, alpha, M: int):
    """H(tau, x) = tau^-M * Theta(tau^k2, tau^k1 (alpha + x)); returns (dict, known tau bound)."""
    H: Dict[Tuple[int, int], object] = {}
    known = k2 * (local.theta_trunc + 1) - M  # exponents < known are exact
    for (a, i), c in local.coeffs.items():
        e = k2 * a + k1 * i - M
        if e >= known:
            continue
        for j, b in enumerate(_binomial_expand(i, alpha)):
            key = (e, j)
            H[key] = H.get(key, 0) + c * b
    return H, known


def _is_zero(c) -> bool:
    if isinstance(c, Fraction) or isinstance(c, int):
        return c == 0
    return abs(c) <= _MP_TINY


def _series_solve(H, known: int, n_terms: int):
    """Solve H(tau, x(tau)) = 0 for x = sum_{j>=1} beta_j tau^j given H_x(0,0) != 0."""
    L = H.get((0, 1), 0)
    betas: List = []
    n_terms = min(n_terms, known - 1)

    def compose(bs, top):
        # power series of x = sum bs[j-1] tau^j up to tau^top, and H(tau, x)
        xs = [0] * (top + 1)
        for j, b in enumerate(bs, start=1):
            if j <= top:
                xs[j] = b
        total = [0] * (top + 1)
        xpow = [1] + [0] * top
        maxj = max((j for (_, j) in H), default=0)
        for j in range(maxj + 1):
            for (e, jj), c in H.items():
                if jj != j or e > top:
                    continue
                for k in range(top + 1 - e):
                    if xpow[k]:
                        total[e + k] = total[e + k] + c * xpow[k]
            nxt = [0] * (top + 1)
            for a_ in range(top + 1):
                if not xpow[a_]:
                    continue
                for b_ in range(1, top + 1 - a_):
                    if xs[b_]:
                        nxt[a_ + b_] = nxt[a_ + b_] + xpow[a_] * xs[b_]
            xpow = nxt
        return total

    for j in range(1, n_terms + 1):
        tot = compose(betas + [0], j)
        betas.append(-tot[j] / L)
    top = known - 1
    res = compose(betas, top)
    order = next((k for k in range(top + 1) if not _is_zero(res[k])), None)
    return betas, (order if order is not None else known)


def _np_core(local: LocalTheta, side: int, max_terms: int, depth: int) -> BranchReport:
    loc = local.flipped(side)
    report = BranchReport([])
    known_cols = {i: o for i, o in loc.orders.items() if o is not None and o >= 0}
    if not known_cols:
        report.resolved = False
        report.notes.append("no nonzero column within the truncation")
        return report
    i0 = min(known_cols)
    if i0 > 0:
        report.rho_factor = i0
        report.notes.append(f"rho^{i0} divides the local function (rho = 0 is part of the zero set)")
    a0 = min(known_cols.values())
    if a0 > 0:
        report.theta_factor = a0
        report.notes.append(f"theta^{a0} divides the local function: the ray theta = 0 lies in the zero set")
    pts = [(i - i0, o - a0) for i, o in known_cols.items()]
    hull = _lower_hull(pts)
    # descending part from the rho^0 column to the first point on the axis a = 0
    chain = [hull[0]]
    for pnt in hull[1:]:
        if pnt[1] < chain[-1][1]:
            chain.append(pnt)
        if chain[-1][1] == 0:
            break
    unknown_cols = [i - i0 for i, o in loc.orders.items() if o == -1]
    for ucol in unknown_cols:
        for pa, pb in zip(chain, chain[1:]):
            if pa[0] <= ucol <= pb[0]:
                hull_a = pa[1] + Fraction(pb[1] - pa[1], pb[0] - pa[0]) * (ucol - pa[0])
                if loc.theta_trunc + 1 - a0 < hull_a:
                    report.resolved = False
                    report.notes.append(f"column rho^{ucol + i0} unknown below the hull")
    for pa, pb in zip(chain, chain[1:]):
        di, da = pb[0] - pa[0], pa[1] - pb[1]
        gamma = Fraction(da, di)
        k1, k2 = gamma.numerator, gamma.denominator
        seg = [(i, a) for (i, a) in pts if Fraction(a - pa[1]) == -gamma * (i - pa[0])]
        poly = [Fraction(0) if loc.exact else mpmath.mpf(0)] * (pb[0] - pa[0] + 1)
        for i, a in seg:
            poly[i - pa[0]] = loc.coeff(a + a0, i + i0)
        roots = _roots_with_multiplicity(poly, loc.exact)
        M = k2 * pa[1] + k1 * pa[0]
        for value, mult, is_real, exact_val in roots:
            br = BranchExpansion(
                local.angle, side, gamma, value, [], is_real if mult == 1 or not is_real else None,
                (value > 0) if is_real else False, mult == 1, mult,
            )
            if not is_real:
                br.is_real = False
                br.is_positive = False
                if mult == 1:
                    # expanded in complex arithmetic so the branch can be resubstituted too
                    H, known = _shifted_local(loc, i0, a0, k1, k2, mpmath.mpc(value), M)
                    betas, res_order = _series_solve(H, known, max_terms)
                    br.coeffs = betas
                    br.residual_order = Fraction(M + res_order, k2) + a0
                    br.truncation_order = Fraction(k1 + len(betas), k2)
                report.branches.append(br)
                continue
            # shift to the remaining local function in (tau, x)
            shifted = _shifted_local(loc, i0, a0, k1, k2, value, M)
            H, known = shifted
            if mult == 1:
                betas, res_order = _series_solve(H, known, max_terms)
                br.coeffs = betas
                br.is_real = True
                br.residual_order = Fraction(M + res_order, k2) + a0
                br.truncation_order = Fraction(k1 + len(betas), k2)
                report.branches.append(br)
                continue
            # multiple real root: one more Newton-Puiseux step in (tau, x)
            if depth <= 0:
                br.note = "multiple real root left unresolved"
                report.resolved = False
                report.branches.append(br)
                continue
            sub_local = _local_from_dict(H, known, loc.exact and isinstance(value, Fraction), local.angle)
            sub = _np_core(sub_local, 1, max_terms, depth - 1)
            br.children = sub.branches
            if sub.rho_factor:
                # x = 0 solves exactly: the branch rho = alpha tau^k1 itself
                br.children.append(BranchExpansion(local.angle, 1, Fraction(10**6), 0, [], True, False, True,
                                                   note="exact leading-term branch"))
            if sub.theta_factor:
                report.resolved = False
                br.note = "tau divides the shifted function"
            br.is_real = any(c.is_real for c in sub.branches) or bool(sub.rho_factor)
            if not sub.resolved:
                report.resolved = False
                br.is_real = True if br.is_real else None
            br.is_positive = bool(br.is_real) and value > 0
            report.branches.append(br)
    return report


def _shifted_local(loc: LocalTheta, i0: int, a0: int, k1: int, k2: int, alpha, M: int):
    reduced = LocalTheta(
        {(a - a0, i - i0): c for (a, i), c in loc.coeffs.items() if a >= a0 and i >= i0},
        loc.theta_trunc - a0,
        {i - i0: (o - a0 if o is not None and o >= 0 else o) for i, o in loc.orders.items() if i >= i0},
        loc.exact,
        loc.angle,
    )
    if not reduced.exact:
        alpha = _to_mp(alpha)
        reduced.coeffs = {k: _to_mp(v) for k, v in reduced.coeffs.items()}
    return _substitute(reduced, k1, k2, alpha, M)


def _local_from_dict(H, known: int, exact: bool, angle: float) -> LocalTheta:
    coeffs = {(e, j): c for (e, j), c in H.items() if not _is_zero(c)}
    orders: Dict[int, Optional[int]] = {}
    maxj = max((j for (_, j) in H), default=0)
    for j in range(maxj + 1):
        col = [e for (e, jj) in coeffs if jj == j]
        orders[j] = min(col) if col else -1
    return LocalTheta(coeffs, known - 1, orders, exact, angle)


def newton_puiseux_branches(theta_local, max_terms: int = 4, side: int = 1, depth: int = 3) -> BranchReport:
    """Branches ``rho(theta)`` of the zero set on the side ``sign(theta) = side``.

    ``theta_local`` is a :class:`LocalTheta` or a polynomial in (theta, rho).
    Simple branches are extended by ``max_terms`` terms; multiple real roots
    of a segment polynomial get up to ``depth`` further Newton-Puiseux steps.
    """
    if isinstance(theta_local, BivariatePolynomial):
        theta_local = LocalTheta.from_polynomial(theta_local)
    return _np_core(theta_local, side, max_terms, depth)


def branch_residual(poly: BivariatePolynomial, br: BranchExpansion, u_theta: float) -> complex:
    """Value of the polynomial on the truncated branch (numeric resubstitution)."""
    theta = br.side * u_theta
    rho = br.evaluate(u_theta)
    return sum(complex(c) * theta**a * rho**i for (a, i), c in poly.terms.items())


# ---------------------------------------------------------------------------
# deciding whether curves of zero angular speed exist
# ---------------------------------------------------------------------------


@dataclass
class AngleEvidence:
    angle: float
    multiplicity: int
    verdict: LambdaVerdict
    method: str
    details: Dict[str, object] = field(default_factory=dict)


@dataclass
class LambdaResult:
    verdict: LambdaVerdict
    evidence: List[AngleEvidence]
    reason: str = ""


def _fmt(c) -> str:
    if isinstance(c, Fraction):
        return str(c)
    return mpmath.nstr(c, 15)


def _series_lead(values: Sequence) -> Tuple[Optional[int], object]:
    for k, v in enumerate(values):
        if not _is_zero(v):
            return k, v
    return None, 0


def _sign_on_side(local: LocalTheta, i: int, side: int) -> int:
    o = local.orders.get(i)
    if o is None:
        return 0
    s = local.sign_of(local.coeff(o, i))
    return s * (side**o)


def check_local(local: LocalTheta, multiplicity: int = 0, max_terms: int = 4) -> AngleEvidence:
    """Decide locally whether a real positive zero curve of Theta leaves the point."""
    mult = multiplicity or (local.orders.get(0) or 0)
    ev = lambda v, m, **d: AngleEvidence(local.angle, mult, v, m, d)  # noqa: E731
    a0 = min(o for o in local.orders.values() if o is not None)
    if a0 > 0:
        return ev(LambdaVerdict.NONEMPTY, "ray", note="Theta vanishes identically along the direction")
    # linear approximation: G_{r+1}(phi*) > 0
    if local.orders.get(1) == 0 and local.sign_of(local.coeff(0, 1)) > 0:
        return ev(LambdaVerdict.EMPTY, "linear", G1_at_angle=float(local.coeff(0, 1)))
    # quadratic approximation: discriminant negative on the punctured neighbourhood
    if local.orders.get(2) == 0 and local.sign_of(local.coeff(0, 2)) > 0:
        n = local.theta_trunc
        g0, g1, g2 = local.column(0), local.column(1), local.column(2)
        disc = []
        for k in range(n + 1):
            v = sum(g1[j] * g1[k - j] for j in range(k + 1)) - 4 * sum(g0[j] * g2[k - j] for j in range(k + 1))
            disc.append(v)
        o, lead = _series_lead(disc)
        if o is not None and o % 2 == 0 and local.sign_of(lead) < 0:
            return ev(LambdaVerdict.EMPTY, "quadratic", discriminant_order=o, discriminant_lead=float(lead))
    # sign rule of Descartes on each side, over all rho coefficients
    changes = {}
    for side in (1, -1):
        signs = [_sign_on_side(local, i, side) for i in local.rho_degrees]
        signs = [s for s in signs if s]
        changes[side] = sum(1 for a, b in zip(signs, signs[1:]) if a != b)
    if changes[1] == 0 and changes[-1] == 0:
        return ev(LambdaVerdict.EMPTY, "descartes", sign_changes=changes)
    # Newton-Puiseux branches
    details: Dict[str, object] = {"sign_changes": changes}
    resolved = True
    found_positive = []
    all_branches = []
    for side in (1, -1):
        rep = newton_puiseux_branches(local, max_terms, side)
        resolved &= rep.resolved
        all_branches.extend(rep.branches)
        for br in rep.branches:
            if br.is_real and br.is_positive:
                found_positive.append(br)
    details["branches"] = [
        {"side": b.side, "exponent": str(b.lead_exponent), "lead": _fmt(b.lead_coeff),
         "real": b.is_real, "positive": b.is_positive, "simple": b.is_simple}
        for b in all_branches
    ]
    if found_positive:
        return ev(LambdaVerdict.NONEMPTY, "newton_puiseux", **details)
    if resolved and all(b.is_real is not None for b in all_branches):
        return ev(LambdaVerdict.EMPTY, "newton_puiseux", **details)
    return ev(LambdaVerdict.INCONCLUSIVE, "newton_puiseux", **details)


def _epsilon(pe: PolarExpansion, point: OmegaPoint) -> float:
    others = [w.angle for w in pe.omega if w is not point]
    gaps = [abs((point.angle - a + math.pi) % (2 * math.pi) - math.pi) for a in others]
    return min([g / 2 for g in gaps] + [0.1])


def check_lambda_pq(pe: PolarExpansion, max_terms: int = 4, theta_order: int = 12) -> LambdaResult:
    """Are there curves of zero angular speed emanating from ``rho = 0``?"""
    if not pe.omega:
        return LambdaResult(LambdaVerdict.EMPTY, [], "no characteristic directions")
    evidence = []
    for point in pe.omega:
        needed = max((vanishing_order(f, point) or 0) for f in pe.G.values())
        local = LocalTheta.from_expansion(pe, point, max(theta_order, needed + max_terms + 2))
        ev = check_local(local, point.multiplicity, max_terms)
        eps = _epsilon(pe, point)
        ev.details["epsilon"] = eps
        ev.details["sampled_min"] = _sample_theta(pe, point.angle, eps)
        evidence.append(ev)
    verdicts = {e.verdict for e in evidence}
    if LambdaVerdict.NONEMPTY in verdicts:
        return LambdaResult(LambdaVerdict.NONEMPTY, evidence, "a real positive zero curve of Theta exists")
    if verdicts == {LambdaVerdict.EMPTY}:
        return LambdaResult(LambdaVerdict.EMPTY, evidence, "every characteristic direction cleared")
    return LambdaResult(LambdaVerdict.INCONCLUSIVE, evidence, "some characteristic direction undecided")


def _sample_theta(pe: PolarExpansion, angle: float, eps: float, n: int = 41) -> float:
    """Smallest sampled Theta on the punctured box (sanity check only)."""
    import numpy as np

    fld = pe.as_field()
    best = math.inf
    for th in np.linspace(-eps, eps, n):
        if th == 0:
            continue
        for rho in np.geomspace(1e-4, 1e-2, 9):
            best = min(best, fld.Theta(angle + th, rho))
    return float(best)


# ---------------------------------------------------------------------------
# normal forms
# ---------------------------------------------------------------------------


class FormTag(str, Enum):
    ELLIPTIC_A = "elliptic_a"
    CUSP_B = "cusp_b"
    QUARTIC_C = "quartic_c"
    NON_ELEMENTARY_D = "non_elementary_d"
    UNCLASSIFIED = "unclassified"


@dataclass
class ThetaSingularityClass:
    k: int
    form_tag: FormTag
    delta1: int
    delta2: int
    hessian_det: float
    delta1_printed: Optional[int] = None
    notes: List[str] = field(default_factory=list)


def _sgn(local: LocalTheta, v) -> int:
    return local.sign_of(v)


def classify_local(local: LocalTheta) -> ThetaSingularityClass:
    """Normal-form tag of the singular point at the origin of the local chart."""
    c = local.coeff
    k = local.orders.get(0)
    notes: List[str] = []
    if k is None:
        return ThetaSingularityClass(0, FormTag.UNCLASSIFIED, 0, 0, 0.0, notes=["G_r vanishes identically"])
    fact = math.factorial
    d = lambda i, j: c(i, j) * fact(i) * fact(j)  # noqa: E731  (partial derivative at 0)
    if k % 2:
        notes.append(f"odd multiplicity {k}: inconsistent with monodromy")
    if not _is_zero(c(0, 1)):
        notes.append("d Theta/d rho nonzero: not a singular point of Theta")
        return ThetaSingularityClass(k, FormTag.UNCLASSIFIED, 0, 0, 0.0, notes=notes)
    H11, H12, H22 = d(2, 0), d(1, 1), d(0, 2)
    det = H11 * H22 - H12 * H12
    if k == 2:
        d1 = _sgn(local, H11)
        d1_printed = _sgn(local, d(3, 0))
        if not _is_zero(det):
            return ThetaSingularityClass(k, FormTag.ELLIPTIC_A, d1, _sgn(local, det), float(det), notes=notes)
        v1, v2 = -H12 * d1, H11 * d1  # kernel vector with v2 > 0

        def dirderiv(n):
            return fact(n) * sum(c(i, n - i) * v1**i * v2 ** (n - i) for i in range(n + 1))

        t3 = dirderiv(3)
        if not _is_zero(t3):
            if d1_printed != d1:
                notes.append(
                    f"delta1 from G_r'' is {d1}; the third-derivative reading gives {d1_printed}"
                )
            return ThetaSingularityClass(k, FormTag.CUSP_B, d1, _sgn(local, t3), float(det), d1_printed, notes)
        t4 = dirderiv(4)
        t_vvphi = v1 * v1 * d(3, 0) + 2 * v1 * v2 * d(2, 1) + v2 * v2 * d(1, 2)
        s = t4 * H11 - 3 * t_vvphi * t_vvphi
        notes.append("s evaluated with the fourth directional derivative")
        if not _is_zero(s):
            return ThetaSingularityClass(k, FormTag.QUARTIC_C, d1, _sgn(local, s), float(det), notes=notes)
        notes.append("codimension above three")
        return ThetaSingularityClass(k, FormTag.UNCLASSIFIED, d1, 0, float(det), notes=notes)
    # k >= 3: non-elementary when G_{r+1} has a simple zero
    if local.orders.get(1) == 1:
        d1 = _sgn(local, c(k, 0))
        d2 = _sgn(local, c(1, 1))
        tag = FormTag.NON_ELEMENTARY_D
        if k != 4:
            notes.append(f"multiplicity {k}: normal form holds but codimension exceeds three")
        return ThetaSingularityClass(k, tag, d1, d2, float(det), notes=notes)
    notes.append("G_{r+1} has no simple zero at the direction")
    return ThetaSingularityClass(k, FormTag.UNCLASSIFIED, 0, 0, float(det), notes=notes)


def classify_theta_singularity(pe: PolarExpansion, phi_star: float | OmegaPoint) -> ThetaSingularityClass:
    if isinstance(phi_star, OmegaPoint):
        point = phi_star
    else:
        matches = [w for w in pe.omega if abs((w.angle - phi_star + math.pi) % (2 * math.pi) - math.pi) < 1e-9]
        if not matches:
            raise ValueError(f"angle {phi_star} is not a characteristic direction")
        point = matches[0]
    local = LocalTheta.from_expansion(pe, point, max(8, point.multiplicity + 4))
    return classify_local(local)
