"""Newton diagram, quasihomogeneous splitting and dominant-balance data.

Support convention: a term ``a x^i y^(j-1)`` of ``P`` and a term
``b x^(i-1) y^j`` of ``Q`` both contribute the lattice point ``(i, j)``. With
weights ``(p, q)`` such a point has quasihomogeneous degree
``p*i + q*j - p - q``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Tuple

from .algebra import BivariatePolynomial, QPoly
from .field import InputError, VectorField

Point = Tuple[int, int]


class DegenerateDiagramError(ValueError):
    """The Newton diagram has no compact edges meeting both axes."""


@dataclass(frozen=True)
class Edge:
    start: Point
    end: Point
    weight: Tuple[int, int]

    @property
    def slope(self) -> Fraction:
        return Fraction(self.end[1] - self.start[1], self.end[0] - self.start[0])


@dataclass(frozen=True)
class NewtonDiagram:
    support: frozenset
    vertices: Tuple[Point, ...]
    edges: Tuple[Edge, ...]

    @property
    def weights(self) -> Tuple[Tuple[int, int], ...]:
        seen: List[Tuple[int, int]] = []
        for e in self.edges:
            if e.weight not in seen:
                seen.append(e.weight)
        return tuple(seen)

    def endpoints(self) -> List[Tuple[Point, Point]]:
        return [(e.start, e.end) for e in self.edges]


def support(X: VectorField) -> frozenset:
    pts = {(i, j + 1) for (i, j) in X.P.terms}
    pts |= {(i + 1, j) for (i, j) in X.Q.terms}
    return frozenset(pts)


def _cross(o: Point, a: Point, b: Point) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def newton_diagram(X: VectorField) -> NewtonDiagram:
    """Compact edges of the lower-left boundary of ``supp + R_+^2``.

    Edges are listed from the ordinate axis to the abscissa axis, i.e. from
    the steepest to the flattest.
    """
    pts = support(X)
    if not pts:
        raise InputError("zero vector field")
    # lowest point on each column, then lower convex hull
    column: Dict[int, int] = {}
    for i, j in pts:
        column[i] = min(j, column.get(i, j))
    cand = sorted(column.items())
    left = cand[0]
    jmin = min(j for _, j in cand)
    right = min((i, j) for i, j in cand if j == jmin)
    cand = [c for c in cand if left[0] <= c[0] <= right[0]]
    hull: List[Point] = []
    for pnt in cand:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], pnt) <= 0:
            hull.pop()
        hull.append(pnt)
    # keep the strictly descending part (negative slopes only)
    verts = [hull[0]]
    for pnt in hull[1:]:
        if pnt[1] < verts[-1][1]:
            verts.append(pnt)
    if left[0] != 0 or right[1] != 0:
        raise DegenerateDiagramError(
            f"diagram does not reach both axes (left vertex {left}, right vertex {right}); "
            "an invariant axis makes the origin non-monodromic and the outer edges would "
            "need a degenerate weight"
        )
    if len(verts) < 2:
        raise DegenerateDiagramError(f"diagram reduces to the single vertex {verts[0]}")
    edges = []
    for a, b in zip(verts, verts[1:]):
        di, dj = b[0] - a[0], a[1] - b[1]
        g = gcd(di, dj)
        edges.append(Edge(a, b, (dj // g, di // g)))
    return NewtonDiagram(frozenset(pts), tuple(verts), tuple(edges))


# ---------------------------------------------------------------------------
# quasihomogeneous decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuasiHomogeneousDecomposition:
    weight: Tuple[int, int]
    components: Dict[int, Tuple[BivariatePolynomial, BivariatePolynomial]]
    r: int

    @property
    def leading(self) -> Tuple[BivariatePolynomial, BivariatePolynomial]:
        return self.components[self.r]

    def reconstruct(self) -> Tuple[BivariatePolynomial, BivariatePolynomial]:
        P, Q = BivariatePolynomial(), BivariatePolynomial()
        for Pk, Qk in self.components.values():
            P, Q = P + Pk, Q + Qk
        return P, Q


def _check_weight(p: int, q: int) -> None:
    if p < 1 or q < 1 or gcd(p, q) != 1:
        raise InputError(f"weights must be coprime positive integers, got ({p}, {q})")


def quasihomog_decompose(X: VectorField, p: int, q: int) -> QuasiHomogeneousDecomposition:
    """Split ``X = sum_k X_k`` with ``X_k = P_{p+k} d/dx + Q_{q+k} d/dy``."""
    _check_weight(p, q)
    parts: Dict[int, List[dict]] = {}
    for (a, b), c in X.P.terms.items():
        parts.setdefault(p * a + q * b - p, [{}, {}])[0][(a, b)] = c
    for (a, b), c in X.Q.terms.items():
        parts.setdefault(p * a + q * b - q, [{}, {}])[1][(a, b)] = c
    comps = {k: (BivariatePolynomial(v[0]), BivariatePolynomial(v[1])) for k, v in sorted(parts.items())}
    return QuasiHomogeneousDecomposition((p, q), comps, min(comps))


# ---------------------------------------------------------------------------
# determining polynomial and Fuchs indices
# ---------------------------------------------------------------------------


def determining_polynomial(Pr: BivariatePolynomial, Qr: BivariatePolynomial, p: int, q: int) -> QPoly:
    """Coefficient ``D(eta)`` in ``Pr(x, eta x^(q/p)) d/dx(eta x^(q/p)) - Qr(x, eta x^(q/p)) = D(eta) x^e``.

    Both polynomials must be (p, q)-quasihomogeneous of the matching degrees,
    otherwise the x-exponents differ and a ValueError is raised.
    """
    _check_weight(p, q)
    if not Pr and not Qr:
        raise ValueError("leading pair is zero")
    coeffs: Dict[int, Fraction] = {}
    exps = set()
    qp = Fraction(q, p)
    for (a, b), c in Pr.terms.items():
        exps.add(a + (b + 1) * qp - 1)
        coeffs[b + 1] = coeffs.get(b + 1, 0) + c * qp
    for (a, b), c in Qr.terms.items():
        exps.add(a + b * qp)
        coeffs[b] = coeffs.get(b, 0) - c
    if len(exps) != 1:
        raise ValueError(f"pair is not quasihomogeneous for weights ({p}, {q}): exponents {sorted(exps)}")
    deg = max(coeffs)
    return QPoly([coeffs.get(k, 0) for k in range(deg + 1)])


def determining_exponent(Pr: BivariatePolynomial, Qr: BivariatePolynomial, p: int, q: int) -> Fraction:
    """The common x-exponent ``(r + q)/p`` of the substitution identity."""
    for (a, b) in Pr.terms:
        return a + (b + 1) * Fraction(q, p) - 1
    for (a, b) in Qr.terms:
        return a + b * Fraction(q, p)
    raise ValueError("leading pair is zero")


@dataclass(frozen=True)
class FuchsResult:
    slope: object  # coefficient of j in Xi(j)
    offset: object  # constant term of Xi(j)
    indices: Tuple[object, ...]
    degenerate: bool
    has_fractional_positive: bool
    index_n: Optional[int]
    reason: str = ""

    def xi(self, j):
        return self.slope * j + self.offset


def _exact(alpha):
    import sympy

    if isinstance(alpha, tuple):
        re, im = alpha
        return sympy.Rational(str(Fraction(re))) + sympy.I * sympy.Rational(str(Fraction(im)))
    if isinstance(alpha, (int, Fraction)):
        f = Fraction(alpha)
        return sympy.Rational(f.numerator, f.denominator)
    if isinstance(alpha, complex):
        return sympy.nsimplify(alpha.real) + sympy.I * sympy.nsimplify(alpha.imag)
    return sympy.sympify(alpha)


def fuchs_indices(Pr: BivariatePolynomial, Qr: BivariatePolynomial, p: int, q: int, alpha0) -> FuchsResult:
    """Roots of the linearization ``Xi(j)`` of the dominant balance at ``alpha0 x^(q/p)``.

    Perturbing ``y = alpha0 x^(q/p)`` by ``s x^(q/p + j)`` changes the balance
    ``Pr y' - Qr`` at first order in ``s`` by ``Xi(j) x^beta`` with
    ``Xi(j) = D'(alpha0) + j Pr(1, alpha0)`` where ``D`` is the determining
    polynomial. ``alpha0`` may be a rational, a ``(re, im)`` pair of rationals
    or a complex number.
    """
    import sympy

    D = determining_polynomial(Pr, Qr, p, q)
    a = _exact(alpha0)
    eta = sympy.Symbol("eta")
    Dsym = sum(sympy.Rational(c.numerator, c.denominator) * eta**k for k, c in enumerate(D.c))
    if D and sympy.simplify(Dsym.subs(eta, a)) != 0:
        raise ValueError(f"alpha0 = {alpha0} is not a root of the determining polynomial")
    A = sympy.nsimplify(0)
    for (i, j), c in Pr.terms.items():
        A += sympy.Rational(c.numerator, c.denominator) * a**j
    A = sympy.simplify(A)
    B = sympy.simplify(sympy.diff(Dsym, eta).subs(eta, a))
    if not D:
        # every direction is a solution of the dominant balance
        return FuchsResult(A, B, (), True, False, None, "determining polynomial vanishes identically")
    if A == 0:
        if B == 0:
            return FuchsResult(A, B, (), True, False, None, "linearization vanishes identically")
        return FuchsResult(A, B, (), False, False, p, "no Fuchs index")
    j0 = sympy.simplify(-B / A)
    frac_pos = bool(j0.is_rational and j0 > 0 and not j0.is_integer)
    n = None if frac_pos else p
    return FuchsResult(A, B, (j0,), False, frac_pos, n)
