"""Ready-made vector field families with known inverse integrating factors."""

from __future__ import annotations

from fractions import Fraction

from .algebra import BivariatePolynomial, as_fraction
from .field import VectorField

_x = BivariatePolynomial.x()
_y = BivariatePolynomial.y()
_r2 = _x * _x + _y * _y


def focus_cycle(lam=1) -> VectorField:
    """``x' = (x - y) r² - lam (x + y)``, ``y' = (x + y) r² + lam (x - y)``.

    Inverse integrating factor ``r² (r² - lam)``; for ``lam > 0`` the circle
    ``r² = lam`` is a hyperbolic limit cycle.
    """
    lam = as_fraction(lam)
    P = (_x - _y) * _r2 - (_x + _y) * lam
    Q = (_x + _y) * _r2 + (_x - _y) * lam
    return VectorField(P, Q, ((_r2, Fraction(1)), (_r2 - lam, Fraction(1))))


def degenerate_family(l1=2, l2=1, mu=1, A=0) -> VectorField:
    """Two-weight monodromic family with IIF ``(x² + y²)(x⁶ + 3y²)``.

    Monodromic exactly when ``3 l1 - l2 > 0`` and ``l1 - l2 > 0``.
    """
    l1, l2, mu, A = map(as_fraction, (l1, l2, mu, A))
    h = _x**6 + _y * _y * 3
    P = h * (-_y + _x * mu) * l1 + _r2 * (_y + _x**3 * A) * l2
    Q = h * (_x + _y * mu) * l1 + _r2 * (-(_x**5) + _x * _x * _y * (3 * A)) * l2
    return VectorField(P, Q, ((_r2, Fraction(1)), (h, Fraction(1))))


def degenerate_family_is_monodromic(l1, l2, mu=0, A=0) -> bool:
    l1, l2 = as_fraction(l1), as_fraction(l2)
    return 3 * l1 - l2 > 0 and l1 - l2 > 0


def weak_focus() -> VectorField:
    """``x' = -y + x r²``, ``y' = x + y r²``: polar form ``rho' = rho³``, ``phi' = 1``.

    The inverse integrating factor is ``r⁴`` (so ``V = rho³``) and the return map
    is ``rho / sqrt(1 - 4 pi rho²) = rho + 2 pi rho³ + ...``.
    """
    P = -_y + _x * _r2
    Q = _x + _y * _r2
    return VectorField(P, Q, ((_r2, Fraction(2)),))


def linear_focus(a=-1, b=1) -> VectorField:
    """``x' = a x + b y``, ``y' = -b x + a y`` with IIF ``x² + y²``."""
    a, b = as_fraction(a), as_fraction(b)
    return VectorField(_x * a + _y * b, _y * a - _x * b, ((_r2, Fraction(1)),))


def fundamental_field(m: int) -> VectorField:
    """``rho^m d/drho + Pi^m d/dPi`` written in (x, y) = (rho, Pi)."""
    return VectorField(_x**m, _y**m)
