"""Planar polynomial vector fields with an optional Darboux inverse integrating factor."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Tuple

from .algebra import BivariatePolynomial, as_fraction


class InputError(ValueError):
    """The vector field or its auxiliary data is malformed."""


@dataclass(frozen=True)
class VectorField:
    """``x' = P(x, y)``, ``y' = Q(x, y)`` with singular point at the origin.

    ``iif_factors`` encodes ``v = prod f_i ** e_i``, an inverse integrating
    factor given in product form (rational exponents allowed).
    """

    P: BivariatePolynomial
    Q: BivariatePolynomial
    iif_factors: Tuple[Tuple[BivariatePolynomial, Fraction], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.P and not self.Q:
            raise InputError("zero vector field")
        if self.P.coeff(0, 0) or self.Q.coeff(0, 0):
            raise InputError("the origin is not a singular point (P(0,0) or Q(0,0) nonzero)")
        facs = tuple((f, as_fraction(e)) for f, e in self.iif_factors)
        for f, _ in facs:
            if not f:
                raise InputError("zero factor in the inverse integrating factor")
        object.__setattr__(self, "iif_factors", facs)

    @property
    def has_iif(self) -> bool:
        return bool(self.iif_factors)

    def iif_value(self, x, y):
        """Numeric value of ``v`` (real powers; factors assumed positive where fractional)."""
        out = 1.0
        for f, e in self.iif_factors:
            fv = f(x, y)
            out = out * (fv ** int(e) if e.denominator == 1 else fv ** float(e))
        return out

    def iif_polynomial(self) -> BivariatePolynomial | None:
        """``v`` as a polynomial when every exponent is a nonnegative integer."""
        if any(e.denominator != 1 or e < 0 for _, e in self.iif_factors):
            return None
        out = BivariatePolynomial.const(1)
        for f, e in self.iif_factors:
            out = out * f ** int(e)
        return out

    def __call__(self, x, y):
        return self.P(x, y), self.Q(x, y)

    def divergence_residual(self) -> BivariatePolynomial | None:
        """``P v_x + Q v_y - (P_x + Q_y) v`` for polynomial ``v`` (zero iff v is an IIF)."""
        v = self.iif_polynomial()
        if v is None:
            return None
        div = self.P.diff(0) + self.Q.diff(1)
        return self.P * v.diff(0) + self.Q * v.diff(1) - div * v


def darboux_system(f: BivariatePolynomial, a, b, alpha) -> VectorField:
    """Build ``f (a (x, y) + b (y, -x)) + alpha r² (f_y, -f_x)`` with IIF ``r² f``.

    Handy for constructing test systems whose inverse integrating factor is
    known by construction.
    """
    x, y = BivariatePolynomial.x(), BivariatePolynomial.y()
    r2 = x * x + y * y
    a, b, alpha = as_fraction(a), as_fraction(b), as_fraction(alpha)
    P = f * (x * a + y * b) + r2 * f.diff(1) * alpha
    Q = f * (y * a - x * b) - r2 * f.diff(0) * alpha
    return VectorField(P, Q, ((r2, Fraction(1)), (f, Fraction(1))))


__all__: List[str] = ["InputError", "VectorField", "darboux_system"]
