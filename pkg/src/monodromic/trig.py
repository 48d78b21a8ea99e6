"""Exact rational functions of (cos φ, sin φ).

Every rational function of ``c = cos φ`` and ``s = sin φ`` is a rational
function of ``t = tan(φ/2)`` through

    c = (1 - t²)/(1 + t²),    s = 2t/(1 + t²).

Storing ``num(t)/den(t)`` reduced, with ``den`` monic, gives a unique canonical
form, so equality and zero tests are exact. φ = π corresponds to t = ∞ and is
handled through coefficient reversal.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

from .algebra import BivariatePolynomial, NotAUnitError, QPoly, as_fraction, qpoly_gcd

_ONE_PLUS_T2 = QPoly([1, 0, 1])
_C_NUM = QPoly([1, 0, -1])  # 1 - t²
_S_NUM = QPoly([0, 2])  # 2t


class TrigRational:
    """Reduced quotient ``num(t)/den(t)`` with ``t = tan(φ/2)`` and monic ``den``."""

    __slots__ = ("num", "den")

    def __init__(self, num: QPoly, den: QPoly | None = None, _reduced: bool = False):
        if den is None:
            den = QPoly([1])
        if not den:
            raise ZeroDivisionError("TrigRational with zero denominator")
        if not _reduced:
            if not num:
                den = QPoly([1])
            else:
                g = qpoly_gcd(num, den)
                if g.degree > 0:
                    num, den = num // g, den // g
                lead = den.lead
                num, den = num * (1 / lead), den * (1 / lead)
        self.num = num
        self.den = den

    # -- construction ------------------------------------------------------
    @classmethod
    def const(cls, value) -> "TrigRational":
        return cls(QPoly([as_fraction(value)]), QPoly([1]), _reduced=True)

    @classmethod
    def cos(cls) -> "TrigRational":
        return cls(_C_NUM, _ONE_PLUS_T2)

    @classmethod
    def sin(cls) -> "TrigRational":
        return cls(_S_NUM, _ONE_PLUS_T2)

    @classmethod
    def from_cs(cls, poly: BivariatePolynomial) -> "TrigRational":
        """Convert a polynomial in (c, s) (x ↦ c, y ↦ s) to canonical form."""
        if not poly:
            return cls.const(0)
        d = poly.total_degree()
        num = QPoly()
        cpow = [QPoly([1])]
        spow = [QPoly([1])]
        opow = [QPoly([1])]
        for _ in range(d):
            cpow.append(cpow[-1] * _C_NUM)
            spow.append(spow[-1] * _S_NUM)
            opow.append(opow[-1] * _ONE_PLUS_T2)
        for (i, j), v in poly.terms.items():
            num = num + cpow[i] * spow[j] * opow[d - i - j] * v
        return cls(num, opow[d])

    # -- ring structure ----------------------------------------------------
    def _coerce(self, other) -> "TrigRational":
        if isinstance(other, TrigRational):
            return other
        if isinstance(other, (int, Fraction)):
            return TrigRational.const(other)
        return NotImplemented

    def __bool__(self) -> bool:
        return bool(self.num)

    def is_zero(self) -> bool:
        return not self.num

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __neg__(self) -> "TrigRational":
        return TrigRational(-self.num, self.den, _reduced=True)

    def __add__(self, other) -> "TrigRational":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.den == o.den:
            return TrigRational(self.num + o.num, self.den)
        return TrigRational(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __sub__(self, other) -> "TrigRational":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> "TrigRational":
        return (-self) + other

    def __mul__(self, other) -> "TrigRational":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return TrigRational.const(0)
            return TrigRational(self.num * other, self.den, _reduced=True)
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return TrigRational(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "TrigRational":
        if not self.num:
            raise NotAUnitError("inverse of the zero trigonometric function")
        return TrigRational(self.den, self.num)

    def __truediv__(self, other) -> "TrigRational":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other) -> "TrigRational":
        return self.inverse() * other

    def __pow__(self, n: int) -> "TrigRational":
        if n < 0:
            return self.inverse() ** (-n)
        return TrigRational(self.num**n, self.den**n, _reduced=True)

    # -- calculus ----------------------------------------------------------
    def derivative(self) -> "TrigRational":
        """d/dφ, using dt/dφ = (1 + t²)/2."""
        n, d = self.num, self.den
        top = (n.derivative() * d - n * d.derivative()) * _ONE_PLUS_T2 * Fraction(1, 2)
        return TrigRational(top, d * d)

    # -- evaluation --------------------------------------------------------
    @property
    def pole_at_pi(self) -> bool:
        return self.num.degree > self.den.degree

    def at_zero(self) -> Fraction:
        """Exact value at φ = 0 (t = 0)."""
        d0 = self.den.eval_exact(0)
        if d0 == 0:
            raise ZeroDivisionError("pole at φ = 0")
        return self.num.eval_exact(0) / d0

    def at_pi(self) -> Fraction:
        """Exact value at φ = π (t = ∞)."""
        if self.pole_at_pi:
            raise ZeroDivisionError("pole at φ = π")
        if self.num.degree < self.den.degree:
            return Fraction(0)
        return self.num.lead / self.den.lead

    def at_t(self, t: Fraction) -> Fraction:
        """Exact value at a rational half-angle tangent."""
        dv = self.den.eval_exact(t)
        if dv == 0:
            raise ZeroDivisionError(f"pole at t = {t}")
        return self.num.eval_exact(t) / dv

    def __call__(self, phi):
        """Float evaluation at angle(s) ``phi``; works on numpy arrays."""
        import numpy as np

        scalar = np.ndim(phi) == 0
        half = np.mod(np.atleast_1d(np.asarray(phi, dtype=float)), 2 * math.pi) / 2.0
        t = np.tan(half)
        small = np.abs(t) <= 1.0
        out = np.empty_like(half)
        if np.any(small):
            ts = t[small]
            out[small] = self.num(ts) / self.den(ts)
        if np.any(~small):
            # t = 1/u with u = cot(φ/2): num(t)/den(t) = u^(dd-dn) numrev(u)/denrev(u)
            hb = half[~small]
            u = np.cos(hb) / np.sin(hb)
            shift = self.den.degree - self.num.degree if self.num else 0
            val = self.num.reversed()(u) / self.den.reversed()(u)
            out[~small] = val * u**shift if shift >= 0 else val / u ** (-shift)
        return float(out[0]) if scalar else out

    def eval_mp(self, phi):
        """Evaluate with mpmath at an mpf angle (uses the current mp precision)."""
        import mpmath

        half = mpmath.fmod(phi, 2 * mpmath.pi) / 2
        if half < 0:
            half += mpmath.pi
        if abs(mpmath.tan(half)) <= 1:
            t = mpmath.tan(half)
            return self.num.eval_generic(t) / self.den.eval_generic(t)
        u = mpmath.cot(half)
        val = self.num.reversed().eval_generic(u) / self.den.reversed().eval_generic(u)
        shift = self.den.degree - self.num.degree if self.num else 0
        return val * u**shift

    # -- presentation ------------------------------------------------------
    def to_sympy(self, phi=None):
        """sympy expression in φ (for reporting only)."""
        import sympy

        phi = phi if phi is not None else sympy.Symbol("phi")
        t = sympy.tan(phi / 2)
        num = sum(sympy.Rational(c.numerator, c.denominator) * t**i for i, c in enumerate(self.num.c))
        den = sum(sympy.Rational(c.numerator, c.denominator) * t**i for i, c in enumerate(self.den.c))
        return num / den

    def __repr__(self) -> str:
        return f"TrigRational(num={list(map(str, self.num.c))}, den={list(map(str, self.den.c))})"


Coefficient = Union[Fraction, TrigRational]
