"""Truncated Laurent and Puiseux series with exact, pluggable coefficients.

A :class:`LaurentSeries` is ``sum_{k >= lead} c_k * var**k + O(var**(trunc+1))``.
Coefficients can be any object supporting ``+ - *`` together with ``Fraction``
(``Fraction`` itself, :class:`~monodromic.trig.TrigRational`,
:class:`~monodromic.algebra.LPoly`). Every operation propagates the tightest
truncation order it can justify and asking for a coefficient past it raises
:class:`TruncationError` rather than silently returning zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, List, Sequence

from .algebra import NotAUnitError


class TruncationError(IndexError):
    """Requested a coefficient beyond the known truncation order."""


class SeriesError(ValueError):
    """Invalid series operation (variable mismatch, zero divisor, ...)."""


def _inv(x):
    if isinstance(x, (int, Fraction)):
        if x == 0:
            raise ZeroDivisionError("inverse of zero coefficient")
        return Fraction(1) / x
    if hasattr(x, "inverse"):
        return x.inverse()
    return 1 / x  # floats and mpmath numbers


class LaurentSeries:
    """Immutable truncated Laurent series.

    Parameters
    ----------
    coeffs : sequence
        Coefficients of ``var**start, var**(start+1), ...``. Entries past
        ``trunc`` are dropped, missing entries up to ``trunc`` are zero.
    start : int
        Exponent of ``coeffs[0]``.
    trunc : int
        The series is known modulo ``O(var**(trunc+1))``.
    var : str
        Variable name, checked by binary operations.
    """

    __slots__ = ("_c", "lead", "trunc", "var", "zero")

    def __init__(self, coeffs: Sequence, start: int, trunc: int, var: str = "rho", zero=None):
        coeffs = list(coeffs)[: max(trunc - start + 1, 0)]
        if zero is None:
            zero = Fraction(0)
            for c in coeffs:
                if c:
                    zero = c * 0
                    break
        k = 0
        while k < len(coeffs) and not coeffs[k]:
            k += 1
        coeffs = coeffs[k:]
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        self._c = tuple(coeffs)
        self.lead = start + k if coeffs else trunc + 1
        self.trunc = int(trunc)
        self.var = var
        self.zero = zero

    # -- constructors ------------------------------------------------------
    @classmethod
    def monomial(cls, exponent: int, coeff=1, trunc: int = 12, var: str = "rho") -> "LaurentSeries":
        c = Fraction(coeff) if isinstance(coeff, int) else coeff
        return cls([c], exponent, trunc, var)

    @classmethod
    def from_dict(cls, terms: dict, trunc: int, var: str = "rho") -> "LaurentSeries":
        if not terms:
            return cls([], 0, trunc, var)
        lo = min(terms)
        hi = max(terms)
        zero = next((v * 0 for v in terms.values() if v), Fraction(0))
        return cls([terms.get(k, zero) for k in range(lo, hi + 1)], lo, trunc, var, zero)

    @classmethod
    def zero_series(cls, trunc: int, var: str = "rho", zero=None) -> "LaurentSeries":
        return cls([], 0, trunc, var, zero)

    # -- access ------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self._c

    @property
    def leading_coefficient(self):
        if not self._c:
            raise SeriesError("zero series has no leading coefficient")
        return self._c[0]

    @property
    def last_stored(self) -> int:
        return self.lead + len(self._c) - 1

    def coeff(self, k: int):
        if k > self.trunc:
            raise TruncationError(f"coefficient of {self.var}^{k} requested, series known to order {self.trunc}")
        i = k - self.lead
        if i < 0 or i >= len(self._c):
            return self.zero
        return self._c[i]

    __getitem__ = coeff

    def items(self):
        """(exponent, coefficient) pairs for stored nonzero terms."""
        return [(self.lead + i, c) for i, c in enumerate(self._c) if c]

    def to_dict(self) -> dict:
        return dict(self.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return (
            self.var == other.var
            and self.trunc == other.trunc
            and self.to_dict() == other.to_dict()
        )

    def __hash__(self):
        return hash((self.var, self.trunc, tuple(self.items())))

    def agrees_with(self, other: "LaurentSeries") -> bool:
        """Equality of all coefficients known to both series."""
        top = min(self.trunc, other.trunc)
        lo = min(self.lead, other.lead, top)
        return all(self.coeff(k) == other.coeff(k) for k in range(lo, top + 1))

    def __repr__(self) -> str:
        body = " + ".join(f"({c})*{self.var}^{k}" for k, c in self.items()) or "0"
        return f"LaurentSeries({body} + O({self.var}^{self.trunc + 1}))"

    # -- operator sugar ----------------------------------------------------
    def __add__(self, other):
        return series_add(self, _lift(other, self))

    __radd__ = __add__

    def __neg__(self):
        return series_scale(self, Fraction(-1))

    def __sub__(self, other):
        return series_add(self, -_lift(other, self))

    def __rsub__(self, other):
        return series_add(_lift(other, self), -self)

    def __mul__(self, other):
        if isinstance(other, LaurentSeries):
            return series_mul(self, other)
        return series_scale(self, other)

    __rmul__ = __mul__

    def __pow__(self, n):
        return series_pow(self, n)


def _lift(x, like: LaurentSeries) -> LaurentSeries:
    if isinstance(x, LaurentSeries):
        return x
    # a scalar is exact, so it never lowers the truncation of ``like``
    return LaurentSeries([x], 0, max(like.trunc, 0), like.var)


def _check_var(a: LaurentSeries, b: LaurentSeries) -> None:
    if a.var != b.var:
        raise SeriesError(f"variable mismatch: {a.var!r} vs {b.var!r}")


# ---------------------------------------------------------------------------
# basic arithmetic
# ---------------------------------------------------------------------------


def truncate(a: LaurentSeries, trunc: int) -> LaurentSeries:
    """Forget coefficients above ``trunc`` (never raises precision)."""
    t = min(trunc, a.trunc)
    return LaurentSeries(a._c, a.lead if a._c else 0, t, a.var, a.zero)


def series_scale(a: LaurentSeries, k) -> LaurentSeries:
    if isinstance(k, int):
        k = Fraction(k)
    return LaurentSeries([c * k for c in a._c], a.lead if a._c else 0, a.trunc, a.var, a.zero * k)


def shift(a: LaurentSeries, k: int) -> LaurentSeries:
    """Multiply by ``var**k`` exactly."""
    return LaurentSeries(a._c, (a.lead if a._c else 0) + k, a.trunc + k, a.var, a.zero)


def series_add(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    _check_var(a, b)
    trunc = min(a.trunc, b.trunc)
    zero = a.zero + b.zero
    if a.is_zero() and b.is_zero():
        return LaurentSeries([], 0, trunc, a.var, zero)
    lo = min(x.lead for x in (a, b) if not x.is_zero())
    hi = min(trunc, max(x.last_stored for x in (a, b) if not x.is_zero()))
    out = [a.coeff(k) + b.coeff(k) for k in range(lo, hi + 1)]
    return LaurentSeries(out, lo, trunc, a.var, zero)


def series_mul(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    """Cauchy product ``c_i = sum_{j+k=i} a_j b_k``.

    ``a`` is known relative to its lead up to ``a.trunc - a.lead``; the
    product therefore is known to ``min(a.trunc + b.lead, b.trunc + a.lead)``.
    """
    _check_var(a, b)
    zero = a.zero * b.zero
    trunc = min(a.trunc + b.lead, b.trunc + a.lead)
    if a.is_zero() or b.is_zero():
        return LaurentSeries([], 0, trunc, a.var, zero)
    lo = a.lead + b.lead
    hi = min(trunc, a.last_stored + b.last_stored)
    out = [zero] * (hi - lo + 1)
    for i, x in enumerate(a._c):
        if not x:
            continue
        for j, y in enumerate(b._c):
            if i + j > hi - lo:
                break
            if y:
                out[i + j] = out[i + j] + x * y
    return LaurentSeries(out, lo, trunc, a.var, zero)


def series_reciprocal(a: LaurentSeries) -> LaurentSeries:
    """Multiplicative inverse; the leading coefficient must be a unit."""
    if a.is_zero():
        raise SeriesError("reciprocal of a series that vanishes to its truncation order")
    l = a.lead
    rel = a.trunc - l
    inv0 = _inv(a._c[0])
    out = [inv0]
    for k in range(1, rel + 1):
        acc = None
        for j in range(1, min(k, len(a._c) - 1) + 1):
            if a._c[j]:
                term = a._c[j] * out[k - j]
                acc = term if acc is None else acc + term
        out.append(a.zero * 0 if acc is None else -(acc * inv0))
    return LaurentSeries(out, -l, -l + rel, a.var, a.zero)


def series_pow(a: LaurentSeries, n) -> LaurentSeries:
    """``a**n`` by the J.C.P. Miller recurrence.

    With ``a = var**l * (a_0 + a_1 var + ...)``::

        d_0 = a_0**n
        d_i = (i a_0)**-1 * sum_{k=1..i} (k n - i + k) a_k d_{i-k}

    ``n`` may be a negative integer (via the reciprocal) or a Fraction, in
    which case the series must start at ``var**0`` with leading coefficient 1.
    """
    if isinstance(n, Fraction) and n.denominator == 1:
        n = int(n)
    if isinstance(n, int) and n < 0:
        return series_pow(series_reciprocal(a), -n)
    if a.is_zero():
        if n == 0:
            return LaurentSeries([Fraction(1)], 0, max(a.trunc - a.lead, 0), a.var)
        return LaurentSeries([], 0, a.trunc, a.var, a.zero)
    l = a.lead
    rel = a.trunc - l
    a0 = a._c[0]
    if isinstance(n, int):
        d0 = a0**n if n else a0 * 0 + 1
        out_lead = n * l
    else:
        n = Fraction(n)
        if l != 0 or a0 != 1:
            raise SeriesError("fractional powers need a series of the form 1 + O(var)")
        d0 = a0
        out_lead = 0
    inv_a0 = _inv(a0)
    d = [d0]
    for i in range(1, rel + 1):
        acc = None
        for k in range(1, min(i, len(a._c) - 1) + 1):
            ak = a._c[k]
            if not ak:
                continue
            w = k * n - i + k
            if w == 0:
                continue
            term = ak * d[i - k] * Fraction(w)
            acc = term if acc is None else acc + term
        if acc is None:
            d.append(a.zero * 0)
        else:
            d.append(acc * inv_a0 * Fraction(1, i))
    return LaurentSeries(d, out_lead, out_lead + rel, a.var, a.zero)


def series_compose(outer: LaurentSeries, inner: LaurentSeries) -> LaurentSeries:
    """Formal substitution ``outer(inner)`` for ``inner = O(var)``."""
    if inner.is_zero() or inner.lead < 1:
        raise SeriesError("inner series must have no constant term (and not vanish)")
    li = inner.lead
    if outer.is_zero():
        return LaurentSeries([], 0, (outer.trunc + 1) * li - 1, inner.var, outer.zero)
    lo = outer.lead
    rel = outer.trunc - lo
    # outer = var^lo * P(var), P known to degree rel
    acc = LaurentSeries([outer.coeff(lo + rel)], 0, inner.trunc + li * rel, inner.var)
    for k in range(rel - 1, -1, -1):
        acc = series_add(series_mul(acc, inner), LaurentSeries([outer.coeff(lo + k)], 0, acc.trunc + li, inner.var))
    acc = truncate(acc, li * (rel + 1) - 1)
    if lo == 0:
        return acc
    return series_mul(acc, series_pow(inner, lo))


def residue(a: LaurentSeries):
    """Coefficient of ``var**-1``."""
    return a.coeff(-1)


def derivative(a: LaurentSeries) -> LaurentSeries:
    out = {k - 1: c * k for k, c in a.items() if k != 0}
    res = LaurentSeries.from_dict(out, a.trunc - 1, a.var)
    return LaurentSeries(res._c, res.lead if res._c else 0, res.trunc, a.var, a.zero)


def map_coefficients(a: LaurentSeries, f: Callable, zero=None) -> LaurentSeries:
    """Apply ``f`` to every coefficient (e.g. evaluation of trig coefficients)."""
    terms = {k: f(c) for k, c in a.items()}
    res = LaurentSeries.from_dict(terms, a.trunc, a.var)
    return LaurentSeries(res._c, res.lead if res._c else 0, a.trunc, a.var, zero if zero is not None else res.zero)


def evaluate(a: LaurentSeries, x, coeff_eval: Callable | None = None):
    """Numerically sum the known terms at ``var = x``."""
    total = 0.0 * x
    for k, c in a.items():
        v = coeff_eval(c) if coeff_eval is not None else float(c)
        total = total + v * x**k
    return total


# ---------------------------------------------------------------------------
# Puiseux series
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PuiseuxSeries:
    """Series in ``rho**(1/index)``, stored as a Laurent series in ``sigma``
    with ``rho = sigma**index``."""

    base: LaurentSeries
    index: int = 1

    def __post_init__(self):
        if self.index < 1:
            raise SeriesError("Puiseux index must be a positive integer")

    @property
    def multiplicity(self) -> int:
        return self.base.lead

    @property
    def leading_exponent(self) -> Fraction:
        return Fraction(self.base.lead, self.index)


def puiseux_to_laurent(v: PuiseuxSeries) -> LaurentSeries:
    """Transform ``V(rho)`` to ``V(sigma**n)/(n sigma**(n-1))``.

    This is the inverse integrating factor of the system rewritten in the
    variable ``sigma = rho**(1/n)``; its multiplicity is ``m - n + 1``.
    """
    n = v.index
    if n == 1:
        return v.base
    return series_scale(shift(v.base, -(n - 1)), Fraction(1, n))


def random_series(rng, lead: int, length: int, trunc: int | None = None, var: str = "rho",
                  max_num: int = 9, max_den: int = 5) -> LaurentSeries:
    """Random rational series with nonzero leading coefficient (testing helper)."""
    coeffs: List[Fraction] = []
    for k in range(length):
        num = int(rng.integers(-max_num, max_num + 1))
        if k == 0 and num == 0:
            num = 1
        coeffs.append(Fraction(num, int(rng.integers(1, max_den + 1))))
    t = lead + length - 1 if trunc is None else trunc
    return LaurentSeries(coeffs, lead, t, var)


__all__: Iterable[str] = [
    "LaurentSeries",
    "PuiseuxSeries",
    "SeriesError",
    "TruncationError",
    "NotAUnitError",
    "derivative",
    "evaluate",
    "map_coefficients",
    "puiseux_to_laurent",
    "residue",
    "series_add",
    "series_compose",
    "series_mul",
    "series_pow",
    "series_reciprocal",
    "series_scale",
    "shift",
    "truncate",
]
