"""Exact polynomial carriers over the rationals.

Three small classes live here:

* :class:`QPoly` -- dense univariate polynomial over Q with Euclidean gcd,
  used as numerator/denominator of :class:`~monodromic.trig.TrigRational`.
* :class:`LPoly` -- sparse Laurent polynomial over Q in one symbol. It is the
  coefficient domain Q[g] (and Q[E, 1/E]) of formal return maps.
* :class:`BivariatePolynomial` -- sparse polynomial in two variables, the
  carrier of P, Q, Darboux factors and trigonometric polynomials in (c, s).
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple

import numpy as np

Number = Rational  # int or Fraction


class NotAUnitError(ArithmeticError):
    """Raised when inverting a ring element that is not a unit."""


def as_fraction(value) -> Fraction:
    """Convert ints, Fractions and rational strings ("3/4", "-2") to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    raise TypeError(f"cannot convert {value!r} to an exact rational")


# ---------------------------------------------------------------------------
# dense univariate polynomials
# ---------------------------------------------------------------------------


class QPoly:
    """Dense polynomial ``sum c[i] t**i`` with Fraction coefficients."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable = ()):
        c = [as_fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.c: Tuple[Fraction, ...] = tuple(c)

    @classmethod
    def _raw(cls, c: list) -> "QPoly":
        while c and c[-1] == 0:
            c.pop()
        out = object.__new__(cls)
        out.c = tuple(c)
        return out

    @classmethod
    def constant(cls, value) -> "QPoly":
        return cls([value])

    @classmethod
    def monomial(cls, degree: int, coeff=1) -> "QPoly":
        return cls._raw([Fraction(0)] * degree + [as_fraction(coeff)])

    @property
    def degree(self) -> int:
        return len(self.c) - 1  # -1 for the zero polynomial

    @property
    def lead(self) -> Fraction:
        return self.c[-1] if self.c else Fraction(0)

    def __bool__(self) -> bool:
        return bool(self.c)

    def __eq__(self, other) -> bool:
        if isinstance(other, QPoly):
            return self.c == other.c
        if isinstance(other, (int, Fraction)):
            return self.c == QPoly.constant(other).c
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.c)

    def __repr__(self) -> str:
        return f"QPoly({[str(x) for x in self.c]})"

    def __neg__(self) -> "QPoly":
        return QPoly._raw([-x for x in self.c])

    def __add__(self, other) -> "QPoly":
        if not isinstance(other, QPoly):
            other = QPoly.constant(other)
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, x in enumerate(b):
            out[i] += x
        return QPoly._raw(out)

    __radd__ = __add__

    def __sub__(self, other) -> "QPoly":
        if not isinstance(other, QPoly):
            other = QPoly.constant(other)
        return self + (-other)

    def __rsub__(self, other) -> "QPoly":
        return QPoly.constant(other) - self

    def __mul__(self, other) -> "QPoly":
        if not isinstance(other, QPoly):
            k = as_fraction(other)
            return QPoly._raw([x * k for x in self.c])
        if not self.c or not other.c:
            return QPoly._raw([])
        out = [Fraction(0)] * (len(self.c) + len(other.c) - 1)
        for i, x in enumerate(self.c):
            if x == 0:
                continue
            for j, y in enumerate(other.c):
                out[i + j] += x * y
        return QPoly._raw(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "QPoly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result, base = QPoly([1]), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other: "QPoly") -> Tuple["QPoly", "QPoly"]:
        if not other.c:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.c)
        dq = other.degree
        inv_lead = 1 / other.lead
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        for k in range(len(rem) - dq - 1, -1, -1):
            coef = rem[k + dq] * inv_lead
            quot[k] = coef
            if coef:
                for j, y in enumerate(other.c):
                    rem[k + j] -= coef * y
        return QPoly._raw(quot), QPoly._raw(rem[:dq] if dq > 0 else [])

    def __floordiv__(self, other: "QPoly") -> "QPoly":
        return self.divmod(other)[0]

    def __mod__(self, other: "QPoly") -> "QPoly":
        return self.divmod(other)[1]

    def monic(self) -> "QPoly":
        if not self.c:
            return self
        return self * (1 / self.lead)

    def primitive_integer(self) -> "QPoly":
        """Scale to coprime integer coefficients with positive leading term."""
        if not self.c:
            return self
        from math import gcd

        den = 1
        for x in self.c:
            den = den * x.denominator // gcd(den, x.denominator)
        ints = [int(x * den) for x in self.c]
        g = 0
        for v in ints:
            g = gcd(g, abs(v))
        sign = 1 if ints[-1] > 0 else -1
        return QPoly._raw([Fraction(sign * v // g) for v in ints])

    def derivative(self) -> "QPoly":
        return QPoly._raw([x * i for i, x in enumerate(self.c)][1:])

    def reversed(self) -> "QPoly":
        """Coefficient reversal ``t**deg * p(1/t)``."""
        return QPoly._raw(list(reversed(self.c)))

    def valuation(self) -> int:
        """Order of vanishing at t = 0 (zero polynomial -> large sentinel)."""
        for i, x in enumerate(self.c):
            if x:
                return i
        return 10**9

    def __call__(self, x):
        """Horner evaluation; exact for int/Fraction input, float otherwise."""
        if isinstance(x, (int, Fraction)):
            return self.eval_exact(x)
        acc = 0.0 * x
        for coef in reversed(self.c):
            acc = acc * x + float(coef)
        return acc

    def eval_exact(self, x) -> Fraction:
        acc = Fraction(0)
        for coef in reversed(self.c):
            acc = acc * x + coef
        return acc

    def eval_generic(self, x):
        """Horner with coefficients lifted into the numeric type of ``x``."""
        acc = x * 0
        for coef in reversed(self.c):
            acc = acc * x + _lift(coef, x)
        return acc

    def multiplicity_of(self, factor: "QPoly") -> int:
        """Largest k with factor**k dividing self (self must be nonzero)."""
        if not self.c:
            raise ValueError("multiplicity in the zero polynomial is undefined")
        k, rest = 0, self
        while True:
            q, r = rest.divmod(factor)
            if r:
                return k
            k, rest = k + 1, q


def _lift(coef: Fraction, like):
    """Represent an exact rational in the numeric type of ``like``."""
    try:
        return like.__class__(coef.numerator) / like.__class__(coef.denominator)
    except TypeError:
        return float(coef)


def qpoly_gcd(a: QPoly, b: QPoly) -> QPoly:
    """Monic gcd via the Euclidean algorithm (primitive remainders)."""
    while b.c:
        a, b = b, (a % b).primitive_integer()
    return a.monic()


# ---------------------------------------------------------------------------
# sparse Laurent polynomials (coefficient domain for formal return maps)
# ---------------------------------------------------------------------------


class LPoly:
    """Laurent polynomial ``sum c[k] * sym**k`` over Q (k may be negative)."""

    __slots__ = ("terms", "symbol")

    def __init__(self, terms: Mapping[int, object] | None = None, symbol: str = "g"):
        self.terms: Dict[int, Fraction] = {}
        for k, v in (terms or {}).items():
            v = as_fraction(v)
            if v:
                self.terms[int(k)] = v
        self.symbol = symbol

    @classmethod
    def const(cls, value, symbol: str = "g") -> "LPoly":
        return cls({0: value}, symbol)

    @classmethod
    def gen(cls, symbol: str = "g") -> "LPoly":
        return cls({1: 1}, symbol)

    def _coerce(self, other) -> "LPoly":
        if isinstance(other, LPoly):
            if other.symbol != self.symbol and other.terms and self.terms:
                if not (other.is_constant() or self.is_constant()):
                    raise ValueError(f"symbol mismatch: {self.symbol} vs {other.symbol}")
            return other
        return LPoly.const(other, self.symbol)

    def is_constant(self) -> bool:
        return not self.terms or set(self.terms) == {0}

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms.get(0, Fraction(0))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = LPoly.const(other, self.symbol)
        if not isinstance(other, LPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.terms.items())))

    def __neg__(self) -> "LPoly":
        return LPoly({k: -v for k, v in self.terms.items()}, self.symbol)

    def __add__(self, other) -> "LPoly":
        other = self._coerce(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        sym = self.symbol if self.terms or not other.terms else other.symbol
        return LPoly(out, sym)

    __radd__ = __add__

    def __sub__(self, other) -> "LPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "LPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "LPoly":
        if isinstance(other, (int, Fraction)):
            return LPoly({k: v * other for k, v in self.terms.items()}, self.symbol)
        other = self._coerce(other)
        out: Dict[int, Fraction] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                out[k1 + k2] = out.get(k1 + k2, 0) + v1 * v2
        sym = self.symbol if not self.is_constant() else other.symbol
        return LPoly(out, sym)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "LPoly":
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / other)
        return self * self._coerce(other).inverse()

    def __pow__(self, n: int) -> "LPoly":
        if n < 0:
            return self.inverse() ** (-n)
        result, base = LPoly.const(1, self.symbol), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "LPoly":
        if len(self.terms) != 1:
            raise NotAUnitError(f"{self} is not a unit of Q[{self.symbol}, 1/{self.symbol}]")
        (k, v), = self.terms.items()
        return LPoly({-k: 1 / v}, self.symbol)

    def subs(self, value):
        """Numeric evaluation at ``symbol = value``."""
        total = 0.0 * value
        for k, v in self.terms.items():
            total = total + float(v) * value**k
        return total

    def degree(self) -> int:
        return max(self.terms) if self.terms else -1

    def __repr__(self) -> str:
        return f"LPoly({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms):
            v = self.terms[k]
            if k == 0:
                parts.append(str(v))
            else:
                mono = self.symbol if k == 1 else f"{self.symbol}^{k}"
                if v == 1:
                    parts.append(mono)
                elif v == -1:
                    parts.append(f"-{mono}")
                else:
                    parts.append(f"{v}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


# ---------------------------------------------------------------------------
# sparse bivariate polynomials
# ---------------------------------------------------------------------------

Monomial = Tuple[int, int]


class BivariatePolynomial:
    """Sparse exact polynomial in two variables.

    ``terms`` maps exponent pairs ``(i, j)`` to non-zero Fractions, meaning
    ``coeff * x**i * y**j``. Zero coefficients are never stored.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, object] | Iterable[Tuple[Monomial, object]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: Dict[Monomial, Fraction] = {}
        for (i, j), v in items:
            if i < 0 or j < 0:
                raise ValueError(f"negative exponent in monomial {(i, j)}")
            key = (int(i), int(j))
            acc[key] = acc.get(key, Fraction(0)) + as_fraction(v)
        self.terms: Dict[Monomial, Fraction] = {k: v for k, v in acc.items() if v}

    @classmethod
    def x(cls) -> "BivariatePolynomial":
        return cls({(1, 0): 1})

    @classmethod
    def y(cls) -> "BivariatePolynomial":
        return cls({(0, 1): 1})

    @classmethod
    def const(cls, value) -> "BivariatePolynomial":
        return cls({(0, 0): value})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self) -> Iterator[Tuple[Monomial, Fraction]]:
        return iter(sorted(self.terms.items()))

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = BivariatePolynomial.const(other)
        if not isinstance(other, BivariatePolynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.terms.items())))

    def __repr__(self) -> str:
        return f"BivariatePolynomial({self.to_string()})"

    def to_string(self, names: Sequence[str] = ("x", "y")) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (i, j), v in sorted(self.terms.items(), key=lambda kv: (kv[0][0] + kv[0][1], kv[0])):
            mono = "*".join(
                n if e == 1 else f"{n}^{e}" for n, e in zip(names, (i, j)) if e
            )
            if not mono:
                parts.append(str(v))
            elif v == 1:
                parts.append(mono)
            elif v == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{v}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __neg__(self) -> "BivariatePolynomial":
        return BivariatePolynomial({k: -v for k, v in self.terms.items()})

    def __add__(self, other) -> "BivariatePolynomial":
        if not isinstance(other, BivariatePolynomial):
            other = BivariatePolynomial.const(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return BivariatePolynomial(out)

    __radd__ = __add__

    def __sub__(self, other) -> "BivariatePolynomial":
        if not isinstance(other, BivariatePolynomial):
            other = BivariatePolynomial.const(other)
        return self + (-other)

    def __rsub__(self, other) -> "BivariatePolynomial":
        return BivariatePolynomial.const(other) - self

    def __mul__(self, other) -> "BivariatePolynomial":
        if not isinstance(other, BivariatePolynomial):
            k = as_fraction(other)
            return BivariatePolynomial({m: v * k for m, v in self.terms.items()})
        out: Dict[Monomial, Fraction] = {}
        for (i1, j1), v1 in self.terms.items():
            for (i2, j2), v2 in other.terms.items():
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, 0) + v1 * v2
        return BivariatePolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "BivariatePolynomial":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result, base = BivariatePolynomial.const(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def coeff(self, i: int, j: int) -> Fraction:
        return self.terms.get((i, j), Fraction(0))

    def total_degree(self) -> int:
        return max((i + j for i, j in self.terms), default=-1)

    def diff(self, var: int) -> "BivariatePolynomial":
        """Partial derivative in x (var=0) or y (var=1)."""
        out = {}
        for (i, j), v in self.terms.items():
            e = (i, j)[var]
            if e:
                key = (i - 1, j) if var == 0 else (i, j - 1)
                out[key] = v * e
        return BivariatePolynomial(out)

    def __call__(self, x, y):
        """Numeric evaluation; works elementwise on numpy arrays."""
        total = 0.0 * np.asarray(x, dtype=float) * np.asarray(y, dtype=float) if isinstance(
            x, np.ndarray
        ) or isinstance(y, np.ndarray) else 0.0
        for (i, j), v in self.terms.items():
            total = total + float(v) * x**i * y**j
        return total

    def eval_generic(self, x, y):
        """Evaluation in any ring supporting + and * with Fractions (e.g. mpmath)."""
        total = None
        for (i, j), v in self.terms.items():
            term = _lift(v, x) * x**i * y**j
            total = term if total is None else total + term
        return x * 0 if total is None else total

    def eval_exact(self, x, y) -> Fraction:
        return sum((v * Fraction(x) ** i * Fraction(y) ** j for (i, j), v in self.terms.items()), Fraction(0))

    def substitute(self, px: "BivariatePolynomial", py: "BivariatePolynomial") -> "BivariatePolynomial":
        """Composition ``self(px, py)``."""
        out = BivariatePolynomial()
        cache_x = {0: BivariatePolynomial.const(1)}
        cache_y = {0: BivariatePolynomial.const(1)}
        for (i, j), v in self.terms.items():
            if i not in cache_x:
                cache_x[i] = px**i
            if j not in cache_y:
                cache_y[j] = py**j
            out = out + cache_x[i] * cache_y[j] * v
        return out

    def weighted_parts(self, p: int, q: int) -> Dict[int, "BivariatePolynomial"]:
        """Split into (p, q)-quasihomogeneous parts keyed by ``p*i + q*j``."""
        parts: Dict[int, Dict[Monomial, Fraction]] = {}
        for (i, j), v in self.terms.items():
            parts.setdefault(p * i + q * j, {})[(i, j)] = v
        return {d: BivariatePolynomial(t) for d, t in sorted(parts.items())}

    def is_quasihomogeneous(self, p: int, q: int) -> bool:
        return len({p * i + q * j for i, j in self.terms}) <= 1
