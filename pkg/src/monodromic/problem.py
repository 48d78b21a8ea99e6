"""JSON problem documents: a vector field, its inverse integrating factor and run options.

Coefficients are strings holding exact rational expressions; they may use
the names declared in ``params``::

    {"schema_version": 1,
     "name": "focus with limit cycle",
     "params": {"lam": "1"},
     "P": [{"i": 3, "j": 0, "coeff": "1"}, {"i": 1, "j": 0, "coeff": "-lam"}],
     "Q": [...],
     "iif": [{"poly": [...], "exponent": "1"}],
     "options": {"truncation": 12, "weights": [[1, 1]], "radii": [0.02, 0.04],
                 "tolerances": {"g": 1e-6}}}
"""

from __future__ import annotations

import ast
import json
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Tuple

from .algebra import BivariatePolynomial
from .field import InputError, VectorField

SCHEMA_VERSION = 1

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}


def eval_rational(text: str, params: Mapping[str, Fraction] | None = None) -> Fraction:
    """Evaluate ``+ - * / **`` expressions over exact rationals; names come from ``params``."""
    params = params or {}
    try:
        tree = ast.parse(str(text).strip(), mode="eval")
    except SyntaxError as exc:
        raise InputError(f"cannot parse coefficient {text!r}") from exc

    def ev(node) -> Fraction:
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            # decimals are read from their literal text, not the binary float
            return Fraction(str(node.value)) if isinstance(node.value, float) else Fraction(node.value)
        if isinstance(node, ast.Name):
            if node.id not in params:
                raise InputError(f"unknown parameter {node.id!r} in {text!r}")
            return params[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            left, right = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Div) and right == 0:
                raise InputError(f"division by zero in {text!r}")
            return _BINOPS[type(node.op)](left, right)
        if isinstance(node, ast.BinOp) and isinstance(node.op, ast.Pow):
            base, exp = ev(node.left), ev(node.right)
            if exp.denominator != 1 or abs(exp) > 64:
                raise InputError(f"only small integer powers allowed in {text!r}")
            return base ** int(exp)
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand))
        raise InputError(f"unsupported syntax in coefficient {text!r}")

    return ev(tree)


def _fraction_text(v: Fraction) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


@dataclass(frozen=True)
class Term:
    i: int
    j: int
    coeff: str


@dataclass(frozen=True)
class IIFFactor:
    poly: Tuple[Term, ...]
    exponent: str


@dataclass
class Options:
    truncation: int = 12
    weights: Optional[List[Tuple[int, int]]] = None
    radii: List[float] = field(default_factory=lambda: [0.02, 0.04, 0.08, 0.16])
    tolerances: Dict[str, float] = field(default_factory=lambda: {"g": 1e-6})
    oracle: bool = True


@dataclass
class ProblemSpec:
    P: Tuple[Term, ...]
    Q: Tuple[Term, ...]
    iif: Tuple[IIFFactor, ...] = ()
    params: Dict[str, str] = field(default_factory=dict)
    options: Options = field(default_factory=Options)
    name: str = ""

    # -- construction -------------------------------------------------------

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "ProblemSpec":
        if not isinstance(doc, Mapping):
            raise InputError("problem document must be a JSON object")
        version = doc.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise InputError(f"unsupported schema_version {version}")
        for key in ("P", "Q"):
            if key not in doc:
                raise InputError(f"missing field {key!r}")
        opts = dict(doc.get("options") or {})
        unknown = set(opts) - {"truncation", "weights", "radii", "tolerances", "oracle"}
        if unknown:
            raise InputError(f"unknown options {sorted(unknown)}")
        weights = opts.get("weights")
        options = Options(
            truncation=int(opts.get("truncation", 12)),
            weights=[(int(a), int(b)) for a, b in weights] if weights else None,
            radii=[float(r) for r in opts.get("radii", Options().radii)],
            tolerances={k: float(v) for k, v in (opts.get("tolerances") or {"g": 1e-6}).items()},
            oracle=bool(opts.get("oracle", True)),
        )
        if options.truncation < 2:
            raise InputError("truncation must be at least 2")
        spec = cls(
            P=_terms(doc["P"], "P"),
            Q=_terms(doc["Q"], "Q"),
            iif=tuple(IIFFactor(_terms(f["poly"], "iif.poly"), str(f.get("exponent", "1"))) for f in doc.get("iif", [])),
            params={str(k): str(v) for k, v in (doc.get("params") or {}).items()},
            options=options,
            name=str(doc.get("name", "")),
        )
        spec.field()  # validates everything
        return spec

    @classmethod
    def loads(cls, text: str) -> "ProblemSpec":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(doc)

    @classmethod
    def from_field(cls, X: VectorField, name: str = "", options: Options | None = None) -> "ProblemSpec":
        def terms(poly):
            return tuple(Term(i, j, _fraction_text(c)) for (i, j), c in sorted(poly.terms.items()))

        return cls(terms(X.P), terms(X.Q), tuple(IIFFactor(terms(f), _fraction_text(e)) for f, e in X.iif_factors),
                   {}, options or Options(), name)

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> Dict[str, Any]:
        def terms(ts):
            return [{"i": t.i, "j": t.j, "coeff": t.coeff} for t in ts]

        o = self.options
        opts: Dict[str, Any] = {"truncation": o.truncation, "radii": list(o.radii),
                                "tolerances": dict(o.tolerances), "oracle": o.oracle}
        if o.weights:
            opts["weights"] = [list(w) for w in o.weights]
        return {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "params": dict(self.params),
            "P": terms(self.P),
            "Q": terms(self.Q),
            "iif": [{"poly": terms(f.poly), "exponent": f.exponent} for f in self.iif],
            "options": opts,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    # -- evaluation ---------------------------------------------------------

    def param_values(self) -> Dict[str, Fraction]:
        values: Dict[str, Fraction] = {}
        for k, v in self.params.items():
            values[k] = eval_rational(v, values)
        return values

    def field(self) -> VectorField:
        vals = self.param_values()

        def poly(ts):
            return BivariatePolynomial({(t.i, t.j): eval_rational(t.coeff, vals) for t in ts})

        factors = tuple((poly(f.poly), eval_rational(f.exponent, vals)) for f in self.iif)
        return VectorField(poly(self.P), poly(self.Q), factors)


def _terms(items, where: str) -> Tuple[Term, ...]:
    out = []
    if not isinstance(items, list):
        raise InputError(f"{where} must be a list of terms")
    for t in items:
        try:
            i, j = int(t["i"]), int(t["j"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed term in {where}: {t!r}") from exc
        if i < 0 or j < 0:
            raise InputError(f"negative exponent in {where}: {t!r}")
        out.append(Term(i, j, str(t.get("coeff", "1"))))
    return tuple(out)


def load_problem(path_or_text: str) -> ProblemSpec:
    """Read a problem from a path, or from JSON text when it starts with ``{``."""
    text = path_or_text
    if not path_or_text.lstrip().startswith("{"):
        with open(path_or_text, encoding="utf-8") as fh:
            text = fh.read()
    return ProblemSpec.loads(text)


def fixture_path(name: str) -> str:
    """Path of a bundled example problem (``focus_cycle``, ``focus_cycle_zero``, ...)."""
    from importlib import resources

    return str(resources.files("monodromic") / "fixtures" / f"{name}.json")
