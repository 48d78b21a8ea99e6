"""scikit-learn style wrapper: ``fit`` runs the analysis, ``predict`` evaluates the return map."""

from __future__ import annotations

import copy
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .field import InputError, VectorField
from .pipeline import run_pipeline
from .problem import Options, ProblemSpec, load_problem


class MonodromyAnalyzer(BaseEstimator):
    """Analyze a monodromic singularity and predict its return map.

    Parameters mirror the problem options; ``None`` keeps the value stored in
    the problem document (or the library default).

    >>> from monodromic.families import focus_cycle
    >>> est = MonodromyAnalyzer(run_oracle=False).fit(focus_cycle(1))
    >>> est.verdict_, est.m_
    ('Focus', 1)
    """

    def __init__(self, truncation: Optional[int] = None, weights: Optional[Sequence[Tuple[int, int]]] = None,
                 radii: Optional[Sequence[float]] = None, tol: Optional[float] = None, run_oracle: bool = True):
        self.truncation = truncation
        self.weights = weights
        self.radii = radii
        self.tol = tol
        self.run_oracle = run_oracle

    def _spec(self, problem) -> ProblemSpec:
        if isinstance(problem, ProblemSpec):
            spec = copy.deepcopy(problem)
        elif isinstance(problem, VectorField):
            spec = ProblemSpec.from_field(problem, options=Options())
        elif isinstance(problem, Mapping):
            spec = ProblemSpec.from_dict(problem)
        elif isinstance(problem, str):
            # JSON text or a path
            spec = load_problem(problem)
        else:
            raise InputError(f"cannot build a problem from {type(problem).__name__}")
        o = spec.options
        if self.truncation is not None:
            o.truncation = int(self.truncation)
        if self.weights is not None:
            o.weights = [tuple(map(int, w)) for w in self.weights]
        if self.radii is not None:
            o.radii = [float(r) for r in self.radii]
        if self.tol is not None:
            o.tolerances["g"] = float(self.tol)
        o.oracle = bool(self.run_oracle)
        return spec

    def fit(self, problem, y=None):
        """Run the full analysis. ``problem`` is a ProblemSpec, VectorField, dict or JSON text."""
        report = run_pipeline(self._spec(problem))
        self.report_ = report.data
        self.exit_code_ = report.exit_code
        usable = [r for r in report.runs if r.classification is not None]
        self.run_ = usable[0] if usable else None
        cls = self.run_.classification if self.run_ else None
        self.verdict_ = cls.verdict.value if cls else None
        self.stability_ = cls.stability.value if cls else None
        self.m_ = cls.m if cls else None
        self.series_ = self.run_.series if self.run_ else None
        self.g_ = None if self.series_ is None else self.series_.g_value
        return self

    def predict(self, rho) -> np.ndarray:
        """Return map values ``Pi(rho)`` from the truncated series with the fitted constant."""
        if not hasattr(self, "report_"):
            raise NotFittedError("call fit before predict")
        rho = np.asarray(rho, dtype=float)
        if self.m_ is not None and self.m_ <= 0:
            return rho.copy()  # the return map is the identity
        if self.series_ is None or self.g_ is None:
            raise NotFittedError("no return map available: " + self._why())
        return np.asarray(self.series_.evaluate(rho), dtype=float)

    def _why(self) -> str:
        msgs = [e["message"] for run in self.report_.get("weights", []) for e in run.get("errors", [])]
        msgs += [e["message"] for e in self.report_.get("errors", [])]
        return "; ".join(msgs) or "analysis incomplete"
