import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from monodromic.estimator import MonodromyAnalyzer
from monodromic.families import focus_cycle, linear_focus, weak_focus
from monodromic.oracle import closed_form_focus_cycle
from monodromic.problem import fixture_path, load_problem


def test_params_round_trip():
    est = MonodromyAnalyzer(truncation=8, radii=[0.02, 0.04], run_oracle=False)
    assert est.get_params()["truncation"] == 8
    assert clone(est).get_params() == est.get_params()
    est.set_params(tol=1e-8)
    assert est.tol == 1e-8


def test_fit_predict_focus_cycle():
    est = MonodromyAnalyzer(run_oracle=False).fit(load_problem(fixture_path("focus_cycle")))
    assert (est.verdict_, est.stability_, est.m_) == ("Focus", "Stable", 1)
    assert est.g_ == pytest.approx(-2 * math.pi, abs=1e-9)
    rho = np.array([0.005, 0.01, 0.02])
    assert np.allclose(est.predict(rho), closed_form_focus_cycle(rho), rtol=1e-9, atol=0)


def test_fit_accepts_fields_and_dicts():
    est = MonodromyAnalyzer(run_oracle=False, truncation=8).fit(weak_focus())
    assert est.m_ == 3 and est.report_["truncation"] == 8
    doc = load_problem(fixture_path("weak_focus")).to_dict()
    assert MonodromyAnalyzer(run_oracle=False).fit(doc).g_ == pytest.approx(est.g_)


def test_center_predicts_identity():
    est = MonodromyAnalyzer(run_oracle=False).fit(linear_focus(0, 1))
    assert est.verdict_ == "Center"
    assert est.predict([0.1, 0.2]) == pytest.approx([0.1, 0.2], abs=1e-12)


def test_predict_before_fit():
    with pytest.raises(NotFittedError):
        MonodromyAnalyzer().predict([0.1])


def test_unusable_fit_explains_why():
    est = MonodromyAnalyzer(run_oracle=False).fit(load_problem(fixture_path("two_weight_family")).to_dict()
                                                   | {"options": {"weights": [[1, 1]]}})
    with pytest.raises(NotFittedError, match="characteristic"):
        est.predict([0.01])


def test_fit_does_not_mutate_input():
    spec = load_problem(fixture_path("focus_cycle"))
    MonodromyAnalyzer(truncation=6, run_oracle=False).fit(spec)
    assert spec.options.truncation == 12 and spec.options.oracle


def test_fit_from_path_and_text():
    path = fixture_path("focus_cycle")
    a = MonodromyAnalyzer(run_oracle=False).fit(path)
    with open(path) as fh:
        b = MonodromyAnalyzer(run_oracle=False).fit(fh.read())
    assert a.verdict_ == b.verdict_ == "Focus"
