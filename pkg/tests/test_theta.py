import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monodromic.algebra import BivariatePolynomial
from monodromic.blowup import OmegaPoint, characteristic_directions, polar_blowup
from monodromic.families import degenerate_family, focus_cycle
from monodromic.theta import (
    FormTag,
    LambdaVerdict,
    LocalTheta,
    branch_residual,
    check_lambda_pq,
    check_local,
    classify_local,
    classify_theta_singularity,
    newton_puiseux_branches,
    trig_taylor,
    vanishing_order,
)
from monodromic.trig import TrigRational

th, rho = BivariatePolynomial.x(), BivariatePolynomial.y()
c_, s_ = TrigRational.cos(), TrigRational.sin()


def _numeric_taylor(f, angle, order):
    mpmath.mp.dps = 40
    return mpmath.taylor(lambda p: f.eval_mp(p), mpmath.mpf(angle), order)


class TestLocalJets:
    @pytest.mark.parametrize("f", [s_ * s_ * (c_ + 2), (c_ - s_) ** 2 / (c_ + 3), s_**4 + c_ * s_**3])
    def test_rational_and_pi_points(self, f):
        for angle, t, at_pi in [(0.0, Fraction(0), False), (math.pi / 2, Fraction(1), False), (math.pi, None, True)]:
            pt = OmegaPoint(angle, 0, t, at_pi, None)
            exact = trig_taylor(f, pt, 6)
            assert all(isinstance(v, Fraction) for v in exact)
            ref = _numeric_taylor(f, angle, 6)
            for a, b in zip(exact, ref):
                assert float(a) == pytest.approx(float(b), abs=1e-15)

    def test_irrational_point(self):
        g = TrigRational.from_cs((th * th * 3 - rho * rho) ** 2)
        pt = [w for w in characteristic_directions(g) if abs(w.angle - math.pi / 3) < 1e-9][0]
        assert vanishing_order(g, pt) == 2
        jets = trig_taylor(g, pt, 5)
        ref = _numeric_taylor(g, mpmath.pi / 3, 5)
        for a, b in zip(jets, ref):
            assert abs(a - b) < 1e-25
        assert abs(jets[0]) < 1e-40 and abs(jets[1]) < 1e-40

    def test_order_at_pi(self):
        pt = OmegaPoint(math.pi, 4, None, True, None)
        assert vanishing_order((1 + c_) ** 2, pt) == 4


def _real_positive(rep):
    return [b for b in rep.branches if b.is_real and b.is_positive]


class TestBranches:
    def test_cusp_branches_only_on_one_side(self):
        local = LocalTheta.from_polynomial(rho * rho - th**3)
        right = newton_puiseux_branches(local, side=1)
        left = newton_puiseux_branches(local, side=-1)
        assert sorted(float(b.lead_coeff) for b in right.branches) == [-1.0, 1.0]
        assert all(b.lead_exponent == Fraction(3, 2) and b.ramification == 2 for b in right.branches)
        assert not any(b.is_real for b in left.branches)

    def test_circle_has_no_real_branch(self):
        local = LocalTheta.from_polynomial(rho * rho + th * th)
        for side in (1, -1):
            rep = newton_puiseux_branches(local, side=side)
            assert rep.resolved and not any(b.is_real for b in rep.branches)

    def test_complex_branches_are_expanded(self):
        # rho = +-i theta - theta^5 / 2 + ...
        poly = rho * rho + th * th + th**5 * rho
        rep = newton_puiseux_branches(poly)
        assert len(rep.branches) == 2
        for br in rep.branches:
            assert not br.is_real and br.residual_order >= br.truncation_order
            assert complex(br.coeffs[3]) == pytest.approx(-0.5, abs=1e-40)
            assert abs(branch_residual(poly, br, 0.01)) < 1e-19

    @pytest.mark.parametrize("poly", [
        rho * rho + th * th,
        (rho - th * th) * (rho - 2 * th * th) + th**7,
        (rho * rho - th**3) * (1 + th + rho),
    ])
    def test_branch_product_matches_up_to_a_unit(self, poly):
        rep = newton_puiseux_branches(poly, max_terms=6)
        ratios = []
        for u in np.linspace(0.002, 0.02, 20):
            r = 0.5 * u * u
            prod = 1
            for br in rep.branches:
                prod *= r - complex(br.evaluate(u))
            ratios.append(complex(poly(u, r)) / prod)
        # a unit: the ratio tends to a nonzero constant near the origin
        assert min(abs(q) for q in ratios) > 0.5
        assert max(abs(q - ratios[0]) for q in ratios) < 0.05

    def test_simple_roots_and_continuation(self):
        T = (rho - th * th) * (rho - 2 * th * th) + th**7
        rep = newton_puiseux_branches(T, max_terms=4, side=1)
        by_lead = {b.lead_coeff: b for b in rep.branches}
        assert set(by_lead) == {1, 2}
        # rho = theta^2 + theta^5 and rho = 2 theta^2 - theta^5
        assert by_lead[1].coeffs == [0, 0, 1, 0]
        assert by_lead[2].coeffs == [0, 0, -1, 0]
        for b in rep.branches:
            assert b.is_simple and b.residual_order >= b.truncation_order
            assert abs(branch_residual(T, b, 1e-2)) < 1e-18

    def test_double_root_resolved(self):
        rep = newton_puiseux_branches((rho - th * th) ** 2 - th**5, side=1)
        (b,) = rep.branches
        assert b.multiplicity == 2 and b.is_real and b.is_positive
        assert sorted(float(ch.lead_coeff) for ch in b.children) == [-1.0, 1.0]
        rep = newton_puiseux_branches((rho - th * th) ** 2 + th**6, side=1)
        (b,) = rep.branches
        assert rep.resolved and b.is_real is False

    def test_unit_factor_changes_nothing(self):
        base = newton_puiseux_branches(rho - th * th, side=1)
        unit = newton_puiseux_branches((rho - th * th) * (1 + th + rho), side=1)
        lead = lambda rep: sorted((b.lead_exponent, b.lead_coeff) for b in rep.branches if b.is_real)  # noqa: E731
        assert lead(base) == lead(unit) == [(2, 1)]

    @given(st.integers(1, 5), st.integers(1, 4), st.fractions(Fraction(1, 4), 4), st.integers(-3, 3))
    @settings(max_examples=40, deadline=None)
    def test_real_simple_branch_has_real_coefficients(self, k1, k2, alpha, pert):
        # (rho^k2 - alpha theta^k1) + perturbation above the Newton polygon
        T = rho**k2 - BivariatePolynomial.const(alpha) * th**k1 + pert * th ** (k1 + 1) * rho
        rep = newton_puiseux_branches(T, max_terms=3, side=1)
        for b in rep.branches:
            if b.is_simple and b.is_real:
                assert all(mpmath.im(mpmath.mpmathify(c)) == 0 for c in b.coeffs)
                assert b.lead_exponent == Fraction(k1, k2)

    def test_ray_in_zero_set(self):
        rep = newton_puiseux_branches(th * (rho + th), side=1)
        assert rep.theta_factor == 1


class TestLambda:
    def test_circle_empty_by_quadratic(self):
        ev = check_local(LocalTheta.from_polynomial(th * th + rho * rho))
        assert ev.verdict == LambdaVerdict.EMPTY and ev.method == "quadratic"

    def test_linear_test(self):
        ev = check_local(LocalTheta.from_polynomial(th * th + rho - rho * rho))
        assert ev.verdict == LambdaVerdict.EMPTY and ev.method == "linear"

    def test_quartic_minus_square_nonempty(self):
        ev = check_local(LocalTheta.from_polynomial(th**4 - rho * rho))
        assert ev.verdict == LambdaVerdict.NONEMPTY
        assert any(b["real"] and b["positive"] for b in ev.details["branches"])

    def test_descartes(self):
        ev = check_local(LocalTheta.from_polynomial(th * th + th * th * rho + rho**3))
        assert ev.verdict == LambdaVerdict.EMPTY and ev.method == "descartes"

    def test_no_directions(self):
        assert check_lambda_pq(polar_blowup(focus_cycle(1), 1, 1)).verdict == LambdaVerdict.EMPTY

    @pytest.mark.parametrize("w", [(1, 1), (1, 3)])
    def test_two_weight_family(self, w):
        res = check_lambda_pq(polar_blowup(degenerate_family(2, 1, 1, 0), *w))
        assert res.verdict == LambdaVerdict.EMPTY
        for ev in res.evidence:
            assert ev.details["sampled_min"] > 0

    def test_zero_curve_detected_on_field(self):
        # x' = -y^3, y' = -x^4 gives Theta = s^4 - c^5 rho: rho ~ theta^4 near phi = 0
        from monodromic.field import VectorField

        X = VectorField(-(rho**3), -(th**4))
        pe = polar_blowup(X, 1, 1, check_weight=False)
        res = check_lambda_pq(pe)
        assert res.verdict == LambdaVerdict.NONEMPTY
        by_angle = {round(ev.angle, 6): ev for ev in res.evidence}
        assert by_angle[0.0].verdict == LambdaVerdict.NONEMPTY and by_angle[0.0].details["sampled_min"] < 0
        assert by_angle[round(math.pi, 6)].method == "linear"


class TestClassification:
    def test_elliptic(self):
        cls = classify_local(LocalTheta.from_polynomial(th * th + rho * rho))
        assert (cls.form_tag, cls.delta1, cls.delta2) == (FormTag.ELLIPTIC_A, 1, 1)

    def test_cusp_reports_both_readings(self):
        cls = classify_local(LocalTheta.from_polynomial(th * th + rho**3))
        assert (cls.form_tag, cls.delta1, cls.delta2) == (FormTag.CUSP_B, 1, 1)
        assert cls.delta1_printed == 0 and cls.notes

    def test_quartic(self):
        cls = classify_local(LocalTheta.from_polynomial(th * th - rho**4))
        assert (cls.form_tag, cls.delta1, cls.delta2) == (FormTag.QUARTIC_C, 1, -1)

    def test_non_elementary(self):
        cls = classify_local(LocalTheta.from_polynomial(th**4 + th * rho))
        assert (cls.form_tag, cls.delta1, cls.delta2) == (FormTag.NON_ELEMENTARY_D, 1, 1)

    def test_regular_point_unclassified(self):
        cls = classify_local(LocalTheta.from_polynomial(th * th + rho))
        assert cls.form_tag == FormTag.UNCLASSIFIED

    @given(st.integers(1, 50), st.sampled_from([th * th + rho * rho, th * th - 2 * rho * rho + th * rho,
                                                th * th + rho**3, th * th - rho**4, th**4 + th * rho]))
    @settings(max_examples=30, deadline=None)
    def test_positive_scaling_invariant(self, k, T):
        a = classify_local(LocalTheta.from_polynomial(T))
        b = classify_local(LocalTheta.from_polynomial(T * k))
        assert (a.form_tag, a.delta1, a.delta2) == (b.form_tag, b.delta1, b.delta2)

    def test_on_expansion(self):
        pe = polar_blowup(degenerate_family(2, 1, 1, 0), 1, 3)
        for w in pe.omega:
            cls = classify_theta_singularity(pe, w.angle)
            assert cls.k == 2 and cls.delta1 == 1
        with pytest.raises(ValueError):
            classify_theta_singularity(pe, 0.3)
