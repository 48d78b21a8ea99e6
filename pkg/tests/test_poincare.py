import math
from fractions import Fraction
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monodromic.algebra import BivariatePolynomial, LPoly
from monodromic.blowup import polar_blowup, polar_iif
from monodromic.families import degenerate_family, focus_cycle, linear_focus, weak_focus
from monodromic.field import darboux_system
from monodromic.poincare import (
    GConstantError,
    GMeaning,
    Stability,
    Verdict,
    classify_singularity,
    compute_g_constant,
    compute_xi_pq,
    fundamental_residual,
    g_from_return_map,
    principal_value,
    solve_fundamental_equation,
    v0_residue,
)
from monodromic.series import LaurentSeries, random_series

x, y = BivariatePolynomial.x(), BivariatePolynomial.y()


def normalized_v0(rng, m, N=12):
    v = random_series(rng, m, N, trunc=m + N - 1)
    return LaurentSeries([Fraction(1)] + [v.coeff(k) for k in range(m + 1, m + N)], m, m + N - 1)


def monomial_v0(m, N=12, extra=None):
    terms = {m: Fraction(1)}
    terms.update(extra or {})
    return LaurentSeries.from_dict(terms, m + N - 1)


class TestFundamentalEquation:
    @pytest.mark.parametrize("m", range(2, 7))
    def test_structure_for_random_sections(self, m):
        rng = np.random.default_rng(100 + m)
        for _ in range(5):
            ps = solve_fundamental_equation(normalized_v0(rng, m), m, 12)
            assert ps.g_meaning == GMeaning.ETA_M
            assert ps.eta(1) == LPoly.const(1)
            assert all(not ps.eta(j) for j in range(2, m))
            assert ps.eta(m) == LPoly.gen("g")
            zero = ps.at_zero_g()
            assert zero[0] == LPoly.const(1) and all(not c for c in zero[1:])
            assert ps.residual_order >= m + 11
            assert fundamental_residual(ps).is_zero()

    def test_separable_section_gives_powers_of_g(self):
        ps = solve_fundamental_equation(monomial_v0(2), 2, 12)
        g = LPoly.gen("g")
        for ell in range(10):
            assert ps.eta(2 + ell) == g ** (ell + 1)

    def test_m_one_is_linear(self):
        ps = solve_fundamental_equation(monomial_v0(1), 1, 12)
        assert ps.symbol == "E" and ps.eta(1) == LPoly.gen("E")
        assert all(not ps.eta(j) for j in range(2, 13))
        assert ps.evaluate(0.3, g=math.log(2.0)) == pytest.approx(0.6)

    def test_cubic_section_has_no_even_term(self):
        ps = solve_fundamental_equation(monomial_v0(3), 3, 8)
        g = LPoly.gen("g")
        assert not ps.eta(2) and ps.eta(3) == g
        assert ps.eta(5) == g * g * Fraction(3, 2)

    def test_weak_focus_closed_form(self):
        ps = solve_fundamental_equation(monomial_v0(3), 3, 12)
        rho = 0.02  # first omitted term is ~1e-15 relative here
        exact = rho / math.sqrt(1 - 4 * math.pi * rho**2)
        assert ps.evaluate(rho, g=2 * math.pi) == pytest.approx(exact, rel=1e-12)

    def test_section_with_nonzero_residue_still_solves(self):
        # the return map is the time-g flow of V0 d/drho, so no obstruction arises
        v0 = LaurentSeries.from_dict({2: Fraction(1), 3: Fraction(1)}, 13)
        ps = solve_fundamental_equation(v0, 2, 12)
        g = LPoly.gen("g")
        assert ps.eta(3) == g * g + g
        assert fundamental_residual(ps).is_zero()

    def test_rejects_unnormalized_and_short_sections(self):
        with pytest.raises(ValueError):
            solve_fundamental_equation(LaurentSeries.from_dict({2: Fraction(2)}, 13), 2)
        with pytest.raises(ValueError):
            solve_fundamental_equation(monomial_v0(2, N=4), 2, 12)
        with pytest.raises(ValueError):
            solve_fundamental_equation(monomial_v0(1), 0)

    @settings(max_examples=25, deadline=None)
    @given(m=st.integers(2, 5), seed=st.integers(0, 10**6))
    def test_residual_vanishes_for_any_section(self, m, seed):
        ps = solve_fundamental_equation(normalized_v0(np.random.default_rng(seed), m, 8), m, 8)
        assert fundamental_residual(ps).is_zero()


class TestGConstant:
    @pytest.mark.parametrize("lam, expected", [(1, -2 * math.pi), (0, 2 * math.pi)])
    def test_focus_cycle(self, lam, expected):
        X = focus_cycle(lam)
        pe = polar_blowup(X, 1, 1)
        iif = polar_iif(X, pe, 12)
        res = compute_g_constant(X, pe, iif)
        assert res.g == pytest.approx(expected, abs=1e-9)
        assert res.deviation <= 1e-9

    def test_weak_focus(self):
        X = weak_focus()
        pe = polar_blowup(X, 1, 1)
        iif = polar_iif(X, pe, 12)
        assert iif.m == 3
        assert compute_g_constant(X, pe, iif).g == pytest.approx(2 * math.pi, abs=1e-9)

    def test_linear_center_gives_zero(self):
        X = linear_focus(0, 1)
        pe = polar_blowup(X, 1, 1)
        iif = polar_iif(X, pe, 12)
        assert abs(compute_g_constant(X, pe, iif).g) < 1e-12

    def test_darboux_closed_form(self):
        # V = r^2 f with f(0) = 1: linear part a, rotation b gives g = 2 pi a / b up to orientation
        X = darboux_system(1 + x + y * y, Fraction(-1, 10), 1, Fraction(1, 2))
        pe = polar_blowup(X, 1, 1)
        iif = polar_iif(X, pe, 12)
        assert abs(compute_g_constant(X, pe, iif).g) == pytest.approx(2 * math.pi / 10, abs=1e-9)

    def test_chain_identity_with_exact_return(self):
        X = focus_cycle(1)
        pe = polar_blowup(X, 1, 1)
        iif = polar_iif(X, pe, 12)
        r = 0.05
        eta1 = math.exp(-2 * math.pi)
        pi_r = (r * r - 1 + math.sqrt((r * r - 1) ** 2 + 4 * r * r * eta1**2)) / (2 * r * eta1)
        assert g_from_return_map(iif, r, pi_r) == pytest.approx(-2 * math.pi, abs=1e-8)

    def test_spread_detected(self):
        X = focus_cycle(1)
        pe = polar_blowup(X, 1, 1)
        iif = polar_iif(X, pe, 12)
        with pytest.raises(GConstantError):
            compute_g_constant(X, pe, iif, radii=(0.02, 0.04), tol=-1.0)


class TestPrincipalValue:
    def test_smooth_integrand(self):
        val, ok, err = principal_value(lambda t: math.cos(t) ** 2, [])
        assert ok and val == pytest.approx(math.pi, abs=1e-12)

    @pytest.mark.parametrize("s", [0.7, math.pi, 5.0])
    def test_odd_cotangent_pole(self, s):
        # 1/tan((t - s)/2) integrates to 0 in principal value over a period
        val, ok, err = principal_value(lambda t: 1.0 / math.tan((t - s) / 2) + 1.0, [s])
        assert ok and val == pytest.approx(2 * math.pi, abs=1e-8)

    def test_even_pole_diverges(self):
        _, ok, _ = principal_value(lambda t: 1.0 / (1 - math.cos(t - 1.0)), [1.0])
        assert not ok

    def test_xi_without_characteristic_directions(self):
        assert compute_xi_pq(polar_blowup(focus_cycle(1), 1, 1)).xi == pytest.approx(-2 * math.pi, abs=1e-10)

    @pytest.mark.parametrize("l1, l2, mu", [(2, 1, 1), (2, 1, 2), (3, 2, Fraction(-1, 2))])
    def test_xi_two_weight_family(self, l1, l2, mu):
        X = degenerate_family(l1, l2, mu, 0)
        res = compute_xi_pq(polar_blowup(X, 1, 1, check_weight=False))
        expected = 6 * math.pi * float(l1) * float(mu) / (3 * float(l1) - float(l2))
        assert res.exists and res.xi == pytest.approx(expected, abs=1e-6)


def fake_iif(m, n=1):
    return SimpleNamespace(m=m, n=n)


class TestClassification:
    def test_center_when_m_nonpositive(self):
        rep = classify_singularity(None, fake_iif(0))
        assert rep.verdict == Verdict.CENTER and rep.cyclicity == 0

    def test_stable_focus(self):
        ps = solve_fundamental_equation(monomial_v0(1), 1, 6)
        ps.g_value = -2 * math.pi
        rep = classify_singularity(ps, fake_iif(1), 1e-12)
        assert (rep.verdict, rep.stability, rep.analytic, rep.cyclicity) == (Verdict.FOCUS, Stability.STABLE, True, 0)

    def test_orientation_swaps_stability(self):
        ps = solve_fundamental_equation(monomial_v0(1), 1, 6)
        ps.g_value = -1.0
        assert classify_singularity(ps, fake_iif(1), 0.0, orientation=-1).stability == Stability.UNSTABLE

    def test_center_candidate_with_zero_residue(self):
        v0 = monomial_v0(4, extra={8: Fraction(1)})
        assert v0_residue(v0) == 0
        ps = solve_fundamental_equation(v0, 4, 12)
        ps.g_value = 1e-15
        rep = classify_singularity(ps, fake_iif(4), 1e-12)
        assert rep.verdict == Verdict.CENTER and rep.numeric_only
        assert rep.analytic and rep.cyclicity == 0

    def test_nonzero_residue_is_not_claimed_analytic(self):
        v0 = monomial_v0(3, extra={4: Fraction(1)})
        assert v0_residue(v0) != 0
        ps = solve_fundamental_equation(v0, 3, 10)
        ps.g_value = 1.0
        rep = classify_singularity(ps, fake_iif(3), 1e-12)
        assert rep.analytic is False and rep.cyclicity is None
