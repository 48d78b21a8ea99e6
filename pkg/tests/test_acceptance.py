"""Acceptance checks 1-12, one test per criterion, at the required tolerances.

Each test records a one-line summary; ``conftest.py`` prints them after the run.
"""

import math
from fractions import Fraction
from types import SimpleNamespace

import numpy as np
import pytest

from monodromic.algebra import BivariatePolynomial, LPoly
from monodromic.blowup import polar_blowup, polar_iif
from monodromic.families import (
    degenerate_family,
    degenerate_family_is_monodromic,
    focus_cycle,
    fundamental_field,
)
from monodromic.field import darboux_system
from monodromic.newton import determining_polynomial, fuchs_indices, newton_diagram, quasihomog_decompose
from monodromic.oracle import (
    OracleConfig,
    closed_form_focus_cycle,
    estimate_eta,
    integrate_poincare,
    verify_fundamental,
)
from monodromic.pipeline import check_monodromy, run_pipeline
from monodromic.poincare import (
    classify_singularity,
    compute_g_constant,
    compute_xi_pq,
    fundamental_residual,
    g_from_return_map,
    solve_fundamental_equation,
    v0_residue,
)
from monodromic.problem import fixture_path, load_problem
from monodromic.series import LaurentSeries, PuiseuxSeries, puiseux_to_laurent, random_series, series_mul, series_pow
from monodromic.theta import FormTag, LocalTheta, branch_residual, classify_local, newton_puiseux_branches

x, y = BivariatePolynomial.x(), BivariatePolynomial.y()
ETA1 = math.exp(-2 * math.pi)


@pytest.fixture
def criterion(record_property):
    def record(number, title, ok, detail):
        record_property("criterion", (number, title, detail))
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {title} ({detail})")
        assert ok, detail

    return record


def expansion(X, p=1, q=1, N=12):
    pe = polar_blowup(X, p, q)
    return pe, polar_iif(X, pe, N)


def test_criterion_01_eta1_reproduction(criterion):
    X = focus_cycle(1)
    pe, iif = expansion(X)
    fit = math.exp(estimate_eta(pe, 1).value)
    quad = math.exp(compute_g_constant(X, pe, iif).g)
    pi_err = max(abs(integrate_poincare(pe, r).pi_value - float(closed_form_focus_cycle(r))) for r in (0.02, 0.05, 0.1))
    rel = max(abs(fit / ETA1 - 1), abs(quad / ETA1 - 1))
    criterion(1, "eta_1 = exp(-2 pi) for lambda = 1", rel <= 1e-6 and pi_err <= 1e-8,
              f"max rel err eta_1 {rel:.2e}, max |Pi - closed form| {pi_err:.2e}")


def test_criterion_02_eta1_jump(criterion):
    X = focus_cycle(0)
    pe, iif = expansion(X)
    fit = math.exp(estimate_eta(pe, 1, np.geomspace(0.0002, 0.003, 10)).value)
    quad = math.exp(compute_g_constant(X, pe, iif).g)
    rel = max(abs(fit / math.exp(2 * math.pi) - 1), abs(quad / math.exp(2 * math.pi) - 1))
    edges = [[(e.start, e.end) for e in newton_diagram(focus_cycle(lam)).edges] for lam in (1, 0)]
    ok_edges = edges == [[((0, 2), (2, 0))], [((0, 4), (4, 0))]]
    criterion(2, "eta_1 = exp(2 pi) at lambda = 0 and diagram change", rel <= 1e-6 and ok_edges,
              f"rel err {rel:.2e}, edges {edges}")


def test_criterion_03_fixed_point(criterion):
    pe, _ = expansion(focus_cycle(1))
    err = abs(integrate_poincare(pe, 1.0).pi_value - 1.0)
    criterion(3, "Pi(sqrt(lambda)) = sqrt(lambda)", err <= 1e-8, f"|Pi(1) - 1| = {err:.2e}")


def test_criterion_04_xi11_closed_form(criterion):
    points = [(2, 1, 1, 0), (2, 1, 2, 1), (3, 2, -1, Fraction(1, 2))]
    errs, members = [], []
    for l1, l2, mu, A in points:
        X = degenerate_family(l1, l2, mu, A)
        members.append(degenerate_family_is_monodromic(l1, l2, mu, A) and check_monodromy(X, 1, 1)[0]
                       and check_monodromy(X, 1, 3)[0])
        res = compute_xi_pq(polar_blowup(X, 1, 1, check_weight=False))
        expected = 6 * math.pi * float(l1) * float(mu) / (3 * float(l1) - float(l2))
        errs.append(abs(res.xi - expected) if res.exists else math.inf)
    criterion(4, "xi_11 = 6 pi l1 mu / (3 l1 - l2)", max(errs) <= 1e-6 and all(members),
              f"max err {max(errs):.2e} over {len(points)} points, monodromic {members}")


def test_criterion_05_coefficient_structure(criterion):
    rng = np.random.default_rng(5)
    bad = []
    for m in range(2, 7):
        for trial in range(5):
            raw = random_series(rng, m, 12, trunc=m + 11)
            V0 = LaurentSeries([Fraction(1)] + [raw.coeff(k) for k in range(m + 1, m + 12)], m, m + 11)
            ps = solve_fundamental_equation(V0, m, 12)
            ok = (ps.eta(1) == LPoly.const(1) and all(not ps.eta(j) for j in range(2, m))
                  and [c.terms.get(0, 0) for c in ps.coeffs] == [1] + [0] * 11
                  and ps.residual_order >= m + 11 and fundamental_residual(ps).is_zero())
            if not ok:
                bad.append((m, trial))
    criterion(5, "eta_1 = 1, eta_j = 0 below m, identity at g = 0", not bad, f"25 sections, failures {bad}")


def test_criterion_06_separable_oracle(criterion):
    V0 = LaurentSeries.from_dict({2: Fraction(1)}, 13)
    ps = solve_fundamental_equation(V0, 2, 12)
    g = LPoly.gen("g")
    bad = [ell for ell in range(10) if ps.eta(2 + ell) != g ** (ell + 1)]
    criterion(6, "V0 = rho^2 gives eta_{2+l} = g^(l+1)", not bad, f"l = 0..9, mismatches {bad}")


def test_criterion_07_constancy_of_g(criterion):
    X = focus_cycle(1)
    pe, iif = expansion(X)
    res = compute_g_constant(X, pe, iif, radii=(0.02, 0.04, 0.08, 0.16))
    chain = max(abs(g_from_return_map(iif, r, integrate_poincare(pe, r).pi_value) - res.g) for r in res.radii)
    criterion(7, "G constant across radii, both forms agree", res.deviation <= 1e-6 and chain <= 1e-8,
              f"spread {res.deviation:.2e}, form difference {chain:.2e}")


def test_criterion_08_fundamental_identity(criterion):
    systems = [focus_cycle(1)] + [darboux_system(f, a, b, al) for f, a, b, al in (
        (1 + x + y * y, Fraction(-1, 10), 1, Fraction(1, 2)),
        (2 - x * y + x**3, Fraction(-1, 30), 2, 1),
        (1 + y - x * x, Fraction(1, 20), 1, Fraction(-1, 4)),
    )]
    worst_v, worst_i = 0.0, 0.0
    for X in systems:
        pe, iif = expansion(X)
        for r0 in (0.01, 0.05):
            o = integrate_poincare(pe, r0, OracleConfig(rho_max=1.0))
            worst_v = max(worst_v, verify_fundamental(iif, o))
            worst_i = max(worst_i, abs(o.pi_prime - o.exp_I) / abs(o.pi_prime))
    criterion(8, "V0(Pi) = V0 Pi' and Pi' = exp(I)", worst_v <= 1e-6 and worst_i <= 1e-6,
              f"identity residual {worst_v:.2e}, derivative residual {worst_i:.2e} on {len(systems)} systems")


def test_criterion_09_series_engine(criterion):
    rng = np.random.default_rng(9)
    bad_pow = 0
    for _ in range(100):
        a = random_series(rng, int(rng.integers(-2, 3)), int(rng.integers(1, 6)), var="rho")
        n = int(rng.integers(1, 6))
        fold = a
        for _ in range(n - 1):
            fold = series_mul(fold, a)
        if series_pow(a, n) != fold:
            bad_pow += 1
    bad_law = 0
    for _ in range(50):
        m, n = int(rng.integers(-4, 9)), int(rng.integers(1, 7))
        s = random_series(rng, m, 3, trunc=m + 6)
        if puiseux_to_laurent(PuiseuxSeries(s, n)).lead != m - n + 1:
            bad_law += 1
    criterion(9, "power recurrence and Puiseux multiplicity law", not bad_pow and not bad_law,
              f"power mismatches {bad_pow}/100, multiplicity mismatches {bad_law}/50")


def test_criterion_10_determining_polynomial(criterion):
    bad = []
    for m in range(2, 7):
        Pr, Qr = quasihomog_decompose(fundamental_field(m), 1, 1).leading
        D = determining_polynomial(Pr, Qr, 1, 1)
        fu = fuchs_indices(Pr, Qr, 1, 1, 1)
        if list(D.c) != [0, 1] + [0] * (m - 2) + [-1] or fu.indices != (m - 1,):
            bad.append(m)
    criterion(10, "D(eta) = eta (1 - eta^(m-1)), Fuchs index m - 1", not bad, f"m = 2..6, failures {bad}")


def test_criterion_11_theta_branches(criterion):
    fixtures = {
        "rho^2 - theta^3": y * y - x**3,
        "rho^2 + theta^2": y * y + x * x,
        "(rho - theta^2)(rho - 2 theta^2) + theta^7": (y - x * x) * (y - 2 * x * x) + x**7,
    }
    problems = []
    for name, poly in fixtures.items():
        for side in (1, -1):
            rep = newton_puiseux_branches(poly, side=side)
            for br in rep.branches:
                if br.residual_order is None or br.residual_order < br.truncation_order:
                    problems.append(f"{name} side {side}: residual order {br.residual_order}")
                elif abs(branch_residual(poly, br, 1e-2)) > 1e-2 ** float(br.truncation_order):
                    problems.append(f"{name} side {side}: numeric residual")
    cusp = [b for b in newton_puiseux_branches(fixtures["rho^2 - theta^3"]).branches if b.is_real and b.is_positive]
    if len(cusp) != 1 or cusp[0].lead_exponent != Fraction(3, 2):
        problems.append("cusp branch")
    if any(b.is_real for s in (1, -1) for b in newton_puiseux_branches(fixtures["rho^2 + theta^2"], side=s).branches):
        problems.append("circle has a real branch")
    pair = newton_puiseux_branches(fixtures["(rho - theta^2)(rho - 2 theta^2) + theta^7"]).branches
    if sorted(b.lead_coeff for b in pair) != [1, 2] or not all(b.is_positive for b in pair):
        problems.append("simple roots 1, 2")
    forms = [
        (x * x + y * y, FormTag.ELLIPTIC_A, None),
        (x * x + y**3, FormTag.CUSP_B, None),
        (x**4 + x * y, FormTag.NON_ELEMENTARY_D, 4),
    ]
    for poly, tag, k in forms:
        cls = classify_local(LocalTheta.from_polynomial(poly))
        if cls.form_tag != tag or (cls.delta1, cls.delta2) != (1, 1) or (k is not None and cls.k != k):
            problems.append(f"normal form {tag.value}: got {cls.form_tag.value} {cls.delta1} {cls.delta2} k={cls.k}")
    criterion(11, "branch resubstitution and normal forms", not problems,
              "; ".join(problems) or "3 branch fixtures, 3 normal forms")


def test_criterion_12_residue_and_analyticity(criterion):
    problems = []
    weak = run_pipeline(load_problem(fixture_path("weak_focus"))).runs[0]
    if v0_residue(weak.iif.V0) != 0:
        problems.append("weak focus residue")
    if (weak.classification.analytic, weak.classification.cyclicity) != (True, 0):
        problems.append("weak focus not analytic/cyclicity 0")
    V0 = LaurentSeries.from_dict({4: Fraction(1), 8: Fraction(1)}, 15)
    ps = solve_fundamental_equation(V0, 4, 12)
    ps.g_value = 0.5
    syn = classify_singularity(ps, SimpleNamespace(m=4, n=1), 1e-12)
    if v0_residue(V0) != 0 or (syn.analytic, syn.cyclicity) != (True, 0):
        problems.append("rho^4 + rho^8 section")
    m1 = [run_pipeline(load_problem(fixture_path(n))).runs for n in ("focus_cycle", "focus_cycle_zero")]
    m1 += [[r for r in run_pipeline(load_problem(fixture_path("two_weight_family"))).runs if r.weight == (1, 3)]]
    for runs in m1:
        cls = runs[0].classification
        if cls.m != 1 or (cls.analytic, cls.cyclicity) != (True, 0):
            problems.append(f"m = 1 run {runs[0].weight} not analytic")
    criterion(12, "zero residue and m = 1 give analytic, cyclicity 0", not problems,
              "; ".join(problems) or "2 zero-residue sections, 3 runs with m = 1")
