import cmath
import math
import random

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hftlab.baire import perturb
from hftlab.catalog import Chi, Phi, PolyExp, PsiP, XAlphaM, combine
from hftlab.continuation import phi_boundary_derivative
from hftlab.errors import DomainError, NotSmoothError, PrecisionLoss
from hftlab.logdomain import LogComplex, log_factorial
from hftlab.transform import (
    TaylorEntry,
    TaylorTable,
    coefficient_K,
    estimate_radius,
    expected_growth_exponent,
    hft_derivative,
    hft_derivative_detail,
    hft_eval,
    ibp_expansion,
    metric_rho,
    seminorm_rho,
    seminorm_rho_lk,
    taylor_table,
    weighted_sup,
)

# mpmath.quad at 30 digits, frozen
PHI0_AT = {-1j: 0.263034663153588434203822861325, -10j: 0.0351066640111944102677638937073}
PSI_THIRD_AT = {-2j: 0.254296337801164345245169160042, -1: 0.185357872122691814 + 0.436047574659274714j}
CHI0_AT_MINUS_ONE = 0.270513580162214144 + 0.465122025466482434j

GRID = [-0.5j, -1j, -2 - 1j, 1.5 - 0.25j, -1.0, 2.0]


def _close(a: LogComplex, b: complex, rel=1e-10):
    return cmath.isclose(a.to_complex(), b, rel_tol=rel)


class TestEval:
    def test_pole_family_at_zero(self):
        assert _close(hft_eval(PolyExp(0, 1.0), 0), 1.0, 1e-14)

    def test_chi_at_zero(self):
        assert _close(hft_eval(Chi(0.0), 0), 2.0, 1e-14)

    def test_polyexp_lower_half_plane(self):
        assert _close(hft_eval(PolyExp(1, 1.0), -1j), 0.25)

    @pytest.mark.parametrize("z", sorted(PHI0_AT, key=abs))
    def test_phi_oracle(self, z):
        assert _close(hft_eval(Phi(0.0), z), PHI0_AT[z])

    @pytest.mark.parametrize("z", [-2j, -1])
    def test_psi_third_oracle(self, z):
        assert _close(hft_eval(PsiP(1 / 3), z), PSI_THIRD_AT[z], 1e-9)

    def test_chi_on_real_axis(self):
        assert _close(hft_eval(Chi(0.0), -1.0), CHI0_AT_MINUS_ONE, 1e-9)

    def test_upper_half_plane(self):
        with pytest.raises(DomainError):
            hft_eval(Chi(0.0), 0.5j)

    def test_combination_is_linear(self):
        g = combine([(2.0, Chi(0.0)), (1j, PolyExp(0, 1.0))])
        z = -0.3 - 1j
        expect = 2 * hft_eval(Chi(0.0), z).to_complex() + 1j * hft_eval(PolyExp(0, 1.0), z).to_complex()
        assert _close(hft_eval(g, z), expect)

    def test_string_spec_accepted(self):
        assert _close(hft_eval("polyexp:nu=0,sigma=1", 0), 1.0, 1e-14)

    def test_entire_case_far_up_the_axis(self):
        # e^{-t^2}: transform (sqrt(pi)/2) e^{-z^2/4} erfc(iz/2)
        z = 3.0 - 0.5j
        oracle = complex(mp.sqrt(mp.pi) / 2 * mp.exp(-(mp.mpc(z) ** 2) / 4) * mp.erfc(1j * mp.mpc(z) / 2))
        assert _close(hft_eval(PsiP(2.0), z), oracle, 1e-9)


class TestDerivative:
    def test_chi_seven(self):
        d = hft_derivative(Chi(0.0), 7, 0)
        assert d.log_abs == pytest.approx(math.log(2) + math.lgamma(16), rel=1e-14)
        assert cmath.isclose(cmath.exp(1j * d.phase), (-1j) ** 7)

    def test_psi_third_five(self):
        d = hft_derivative(PsiP(1 / 3), 5, 0)
        assert d.log_abs == pytest.approx(math.log(3) + math.lgamma(18), rel=1e-13)
        assert cmath.isclose(cmath.exp(1j * d.phase), (-1j) ** 5)

    def test_polyexp_three(self):
        assert _close(hft_derivative(PolyExp(0, 1.0), 3, 0), (-1j) ** 3 * 6, 1e-14)

    @pytest.mark.parametrize("n", [0, 3, 9, 15])
    def test_chi_quadrature_law(self, n):
        d = hft_derivative_detail(Chi(0.0), n, 0, 1e-10, prefer="quadrature")
        assert d.method == "quadrature"
        assert d.value.log_abs == pytest.approx(math.log(2) + math.lgamma(2 * n + 2), rel=1e-9)
        assert abs(math.remainder(d.value.phase + math.pi / 2 * n, 2 * math.pi)) < 1e-9

    def test_methods_recorded(self):
        assert hft_derivative_detail(Chi(0.0), 3, 0).method == "closed-form"
        assert hft_derivative_detail(Phi(0.0), 3, 0).method == "identity"
        assert hft_derivative_detail(Chi(0.0), 3, -1j).method == "quadrature"

    def test_closed_refused_off_point(self):
        with pytest.raises(DomainError):
            hft_derivative_detail(Chi(0.0), 2, 1.0, prefer="closed")

    def test_bad_n(self):
        with pytest.raises(DomainError):
            hft_derivative(Chi(0.0), -1, 0)

    def test_against_mpmath_moment(self):
        z = -0.4 - 0.7j
        n = 4
        oracle = complex(mp.quad(lambda t: mp.exp(-1j * z * t) * (-1j * t) ** n * mp.exp(-mp.sqrt(t + 1)), [0, 5, 30, mp.inf]))
        assert _close(hft_derivative(Phi(0.0), n, z), oracle, 1e-9)

    @pytest.mark.parametrize("n", range(13))
    def test_phi_quadrature_agrees_with_identity(self, n):
        q = hft_derivative_detail(Phi(0.0), n, 0, 1e-10, prefer="quadrature").value
        idv = phi_boundary_derivative(n)
        assert q.log_abs == pytest.approx(idv.log_abs, rel=1e-6)
        assert abs(math.remainder(q.phase - idv.phase, 2 * math.pi)) < 1e-6


class TestModulationShift:
    @pytest.mark.parametrize("alpha", [-1.5, 0.7, 3.0])
    @pytest.mark.parametrize("z", GRID)
    def test_shift(self, alpha, z):
        for fam in (Chi, Phi):
            lhs = hft_eval(fam(alpha), z, prefer="quadrature", theta=math.pi / 4)
            rhs = hft_eval(fam(0.0), z - alpha, prefer="quadrature", theta=math.pi / 6)
            assert lhs.log_abs == pytest.approx(rhs.log_abs, abs=1e-8)
        lhs = hft_eval(XAlphaM(alpha, 2), z, prefer="quadrature")
        rhs = hft_eval(XAlphaM(0.0, 2), z - alpha, prefer="quadrature")
        assert lhs.log_abs == pytest.approx(rhs.log_abs, abs=1e-8)

    @settings(max_examples=15)
    @given(st.floats(-4, 4), st.floats(-3, 3), st.floats(-3, -0.05))
    def test_shift_random(self, alpha, x, y):
        z = complex(x, y)
        lhs = hft_eval(Phi(alpha), z)
        rhs = hft_eval(Phi(0.0), z - alpha)
        assert lhs.log_abs == pytest.approx(rhs.log_abs, abs=1e-8)


class TestMomentBound:
    @pytest.mark.parametrize("f", [Phi(0.0), Phi(1.0), PolyExp(0, 1.0), PolyExp(2, 1.0)], ids=str)
    def test_bound(self, f):
        for n in range(11):
            bound = weighted_sup(f, n + 2, 0, 1.0).value
            for z in GRID:
                assert math.exp(hft_derivative(f, n, z).log_abs) <= bound


class TestIbp:
    def test_phi_one_term(self):
        z = -10j
        e = ibp_expansion(Phi(0.0), 1, z)
        assert e.boundary_terms[0] == pytest.approx(math.exp(-1) / 10)
        assert _close(e.total, hft_eval(Phi(0.0), z).to_complex(), 1e-9)

    def test_vanishing_boundary_data(self):
        f = PolyExp(3, 1.0)
        e = ibp_expansion(f, 3, -2j)
        assert e.boundary_terms == (0, 0, 0)
        assert _close(e.remainder, hft_eval(f, -2j).to_complex(), 1e-9)

    def test_chi_rejected(self):
        with pytest.raises(NotSmoothError):
            ibp_expansion(Chi(0.0), 1, -1j)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_remainder_decay(self, k):
        scaled = []
        for R in (1e2, 1e3):
            rem = ibp_expansion(Phi(0.0), k, -1j * R).remainder
            scaled.append(math.exp(rem.log_abs) * R ** (k + 1))
        ratio = scaled[0] / scaled[1]
        assert 0.1 <= ratio <= 10

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_reproduces_transform(self, k):
        z = 1.0 - 3j
        assert _close(ibp_expansion(Phi(0.5), k, z).total, hft_eval(Phi(0.5), z).to_complex(), 1e-8)

    def test_zero_rejected(self):
        with pytest.raises(DomainError):
            ibp_expansion(Phi(0.0), 1, 0)


class TestTaylorTable:
    def test_chi_coefficients(self):
        t = taylor_table(Chi(0.0), 0, 5)
        for n in range(1, 6):
            expect = (2 * math.factorial(2 * n + 1) / math.factorial(n)) ** (1 / n)
            assert t.C(n) == pytest.approx(expect, rel=1e-13)
            assert t[n].method == "closed-form"

    def test_pole_family_unit_coefficients(self):
        t = taylor_table(PolyExp(0, 1.0), 0, 30)
        assert all(t.C(n) == pytest.approx(1.0, rel=1e-12) for n in range(1, 31))

    def test_modulation_reduction(self):
        a = taylor_table(Chi(3.0), 3.0, 20)
        b = taylor_table(Chi(0.0), 0.0, 20)
        for ea, eb in zip(a.entries, b.entries):
            assert ea.derivative == eb.derivative and ea.C == eb.C

    def test_c_checked_on_construction(self):
        d = LogComplex(math.log(12.0))
        with pytest.raises(ValueError):
            TaylorTable(None, 0, (TaylorEntry(0, d, None, "closed-form"), TaylorEntry(1, d, 11.0, "closed-form")), 1)

    def test_from_coefficients(self):
        # a_n = 2^n gives F^(n) = 2^n n! and C_n = 2
        t = TaylorTable.from_coefficients([LogComplex(n * math.log(2)) for n in range(12)])
        assert t[11].derivative.log_abs == pytest.approx(11 * math.log(2) + log_factorial(11), rel=1e-14)
        assert all(t.C(n) == pytest.approx(2.0, rel=1e-13) for n in range(1, 12))

    def test_quadrature_method(self):
        t = taylor_table(PsiP(0.5), 0, 8, "quadrature")
        assert all(e.method == "quadrature" for e in t.entries)
        for n in range(1, 9):
            assert t.C(n) == pytest.approx(taylor_table(Chi(0.0), 0, 8).C(n), rel=1e-8)

    def test_nmax_validated(self):
        with pytest.raises(DomainError):
            taylor_table(Chi(0.0), 0, 0)

    @given(st.integers(1, 60))
    def test_c_formula(self, n):
        t = taylor_table(Chi(0.0), 0, n)
        e = t[n]
        assert e.C == pytest.approx(math.exp((e.derivative.log_abs - math.lgamma(n + 1)) / n), rel=1e-14)


class TestCoefficientK:
    def test_k0_is_c(self):
        t = taylor_table(XAlphaM(0.0, 2), 0, 15)
        assert all(coefficient_K(t, 0, n) == t.C(n) for n in range(1, 16))

    def test_unit_table(self):
        t = taylor_table(PolyExp(0, 1.0), 0, 10)
        assert coefficient_K(t, 1, 10) == pytest.approx(0.1, rel=1e-12)

    def test_chi_m2(self):
        t = taylor_table(Chi(0.0), 0, 10)
        expect = math.exp((math.log(2) + math.lgamma(22) - math.lgamma(11)) / 10) / 100
        assert coefficient_K(t, 2, 10) == pytest.approx(expect, rel=1e-13)

    def test_range(self):
        t = taylor_table(Chi(0.0), 0, 5)
        with pytest.raises(DomainError):
            coefficient_K(t, 1, 6)
        with pytest.raises(DomainError):
            coefficient_K(t, 1, 0)


class TestRadius:
    @pytest.mark.parametrize("alpha", [0.0, 1.0, 2.0])
    @pytest.mark.parametrize("sigma", [1.0, 2.0, 0.5])
    def test_pole_distance(self, alpha, sigma):
        est = estimate_radius(taylor_table(PolyExp(0, sigma), alpha, 40))
        assert est.classification == "regular"
        assert est.radius_hat == pytest.approx(abs(alpha - 1j * sigma), rel=0.02)

    def test_unit_pole(self):
        est = estimate_radius(taylor_table(PolyExp(0, 1.0), 0, 30))
        assert est.radius_hat == pytest.approx(1.0, rel=1e-6)

    def test_root_five(self):
        est = estimate_radius(taylor_table(PolyExp(0, 1.0), 2.0, 30))
        assert est.radius_hat == pytest.approx(math.sqrt(5), rel=0.02)

    @pytest.mark.parametrize(
        "f,slope,tol",
        [(Chi(0.0), 1.0, 0.05), (PsiP(0.25), 3.0, 0.1), (XAlphaM(0.0, 2), 3.0, 0.1), (PsiP(1 / 3), 2.0, 0.1)],
        ids=str,
    )
    def test_divergent_slopes(self, f, slope, tol):
        est = estimate_radius(taylor_table(f, 0, 40), (10, 40))
        assert est.classification == "divergent"
        assert est.growth_exponent_hat == pytest.approx(slope, abs=tol)
        assert est.growth_exponent_hat == pytest.approx(expected_growth_exponent(f), abs=tol)

    def test_range_validated(self):
        t = taylor_table(Chi(0.0), 0, 20)
        with pytest.raises(DomainError):
            estimate_radius(t, (5, 10))
        with pytest.raises(DomainError):
            estimate_radius(t, (5, 25))

    def test_flagged_entries_rejected(self):
        t = taylor_table(Chi(0.0), 0, 20)
        entries = list(t.entries)
        e = entries[15]
        entries[15] = TaylorEntry(15, e.derivative, e.C, "quadrature", True)
        bad = TaylorTable(t.function, t.alpha, tuple(entries), 20)
        with pytest.raises(PrecisionLoss):
            estimate_radius(bad, (10, 20))

    def test_entire_function_has_infinite_radius(self):
        # e^{-t^2}: coefficients decay super-geometrically
        est = estimate_radius(taylor_table(PsiP(2.0), 0, 30))
        assert est.classification != "divergent"

    def test_report_fields(self):
        est = estimate_radius(taylor_table(PolyExp(0, 1.0), 0, 30))
        d = est.to_dict()
        assert d["classification"] == "regular" and d["fit_window"] == [10, 30]
        assert len(d["series_C"]) == 21


class TestGrowthLaw:
    def test_values(self):
        assert expected_growth_exponent(PsiP(0.5)) == pytest.approx(1.0)
        assert expected_growth_exponent(PsiP(0.25)) == pytest.approx(3.0)
        assert expected_growth_exponent(XAlphaM(0.0, 2)) == 3.0
        assert expected_growth_exponent(Chi(1.0)) == 1.0
        assert expected_growth_exponent(PolyExp(0, 1.0)) is None
        assert expected_growth_exponent(PsiP(2.0)) is None


class TestSeminorms:
    def test_phi_rho0(self):
        v = seminorm_rho(Phi(0.0), 0)
        assert v.value == pytest.approx(math.exp(-1), rel=1e-14)
        assert v.attained_at == 0.0

    def test_chi_rho1_infinite(self):
        assert seminorm_rho(Chi(0.0), 1).value == math.inf

    def test_chi_rho0_finite(self):
        assert seminorm_rho(Chi(0.0), 0).value == pytest.approx(1.0)

    @pytest.mark.parametrize("ell", [1, 2, 5, 10])
    def test_exponential_closed_form(self, ell):
        # every derivative of e^{-t} has modulus e^{-t}; (1+t)^ell e^{-t} peaks at t = ell - 1
        v = seminorm_rho(PolyExp(0, 1.0), ell)
        assert v.value == pytest.approx(ell**ell * math.exp(1 - ell), rel=1e-10)
        assert v.attained_at == pytest.approx(ell - 1, abs=1e-4)

    @pytest.mark.parametrize("ell,k", [(0, 0), (3, 0), (2, 1), (4, 2)])
    def test_rho_lk_exponential(self, ell, k):
        expect = (ell**ell * math.exp(-ell)) if ell else 1.0
        assert seminorm_rho_lk(PolyExp(0, 1.0), ell, k).value == pytest.approx(expect, rel=1e-10)

    def test_rho_lk_weight_cures_singularity(self):
        # t |d/dt e^{-sqrt t}| = sqrt(t) e^{-sqrt t}/2, max e^{-1}/2 at t = 1
        assert seminorm_rho_lk(Chi(0.0), 1, 1).value == pytest.approx(math.exp(-1) / 2, rel=1e-10)
        assert seminorm_rho_lk(Chi(0.0), 0, 1).value == math.inf

    def test_against_dense_mpmath_scan(self):
        f = Phi(0.0)
        ell, k = 4, 2
        best = max(
            float((1 + t) ** ell * abs(mp.diff(lambda s: mp.exp(-mp.sqrt(s + 1)), t, k)))
            for t in [mp.mpf(x) / 4 for x in range(0, 1200)]
        )
        assert weighted_sup(f, ell, k).value == pytest.approx(best, rel=1e-4)
        assert weighted_sup(f, ell, k).value >= best * (1 - 1e-12)

    def test_negative_ell(self):
        with pytest.raises(DomainError):
            seminorm_rho(Phi(0.0), -1)


class TestMetric:
    FUNCS = [Phi(0.0), Phi(1.0), PolyExp(0, 1.0), PolyExp(2, 1.0), combine([(0.5, Phi(-1.0)), (1, PolyExp(1, 2.0))])]

    def test_self_distance(self):
        assert metric_rho(Phi(0.0), Phi(0.0)) == 0.0

    def test_symmetric(self):
        for i, f in enumerate(self.FUNCS[:3]):
            for g in self.FUNCS[i + 1 : 4]:
                assert metric_rho(f, g, 8) == metric_rho(g, f, 8)

    def test_triangle(self):
        rng = random.Random(7)
        cache = {}

        def d(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                cache[key] = metric_rho(self.FUNCS[i], self.FUNCS[j], 8)
            return cache[key]

        for _ in range(8):
            i, j, k = rng.sample(range(len(self.FUNCS)), 3)
            assert d(i, k) <= d(i, j) + d(j, k) + 1e-12

    def test_bounded_by_two(self):
        assert 0 < metric_rho(Phi(0.0), PolyExp(0, 1.0)) < 2

    def test_infinite_seminorm_caps_term(self):
        # Chi has rho_ell = inf for ell >= 1; those terms contribute exactly 2^-ell
        d = metric_rho(Chi(0.0), combine([]), 5)
        r0 = seminorm_rho(Chi(0.0), 0).value
        assert d == pytest.approx(r0 / (1 + r0) + sum(2.0**-l for l in range(1, 6)), rel=1e-12)

    def test_perturbation_decreasing(self):
        f = PolyExp(0, 1.0)
        vals = [metric_rho(perturb(f, 0.0, j), f) for j in (1, 2, 4, 8, 16)]
        assert all(a > b for a, b in zip(vals, vals[1:]))
