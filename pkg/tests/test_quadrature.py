import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hftlab.catalog import Chi, Phi, PolyExp, PsiP, XAlphaM
from hftlab.errors import BudgetExhausted, DivergentTail, DomainError, InvalidContour
from hftlab.quadrature import (
    REFINEMENT_SAFETY,
    ContourSpec,
    choose_ray,
    erf_integral,
    gauss_series,
    integrate_finite,
    integrate_halfline,
    integrate_rotated,
)

# frozen from mpmath.quad at 30 digits
CHI0_LAPLACE = {0.5: 0.68864091516240305691, 1.0: 0.4543586392349529579, 2.0: 0.28090888588657691332, 4.0: 0.16466226843390155696}


class TestHalfline:
    def test_exponential(self):
        r = integrate_halfline(lambda t: np.exp(-t))
        assert r.value.to_complex() == pytest.approx(1.0, rel=1e-13)
        assert r.nodes_used >= 1 and r.abs_error_estimate >= 0

    def test_root_exponential(self):
        r = integrate_halfline(lambda t: np.exp(-np.sqrt(t)))
        assert r.value.to_complex() == pytest.approx(2.0, rel=1e-12)

    def test_gamma_22_in_log_domain(self):
        r = integrate_halfline(lambda t: 21 * np.log(t) - t, log_form=True)
        assert r.value.log_abs == pytest.approx(math.lgamma(22), rel=1e-13)
        assert r.value.phase == pytest.approx(0.0, abs=1e-13)

    def test_log_form_beyond_double_range(self):
        # int t^400 e^{-t} dt = 400!, about 1e868
        r = integrate_halfline(lambda t: 400 * np.log(t) - t, log_form=True)
        assert r.value.log_abs == pytest.approx(math.lgamma(401), rel=1e-12)

    @pytest.mark.parametrize("mu", sorted(CHI0_LAPLACE))
    def test_laplace_of_root_exponential(self, mu):
        r = integrate_halfline(lambda t: np.exp(-mu * t - np.sqrt(t)), 1e-12)
        assert r.value.to_complex().real == pytest.approx(CHI0_LAPLACE[mu], rel=1e-11)

    def test_divergent_tail(self):
        with pytest.raises(DivergentTail):
            integrate_halfline(lambda t: np.exp(0.01 * t))

    def test_budget_exhausted_carries_best(self):
        with pytest.raises(BudgetExhausted) as exc:
            integrate_halfline(lambda t: np.exp(-t) * np.cos(50 * t), 1e-14, max_level=4)
        assert exc.value.best is not None

    def test_rejects_bad_tolerance(self):
        with pytest.raises(DomainError):
            integrate_halfline(lambda t: np.exp(-t), 0.0)

    def test_zero_integrand(self):
        assert integrate_halfline(lambda t: np.zeros_like(t)).value.is_zero

    def test_refinement_contract(self):
        # tighter tolerance moves the value by no more than the safety factor
        # times the coarser error estimate
        f = lambda t: np.exp(-t - np.sqrt(t)) * np.cos(t)
        coarse = integrate_halfline(f, 1e-6)
        fine = integrate_halfline(f, 1e-12)
        diff = abs(fine.value.to_complex() - coarse.value.to_complex())
        assert diff <= REFINEMENT_SAFETY * coarse.abs_error_estimate + 1e-15

    def test_error_history_shrinks(self):
        r = integrate_halfline(lambda t: np.exp(-np.sqrt(t)) / (1 + t * t), 1e-12)
        h = r.error_history
        assert len(h) >= 2 and h[-1] <= h[0] + math.log(REFINEMENT_SAFETY)

    def test_deterministic(self):
        f = lambda t: np.exp(-(1 + 2j) * t - np.sqrt(t))
        assert integrate_halfline(f).value == integrate_halfline(f).value

    @given(st.floats(0.2, 20), st.floats(0.0, 3.0))
    def test_positive_integrand_has_zero_phase(self, mu, c):
        r = integrate_halfline(lambda t: np.exp(-mu * t - np.sqrt(t + c)))
        assert r.value.phase == 0.0

    @given(st.floats(0.05, 50))
    def test_exponential_rates(self, s):
        r = integrate_halfline(lambda t: np.exp(-s * t))
        assert r.value.to_complex() == pytest.approx(1 / s, rel=1e-10)


class TestRotated:
    def test_chi_moment_pi_over_4(self):
        r = integrate_rotated(Chi(0.0), 0, 5, math.pi / 4)
        assert r.value.log_abs == pytest.approx(math.log(2) + math.lgamma(12), rel=1e-12)
        assert r.value.phase == pytest.approx(-math.pi / 2, abs=1e-12)
        assert r.contour.kind == "rotated-ray"

    def test_angle_independence(self):
        a = integrate_rotated(Chi(0.0), 0, 5, math.pi / 6).value
        b = integrate_rotated(Chi(0.0), 0, 5, math.pi / 3).value
        assert a.isclose(b, rel_tol=1e-8, phase_tol=1e-8)

    def test_pole_family_at_one(self):
        r = integrate_rotated(PolyExp(0, 1.0), 1.0, 0, math.pi / 4)
        assert cmath.isclose(r.value.to_complex(), (1 - 1j) / 2, rel_tol=1e-12)

    @pytest.mark.parametrize(
        "f",
        [Chi(0.0), Chi(1.5), Phi(0.0), Phi(-1.0), PsiP(1 / 3), PsiP(0.5), XAlphaM(0.0, 2), PolyExp(1, 1.0), PolyExp(0, 2 + 1j)],
        ids=str,
    )
    @pytest.mark.parametrize("z", [0.0, -1.0, 2.0, -0.5j, 1 - 1j, -2 - 0.3j])
    def test_contour_independence(self, f, z):
        for n in (0, 3, 12):
            vals = [integrate_rotated(f, z, n, th, 1e-10).value for th in (math.pi / 12, math.pi / 6, math.pi / 4)]
            for v in vals[1:]:
                assert v.isclose(vals[0], rel_tol=1e-8, phase_tol=1e-8)

    def test_rotation_matches_real_axis(self):
        f = Phi(0.0)
        z = -0.7j
        rot = integrate_rotated(f, z, 2, math.pi / 5).value.to_complex()
        # log of e^{-izt} (-it)^2 e^{-sqrt(t+1)}; (-i)^2 = e^{i pi}
        direct = integrate_halfline(
            lambda t: -1j * z * t + 2 * np.log(t) + 1j * math.pi - np.sqrt(t + 1), log_form=True
        ).value.to_complex()
        assert cmath.isclose(rot, direct, rel_tol=1e-11)

    def test_upper_half_plane_rejected(self):
        with pytest.raises(DomainError):
            integrate_rotated(Chi(0.0), 1j, 0)

    def test_sector_violation(self):
        # e^{-t^2} grows along arg t = +-pi/3 (|2 arg t| > pi/2)
        with pytest.raises(InvalidContour):
            integrate_rotated(PsiP(2.0), 0.0, 0, math.pi / 3)

    def test_theta_out_of_range(self):
        with pytest.raises(InvalidContour):
            choose_ray(Chi(0.0), 0.0, 2.0)

    def test_auto_ray_is_admissible(self):
        c = choose_ray(PsiP(2.0), 3.0, "auto")
        assert c.kind == "rotated-ray" and 2 * c.theta < math.pi / 2

    def test_contour_spec_validation(self):
        with pytest.raises(ValueError):
            ContourSpec("rotated-ray", 0.0, -1)
        assert ContourSpec("rotated-ray", 0.3, -1).angle == pytest.approx(-0.3)


class TestFinite:
    def test_constant(self):
        assert integrate_finite(lambda t: np.ones_like(t), 0, 1).value.to_complex() == pytest.approx(1.0)

    def test_root_singularity(self):
        r = integrate_finite(lambda t: np.exp(-np.sqrt(t)), 0, 1, 1e-13)
        assert r.value.to_complex().real == pytest.approx(2 - 4 / math.e, rel=1e-12)

    def test_oscillatory(self):
        r = integrate_finite(lambda t: np.exp(-1j * t), 0, 1, 1e-13)
        assert cmath.isclose(r.value.to_complex(), (1 - cmath.exp(-1j)) / 1j, rel_tol=1e-12)

    def test_bisection_kicks_in(self):
        r = integrate_finite(lambda t: np.cos(200 * t), 0, 1, 1e-11)
        assert r.value.to_complex().real == pytest.approx(math.sin(200) / 200, rel=1e-8)

    def test_bad_interval(self):
        with pytest.raises(DomainError):
            integrate_finite(lambda t: t, 1, 0)


class TestGaussIntegral:
    def test_zero(self):
        assert erf_integral(0.0) == 0.0

    def test_limit(self):
        assert erf_integral(40.0) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-15)

    def test_half_against_series(self):
        # partial sums of the alternating series; remainder below the next term
        s = sum((-1) ** n * 0.5 ** (2 * n + 1) / (math.factorial(n) * (2 * n + 1)) for n in range(20))
        assert erf_integral(0.5) == pytest.approx(s, rel=1e-15)
        assert erf_integral(0.5) == pytest.approx(0.46128100641279246, rel=1e-15)

    @pytest.mark.parametrize("x", [0.1, 0.5, 1.0, 2.0, 3.0, 4.5, 5.0, 5.5, 7.0, 10.0])
    def test_against_math_erf(self, x):
        assert erf_integral(x) == pytest.approx(math.sqrt(math.pi) / 2 * math.erf(x), rel=1e-12)

    def test_branches_agree_at_switch(self):
        from hftlab.quadrature import _ERF_SWITCH, _gauss_tail

        x = _ERF_SWITCH
        tail = math.sqrt(math.pi) / 2 - _gauss_tail(x)
        assert abs(erf_integral(x * (1 - 1e-12)) - tail) <= 1e-10 * tail

    @pytest.mark.parametrize("x", [0.25, 1.0, 2.0])
    def test_alternating_series_small_x(self, x):
        assert float(gauss_series(x)) == pytest.approx(math.sqrt(math.pi) / 2 * math.erf(x), rel=1e-13)

    @given(st.floats(-12, 12, allow_nan=False))
    def test_odd(self, x):
        assert erf_integral(-x) == -erf_integral(x)

    @given(st.floats(-12, 12), st.floats(1e-6, 1.0))
    def test_increasing(self, x, dx):
        assert erf_integral(x + dx) >= erf_integral(x)

    def test_complex_series(self):
        z = 0.3 + 0.4j
        # derivative check: d/dz of the series is e^{-z^2}
        h = 1e-6
        d = (gauss_series(z + h) - gauss_series(z - h)) / (2 * h)
        assert cmath.isclose(d, cmath.exp(-z * z), rel_tol=1e-8)
