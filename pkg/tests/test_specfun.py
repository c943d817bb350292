"""Gamma-identity layer: cross-form agreement against an independent oracle."""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hurstvol import specfun
from hurstvol.specfun import (
    EPS,
    GaussianHurstLaw,
    SingularityError,
    VhForm,
    a_h,
    e_h,
    e_h_derivatives_at_half,
    expected_e_h_montecarlo,
    expected_e_h_taylor,
    prob_outside_unit,
    v_h,
    v_h_form,
)

mpmath.mp.dps = 40


def mp_v_base(h):
    """Independent oracle: Gamma(1-2h) cos(pi h) / (pi h) in 40-digit arithmetic."""
    h = mpmath.mpf(repr(h))
    return mpmath.gamma(1 - 2 * h) * mpmath.cos(mpmath.pi * h) / (mpmath.pi * h)


def mp_v_c(h):
    """Independent oracle: 1 / (2h sin(pi h) Gamma(2h))."""
    h = mpmath.mpf(repr(h))
    return 1 / (2 * h * mpmath.sin(mpmath.pi * h) * mpmath.gamma(2 * h))


class TestVh:
    def test_value_at_half_is_one(self):
        assert v_h(0.5) == pytest.approx(1.0, rel=1e-14)

    def test_matches_independent_base_form_at_03(self):
        assert v_h(0.3) == pytest.approx(float(mp_v_base(0.3)), rel=1e-12)

    def test_matches_independent_ah_form_at_07(self):
        assert v_h(0.7) == pytest.approx(float(mp_v_c(0.7)), rel=1e-12)

    @pytest.mark.parametrize("h", [-0.1, 0.0, 1.0, 1.3, 1e-9])
    def test_domain_error(self, h):
        with pytest.raises(ValueError):
            v_h(h)

    def test_positive_on_grid(self):
        for h in np.arange(0.01, 1.0, 0.01):
            val = v_h(h)
            assert math.isfinite(val) and val > 0.0


class TestVhForms:
    def test_direct_substitution_form_c(self):
        expected = 1.0 / (2 * 0.25 * math.sin(math.pi / 4) * math.gamma(0.5))
        assert v_h_form(0.25, VhForm.FORM_C_AH) == pytest.approx(expected, rel=1e-14)

    def test_singular_forms_raise_at_half(self):
        for form in (VhForm.GAMMA_POLE_BASE, VhForm.FORM_B):
            with pytest.raises(SingularityError):
                v_h_form(0.5, form)

    def test_form_b_agrees_with_canonical(self):
        assert v_h_form(0.4, VhForm.FORM_B) == pytest.approx(v_h(0.4), rel=1e-10)

    def test_all_forms_agree_on_grid(self):
        for h in np.arange(0.01, 1.0, 0.01):
            ref = v_h(h)
            for form in VhForm:
                if form in specfun.SINGULAR_FORMS and abs(h - 0.5) < 1e-9:
                    continue
                assert v_h_form(h, form) == pytest.approx(ref, rel=1e-10)

    @given(st.floats(min_value=0.01, max_value=0.99))
    @settings(max_examples=150, deadline=None)
    def test_forms_agree_property(self, h):
        ref = v_h(h)
        for form in VhForm:
            if form in specfun.SINGULAR_FORMS and abs(h - 0.5) < 1e-6:
                continue
            assert v_h_form(h, form) == pytest.approx(ref, rel=1e-9)


class TestAhEh:
    def test_a_h_at_half(self):
        assert a_h(0.5) == pytest.approx(1.0, rel=1e-14)

    def test_a_h_identity_at_03(self):
        expected = float(mp_v_c(0.3) * mpmath.gamma(mpmath.mpf("0.8")) ** 2)
        assert a_h(0.3) == pytest.approx(expected, rel=1e-12)

    def test_a_h_finite_positive_at_09(self):
        val = a_h(0.9)
        assert math.isfinite(val) and val > 0.0

    def test_e_h_at_half_is_one(self):
        assert e_h(0.5) == pytest.approx(1.0, rel=1e-14)

    @pytest.mark.parametrize("h", [0.1, 0.3])
    def test_e_equals_a(self, h):
        assert e_h(h) == pytest.approx(a_h(h), rel=1e-10)

    @given(st.floats(min_value=0.01, max_value=0.99))
    @settings(max_examples=200, deadline=None)
    def test_e_equals_a_property(self, h):
        assert e_h(h) == pytest.approx(a_h(h), rel=1e-10)


class TestDerivativesAtHalf:
    def test_analytic_values(self):
        e0, e1, e2 = e_h_derivatives_at_half()
        assert e0 == pytest.approx(1.0, abs=1e-12)
        assert e1 == pytest.approx(-2.0, abs=1e-10)
        assert e2 == pytest.approx(8.0 + 2.0 * math.pi ** 2 / 3.0, abs=1e-9)

    def test_finite_difference_cross_check(self):
        step = 1e-5
        fd1 = (e_h(0.5 + step) - e_h(0.5 - step)) / (2 * step)
        fd2 = (e_h(0.5 + step) - 2 * e_h(0.5) + e_h(0.5 - step)) / step ** 2
        assert fd1 == pytest.approx(-2.0, abs=1e-4)
        assert fd2 == pytest.approx(14.5797, abs=1e-3)


# rows: (sigma2, P[H outside (0,1)], second-order expectation)
REFERENCE_ROWS = [
    (0.0230, 9.7757e-04, 1.1677),
    (0.0200, 4.0695e-04, 1.1458),
    (0.0175, 1.5705e-04, 1.1276),
    (0.0150, 4.4557e-05, 1.1093),
    (0.0125, 7.7442e-06, 1.0911),
    (0.0100, 5.7330e-07, 1.0729),
    (0.0050, 1.5375e-12, 1.0364),
    (0.0010, 2.5968e-56, 1.0073),
]


class TestGaussianLaw:
    @pytest.mark.parametrize("sigma2,_, expected", REFERENCE_ROWS)
    def test_taylor_rows(self, sigma2, _, expected):
        val = expected_e_h_taylor(GaussianHurstLaw(sigma2=sigma2))
        assert val == pytest.approx(expected, rel=1e-3)  # 4 significant digits

    def test_taylor_degenerate(self):
        assert expected_e_h_taylor(GaussianHurstLaw(sigma2=0.0)) == 1.0

    def test_taylor_rejects_other_means(self):
        with pytest.raises(ValueError):
            expected_e_h_taylor(GaussianHurstLaw(mean=0.4, sigma2=0.01))

    @pytest.mark.parametrize("sigma2, expected, _", REFERENCE_ROWS)
    def test_probability_rows(self, sigma2, expected, _):
        val = prob_outside_unit(GaussianHurstLaw(sigma2=sigma2))
        assert val == pytest.approx(expected, rel=1e-3)

    def test_probability_limit_and_domain(self):
        assert prob_outside_unit(GaussianHurstLaw(sigma2=1e-8)) == pytest.approx(0.0, abs=1e-300)
        with pytest.raises(ValueError):
            prob_outside_unit(GaussianHurstLaw(sigma2=0.0))

    @given(st.floats(min_value=1e-4, max_value=0.05),
           st.floats(min_value=1e-4, max_value=0.05))
    @settings(max_examples=100, deadline=None)
    def test_probability_monotone(self, s1, s2):
        lo, hi = sorted((s1, s2))
        if lo == hi:
            return
        assert (prob_outside_unit(GaussianHurstLaw(sigma2=lo))
                <= prob_outside_unit(GaussianHurstLaw(sigma2=hi)))


class TestMonteCarlo:
    def test_deterministic(self):
        law = GaussianHurstLaw(sigma2=0.01)
        a = expected_e_h_montecarlo(law, samples=10 ** 5, seed=7)
        b = expected_e_h_montecarlo(law, samples=10 ** 5, seed=7)
        assert a == b

    def test_degenerate_law(self):
        assert expected_e_h_montecarlo(GaussianHurstLaw(sigma2=0.0)) == pytest.approx(1.0)

    def test_sample_floor(self):
        with pytest.raises(ValueError):
            expected_e_h_montecarlo(GaussianHurstLaw(sigma2=0.01), samples=10)

    def test_matches_quadrature_oracle(self):
        # oracle: conditioned expectation by adaptive quadrature over (EPS, 1-EPS)
        from scipy.integrate import quad

        sigma2 = 0.01
        s = math.sqrt(sigma2)
        dens = lambda h: math.exp(-(h - 0.5) ** 2 / (2 * sigma2)) / math.sqrt(2 * math.pi * sigma2)
        num = quad(lambda h: e_h(h) * dens(h), EPS, 1 - EPS, limit=400)[0]
        den = quad(dens, EPS, 1 - EPS, limit=400)[0]
        truth = num / den
        draws = 600_000
        mc = expected_e_h_montecarlo(GaussianHurstLaw(sigma2=sigma2), samples=draws, seed=1)
        # 3 standard errors, std of e_h(H) about 0.3 at this variance
        assert mc == pytest.approx(truth, abs=3 * 0.3 / math.sqrt(draws))

    def test_taylor_matches_montecarlo_in_small_variance_regime(self):
        # the quadratic expansion is accurate below sigma2 ~ 2e-3; beyond that
        # the 1/(2h)-type growth of e_h near the endpoints dominates the gap
        law = GaussianHurstLaw(sigma2=0.001)
        mc = expected_e_h_montecarlo(law, samples=400_000, seed=3)
        assert mc == pytest.approx(expected_e_h_taylor(law), abs=8e-4)
