import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import erfc, erfcx, gamma

from fracdmd import (
    AccuracyError,
    MLParams,
    SampledSignal,
    build_singular_rule,
    caputo_derivative,
    mittag_leffler,
    rl_derivative,
    rl_integral,
)

# independently computed with 40-digit arithmetic
E_HALF_AT_ONE = 5.0089800807622834663
CAPUTO_T2_Q025_T05 = 0.36969569697755296947
G3_OVER_G225 = 1.7652202421133396119
G3_OVER_G33 = 0.74531271474735909471
G3_OVER_G35 = 0.60180222245094003941


def power_signal(p, n=1001, t_end=1.0):
    t = np.linspace(0.0, t_end, n)
    return SampledSignal(t0=0.0, dt=t[1] - t[0], values=t**p)


class TestSampledSignal:
    def test_validation(self):
        with pytest.raises(ValueError):
            SampledSignal(t0=0.0, dt=0.0, values=[1.0, 2.0])
        with pytest.raises(ValueError):
            SampledSignal(t0=0.0, dt=0.1, values=[1.0])
        with pytest.raises(ValueError):
            SampledSignal(t0=0.0, dt=0.1, values=[1.0, np.nan])

    def test_grid(self):
        sig = SampledSignal(t0=1.0, dt=0.5, values=[0.0, 1.0, 2.0])
        assert sig.t_end == 2.0
        np.testing.assert_allclose(sig.times, [1.0, 1.5, 2.0])


class TestSingularRule:
    def test_trapezoid_at_order_one(self):
        rule = build_singular_rule(1.0, 1.0, 3)
        np.testing.assert_allclose(rule.weights, [0.25, 0.5, 0.25], atol=1e-15)

    @pytest.mark.parametrize("q", [0.1, 0.3, 0.5, 0.7, 0.9, 1.0])
    def test_exact_on_constants(self, q):
        rule = build_singular_rule(q, 2.0, 57)
        assert rule.weights.sum() == pytest.approx(2.0**q / gamma(q + 1), rel=1e-13)

    @pytest.mark.parametrize("q", [0.2, 0.5, 0.8])
    def test_exact_on_linears(self, q):
        rule = build_singular_rule(q, 1.5, 33)
        total = rule.weights @ rule.nodes
        assert total == pytest.approx(1.5 ** (q + 1) / gamma(q + 2), rel=1e-13)

    def test_quadratic_accuracy(self):
        rule = build_singular_rule(0.5, 1.0, 101)
        total = rule.weights @ rule.nodes**2
        assert total == pytest.approx(G3_OVER_G35, abs=1e-4)

    @given(
        q=st.floats(0.05, 1.0),
        horizon=st.floats(0.1, 10.0),
        n=st.integers(2, 300),
    )
    @settings(max_examples=60, deadline=None)
    def test_weights_nonnegative_and_exact_on_constants(self, q, horizon, n):
        rule = build_singular_rule(q, horizon, n)
        assert (rule.weights >= 0).all()
        assert rule.weights.sum() == pytest.approx(
            horizon**q / gamma(q + 1), rel=1e-10
        )


class TestRlIntegral:
    def test_constant(self):
        sig = power_signal(0)
        assert rl_integral(sig, 0.5, 1.0) == pytest.approx(1 / gamma(1.5), abs=1e-12)

    def test_linear(self):
        sig = power_signal(1)
        assert rl_integral(sig, 0.5, 1.0) == pytest.approx(
            gamma(2) / gamma(2.5), abs=1e-12
        )

    def test_quadratic(self):
        sig = power_signal(2)
        assert rl_integral(sig, 0.3, 1.0) == pytest.approx(G3_OVER_G33, abs=1e-4)

    def test_off_grid_upper_limit(self):
        sig = power_signal(1)
        t = 0.777317
        assert rl_integral(sig, 0.5, t) == pytest.approx(
            gamma(2) / gamma(2.5) * t**1.5, abs=1e-12
        )

    @pytest.mark.parametrize("p", [0, 1, 2, 3])
    @pytest.mark.parametrize("q", [0.1, 0.5, 0.9])
    def test_power_family(self, p, q):
        sig = power_signal(p)
        exact = gamma(p + 1) / gamma(p + q + 1)
        tol = 1e-10 if p <= 1 else 1e-4
        assert rl_integral(sig, q, 1.0) == pytest.approx(exact, abs=tol)

    def test_semigroup(self):
        sig = power_signal(1, n=2001)
        inner = SampledSignal(
            t0=0.0,
            dt=sig.dt,
            values=np.array([rl_integral(sig, 0.4, t) for t in sig.times]),
        )
        assert rl_integral(inner, 0.3, 1.0) == pytest.approx(
            rl_integral(sig, 0.7, 1.0), abs=1e-5
        )

    def test_domain_errors(self):
        sig = power_signal(1)
        with pytest.raises(ValueError):
            rl_integral(sig, 0.5, 1.5)
        with pytest.raises(ValueError):
            rl_integral(sig, 1.5, 0.5)
        with pytest.raises(ValueError):
            rl_integral(sig, 0.0, 0.5)


class TestCaputoDerivative:
    def test_annihilates_constants(self):
        sig = SampledSignal(t0=0.0, dt=1e-3, values=np.full(1001, 3.7))
        assert caputo_derivative(sig, 0.5, 0.5) == pytest.approx(0.0, abs=1e-12)

    def test_linear(self):
        sig = power_signal(1)
        assert caputo_derivative(sig, 0.5, 1.0) == pytest.approx(
            1 / gamma(1.5), abs=1e-4
        )

    def test_quadratic_interior_point(self):
        sig = power_signal(2)
        assert caputo_derivative(sig, 0.25, 0.5) == pytest.approx(
            CAPUTO_T2_Q025_T05, abs=1e-8
        )

    def test_left_inverse_of_integral(self):
        # gamma(t) = sin(t) has gamma(0) = 0, so D^q J^q gamma = gamma
        t = np.linspace(0.0, 1.0, 2001)
        sig = SampledSignal(t0=0.0, dt=t[1] - t[0], values=np.sin(t))
        integrated = SampledSignal(
            t0=0.0,
            dt=sig.dt,
            values=np.array([rl_integral(sig, 0.4, tk) for tk in t]),
        )
        for tk in (0.3, 0.6, 0.95):
            assert caputo_derivative(integrated, 0.4, tk) == pytest.approx(
                np.sin(tk), abs=5e-3
            )

    def test_order_range(self):
        sig = power_signal(1)
        with pytest.raises(ValueError):
            caputo_derivative(sig, 1.0, 0.5)


class TestRlDerivative:
    def test_linear(self):
        sig = power_signal(1)
        assert rl_derivative(sig, 0.5, 1.0) == pytest.approx(
            1 / gamma(1.5), abs=1e-3
        )

    def test_constant(self):
        sig = SampledSignal(t0=0.0, dt=1e-3, values=np.ones(1001))
        assert rl_derivative(sig, 0.5, 0.25) == pytest.approx(
            0.25**-0.5 / gamma(0.5), abs=1e-3
        )

    def test_quadratic(self):
        sig = power_signal(2)
        assert rl_derivative(sig, 0.75, 1.0) == pytest.approx(
            G3_OVER_G225, abs=1e-3
        )


class TestMittagLeffler:
    def test_reduces_to_exp(self):
        assert mittag_leffler(1.0, 1.0) == pytest.approx(np.e, abs=1e-10)

    def test_value_at_zero(self):
        for q in np.arange(0.1, 2.0, 0.2):
            assert mittag_leffler(q, 0.0) == 1.0

    def test_half_order_reference(self):
        assert mittag_leffler(0.5, 1.0).real == pytest.approx(
            E_HALF_AT_ONE, abs=1e-6
        )

    def test_exp_identity_complex(self):
        z = np.linspace(-5, 5, 60) + 1j * np.linspace(-3, 3, 60)
        np.testing.assert_allclose(mittag_leffler(1.0, z), np.exp(z), atol=1e-9)

    def test_cosh_identity(self):
        z = np.linspace(-5, 5, 60)
        np.testing.assert_allclose(mittag_leffler(2.0, z**2), np.cosh(z), atol=1e-9)

    def test_negative_axis_matches_erfcx(self):
        # E_{1/2}(-s) = exp(s^2) erfc(s); spans the series/asymptotic handoff
        s = np.linspace(0.05, 30.0, 173)
        values = mittag_leffler(0.5, -s)
        np.testing.assert_allclose(values.real, erfcx(s), rtol=2e-8)
        assert np.abs(values.imag).max() < 1e-12

    def test_positive_axis_exponential_branch(self):
        s = np.linspace(4.5, 8.0, 30)
        exact = np.exp(s**2) * (2.0 - erfc(s))
        np.testing.assert_allclose(mittag_leffler(0.5, s).real, exact, rtol=1e-10)

    def test_exponential_branch_complex(self):
        # inside |arg z| <= q*pi/2; reference from 40-digit series summation
        value = mittag_leffler(0.8, 15 * np.exp(0.3j))
        ref = -193620057268.7234647086 - 1044643006220.035962634j
        assert abs(value - ref) / abs(ref) < 1e-10

    def test_params_validation(self):
        with pytest.raises(ValueError):
            MLParams(max_terms=10)
        with pytest.raises(ValueError):
            MLParams(tol=1e-3)
        with pytest.raises(ValueError):
            mittag_leffler(2.5, 1.0)

    def test_nonconvergence_carries_partial_sum(self):
        with pytest.raises(AccuracyError) as excinfo:
            mittag_leffler(0.9, 9.0, MLParams(max_terms=50, tol=1e-14))
        assert excinfo.value.partial is not None
