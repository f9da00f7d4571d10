import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lll_dynamics.asymptotics import (
    H3_CONSTANT,
    QuadratureError,
    bump,
    compare,
    exact_H_terms,
    integrate,
    laplace_ratio,
    limit_h_terms,
    psi,
)
from lll_dynamics.core import K
from lll_dynamics.fock import ansatz_coefficients, hamiltonian


class TestPsi:
    def test_peak(self):
        assert psi(0.5) == 2.0

    def test_quarter(self):
        assert psi(0.25) == pytest.approx(math.exp(-(0.25 * math.log(0.25) + 0.75 * math.log(0.75))), rel=1e-15)
        assert abs(psi(0.25) - 1.754765) < 1e-6

    @given(st.floats(1e-6, 1 - 1e-6))
    def test_symmetric(self, theta):
        assert psi(theta) == pytest.approx(psi(1 - theta), rel=1e-12)

    @pytest.mark.parametrize("theta", [0.0, 1.0, -0.1, 1.5])
    def test_domain(self, theta):
        with pytest.raises(ValueError):
            psi(theta)

    def test_vectorised(self):
        np.testing.assert_allclose(psi(np.array([0.25, 0.5])), [psi(0.25), 2.0])


class TestQuadrature:
    def test_polynomial_exact(self):
        assert integrate(lambda x: x**5, 0.0, 2.0) == pytest.approx(64 / 6, rel=1e-14)

    def test_gaussian(self):
        val = integrate(lambda x: np.exp(-(x**2)), -8, 8)
        assert val == pytest.approx(math.sqrt(math.pi), rel=1e-13)

    def test_reports_failure(self):
        with pytest.raises(QuadratureError, match="relative change"):
            integrate(lambda x: np.sign(np.sin(1e4 * x)), 0.0, 1.0, max_panels=64)

    def test_empty_interval(self):
        assert integrate(np.exp, 1.0, 1.0) == 0.0


class TestLaplace:
    def test_constant(self):
        assert 0.98 <= laplace_ratio(lambda t: np.ones_like(t), 1.0, 200).ratio <= 1.02

    def test_uses_midpoint_value(self):
        res = laplace_ratio(lambda t: t, 1.0, 50)
        assert res.asymptote == pytest.approx(0.5 * 2.0**50 * math.sqrt(math.pi / 100), rel=1e-14)

    def test_improves(self):
        F = lambda t: 1 + t**2
        r100 = laplace_ratio(F, 1.0, 100).ratio
        r400 = laplace_ratio(F, 1.0, 400).ratio
        assert abs(r400 - 1) < abs(r100 - 1)

    def test_sign_changing(self):
        with pytest.raises(ValueError, match="asymptote not applicable"):
            laplace_ratio(lambda t: t - 0.5, 1.0, 100)

    def test_large_exponent_keeps_ratio(self):
        res = laplace_ratio(lambda t: np.ones_like(t), 1.0, 3000)
        assert res.integral == math.inf and abs(res.ratio - 1) < 1e-3


def test_h3_constant_is_8K():
    assert H3_CONSTANT == pytest.approx(8 * K, rel=1e-15)


class TestExactTerms:
    def test_zero_profile(self):
        a = 0.6 + 0.8j
        b = exact_H_terms(a, np.zeros(20), 4, 19)
        assert b.H0 == pytest.approx(abs(a) ** 4, rel=1e-15)
        assert b.H1 == b.H2 == b.H3 == b.H4 == 0

    def test_h1_vanishes(self, rng):
        samples = np.zeros(33, complex)
        samples[1:] = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        b = exact_H_terms(1.0 + 0.5j, samples, 8, 32)
        assert abs(b.H1) < 1e-12 * abs(b.H0)

    def test_additivity_two_point_profile(self):
        samples = np.zeros(40, complex)
        samples[16] = 1.0
        samples[24] = 0.5 - 0.5j  # g(1) and g(1.5) at lam = 16
        b = exact_H_terms(1.0, samples, 16, 39)
        parts = b.H0 + b.H1 + b.H2 + b.H3 + b.H4
        full = hamiltonian(ansatz_coefficients(1.0, samples, 16, 39))
        assert abs(parts - full) < 1e-10 * full
        assert b.total == pytest.approx(full, rel=1e-14)


class TestLimitTerms:
    def test_zero_profile(self):
        b = limit_h_terms(1.0, lambda x: np.zeros_like(x), 10.0, support=(0.5, 2.0))
        assert b.h0 == 1.0 and b.h2 == b.h3 == b.h4 == 0

    def test_no_condensate(self):
        g = bump(0.5, 2.0)
        lam = 20.0
        b = limit_h_terms(0.0, g, lam, support=(0.5, 2.0))
        assert b.h2 == 0 and b.h3 == 0
        ref = math.sqrt(2 * math.pi / lam) * integrate(lambda s: np.sqrt(s) * g(s / 2) ** 4, 1.0, 4.0)
        assert b.h4 == pytest.approx(ref, rel=1e-12)

    @settings(max_examples=15, deadline=None)
    @given(
        st.floats(0.2, 2.0),
        st.floats(-1.5, 1.5),
        st.floats(-3.0, 3.0),
        st.floats(1.0, 8.0),
    )
    def test_combined_identity(self, amp, phase, freq, lam):
        a = amp * np.exp(1j * phase)
        prof = lambda x: x * np.exp(-x) * np.exp(1j * freq * x)
        b = limit_h_terms(a, prof, lam)
        assert b.combined == pytest.approx(b.h0 + b.h2 + b.h3 + b.h4, rel=1e-11)

    def test_auto_support(self):
        prof = lambda x: x**2 * np.exp(-4 * x)
        b1 = limit_h_terms(1.0, prof, 4.0)
        b2 = limit_h_terms(1.0, prof, 4.0, support=(0.0, 32.0))
        assert b1.h4 == pytest.approx(b2.h4, rel=1e-10)


def test_bump_shape():
    g = bump(1.0, 3.0, height=2.0)
    assert g(np.array([2.0]))[0] == pytest.approx(2.0)
    assert np.all(g(np.array([0.5, 1.0, 3.0, 4.0])) == 0)
    with pytest.raises(ValueError):
        bump(2.0, 1.0)


def test_compare_ratios_h2_close_to_one():
    b = compare(1.0, bump(0.5, 2.0), 32, 65, support=(0.5, 2.0))
    r = b.ratios()
    assert set(r) == {"H0", "H2", "H3", "H4"}
    assert r["H0"] == pytest.approx(1.0, rel=1e-15)
    assert abs(r["H2"] - 1) < 1e-8
