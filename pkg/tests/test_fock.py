import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lll_dynamics.core import FockState
from lll_dynamics.fock import (
    FockSystem,
    WeightTable,
    ansatz_coefficients,
    fock_invariants,
    hamiltonian,
    interaction_weight,
    lll_rhs_direct,
    lll_rhs_fast,
    multilinear_H,
)

from conftest import random_complex


def brute_weight(k, l, m, n):
    # exact integers, no logs
    S = k + l
    return math.factorial(S) / (2**S * math.sqrt(math.factorial(k) * math.factorial(l) * math.factorial(m) * math.factorial(n)))


def brute_H(e, f, g, h):
    N = len(e) - 1
    total = 0j
    for k, l, m in itertools.product(range(N + 1), repeat=3):
        n = k + l - m
        if 0 <= n <= N:
            total += brute_weight(k, l, m, n) * e[k] * f[l] * np.conj(g[m]) * np.conj(h[n])
    return total


def brute_rhs(c):
    N = len(c) - 1
    out = np.zeros(N + 1, dtype=complex)
    for n, k, m in itertools.product(range(N + 1), repeat=3):
        l = m + n - k
        if 0 <= l <= N:
            out[n] += brute_weight(k, l, m, n) * c[k] * c[l] * np.conj(c[m])
    return -2j * out


class TestWeights:
    def test_log_factorials(self):
        lf = WeightTable(40).log_factorials
        assert lf[0] == 0.0 and lf[1] == 0.0
        assert np.all(np.diff(lf[2:]) > 0)
        assert lf[10] == pytest.approx(math.log(3628800), rel=1e-14)

    @pytest.mark.parametrize(
        "idx, expected",
        [((0, 0, 0, 0), 1.0), ((0, 1, 0, 1), 0.5), ((2, 2, 1, 3), 24 / (16 * math.sqrt(24)))],
    )
    def test_known_values(self, idx, expected):
        assert interaction_weight(*idx) == pytest.approx(expected, rel=1e-14)

    def test_momentum_mismatch(self):
        with pytest.raises(ValueError, match="momentum mismatch"):
            interaction_weight(1, 0, 0, 0)

    @given(st.integers(0, 60), st.integers(0, 60), st.integers(0, 60))
    def test_symmetries_and_exact(self, k, l, m):
        n = k + l - m
        if n < 0:
            return
        w = interaction_weight(k, l, m, n)
        assert w == interaction_weight(l, k, m, n) == interaction_weight(k, l, n, m)
        assert w == interaction_weight(m, n, k, l)
        if k + l <= 40:
            assert w == pytest.approx(brute_weight(k, l, m, n), rel=1e-12)

    def test_large_indices_stay_finite(self):
        w = interaction_weight(300, 300, 250, 350)
        assert np.isfinite(w) and 0 < w < 1


class TestMultilinear:
    def test_vacuum(self):
        c = np.zeros(6, complex)
        c[0] = 1
        assert multilinear_H(c, c, c, c) == pytest.approx(1.0)

    def test_two_modes(self):
        c = np.zeros(6, complex)
        c[:2] = 1
        assert multilinear_H(c, c, c, c) == pytest.approx(3.5, abs=1e-14)

    def test_condensate_with_tail_is_zero(self):
        p = np.zeros(17, complex)
        p[0] = 0.7 - 0.2j
        tail = ansatz_coefficients(0.0, lambda x: x * np.exp(-x), 4, 16)
        assert abs(multilinear_H(p, p, tail, p)) < 1e-15

    def test_against_brute_force(self, rng):
        vecs = [random_complex(rng, 8) for _ in range(4)]
        assert multilinear_H(*vecs) == pytest.approx(brute_H(*vecs), rel=1e-13)

    def test_accepts_fock_state(self, rng):
        c = random_complex(rng, 5)
        s = FockState(c)
        assert multilinear_H(s, s, s, s) == pytest.approx(hamiltonian(c), rel=1e-14)

    def test_mismatched_sizes(self):
        with pytest.raises(ValueError):
            multilinear_H(np.ones(3), np.ones(3), np.ones(3), np.ones(4))


class TestRHS:
    def test_single_mode(self):
        c = np.zeros(5, complex)
        c[0] = 1
        for f in (lll_rhs_direct, lll_rhs_fast):
            np.testing.assert_allclose(f(c), [-2j, 0, 0, 0, 0], atol=1e-15)

    def test_two_modes(self):
        c = np.zeros(5, complex)
        c[:2] = 1
        d = lll_rhs_direct(c)
        np.testing.assert_allclose(d[:2], [-4j, -3j], atol=1e-14)
        np.testing.assert_allclose(d, brute_rhs(c), atol=1e-14)
        np.testing.assert_allclose(lll_rhs_fast(c), lll_rhs_direct(c), atol=1e-14)

    def test_zero(self):
        for f in (lll_rhs_direct, lll_rhs_fast):
            assert not np.any(f(np.zeros(9, complex)))

    def test_brute_force_oracle(self, rng):
        c = random_complex(rng, 10)
        ref = brute_rhs(c)
        np.testing.assert_allclose(lll_rhs_direct(c), ref, rtol=1e-13, atol=1e-13)
        np.testing.assert_allclose(lll_rhs_fast(c), ref, rtol=1e-13, atol=1e-13)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 64), st.integers(0, 2**32 - 1))
    def test_fast_matches_direct(self, N, seed):
        c = random_complex(np.random.default_rng(seed), N + 1)
        d = lll_rhs_direct(c)
        scale = max(np.max(np.abs(d)), 1e-300)
        assert np.max(np.abs(lll_rhs_fast(c) - d)) / scale < 1e-12

    def test_large_N_finite(self, rng):
        c = random_complex(rng, 257) / 16
        d = lll_rhs_fast(c)
        assert np.all(np.isfinite(d))

    def test_overflow_names_block(self):
        c = np.full(4, 1e200, dtype=complex)
        with pytest.raises(FloatingPointError, match="S="):
            lll_rhs_fast(c)


class TestAnsatz:
    def test_zero_profile(self):
        np.testing.assert_array_equal(ansatz_coefficients(2.0, np.zeros(9), 4, 8), [2, 0, 0, 0, 0, 0, 0, 0, 0])

    def test_single_sample(self):
        g = np.zeros(9)
        g[4] = 1.0  # g(1) = 1 at lam = 4
        c = ansatz_coefficients(1.5, g, 4, 8)
        assert c[4] == 0.5 and c[0] == 1.5
        assert np.count_nonzero(c) == 2

    def test_callable_matches_samples(self):
        prof = lambda x: x**2 * np.exp(-x)
        lam, N = 8, 20
        c1 = ansatz_coefficients(1.0, prof, lam, N)
        c2 = ansatz_coefficients(1.0, prof(np.arange(N + 1) / lam), lam, N)
        np.testing.assert_array_equal(c1, c2)

    def test_nonzero_at_origin(self):
        g = np.zeros(9)
        g[0] = 1.0
        with pytest.raises(ValueError):
            ansatz_coefficients(1.0, g, 4, 8)

    @pytest.mark.parametrize("lam", [0, 2.5])
    def test_bad_lambda(self, lam):
        with pytest.raises(ValueError):
            ansatz_coefficients(1.0, np.zeros(3), lam, 2)


class TestInvariants:
    def test_two_modes(self):
        inv = fock_invariants(np.array([1, 1, 0, 0], complex))
        assert inv == pytest.approx((2.0, 1.0, 3.5))

    def test_condensate(self):
        a = 0.3 + 1.1j
        inv = fock_invariants(np.array([a, 0, 0]))
        assert inv == pytest.approx((abs(a) ** 2, 0.0, abs(a) ** 4))

    def test_zero(self):
        assert fock_invariants(np.zeros(4, complex)) == (0.0, 0.0, 0.0)

    def test_hamiltonian_real_nonnegative(self, rng):
        c = random_complex(rng, 30)
        H = multilinear_H(c, c, c, c)
        assert abs(H.imag) < 1e-13 * abs(H.real)
        assert hamiltonian(c) == pytest.approx(H.real, rel=1e-13) and hamiltonian(c) > 0


def test_system_shape_and_describe():
    sysm = FockSystem(12)
    assert sysm.size == 13
    np.testing.assert_array_equal(sysm.frequencies, np.arange(13))
    assert "N = 12" in sysm.describe()
    c = np.arange(13) * (1 + 1j) / 40
    np.testing.assert_allclose(FockSystem(12, fast=False).rhs(c), sysm.rhs(c), rtol=1e-13, atol=1e-16)
