import dataclasses
import math

import numpy as np
import pytest

from lll_dynamics.core import (
    K,
    FockState,
    ModelConstants,
    check_mode,
    spectral_front_from,
    wirtinger_gradient,
)
from lll_dynamics.shell import ShellSystem


def test_K_value():
    assert K == 2.0 ** (-0.75) * math.pi**0.25
    assert K == pytest.approx(0.7916167, abs=1e-7)


def test_constants_validation_and_immutability():
    c = ModelConstants(4.0)
    assert c.K == K
    with pytest.raises(dataclasses.FrozenInstanceError):
        c.lam = 2.0
    with pytest.raises(ValueError):
        ModelConstants(0.5)


def test_fock_state_is_frozen():
    s = FockState(np.array([1.0, 2.0]))
    assert s.N == 1
    with pytest.raises(ValueError):
        s.c[0] = 3.0
    with pytest.raises(ValueError):
        FockState(np.array([np.nan, 0]))


def test_mode_names():
    assert check_mode("paper_literal") == "paper_literal"
    with pytest.raises(ValueError):
        check_mode("gradient")


class TestWirtinger:
    def test_modulus_squared(self):
        d = wirtinger_gradient(lambda z: abs(z[0]) ** 2, np.array([3.0 + 0j]), 1e-6)
        assert abs(d[0] - 3.0) / 3.0 < 1e-9

    def test_quartic(self):
        d = wirtinger_gradient(lambda z: abs(z[0]) ** 4, np.array([1.0 + 0j]), 1e-6)
        assert abs(d[0] - 2.0) < 1e-8

    def test_second_order_rate(self):
        z = np.array([0.7 - 0.4j, 0.2 + 1.1j])
        h = lambda w: float(np.sum(np.abs(w) ** 6) + np.real(w[0] ** 2 * np.conj(w[1])) ** 2)
        # reference gradient from a much smaller step
        ref = wirtinger_gradient(h, z, 1e-4 / 64)
        e1 = np.max(np.abs(wirtinger_gradient(h, z, 1e-2) - ref))
        e2 = np.max(np.abs(wirtinger_gradient(h, z, 5e-3) - ref))
        assert 3.5 < e1 / e2 < 4.5

    def test_overflow(self):
        with pytest.raises(FloatingPointError, match="hamiltonian overflow"):
            wirtinger_gradient(lambda z: float("inf"), np.array([1.0 + 0j]))

    def test_shell_hamiltonian_cross_check(self, rng):
        sysm = ShellSystem(-1, 4, lam=2.0)
        y = 0.5 * (rng.standard_normal(sysm.size) + 1j * rng.standard_normal(sysm.size))
        grad = wirtinger_gradient(sysm.hamiltonian, y, 1e-5)
        # i W dy/dt = dh/dconj(y)
        np.testing.assert_allclose(1j * sysm.symplectic_weights * sysm.rhs(y), grad, rtol=1e-6, atol=1e-6 * np.max(np.abs(grad)))


class TestFront:
    def test_single_point(self):
        for p in (0.1, 0.5, 0.99):
            assert spectral_front_from([1.0, 2.0, 4.0], [0.0, 3.0, 0.0], p) == 2.0

    def test_two_equal_points(self):
        assert spectral_front_from([4.0, 1.0], [1.0, 1.0], 0.4) == 1.0
        assert spectral_front_from([4.0, 1.0], [1.0, 1.0], 0.6) == 4.0

    def test_monotone_in_p(self, rng):
        s = rng.uniform(0, 10, 50)
        m = rng.uniform(0, 1, 50)
        fronts = [spectral_front_from(s, m, p) for p in np.linspace(0.01, 0.99, 40)]
        assert np.all(np.diff(fronts) >= 0)

    def test_errors(self):
        with pytest.raises(ValueError):
            spectral_front_from([1.0], [0.0], 0.5)
        with pytest.raises(ValueError):
            spectral_front_from([1.0], [1.0], 1.0)
