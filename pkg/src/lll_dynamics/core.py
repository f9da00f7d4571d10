"""Shared state types, model constants and complex-derivative helpers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

#: Interaction constant of the limiting Hamiltonian, 2^(-3/4) * pi^(1/4).
K = 2.0 ** (-0.75) * math.pi ** 0.25

GRADIENT_CONSISTENT = "gradient_consistent"
PAPER_LITERAL = "paper_literal"
MODES = (GRADIENT_CONSISTENT, PAPER_LITERAL)


class HamiltonianOverflowError(FloatingPointError):
    """A Hamiltonian evaluation produced a non-finite value."""


class BlowUpError(FloatingPointError):
    """Time integration produced a non-finite state.

    ``trajectory`` holds the partial trajectory (last finite snapshot
    included) when the error is raised from :func:`~lll_dynamics.integrate.evolve`.
    """

    def __init__(self, message: str, t: float | None = None, trajectory=None):
        super().__init__(message)
        self.t = t
        self.trajectory = trajectory


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"unknown right-hand-side mode {mode!r}; expected one of {MODES}")
    return mode


def _frozen(values, dtype=complex) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ModelConstants:
    """Interaction constant ``K`` and the frequency scale ``lam`` (>= 1)."""

    lam: float = 1.0
    K: float = field(default=K, init=False)

    def __post_init__(self):
        if not np.isfinite(self.lam) or self.lam < 1:
            raise ValueError(f"lam must be >= 1, got {self.lam}")
        object.__setattr__(self, "lam", float(self.lam))


@dataclass(frozen=True)
class FockState:
    """Amplitudes ``c[0..N]`` in the Bargmann-Fock basis."""

    c: np.ndarray

    def __post_init__(self):
        c = _frozen(self.c)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("FockState needs a non-empty 1-d coefficient array")
        if not np.all(np.isfinite(c)):
            raise ValueError("FockState coefficients must be finite")
        object.__setattr__(self, "c", c)

    @property
    def N(self) -> int:
        return self.c.size - 1


def wirtinger_gradient(
    h: Callable[[np.ndarray], float], z: np.ndarray, step: float = 1e-6
) -> np.ndarray:
    """Central-difference estimate of dh/d(conj z) for every coordinate of ``z``.

    Uses dh/d(conj z) = (dh/dx + i dh/dy) / 2 with z = x + iy, so that for
    h = |z|^2 the result is z itself.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    z = np.array(z, dtype=complex)
    flat = z.reshape(-1)
    grad = np.empty_like(flat)

    def evaluate(w):
        value = h(w.reshape(z.shape))
        if not np.isfinite(value):
            raise HamiltonianOverflowError("hamiltonian overflow")
        return float(np.real(value))

    for p in range(flat.size):
        partials = []
        for direction in (step, 1j * step):
            w = flat.copy()
            w[p] += direction
            hp = evaluate(w)
            w[p] -= 2 * direction
            hm = evaluate(w)
            partials.append((hp - hm) / (2 * step))
        grad[p] = 0.5 * (partials[0] + 1j * partials[1])
    return grad.reshape(z.shape)


class HamiltonianSystem:
    """A finite Hamiltonian system on a flat complex vector ``y``.

    Coordinate 0 is the condensate amplitude. Subclasses set
    ``symplectic_weights`` (flow is i W dy/dt = dH/d(conj y)),
    ``frequencies`` (s of every coordinate, 0 for the condensate) and
    ``energy_weights`` (E = sum energy_weights |y|^2), and implement
    :meth:`rhs` and :meth:`hamiltonian`.
    """

    name = "system"
    symplectic_weights: np.ndarray
    frequencies: np.ndarray
    energy_weights: np.ndarray

    def rhs(self, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def hamiltonian(self, y: np.ndarray) -> float:
        raise NotImplementedError

    def rhs_terms(self, y: np.ndarray) -> dict[str, np.ndarray] | None:
        """Named additive pieces of :meth:`rhs`, if the system has them."""
        return None

    @property
    def size(self) -> int:
        return self.symplectic_weights.size

    def mass(self, y) -> float:
        return float(np.sum(self.symplectic_weights * np.abs(y) ** 2))

    def energy(self, y) -> float:
        return float(np.sum(self.energy_weights * np.abs(y) ** 2))

    def x_alpha(self, y, alpha: float) -> float:
        if alpha < 0:
            raise ValueError("alpha must be >= 0")
        s = self.frequencies[1:]
        tail = np.abs(y[1:]) * (1.0 + s**2) ** (alpha / 2)
        return float(abs(y[0]) + (tail.max() if tail.size else 0.0))

    def front(self, y, p: float) -> float:
        """Smallest frequency holding a fraction ``p`` of the non-condensate mass."""
        return spectral_front_from(self.frequencies[1:], self.symplectic_weights[1:] * np.abs(y[1:]) ** 2, p)

    def observables(self, y, alpha: float = 0.25) -> dict[str, float]:
        return {
            "M": self.mass(y),
            "E": self.energy(y),
            "H": self.hamiltonian(y),
            "xalpha": self.x_alpha(y, alpha),
        }

    def describe(self) -> str:
        return self.name


def spectral_front_from(s, mass, p: float) -> float:
    """Smallest s whose cumulative mass (ascending s) reaches p times the total."""
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    s = np.asarray(s, dtype=float).reshape(-1)
    mass = np.asarray(mass, dtype=float).reshape(-1)
    if not mass.sum() > 0:
        raise ValueError("spectral front undefined: zero mass outside the condensate")
    order = np.argsort(s, kind="stable")
    cumulative = np.cumsum(mass[order])
    i = min(int(np.searchsorted(cumulative, p * cumulative[-1], side="left")), s.size - 1)
    return float(s[order][i])
