"""Limiting integro-differential system on dyadic-ray grids.

Frequencies are s[r, j] = sigma_r * 2^j. Doubling moves a point one level up
its own ray, so the couplings s <-> s/2 <-> 2s of the limiting system are exact
grid-to-grid maps; rays only talk to each other through the condensate a.

The semi-discrete Hamiltonian is

    h = |a|^4 + 4 sum_{r,j} w[r,j] |X[r,j]|^2,
    X[r,j] = a g[r,j] 2^(-lam s/2) + K (s/lam)^(1/4) g[r,j-1]^2,

with g = 0 off the grid. X is kept on one extra level above j_max, where only
the g[r,j_max]^2 part survives, so that h is exactly the continuum Hamiltonian
of a profile supported on the grid. The flow is i da/dt = dh/d(conj a) and
i dg/dt = dh/d(conj g) / (lam w).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import GRADIENT_CONSISTENT, K, HamiltonianSystem, ModelConstants, _frozen, check_mode

LN2 = np.log(2.0)


@dataclass(frozen=True)
class DyadicGrid:
    """Geometric frequency grid with R rays over levels j_min..j_max.

    Quadrature weights are ``weight_factor * s``. The default factor ln2/R
    gives the log-space midpoint rule for integrals over (0, inf); the shell
    model overrides it with epsilon (and uses sigma = 1).
    """

    sigma: np.ndarray
    j_min: int
    j_max: int
    weight_factor: float

    def __post_init__(self):
        sigma = _frozen(self.sigma, dtype=float).reshape(-1)
        if sigma.size < 1 or np.any(sigma <= 0) or not np.all(np.isfinite(sigma)):
            raise ValueError("ray bases must be positive and finite")
        if self.j_min > self.j_max:
            raise ValueError(f"empty level range: j_min={self.j_min} > j_max={self.j_max}")
        if not self.weight_factor > 0:
            raise ValueError("weight_factor must be positive")
        object.__setattr__(self, "sigma", sigma)
        levels = np.arange(self.j_min, self.j_max + 2)
        ext = sigma[:, None] * np.exp2(levels)[None, :]
        ext.setflags(write=False)
        object.__setattr__(self, "_s_ext", ext)

    @property
    def R(self) -> int:
        return self.sigma.size

    @property
    def n_levels(self) -> int:
        return self.j_max - self.j_min + 1

    @property
    def shape(self) -> tuple[int, int]:
        return (self.R, self.n_levels)

    @property
    def levels(self) -> np.ndarray:
        return np.arange(self.j_min, self.j_max + 1)

    @property
    def s(self) -> np.ndarray:
        return self._s_ext[:, :-1]

    @property
    def weights(self) -> np.ndarray:
        return self.weight_factor * self.s

    @property
    def s_extended(self) -> np.ndarray:
        """Frequencies including the first level above j_max."""
        return self._s_ext

    @property
    def weights_extended(self) -> np.ndarray:
        return self.weight_factor * self._s_ext

    def integrate(self, values: np.ndarray) -> complex:
        """Quadrature sum of ``values`` sampled at the grid points."""
        return np.sum(self.weights * values)


def build_grid(R: int, j_min: int, j_max: int) -> DyadicGrid:
    """Grid with ray bases 2^((r+1/2)/R) and weights s ln2 / R."""
    if R < 1:
        raise ValueError("R must be >= 1")
    if j_min > j_max:
        raise ValueError(f"empty level range: j_min={j_min} > j_max={j_max}")
    sigma = np.exp2((np.arange(R) + 0.5) / R)
    return DyadicGrid(sigma, int(j_min), int(j_max), LN2 / R)


@dataclass(frozen=True)
class LimitState:
    a: complex
    g: np.ndarray
    grid: DyadicGrid
    constants: ModelConstants

    def __post_init__(self):
        g = _frozen(self.g).reshape(self.grid.shape)
        if not np.all(np.isfinite(g)) or not np.isfinite(self.a):
            raise ValueError("state values must be finite")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "a", complex(self.a))

    @property
    def lam(self) -> float:
        return self.constants.lam

    def to_vector(self) -> np.ndarray:
        return np.concatenate(([self.a], self.g.reshape(-1)))

    @classmethod
    def from_vector(cls, y, grid: DyadicGrid, constants: ModelConstants) -> "LimitState":
        y = np.asarray(y, dtype=complex)
        return cls(y[0], y[1:].reshape(grid.shape), grid, constants)

    @classmethod
    def from_profile(cls, a, profile, grid: DyadicGrid, constants: ModelConstants) -> "LimitState":
        """Sample a callable profile g(s) at the grid frequencies."""
        return cls(a, np.asarray(profile(grid.s), dtype=complex), grid, constants)


def _x_field(a, g, s_ext, lam):
    R, J = g.shape
    X = np.zeros((R, J + 1), dtype=complex)
    X[:, :J] = a * g * np.exp2(-lam * s_ext[:, :J] / 2)
    X[:, 1:] += K * (s_ext[:, 1:] / lam) ** 0.25 * g**2
    return X


def x_field(state: LimitState) -> np.ndarray:
    """X on levels j_min..j_max+1 (last column: the level just above the grid)."""
    return _x_field(state.a, state.g, state.grid.s_extended, state.lam)


def _hamiltonian(a, g, grid: DyadicGrid, lam: float) -> float:
    X = _x_field(a, g, grid.s_extended, lam)
    return float(abs(a) ** 4 + 4.0 * np.sum(grid.weights_extended * np.abs(X) ** 2))


def discrete_hamiltonian(state: LimitState) -> float:
    return _hamiltonian(state.a, state.g, state.grid, state.lam)


class RHSTerms(NamedTuple):
    """The four contributions to i lam dg/dt, in display order."""

    damped_linear: np.ndarray
    from_half: np.ndarray
    from_double: np.ndarray
    self_quartic: np.ndarray


def _g_terms(a, g, s, lam, mode) -> RHSTerms:
    third = 16.0 if mode == GRADIENT_CONSISTENT else 8.0
    g_half = np.zeros_like(g)
    g_half[:, 1:] = g[:, :-1]
    g_double = np.zeros_like(g)
    g_double[:, :-1] = g[:, 1:]
    damp_half = np.exp2(-lam * s / 2)
    damp = np.exp2(-lam * s)
    return RHSTerms(
        4.0 * abs(a) ** 2 * damp * g,
        4.0 * K * (s / lam) ** 0.25 * np.conj(a) * damp_half * g_half**2,
        third * K * (2 * s / lam) ** 0.25 * a * damp * np.conj(g) * g_double,
        16.0 * K**2 * np.sqrt(2 * s / lam) * np.abs(g) ** 2 * g,
    )


def _a_force(a, g, grid: DyadicGrid, lam: float) -> complex:
    """dh/d(conj a): 2|a|^2 a plus the two quadrature integrals."""
    s = grid.s
    w = grid.weights
    g_half = np.zeros_like(g)
    g_half[:, 1:] = g[:, :-1]
    damped = 4.0 * a * np.sum(w * np.abs(g) ** 2 * np.exp2(-lam * s))
    cubic = 4.0 * K * np.sum(w * np.conj(g) * np.exp2(-lam * s / 2) * (s / lam) ** 0.25 * g_half**2)
    return 2.0 * abs(a) ** 2 * a + damped + cubic


def _rhs(a, g, grid: DyadicGrid, lam: float, mode: str):
    terms = _g_terms(a, g, grid.s, lam, mode)
    adot = -1j * _a_force(a, g, grid, lam)
    gdot = (-1j / lam) * (terms[0] + terms[1] + terms[2] + terms[3])
    return adot, gdot


def limit_rhs(state: LimitState, mode: str = GRADIENT_CONSISTENT):
    """Time derivative (da/dt, dg/dt) of the limiting system.

    ``gradient_consistent`` is the Hamiltonian flow of
    :func:`discrete_hamiltonian`; ``paper_literal`` halves the coefficient of
    the a conj(g(s)) g(2s) coupling (8K instead of 16K) and is not Hamiltonian.
    """
    check_mode(mode)
    return _rhs(state.a, state.g, state.grid, state.lam, mode)


class LimitInvariants(NamedTuple):
    M: float
    E: float
    xalpha: float
    h: float


def x_alpha_norm(a, g, s, alpha: float) -> float:
    """|a| + max over grid points of <s>^alpha |g(s)|.

    The sup runs over grid points only, so this is a lower bound for the
    continuum norm.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    bracket = (1.0 + s**2) ** (alpha / 2)
    return float(abs(a) + (np.max(bracket * np.abs(g)) if np.size(g) else 0.0))


def limit_invariants(state: LimitState, alpha: float = 0.25) -> LimitInvariants:
    grid = state.grid
    p = np.abs(state.g) ** 2
    M = abs(state.a) ** 2 + state.lam * float(np.sum(grid.weights * p))
    E = float(np.sum(grid.weights * grid.s * p))
    return LimitInvariants(M, E, x_alpha_norm(state.a, state.g, grid.s, alpha), discrete_hamiltonian(state))


class LimitSystem(HamiltonianSystem):
    """The limiting system on a :class:`DyadicGrid`, as a flat vector (a, g.ravel())."""

    name = "limit"

    def __init__(self, grid: DyadicGrid, lam: float = 1.0, mode: str = GRADIENT_CONSISTENT):
        self.grid = grid
        self.constants = ModelConstants(lam)
        self.lam = self.constants.lam
        self.mode = check_mode(mode)
        w = grid.weights.reshape(-1)
        s = grid.s.reshape(-1)
        self.symplectic_weights = np.concatenate(([1.0], self.lam * w))
        self.frequencies = np.concatenate(([0.0], s))
        self.energy_weights = np.concatenate(([0.0], w * s))

    def split(self, y):
        y = np.asarray(y, dtype=complex)
        return y[0], y[1:].reshape(self.grid.shape)

    def join(self, a, g) -> np.ndarray:
        return np.concatenate(([a], np.asarray(g, dtype=complex).reshape(-1)))

    def state(self, y) -> LimitState:
        return LimitState.from_vector(y, self.grid, self.constants)

    def rhs(self, y):
        a, g = self.split(y)
        adot, gdot = _rhs(a, g, self.grid, self.lam, self.mode)
        return self.join(adot, gdot)

    def hamiltonian(self, y):
        a, g = self.split(y)
        return _hamiltonian(a, g, self.grid, self.lam)

    def rhs_terms(self, y):
        a, g = self.split(y)
        terms = _g_terms(a, g, self.grid.s, self.lam, self.mode)
        out = {"condensate": self.join(-1j * _a_force(a, g, self.grid, self.lam), np.zeros_like(g))}
        for name, term in zip(RHSTerms._fields, terms):
            out[name] = self.join(0.0, (-1j / self.lam) * term)
        return out

    def describe(self) -> str:
        g = self.grid
        return "\n".join(
            [
                "limit system (dyadic-ray discretization)",
                "  i da/dt = 2|a|^2 a + 4a int |g|^2 2^(-lam s) ds"
                " + 4K int conj(g(s)) 2^(-lam s/2) (s/lam)^(1/4) g(s/2)^2 ds",
                "  i dg/dt = (1/lam)[4|a|^2 2^(-lam s) g + 4K (s/lam)^(1/4) conj(a) 2^(-lam s/2) g(s/2)^2",
                f"            + {16 if self.mode == GRADIENT_CONSISTENT else 8}K (2s/lam)^(1/4) a 2^(-lam s)"
                " conj(g) g(2s) + 16K^2 (2s/lam)^(1/2) |g|^2 g]",
                f"  mode: {self.mode}",
                f"  constants: K = {K:.12g}, lam = {self.lam:g}",
                f"  grid: R = {g.R} rays, j in [{g.j_min}, {g.j_max}], "
                f"sigma_r = 2^((r+1/2)/R), weights w = {g.weight_factor:.12g} * s",
            ]
        )
