"""Dyadic shell model.

A profile made of plateaus g = sum_j g_j 1[2^j, 2^j (1+eps)] turns the
limiting Hamiltonian into

    h = |a|^4 + 4 eps sum_j 2^j |a g_j 2^(-lam 2^(j-1)) + K (2^j/lam)^(1/4) g_{j-1}^2|^2,

which is the limit-grid Hamiltonian of a single ray with sigma = 1 and weights
eps 2^j. The shell system is therefore evaluated by the limit kernel on that
grid, with symplectic weights lam eps 2^j on the shells. The g-equations do not
depend on eps; only the condensate equation does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import GRADIENT_CONSISTENT, K, ModelConstants, _frozen, check_mode
from .limit import DyadicGrid, LimitSystem, _hamiltonian, _rhs

#: Shell width at which shell weights coincide with single-ray quadrature weights.
DEFAULT_EPSILON = math.log(2.0)


def shell_grid(j_min: int, j_max: int, epsilon: float = DEFAULT_EPSILON) -> DyadicGrid:
    """Single-ray grid s_j = 2^j with weights overridden to eps 2^j."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    return DyadicGrid(np.array([1.0]), int(j_min), int(j_max), float(epsilon))


@dataclass(frozen=True)
class ShellState:
    a: complex
    gj: np.ndarray
    j_min: int
    epsilon: float
    constants: ModelConstants

    def __post_init__(self):
        gj = _frozen(self.gj).reshape(-1)
        if gj.size < 1:
            raise ValueError("need at least one shell")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not np.all(np.isfinite(gj)) or not np.isfinite(self.a):
            raise ValueError("state values must be finite")
        object.__setattr__(self, "gj", gj)
        object.__setattr__(self, "a", complex(self.a))

    @property
    def j_max(self) -> int:
        return self.j_min + self.gj.size - 1

    @property
    def lam(self) -> float:
        return self.constants.lam

    @property
    def grid(self) -> DyadicGrid:
        return shell_grid(self.j_min, self.j_max, self.epsilon)

    def to_vector(self) -> np.ndarray:
        return np.concatenate(([self.a], self.gj))


def shell_hamiltonian(state: ShellState) -> float:
    return _hamiltonian(state.a, state.gj[None, :], state.grid, state.lam)


def shell_rhs(state: ShellState, mode: str = GRADIENT_CONSISTENT):
    """(da/dt, dg_j/dt) of the shell model."""
    check_mode(mode)
    adot, gdot = _rhs(state.a, state.gj[None, :], state.grid, state.lam, mode)
    return adot, gdot[0]


class ShellSystem(LimitSystem):
    name = "shell"

    def __init__(
        self,
        j_min: int,
        j_max: int,
        lam: float = 1.0,
        epsilon: float = DEFAULT_EPSILON,
        mode: str = GRADIENT_CONSISTENT,
    ):
        super().__init__(shell_grid(j_min, j_max, epsilon), lam, mode)
        self.epsilon = float(epsilon)

    def state(self, y) -> ShellState:
        a, g = self.split(y)
        return ShellState(a, g[0], self.grid.j_min, self.epsilon, self.constants)

    def describe(self) -> str:
        third = 16 if self.mode == GRADIENT_CONSISTENT else 8
        return "\n".join(
            [
                "shell system",
                "  i da/dt = 2|a|^2 a + 4 a eps sum 2^j |g_j|^2 2^(-lam 2^j)"
                " + 4K eps sum 2^j conj(g_j) 2^(-lam 2^(j-1)) (2^j/lam)^(1/4) g_{j-1}^2",
                "  i dg_j/dt = (1/lam)[4|a|^2 2^(-lam 2^j) g_j"
                " + 4K (2^j/lam)^(1/4) conj(a) 2^(-lam 2^(j-1)) g_{j-1}^2",
                f"              + {third}K (2^(j+1)/lam)^(1/4) a 2^(-lam 2^j) conj(g_j) g_{{j+1}}"
                " + 16K^2 (2^(j+1)/lam)^(1/2) |g_j|^2 g_j]",
                f"  mode: {self.mode}",
                f"  constants: K = {K:.12g}, lam = {self.lam:g}, eps = {self.epsilon:.12g}",
                f"  shells: j in [{self.grid.j_min}, {self.grid.j_max}] ({self.grid.n_levels} shells)",
            ]
        )
