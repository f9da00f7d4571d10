"""Numerical lab for the lowest-Landau-level Fock equation, its high-frequency
limit system and the dyadic shell model."""

from .asymptotics import (
    HamiltonianBreakdown,
    LaplaceResult,
    QuadratureError,
    bump,
    compare,
    exact_H_terms,
    laplace_ratio,
    limit_h_terms,
    psi,
)
from .core import (
    GRADIENT_CONSISTENT,
    K,
    MODES,
    PAPER_LITERAL,
    BlowUpError,
    FockState,
    HamiltonianOverflowError,
    HamiltonianSystem,
    ModelConstants,
    wirtinger_gradient,
)
from .diagnostics import (
    Drift,
    ExistenceProbe,
    drift_report,
    existence_time_probe,
    spectral_front,
    symmetry_orbit_check,
)
from .fock import (
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
from .integrate import (
    FlowReport,
    Trajectory,
    evolve,
    flow_consistency_check,
    implicit_midpoint_step,
    rk4_step,
)
from .limit import (
    DyadicGrid,
    LimitState,
    LimitSystem,
    build_grid,
    discrete_hamiltonian,
    limit_invariants,
    limit_rhs,
    x_field,
)
from .shell import DEFAULT_EPSILON, ShellState, ShellSystem, shell_grid, shell_hamiltonian, shell_rhs

__version__ = "0.1.0"
