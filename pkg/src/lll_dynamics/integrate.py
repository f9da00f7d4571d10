"""Fixed-step time integration and the flow/Hamiltonian consistency check."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import BlowUpError, HamiltonianSystem, wirtinger_gradient

logger = logging.getLogger(__name__)

RHS = Callable[[np.ndarray], np.ndarray]

SCHEMES = ("rk4", "implicit_midpoint")
OBSERVABLES = ("M", "E", "H", "xalpha", "front_p50", "front_p90")


def _finite(y: np.ndarray, where: str) -> np.ndarray:
    if not np.all(np.isfinite(y)):
        raise BlowUpError(f"blow-up detected {where}")
    return y


def rk4_step(rhs: RHS, y: np.ndarray, dt: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    # overflow is reported through the finiteness check, not as warnings
    with np.errstate(over="ignore", invalid="ignore"):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * dt * k1)
        k3 = rhs(y + 0.5 * dt * k2)
        k4 = rhs(y + dt * k3)
        y1 = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return _finite(y1, "in rk4 step")


def implicit_midpoint_step(
    rhs: RHS, y: np.ndarray, dt: float, tol: float = 1e-13, max_iter: int = 50
) -> np.ndarray:
    """Solve y1 = y + dt rhs((y + y1)/2) by fixed-point iteration.

    Iteration stops once successive iterates differ by at most ``tol`` times
    the largest component.

    The scheme is symmetric and symplectic and preserves every quadratic
    invariant of the flow (here M and E) up to the iteration tolerance.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not tol > 0:
        raise ValueError("tol must be positive")
    with np.errstate(over="ignore", invalid="ignore"):
        y1 = y + dt * rhs(y)
    for _ in range(max_iter):
        with np.errstate(over="ignore", invalid="ignore"):
            y_next = y + dt * rhs(0.5 * (y + y1))
        _finite(y_next, "in implicit midpoint iteration")
        # relative test: the solve commutes with y -> mu y, so the scaling
        # symmetry is not broken by differing iteration counts
        if np.max(np.abs(y_next - y1), initial=0.0) <= tol * np.max(np.abs(y_next), initial=0.0):
            return y_next
        y1 = y_next
    raise RuntimeError(
        f"implicit midpoint did not converge in {max_iter} iterations; try a smaller dt (now {dt})"
    )


@dataclass
class Trajectory:
    """Snapshots of a run with observables evaluated from each snapshot.

    ``end_time``/``end_state`` hold where the run actually stopped, which is
    not a snapshot when the step count is not a multiple of the snapshot
    interval.
    """

    times: np.ndarray
    states: np.ndarray
    observables: dict[str, np.ndarray] = field(default_factory=dict)
    end_time: float | None = None
    end_state: np.ndarray | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=complex)
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        if self.states.shape[0] != self.times.size:
            raise ValueError("one state per time stamp required")

    def __len__(self) -> int:
        return self.times.size

    @property
    def final(self) -> np.ndarray:
        """State at the end of the run."""
        return self.states[-1] if self.end_state is None else self.end_state


def snapshot_observables(system: HamiltonianSystem, y, alpha: float = 0.25) -> dict[str, float]:
    row = system.observables(y, alpha)
    for p, name in ((0.5, "front_p50"), (0.9, "front_p90")):
        try:
            row[name] = system.front(y, p)
        except ValueError:
            row[name] = float("nan")
    return row


def make_trajectory(
    system: HamiltonianSystem, times, states, alpha: float = 0.25, end_time=None, end_state=None
) -> Trajectory:
    rows = [snapshot_observables(system, y, alpha) for y in states]
    obs = {name: np.array([r[name] for r in rows]) for name in OBSERVABLES} if rows else {}
    return Trajectory(np.asarray(times), np.asarray(states), obs, end_time, end_state)


def stepper(scheme: str, tol: float = 1e-13, max_iter: int = 50):
    if scheme == "rk4":
        return rk4_step
    if scheme == "implicit_midpoint":
        return lambda rhs, y, dt: implicit_midpoint_step(rhs, y, dt, tol, max_iter)
    raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


def evolve(
    system: HamiltonianSystem,
    y0,
    t_end: float,
    dt: float,
    scheme: str = "implicit_midpoint",
    observe_every: int = 1,
    alpha: float = 0.25,
    tol: float = 1e-13,
    max_iter: int = 50,
) -> Trajectory:
    """March ``y0`` to ``t_end`` with a fixed step, keeping every ``observe_every``-th state.

    The number of steps is floor(t_end/dt) (to rounding), so the trajectory has
    floor(t_end/(dt*observe_every)) + 1 rows. On blow-up a :class:`BlowUpError`
    carries the partial trajectory, ending at the last finite state.
    """
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    if not dt > 0:
        raise ValueError("dt must be positive")
    if observe_every < 1:
        raise ValueError("observe_every must be >= 1")
    step = stepper(scheme, tol, max_iter)
    n_steps = int(np.floor(t_end / dt * (1 + 1e-12)))
    y = np.array(y0, dtype=complex)
    times, states = [0.0], [y.copy()]
    for i in range(1, n_steps + 1):
        try:
            y = step(system.rhs, y, dt)
        except FloatingPointError as exc:
            # BlowUpError from the stepper or an overflow raised inside rhs
            t = i * dt
            if times[-1] != (i - 1) * dt:
                times.append((i - 1) * dt)
                states.append(y.copy())
            partial = make_trajectory(system, times, states, alpha, (i - 1) * dt, y.copy())
            raise BlowUpError(f"blow-up detected at t={t:.6g}", t, partial) from exc
        if i % observe_every == 0:
            times.append(i * dt)
            states.append(y.copy())
    logger.debug("evolved %s for %d steps of dt=%g", system.name, n_steps, dt)
    return make_trajectory(system, times, states, alpha, n_steps * dt, y)


@dataclass
class FlowReport:
    """Outcome of comparing a system's right-hand side with its Hamiltonian gradient.

    ``term_coefficients`` gives, for each named piece of the right-hand side,
    the real factor by which that piece must be scaled to reproduce the
    gradient flow (1 everywhere for a consistent system).
    """

    max_rel_error: float
    rel_error: np.ndarray
    term_coefficients: dict[str, float] = field(default_factory=dict)
    fit_residual: float = float("nan")

    def passed(self, threshold: float = 1e-6) -> bool:
        return self.max_rel_error < threshold

    def mismatched_terms(self, tol: float = 1e-3) -> list[str]:
        return [k for k, c in self.term_coefficients.items() if abs(c - 1.0) > tol]


def flow_consistency_check(system: HamiltonianSystem, y, step: float = 1e-5) -> FlowReport:
    """Check rhs = -i W^-1 dH/d(conj y) with a finite-difference gradient.

    Errors are measured relative to the largest gradient-flow component.
    """
    y = np.asarray(y, dtype=complex)
    expected = -1j * wirtinger_gradient(system.hamiltonian, y, step) / system.symplectic_weights
    actual = system.rhs(y)
    scale = np.max(np.abs(expected))
    if scale == 0:
        scale = 1.0
    rel = np.abs(actual - expected) / scale
    report = FlowReport(float(rel.max()), rel)

    terms = system.rhs_terms(y)
    if terms:
        names = [k for k, v in terms.items() if np.any(v != 0)]
        cols = [terms[k] for k in names]
        norms = np.array([np.max(np.abs(c)) for c in cols])
        A = np.stack([c / n for c, n in zip(cols, norms)], axis=1)
        A_real = np.concatenate([A.real, A.imag])
        b_real = np.concatenate([expected.real, expected.imag])
        coef, *_ = np.linalg.lstsq(A_real, b_real, rcond=None)
        coef = coef / norms
        report.term_coefficients = {k: float(c) for k, c in zip(names, coef)}
        fitted = sum(c * t for c, t in zip(coef, cols))
        report.fit_residual = float(np.max(np.abs(fitted - expected)) / scale)
    return report
