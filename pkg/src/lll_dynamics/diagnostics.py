"""Post-processing: drift of conserved quantities, symmetry orbits,
spectral front position and an empirical existence-time probe."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .core import FockState, HamiltonianSystem, spectral_front_from
from .integrate import Trajectory, evolve, stepper
from .limit import LimitState
from .shell import ShellState


class Drift(NamedTuple):
    abs: float
    rel: float


def drift_report(traj: Trajectory) -> dict[str, Drift]:
    """Largest deviation of every observable from its t=0 value."""
    if len(traj) < 2:
        raise ValueError("need at least two snapshots")
    report = {}
    for name, values in traj.observables.items():
        values = np.asarray(values, dtype=float)
        if not np.all(np.isfinite(values)):
            report[name] = Drift(float("nan"), float("nan"))
            continue
        d = float(np.max(np.abs(values - values[0])))
        ref = abs(values[0])
        report[name] = Drift(d, d / ref if ref > 0 else (0.0 if d == 0 else float("inf")))
    return report


def spectral_front(state, p: float) -> float:
    """Smallest grid frequency s* with lam * sum_{s <= s*} w |g|^2 >= p * total.

    For a :class:`FockState` the frequencies are the indices n >= 1 with unit
    weights.
    """
    if isinstance(state, (LimitState, ShellState)):
        grid = state.grid
        g = state.g if isinstance(state, LimitState) else state.gj[None, :]
        return spectral_front_from(grid.s, state.lam * grid.weights * np.abs(g) ** 2, p)
    if isinstance(state, FockState):
        c = state.c
        return spectral_front_from(np.arange(1, c.size), np.abs(c[1:]) ** 2, p)
    raise TypeError(f"unsupported state type {type(state).__name__}")


SYMMETRIES = ("rotation", "modulation", "scaling")


def symmetry_orbit_check(
    system: HamiltonianSystem,
    y0,
    symmetry: str,
    param: float,
    t: float,
    dt: float,
    scheme: str = "implicit_midpoint",
    tol: float = 1e-13,
) -> float:
    """Max |evolve(T y0) - T evolve(y0)| over coordinates at time ``t``.

    ``rotation`` multiplies every coordinate by e^(i param); ``modulation``
    multiplies coordinate p by e^(i param s_p); ``scaling`` with param = mu
    compares mu y0 run to time t against y0 run to mu^2 t (step mu^2 dt, so
    both runs take the same number of steps) and then scaled by mu.
    """
    y0 = np.asarray(y0, dtype=complex)
    run = lambda y, T, h: evolve(system, y, T, h, scheme, observe_every=10**9, tol=tol).final
    if symmetry == "rotation":
        phase = np.exp(1j * param)
        return float(np.max(np.abs(run(phase * y0, t, dt) - phase * run(y0, t, dt))))
    if symmetry == "modulation":
        phase = np.exp(1j * param * system.frequencies)
        return float(np.max(np.abs(run(phase * y0, t, dt) - phase * run(y0, t, dt))))
    if symmetry == "scaling":
        mu = float(param)
        if not mu > 0:
            raise ValueError("scaling parameter must be positive")
        return float(np.max(np.abs(run(mu * y0, t, dt) - mu * run(y0, mu**2 * t, mu**2 * dt))))
    raise ValueError(f"unknown symmetry {symmetry!r}; expected one of {SYMMETRIES}")


class ExistenceProbe(NamedTuple):
    T_observed: float
    bound: float
    initial_norm: float
    reached_t_max: bool


def existence_time_probe(
    system: HamiltonianSystem,
    y0,
    alpha: float,
    blowup_factor: float = 2.0,
    t_max: float = 10.0,
    dt: float = 1e-3,
    scheme: str = "rk4",
    c: float = 1.0,
) -> ExistenceProbe:
    """First time the X_alpha norm exceeds ``blowup_factor`` times its initial value.

    Returns t_max if that never happens, together with the reference scale
    c / ||(a0, g0)||_alpha^2. No inequality between the two is asserted.
    """
    if alpha < 0.25:
        raise ValueError("alpha must be >= 1/4")
    if not blowup_factor > 1:
        raise ValueError("blowup_factor must exceed 1")
    y = np.asarray(y0, dtype=complex)
    norm0 = system.x_alpha(y, alpha)
    if not norm0 > 0:
        raise ValueError("zero initial data")
    step = stepper(scheme)
    n_steps = int(np.floor(t_max / dt * (1 + 1e-12)))
    for i in range(1, n_steps + 1):
        y = step(system.rhs, y, dt)
        if system.x_alpha(y, alpha) > blowup_factor * norm0:
            if i == 1:
                raise RuntimeError("norm threshold exceeded on the first step; reduce dt")
            return ExistenceProbe(i * dt, c / norm0**2, norm0, False)
    return ExistenceProbe(n_steps * dt, c / norm0**2, norm0, True)
