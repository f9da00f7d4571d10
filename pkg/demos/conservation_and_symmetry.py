# Integrators, conserved quantities and the three symmetries.
import math

import numpy as np

from lll_dynamics import (
    LimitSystem,
    build_grid,
    drift_report,
    evolve,
    flow_consistency_check,
    symmetry_orbit_check,
)

sysm = LimitSystem(build_grid(4, -3, 3), lam=2.0)
s = sysm.frequencies[1:]
y0 = sysm.join(1.0, 0.5 * s * np.exp(-s) * np.exp(1j * s))

# the right-hand side is the Hamiltonian vector field of the discrete h
rep = flow_consistency_check(sysm, y0)
print(rep.max_rel_error, rep.term_coefficients)

# implicit midpoint keeps M and E to solver tolerance; h drifts at O(dt^2)
for dt in (4e-3, 2e-3, 1e-3):
    d = drift_report(evolve(sysm, y0, 1.0, dt, observe_every=10))
    print(f"midpoint dt={dt:g}  M {d['M'].abs:.1e}  E {d['E'].abs:.1e}  h {d['H'].abs:.1e}")

# rk4 conserves nothing exactly but its drift falls like dt^4
for dt in (0.02, 0.01, 0.005):
    d = drift_report(evolve(sysm, y0, 1.0, dt, "rk4", observe_every=10))
    print(f"rk4      dt={dt:g}  M {d['M'].abs:.1e}  E {d['E'].abs:.1e}  h {d['H'].abs:.1e}")

for sym, p in (("rotation", math.pi / 3), ("modulation", 0.7), ("scaling", 2.0), ("scaling", 1.5)):
    print(sym, p, symmetry_orbit_check(sysm, y0, sym, p, 0.5, 0.01))
