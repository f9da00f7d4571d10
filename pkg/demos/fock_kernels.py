# Fock coefficients: the two ways of evaluating the right-hand side.
#
# The coupling (k+l)! / (2^(k+l) sqrt(k! l! m! n!)) overflows as a raw
# expression long before N = 200, so everything goes through ln(n!).
import time

import numpy as np

from lll_dynamics import FockSystem, interaction_weight, lll_rhs_direct, lll_rhs_fast, fock_invariants

print(interaction_weight(0, 0, 0, 0), interaction_weight(0, 1, 0, 1), interaction_weight(2, 2, 1, 3))
print(interaction_weight(300, 300, 250, 350))  # finite, below 1

# Two states small enough to check by hand: (1, 0, ...) and (1, 1, 0, ...)
print(lll_rhs_direct(np.array([1, 0, 0], complex)))
print(lll_rhs_direct(np.array([1, 1, 0, 0], complex)))
print(fock_invariants(np.array([1, 1, 0, 0], complex)))

# The direct sum is O(N^3), the pair-sum version O(N^2). Same numbers.
rng = np.random.default_rng(0)
for N in (32, 64, 128, 256):
    c = (rng.standard_normal(N + 1) + 1j * rng.standard_normal(N + 1)) / np.sqrt(2)
    t0 = time.perf_counter(); d = lll_rhs_direct(c); t1 = time.perf_counter()
    f = lll_rhs_fast(c); t2 = time.perf_counter()
    err = np.max(np.abs(f - d)) / np.max(np.abs(d))
    print(f"N={N:4d}  direct {1e3 * (t1 - t0):7.2f} ms  fast {1e3 * (t2 - t1):6.2f} ms  rel diff {err:.1e}")

# A short run; mass and angular momentum should not move
sysm = FockSystem(64)
from lll_dynamics import evolve, drift_report
c0 = np.zeros(65, complex)
c0[0], c0[3], c0[7] = 1.0, 0.4, 0.2j
traj = evolve(sysm, c0, 2.0, 1e-2, observe_every=20)
for name, d in drift_report(traj).items():
    print(f"{name:10s} drift {d.abs:.2e}")
