# From Fock sums to the limit Hamiltonian.
#
# Put u = a phi_0 + v_lam with v_lam = lam^(-1/2) sum g(n/lam) phi_n and split
# the quartic Hamiltonian by how many factors come from v_lam. The odd piece
# H1 vanishes because g(0) = 0. The others have explicit large-lam equivalents.
import numpy as np

from lll_dynamics import bump, compare, laplace_ratio, psi

g = bump(0.5, 2.0)

print(" lam     H1         H2/h2-1      H3/h3        H4/h4")
for lam in (16, 32, 64, 128):
    b = compare(1.0, g, lam, 2 * lam + 1, support=(0.5, 2.0))
    r = b.ratios()
    print(f"{lam:4d}  {abs(b.H1):.1e}  {r['H2'] - 1: .3e}  {r['H3']:.5f}  {r['H4']:.5f}")

# H2 converges fast and H4 slowly. H3 does not converge to its equivalent for
# this profile. The weight 2^(-lam x/2) squeezes the integrand into a layer
# of width ~1/lam at the left end of the support, where a fixed profile is
# not locally constant. A profile like exp(-1/x) (cut at x = 8, where only
# the slowly varying tail is affected) shows the same effect with a cleaner
# plateau:
prof = lambda x: np.where((x > 0) & (x < 8), np.exp(-1.0 / np.maximum(x, 1e-300)), 0.0)
for lam in (16, 32, 64):
    b = compare(1.0, prof, lam, 8 * lam, support=(0.0, 8.0))
    print(lam, b.ratios()["H3"])
print("plateau predicted at", np.sqrt(1 / (1 + 16 * np.log(2) / 10)))

# The collapse onto the half-frequency interaction comes from psi, peaked at 1/2
print(psi(0.5), psi(0.25), psi(np.array([0.4, 0.6])))
for lam in (100, 200, 400):
    print(lam, laplace_ratio(lambda t: np.ones_like(t), 1.0, lam).ratio)
