"""
The bounded ghost weights and what they buy.

M = M1 + M2 + 1 is trapped in [1, 1+2pi], yet its transport commutator
k dM/dxi is strictly positive: along the shear every mode pays a toll that
adds up to a fractional streamwise dissipation ~ A^{-1/3} |k|^{2/3} plus the
full low-frequency (inviscid damping) term.  The coercivity margin below is
the pointwise surplus of that toll over the advertised lower bound.
"""

import numpy as np

from lcsim.norms import coercivity_check, m_eval, m_xi_derivative_weighted
from lcsim.spectral import Grid, random_real_field

A = 100.0
print("== the weight along one column (k = 1) ==")
print("  xi      M1+M2+1   k dM/dxi")
for xi in (-30.0, -3.0, 0.0, 3.0, 30.0):
    print(f"  {xi:6.1f}  {m_eval(1.0, xi, A):8.4f}  "
          f"{m_xi_derivative_weighted(1.0, xi, A):9.5f}")
print(f"  bounds: 1 <= M <= 1 + 2 pi = {1 + 2 * np.pi:.4f}")

print("\n== coercivity margin on random band-limited fields ==")
rng = np.random.default_rng(1)
grid = Grid(48, 48)
print("  A        lhs median   worst margin/lhs")
for a_val in (1.0, 10.0, 1000.0):
    margins, lhss = [], []
    for _ in range(200):
        f = random_real_field(grid, rng, band=16)
        f.shear_time = rng.uniform(-2, 2)
        lhs, rhs, margin = coercivity_check(f, a_val)
        margins.append(margin / lhs)
        lhss.append(lhs)
    print(f"  {a_val:6.0f}  {np.median(lhss):11.4f}   {min(margins):+.4f}")
print("  (the margin never dips below zero: the toll dominates the bound)")
