"""
Exact single-mode behavior under shear: enhanced dissipation and the
algebraic stream-function damping.

A mode tilted by the background shear drifts through vertical frequencies
xi0 - k t.  Its amplitude picks up the cubic-in-time dissipation exponent,
so the decay time scales like nu^{-1/3} |k|^{-2/3}; meanwhile the stream
function it induces decays algebraically like t^{-2} even without viscosity.
"""

import numpy as np

from lcsim.kelvin import (
    KelvinMode,
    decay_time,
    enhanced_dissipation_check,
    inviscid_damping_check,
    kelvin_exact,
    stream_function_amplitude,
)

print("== single mode amplitude under shear ==")
mode = KelvinMode(k=1.0, xi0=0.0, amplitude=1.0, nu=1e-3)
for t in (0.0, 5.0, 10.0, 20.0, 40.0):
    plain_heat = np.exp(-mode.nu * mode.k**2 * t)
    print(f"  t = {t:5.1f}: |amp| = {abs(kelvin_exact(mode, t)):.3e}   "
          f"(plain heat alone would give {plain_heat:.3f})")

print("\n== decay time across (k, nu): the nu^(-1/3) k^(-2/3) law ==")
print("  k     nu       t_decay   t*nu^(1/3)*k^(2/3)")
for k in (1.0, 2.0, 4.0, 8.0):
    for nu in (1e-2, 1e-3, 1e-4):
        t_c = decay_time(k, 0.0, nu, depth=30.0)
        print(f"  {k:3.0f}  {nu:7.0e}  {t_c:8.2f}  {t_c * nu**(1/3) * k**(2/3):8.3f}")

fit = enhanced_dissipation_check([KelvinMode(k, 0.0) for k in (1, 2, 4, 8)],
                                 nus=[1e-2, 1e-3, 1e-4], c_fit_window=30.0)
print(f"\n  joint fit: rate ~ {fit.prefactor:.3f} * nu^{fit.exponent_nu:.3f}"
      f" * |k|^{fit.exponent_k:.3f}   (targets 1/3 and 2/3)")

print("\n== inviscid damping of the stream function ==")
mode0 = KelvinMode(1.0, 0.0, nu=0.0)
for t in (1.0, 3.0, 10.0, 30.0, 100.0):
    print(f"  t = {t:6.1f}: |psi| = {stream_function_amplitude(mode0, t):.3e}"
          f"   (1/(1+t^2) = {1/(1+t**2):.3e})")
slope = inviscid_damping_check(mode0, np.geomspace(10, 100, 40))
print(f"  fitted log-log slope on t in [10, 100]: {slope:.4f} (target -2)")
