"""
Shear suppression of director focusing, on a datum that actually focuses.

The oscillatory data family is geometrically flat on the unit sphere (its
compatible realization lives on a great circle, where the harmonic-map
nonlinearity cancels), so it cannot concentrate at any amplitude.  To see
suppression one needs data that covers a cap of the sphere.  This demo
builds a degree-one "bubble" with Dirichlet energy well above 8 pi and runs
it under weak (A = 1) and strong (A = 1000) background shear.

Without strong shear the bubble steepens monotonically (the focusing route
to singularity, resolution permitting).  Under strong shear the streamwise
structure is torn apart and the weighted norm Y_d13 collapses.  One honest
caveat is printed too: the streamwise-average part of the data (its k = 0
column) cannot be mixed by any shear; the theory's anisotropic norms weigh
that component out, and |D_x|^{1/3} in Y_d13 removes it exactly.

Runtime: a few minutes (the weak-shear run is CFL-limited as it steepens).
"""

import time

import numpy as np

from lcsim import flow
from lcsim.data import dirichlet_energy, dx13_op
from lcsim.flow import FlowState, PhysParams, zero_state
from lcsim.norms import NormParams, y_norm
from lcsim.spectral import Grid, PhysicalField, to_spectral


def bubble_state(grid, radius=0.5, steepness=3.0, r_cut=0.75):
    """Equivariant cap-covering director datum, windowed to e1 at the edge."""
    X, Y = np.meshgrid(grid.x, grid.y, indexing="ij")
    r = np.hypot(X, Y)
    theta = np.arctan2(Y, X)
    beta = 2.0 * np.arctan((radius / np.maximum(r, 1e-12)) ** steepness)
    redge = r_cut * min(grid.lx, grid.ly)
    beta *= 0.5 * (1.0 - np.tanh((r - redge) / (0.15 * redge)))
    d = (to_spectral(PhysicalField(grid, np.cos(beta) - 1.0)),
         to_spectral(PhysicalField(grid, np.sin(beta) * np.cos(theta))),
         to_spectral(PhysicalField(grid, np.sin(beta) * np.sin(theta))))
    return FlowState(zero_state(grid).omega, d, 0.0, 0.0)


def run(state, A, t_end, label, max_steps=12000):
    norm_params = NormParams()
    params = PhysParams(A=A)
    grid = state.omega.grid
    y0 = y_norm([dx13_op(dc) for dc in state.d], norm_params)
    init_grad = flow.grad_n_sup(state)
    umax, gradn = flow.velocity_sup(state), init_grad
    s = state
    peak = init_grad
    y_min = 1.0
    samples = [(0.0, 1.0, 1.0)]
    t0 = time.time()
    steps = 0
    while s.t < t_end and steps < max_steps:
        dt = min(0.02, 0.8 * flow.cfl_bound(umax, gradn, grid, params, s.shear_time),
                 t_end - s.t)
        s, rep = flow.step(s, params, dt)
        umax, gradn = max(rep.max_u, 1e-9), rep.max_grad_n
        peak = max(peak, rep.max_grad_n)
        steps += 1
        if rep.blown_up:
            break
        if steps % 150 == 0:
            y = y_norm([dx13_op(dc) for dc in s.d], norm_params)
            y_min = min(y_min, y / y0)
            samples.append((s.t, y / y0, rep.max_grad_n / init_grad))
    samples.append((s.t, y_norm([dx13_op(dc) for dc in s.d], norm_params) / y0,
                    flow.grad_n_sup(s) / init_grad))
    y_min = min(y_min, samples[-1][1])
    print(f"\n  [{label}]  integrated to t = {s.t:.2f} in {steps} steps "
          f"({time.time() - t0:.0f}s wall)")
    print("      t      Y_d13/Y0   sup|grad n|/init")
    for t, y, gg in samples[:: max(1, len(samples) // 8)]:
        print(f"   {t:6.2f}   {y:8.3f}   {gg:8.3f}")
    print(f"   peak sup|grad n| ratio: {peak / init_grad:.2f}")
    return peak / init_grad, y_min, samples[-1]


grid = Grid(64, 64, np.pi, np.pi)
state = bubble_state(grid)
energy = dirichlet_energy(state.d)
print(f"bubble datum: Dirichlet energy {energy:.1f} "
      f"(the 8 pi focusing threshold is {8 * np.pi:.1f})")
print(f"initial sup |grad n| = {flow.grad_n_sup(state):.2f}")

peak_weak, y_min_weak, (_, y_weak, g_weak) = run(state, A=1.0, t_end=3.0,
                                                 label="A = 1")
peak_strong, y_min_strong, _ = run(state, A=1000.0, t_end=25.0, label="A = 1000")

print("\n== verdicts ==")
print(f"  weak shear:   gradients climbed to {peak_weak:.2f}x and stayed "
      f"elevated (focusing under way)")
print(f"  strong shear: Y_d13 bottomed at {y_min_strong:.2f}x of its initial "
      f"value (streamwise structure mixed away)")
print("  the k = 0 (x-averaged) component is untouched by shear in both runs;")
print("  the anisotropic norms are built to discount exactly that component.")
