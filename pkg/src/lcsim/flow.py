"""
Coupled vorticity / director dynamics in the shear frame.

The state is the vorticity perturbation ``omega`` and the director
perturbation ``d = n - e1`` (three components) of a unit director field
``n``.  In the shear frame the background transport is absorbed into the
frequency labels, so one time step consists of an exact integrating factor
for the diffusion along the drifting frequencies plus an explicit two-stage
(Heun) update of the remaining terms:

    d_t omega = (nu/A)  Lap omega - (1/A) u . grad omega + (lam/A) F_omega
    d_t d     = (gam/A) Lap d     - (1/A) u . grad d     + (gam/A) |grad d|^2 (d + e1)
    u = grad^perp invLap omega,
    F_omega = d_x(d_y d . Lap d) - d_y(d_x d . Lap d).

The director is renormalized to the unit sphere pointwise after every
accepted step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import (
    Grid,
    PhysicalField,
    SpectralField,
    deriv_x,
    deriv_y_phys,
    inv_laplacian,
    laplacian,
    multiply_dealiased,
    pad_to_values,
    remap_shear_frame,
    to_physical,
    to_spectral,
    values_to_truncated,
)


class StateCorrupted(RuntimeError):
    """The director field lost its meaning (vanishing |n| or similar)."""


class CFLViolation(ValueError):
    """Requested dt exceeds the advective/reaction stability bound."""


@dataclass(frozen=True)
class PhysParams:
    """Shear amplitude and the viscosity / elastic / relaxation constants."""

    A: float
    nu: float = 1.0
    lam: float = 1.0
    gam: float = 1.0

    def __post_init__(self) -> None:
        if self.A <= 0 or self.nu <= 0 or self.lam <= 0 or self.gam <= 0:
            raise ValueError("A, nu, lam, gam must all be positive")


@dataclass
class FlowState:
    omega: SpectralField
    d: tuple[SpectralField, SpectralField, SpectralField]
    t: float = 0.0
    shear_time: float = 0.0

    def fields(self) -> tuple[SpectralField, ...]:
        return (self.omega, *self.d)

    def has_nan(self) -> bool:
        return any(not np.all(np.isfinite(f.coeffs)) for f in self.fields())


@dataclass
class StepReport:
    dt: float
    max_u: float
    max_grad_n: float
    renorm_correction: float
    remap_discarded: float
    blown_up: bool = False


def zero_state(grid: Grid, shear_time: float = 0.0) -> FlowState:
    z = lambda: SpectralField(grid, np.zeros((grid.nx, grid.ny), np.complex128), shear_time)
    return FlowState(z(), (z(), z(), z()), 0.0, shear_time)


def velocity_from_vorticity(omega: SpectralField) -> tuple[SpectralField, SpectralField]:
    """u = grad^perp invLap omega; divergence-free mode by mode."""
    phi = inv_laplacian(omega)
    u1 = deriv_y_phys(phi)
    u2 = deriv_x(phi)
    u2.coeffs = -u2.coeffs
    return u1, u2


def spectral_divergence_rel(u1: SpectralField, u2: SpectralField) -> float:
    """max |ik u1 + i xi_eff u2| relative to the gradient scale of u."""
    g = u1.grid
    xe = u1.xi_eff()
    div = g.KX * u1.coeffs + xe * u2.coeffs
    scale = np.max(np.hypot(np.abs(g.KX * u1.coeffs), np.abs(xe * u2.coeffs)))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(div)) / scale)


def leslie_stress_curl(d: tuple[SpectralField, ...]) -> SpectralField:
    """
    Curl of the elastic (director) stress forcing the vorticity equation,
    ``F_omega = d_x(d_y d . Lap d) - d_y(d_x d . Lap d)``, before any 1/A
    scaling.  Products are dealiased.
    """
    g1 = None
    g2 = None
    for dc in d:
        lap = laplacian(dc)
        t1 = multiply_dealiased([deriv_y_phys(dc), lap])
        t2 = multiply_dealiased([deriv_x(dc), lap])
        g1 = t1 if g1 is None else SpectralField(t1.grid, g1.coeffs + t1.coeffs, t1.shear_time)
        g2 = t2 if g2 is None else SpectralField(t2.grid, g2.coeffs + t2.coeffs, t2.shear_time)
    out = deriv_x(g1).coeffs - deriv_y_phys(g2).coeffs
    return SpectralField(d[0].grid, out, d[0].shear_time)


def director_rhs(state: FlowState, params: PhysParams,
                 couple_fluid: bool = True) -> tuple[SpectralField, ...]:
    """
    Full director right-hand side in the shear frame,
    ``(gam/A) Lap d - (1/A) u.grad d + (gam/A) |grad d|^2 (d + e1)``.
    The background transport contributes nothing here (absorbed by the frame).
    """
    _, n_d, _, _ = _nonlinear_rhs(state, params, True, couple_fluid)
    return tuple(
        SpectralField(dc.grid,
                      (params.gam / params.A) * laplacian(dc).coeffs + nc,
                      dc.shear_time)
        for dc, nc in zip(state.d, n_d)
    )


def vorticity_rhs(state: FlowState, params: PhysParams) -> SpectralField:
    """
    Full vorticity right-hand side in the shear frame,
    ``(nu/A) Lap omega - (1/A) u.grad omega + (lam/A) F_omega``.
    """
    n_om, _, _, _ = _nonlinear_rhs(state, params, True, True)
    rhs = (params.nu / params.A) * laplacian(state.omega).coeffs + n_om
    return SpectralField(state.omega.grid, rhs, state.omega.shear_time)


def _nonlinear_rhs(state: FlowState, params: PhysParams, nonlinear: bool,
                   couple_fluid: bool):
    """
    Explicit (non-diffusive) part of the right-hand sides, evaluated on the
    padded grid, along with the pointwise sups needed for CFL control.

    Returns (n_omega, (n_d1, n_d2, n_d3), max|u|, max|grad n|); the rhs
    arrays are coefficient arrays (not SpectralField) in the state's frame.
    """
    grid = state.omega.grid
    pad = grid.dealias_pad
    nx, ny = grid.nx, grid.ny
    A = params.A
    xe = grid.xi_eff(state.shear_time)
    zero = np.zeros((nx, ny), np.complex128)

    if not nonlinear:
        return zero, (zero.copy(), zero.copy(), zero.copy()), 0.0, 0.0

    u_max = 0.0
    u1p = u2p = None
    if couple_fluid:
        u1, u2 = velocity_from_vorticity(state.omega)
        u1p = pad_to_values(u1.coeffs, pad)
        u2p = pad_to_values(u2.coeffs, pad)
        u_max = float(np.max(np.hypot(u1p, u2p)))

    dxp, dyp, lapp, dp = [], [], [], []
    for dc in state.d:
        dxp.append(pad_to_values(1j * grid.KX * dc.coeffs, pad))
        dyp.append(pad_to_values(1j * xe * dc.coeffs, pad))
        lapp.append(pad_to_values(-(grid.KX**2 + xe**2) * dc.coeffs, pad))
        dp.append(pad_to_values(dc.coeffs, pad))
    grad2p = sum(a * a + b * b for a, b in zip(dxp, dyp))
    grad_n_max = float(np.sqrt(np.max(grad2p)))

    n_om = zero
    if couple_fluid:
        g1 = sum(a * b for a, b in zip(dyp, lapp))
        g2 = sum(a * b for a, b in zip(dxp, lapp))
        f_om = (1j * grid.KX * values_to_truncated(g1, nx, ny)
                - 1j * xe * values_to_truncated(g2, nx, ny))
        omxp = pad_to_values(1j * grid.KX * state.omega.coeffs, pad)
        omyp = pad_to_values(1j * xe * state.omega.coeffs, pad)
        adv_om = values_to_truncated(u1p * omxp + u2p * omyp, nx, ny)
        n_om = (params.lam * f_om - adv_om) / A

    n_d = []
    for c in range(3):
        geo = grad2p * (dp[c] + (1.0 if c == 0 else 0.0))
        rhs = params.gam * values_to_truncated(geo, nx, ny)
        if couple_fluid:
            rhs -= values_to_truncated(u1p * dxp[c] + u2p * dyp[c], nx, ny)
        n_d.append(rhs / A)
    return n_om, tuple(n_d), u_max, grad_n_max


def cfl_bound(umax: float, grad_n_max: float, grid: Grid, params: PhysParams,
              shear_time: float, safety: float = 0.5) -> float:
    """
    Stability bound for the explicit terms.  Advection moves at |u|/A against
    the resolved wavenumbers; the geometric reaction rate ~ gam |grad n|^2 / A
    is included as well; the trailing 1 caps dt at `safety` outright.
    """
    xi_eff_max = grid.xi_max + abs(shear_time) * grid.kx_max
    rate = (umax * (grid.kx_max + xi_eff_max) / params.A
            + 2.0 * params.gam * grad_n_max**2 / params.A
            + 1.0)
    return safety / rate


def renormalize_director(d: tuple[SpectralField, ...]) -> tuple[tuple[SpectralField, ...], float]:
    """
    Project n = d + e1 back to the unit sphere pointwise.

    Returns the corrected components and the maximum of ||n| - 1| before the
    correction.  Raises StateCorrupted where |n| nearly vanishes.
    """
    grid = d[0].grid
    s = d[0].shear_time
    vals = [to_physical(dc).values for dc in d]
    n1 = vals[0] + 1.0
    norm = np.sqrt(n1 * n1 + vals[1] ** 2 + vals[2] ** 2)
    if not np.all(np.isfinite(norm)):
        raise StateCorrupted("non-finite director norm")
    if np.min(norm) < 1e-6:
        raise StateCorrupted(f"director magnitude vanished (min |n| = {np.min(norm):.3e})")
    correction = float(np.max(np.abs(norm - 1.0)))
    out = (
        to_spectral(PhysicalField(grid, n1 / norm - 1.0), s),
        to_spectral(PhysicalField(grid, vals[1] / norm), s),
        to_spectral(PhysicalField(grid, vals[2] / norm), s),
    )
    return out, correction


def sphere_error(d: tuple[SpectralField, ...]) -> float:
    """Max pointwise ||d + e1| - 1| on the collocation grid."""
    vals = [to_physical(dc).values for dc in d]
    n1 = vals[0] + 1.0
    return float(np.max(np.abs(np.sqrt(n1**2 + vals[1] ** 2 + vals[2] ** 2) - 1.0)))


def grad_n_sup(state: FlowState) -> float:
    """Max pointwise |grad n| on the collocation grid."""
    total = None
    for dc in state.d:
        gx = to_physical(deriv_x(dc)).values
        gy = to_physical(deriv_y_phys(dc)).values
        q = gx * gx + gy * gy
        total = q if total is None else total + q
    return float(np.sqrt(np.max(total)))


def velocity_sup(state: FlowState) -> float:
    u1, u2 = velocity_from_vorticity(state.omega)
    return float(np.max(np.hypot(to_physical(u1).values, to_physical(u2).values)))


def blow_up_monitor(state: FlowState, initial_grad_sup: float,
                    warn_factor: float = 10.0, blow_factor: float = 1e3) -> str:
    """Classify the state as healthy / warning / blown_up."""
    if state.has_nan():
        return "blown_up"
    g = grad_n_sup(state)
    ref = max(initial_grad_sup, 1e-300)
    if g > blow_factor * ref:
        return "blown_up"
    if g > warn_factor * ref:
        return "warning"
    return "healthy"


def _dissipation_exponent(grid: Grid, shear_time: float, dt: float) -> np.ndarray:
    """closed form of int_0^dt k^2 + xi_eff(tau)^2 dtau from the current frame"""
    xe = grid.xi_eff(shear_time)
    kh = grid.KX * dt
    return grid.KX**2 * dt + dt * (xe * xe - xe * kh + kh * kh / 3.0)


def step(state: FlowState, params: PhysParams, dt: float, *,
         nonlinear: bool = True, couple_fluid: bool = True,
         renormalize: bool = True, remap_threshold: float | None = None,
         enforce_cfl: bool = True) -> tuple[FlowState, StepReport]:
    """
    Advance one step: exact integrating factor for diffusion along the
    drifting labels, Heun (two-stage, second order) for the explicit terms.

    ``remap_threshold``: relabel the frame once |shear_time| exceeds this
    (None picks a band-safety default; numpy.inf disables remapping).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    grid = state.omega.grid
    s0, t0 = state.shear_time, state.t

    n_om0, n_d0, umax, gradn = _nonlinear_rhs(state, params, nonlinear, couple_fluid)
    if enforce_cfl and nonlinear:
        bound = cfl_bound(umax, gradn, grid, params, s0)
        if dt > 1.05 * bound:
            raise CFLViolation(f"dt = {dt:.3e} exceeds stability bound {bound:.3e}")

    e_step = _dissipation_exponent(grid, s0, dt)
    phi_om = np.exp(-(params.nu / params.A) * e_step)
    phi_d = np.exp(-(params.gam / params.A) * e_step)
    s1, t1 = s0 - dt, t0 + dt

    pred = FlowState(
        SpectralField(grid, phi_om * (state.omega.coeffs + dt * n_om0), s1),
        tuple(
            SpectralField(grid, phi_d * (dc.coeffs + dt * nc), s1)
            for dc, nc in zip(state.d, n_d0)
        ),
        t1, s1,
    )
    n_om1, n_d1, umax1, gradn1 = _nonlinear_rhs(pred, params, nonlinear, couple_fluid)

    new_om = phi_om * state.omega.coeffs + 0.5 * dt * (phi_om * n_om0 + n_om1)
    new_d = [
        phi_d * dc.coeffs + 0.5 * dt * (phi_d * nc0 + nc1)
        for dc, nc0, nc1 in zip(state.d, n_d0, n_d1)
    ]
    out = FlowState(
        SpectralField(grid, new_om, s1),
        tuple(SpectralField(grid, c, s1) for c in new_d),
        t1, s1,
    )

    correction = 0.0
    blown = out.has_nan()
    if renormalize and not blown:
        try:
            d_fixed, correction = renormalize_director(out.d)
            out = FlowState(out.omega, d_fixed, t1, s1)
        except StateCorrupted:
            blown = True

    discarded = 0.0
    if remap_threshold is None:
        remap_threshold = default_remap_threshold(grid)
    if not blown and np.isfinite(remap_threshold) and abs(s1) >= remap_threshold:
        quantum = grid.lx / grid.ly
        jump = round(s1 / quantum) * quantum
        if jump != 0.0:
            fields = []
            for f in out.fields():
                rf, lost = remap_shear_frame(f, s1 - jump)
                fields.append(rf)
                discarded += lost
            out = FlowState(fields[0], tuple(fields[1:]), t1, s1 - jump)

    report = StepReport(dt, max(umax, umax1), max(gradn, gradn1),
                        correction, discarded, blown)
    return out, report


def default_remap_threshold(grid: Grid) -> float:
    """
    Relabel once the fastest column has drifted half the xi band, but never
    below one integer quantum lx/ly (smaller jumps cannot land on the grid).
    """
    band_safety = 0.5 * (grid.ny * grid.lx) / (grid.nx * grid.ly)
    return max(grid.lx / grid.ly, band_safety)
