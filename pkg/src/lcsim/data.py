"""
Explicit large-energy initial data for the director field.

The family is built from two unit-L2 profiles: a streamwise one whose
Fourier transform is a fixed smooth bump supported in [1, 2] (mirrored to
[-2, -1] so the profile is real), and a vertical envelope.  The director
perturbation is

    d_in(x, y) = lam^theta phi(lam x) varphi(y) cos(N y) e1,   u_in = 0,

so the streamwise spectrum sits in |k| in [lam, 2 lam] (no k = 0 content)
while the vertical oscillation at frequency N carries a Dirichlet energy
growing like lam^{2 theta - 1} N^2.

Because a perturbation purely along e1 is flattened by the unit-sphere
constraint (normalizing (1 + g) e1 returns e1), the same scalar amplitude
can instead be realized as a rotation angle, n = (cos g, sin g, 0); this
"sphere" embedding matches the family's norms to second order in the
amplitude and is the form the solver can actually evolve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .norms import NormParams, y_norm
from .spectral import (
    Grid,
    PhysicalField,
    SpectralField,
    deriv_x,
    deriv_y_phys,
    to_physical,
    to_spectral,
    zero_nyquist,
)


class ResolutionError(ValueError):
    """The grid cannot resolve the requested profile or frequency."""


@dataclass(frozen=True)
class InitialDataParams:
    """Scaling lam in (0,1), vertical frequency N >= 4, amplitude exponent theta."""

    lam: float
    N: float
    theta: float
    profile: str = "band"  # vertical envelope: "band" or "gaussian"

    def __post_init__(self) -> None:
        if not 0.0 < self.lam < 1.0:
            raise ValueError("lam must lie in (0, 1)")
        if self.N < 4.0:
            raise ValueError("N must be at least 4")
        if self.theta <= 0.0:
            raise ValueError("theta must be positive")
        if self.profile not in ("band", "gaussian"):
            raise ValueError("profile must be 'band' or 'gaussian'")


def bump_hat(s) -> np.ndarray:
    """Smooth compact bump on (1, 2): exp(-1/(1-u^2)) with u = 2(s - 3/2)."""
    s = np.asarray(s, dtype=float)
    u = 2.0 * (s - 1.5)
    inside = np.abs(u) < 1.0
    out = np.zeros_like(s)
    with np.errstate(divide="ignore", over="ignore"):
        out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    return out


def schwartz_band_profile(grid: Grid, axis: str = "x", scale: float = 1.0) -> np.ndarray:
    """
    1-D Fourier coefficients of the band-limited profile phi(scale * x) on
    the requested axis; its transform is the symmetric bump on
    +-[scale, 2 scale].  The normalization makes the unit-scale profile phi
    itself have unit L2 norm, so the scaled function carries the usual
    scale^{-1/2} mass factor.
    """
    if axis == "x":
        k, half = grid.kx, grid.lx
    elif axis == "y":
        k, half = grid.xi, grid.ly
    else:
        raise ValueError("axis must be 'x' or 'y'")
    vals = bump_hat(np.abs(k) / scale)
    if np.count_nonzero(vals) < 2:
        raise ResolutionError(
            f"support [{scale}, {2 * scale}] unresolved at spacing {np.pi / half:.4g}"
        )
    c = vals.astype(np.complex128)
    c[len(c) // 2] = 0.0
    norm_sq = 2.0 * half * float(np.sum(np.abs(c) ** 2))
    return c / math.sqrt(scale * norm_sq)


def gaussian_profile(grid: Grid, axis: str = "y", width: float = 1.0) -> np.ndarray:
    """Band-limited Gaussian envelope (unit discrete L2), for coarse grids."""
    if axis == "x":
        k, half = grid.kx, grid.lx
    else:
        k, half = grid.xi, grid.ly
    c = np.exp(-0.5 * (k * width) ** 2).astype(np.complex128)
    c[len(c) // 2] = 0.0
    norm_sq = 2.0 * half * float(np.sum(np.abs(c) ** 2))
    return c / math.sqrt(norm_sq)


def _family_scalar(params: InitialDataParams, grid: Grid) -> tuple[np.ndarray, float]:
    """Coefficients of g = lam^theta phi(lam x) varphi(y) cos(N_grid y)."""
    if 2.0 * params.lam > grid.kx_max:
        raise ResolutionError(
            f"streamwise band [{params.lam}, {2 * params.lam}] exceeds kx_max = {grid.kx_max:.4g}"
        )
    cx = schwartz_band_profile(grid, "x", scale=params.lam)
    if params.profile == "band":
        cy_env = schwartz_band_profile(grid, "y")
    else:
        cy_env = gaussian_profile(grid, "y")
    i_n = int(round(params.N / grid.dxi))
    n_grid = i_n * grid.dxi
    env_halfwidth = 2.0 if params.profile == "band" else 6.0
    if n_grid + env_halfwidth > grid.xi_max:
        raise ResolutionError(
            f"vertical frequency {n_grid:.4g} (+envelope) exceeds xi_max = {grid.xi_max:.4g}"
        )
    cy = 0.5 * (np.roll(cy_env, i_n) + np.roll(cy_env, -i_n))
    # roll wraps envelope tails through the Nyquist slot; keep it empty
    cy[len(cy) // 2] = 0.0
    coeffs = params.lam**params.theta * np.outer(cx, cy)
    return zero_nyquist(coeffs), n_grid


def make_director_data(params: InitialDataParams, grid: Grid,
                       embedding: str = "axis"):
    """
    Build the director perturbation (three SpectralFields, u_in = 0).

    embedding="axis": the literal family g * e1 (used for norm reports; it
    is not unit-sphere compatible).  embedding="sphere": the rotation by
    angle g in the (e1, e2) plane, d = (cos g - 1, sin g, 0), which the
    renormalizing solver can evolve; it matches the family's norms to
    O(amplitude^2).
    """
    coeffs, _ = _family_scalar(params, grid)
    zeros = np.zeros_like(coeffs)
    if embedding == "axis":
        return (SpectralField(grid, coeffs), SpectralField(grid, zeros.copy()),
                SpectralField(grid, zeros.copy()))
    if embedding != "sphere":
        raise ValueError("embedding must be 'axis' or 'sphere'")
    g = to_physical(SpectralField(grid, coeffs)).values
    # exact transforms keep |n| = 1 at every collocation point
    d1 = to_spectral(PhysicalField(grid, np.cos(g) - 1.0))
    d2 = to_spectral(PhysicalField(grid, np.sin(g)))
    return (d1, d2, SpectralField(grid, zeros))


@dataclass
class DataReport:
    """Norms of one initial datum and the derived amplitude window."""

    L: float
    H: float
    E: float
    W_omega: float
    A_bar: float
    A_max: float
    gap_ok: bool
    kappa: float
    C_cal: float
    note: str = "A_bar uses the calibration constant C_cal; absolute thresholds are conventional"

    def to_dict(self) -> dict:
        return {
            "L_low_order": self.L,
            "H_high_order": self.H,
            "dirichlet_energy": self.E,
            "W_omega": self.W_omega,
            "A_bar": self.A_bar,
            "A_max": self.A_max,
            "gap_ok": self.gap_ok,
            "kappa": self.kappa,
            "C_cal": self.C_cal,
            "note": self.note,
        }


def dx13_op(f: SpectralField) -> SpectralField:
    """|D_x|^{1/3} as a Fourier multiplier."""
    return SpectralField(f.grid, np.abs(f.grid.KX) ** (1.0 / 3.0) * f.coeffs,
                         f.shear_time)


def low_order_norm(d, norm_params: NormParams) -> float:
    """L = || |D_x|^{1/3} d ||_Y over the components."""
    return y_norm(list(d), norm_params, weight_op=dx13_op)


def high_order_norm(d, norm_params: NormParams) -> float:
    """H = || (dxx, dyy) |D_x|^{1/3} d ||_Y over the components."""
    total = 0.0
    for dc in d:
        base = dx13_op(dc)
        total += y_norm(deriv_x(deriv_x(base)), norm_params) ** 2
        total += y_norm(deriv_y_phys(deriv_y_phys(base)), norm_params) ** 2
    return math.sqrt(total)


def dirichlet_energy(d) -> float:
    """E = || grad d ||_{L^2}^2 over the components."""
    total = 0.0
    for dc in d:
        total += SpectralField(dc.grid, deriv_x(dc).coeffs, dc.shear_time).l2_norm() ** 2
        total += deriv_y_phys(dc).l2_norm() ** 2
    return total


def amplitude_threshold(H: float, W_omega: float, norm_params: NormParams,
                        C_cal: float = 1.0, L: float | None = None):
    """
    Lower amplitude threshold A_bar = C_cal (H + W + 1)^kappa with
    kappa = max(2/(delta-1), 24), and (when L is given) the smallness
    ceiling A_max = L^{-1/delta}.
    """
    if H < 0 or W_omega < 0:
        raise ValueError("norms must be non-negative")
    kappa = norm_params.kappa
    a_bar = C_cal * (H + W_omega + 1.0) ** kappa
    a_max = None if L is None else L ** (-1.0 / norm_params.delta)
    return a_bar, a_max


def norms_report(d, params: InitialDataParams, norm_params: NormParams,
                 C_cal: float = 1.0, omega: SpectralField | None = None) -> DataReport:
    """Compute L, H, E spectrally and the amplitude window they imply."""
    mu = params.theta - norm_params.eps - 1.0 / 6.0
    if mu <= 0:
        raise ValueError(f"theta = {params.theta} violates theta > eps + 1/6")
    L = low_order_norm(d, norm_params)
    H = high_order_norm(d, norm_params)
    E = dirichlet_energy(d)
    W = 0.0 if omega is None else y_norm(omega, norm_params)
    a_bar, a_max = amplitude_threshold(H, W, norm_params, C_cal, L=L)
    return DataReport(L=L, H=H, E=E, W_omega=W, A_bar=a_bar, A_max=a_max,
                      gap_ok=bool(a_bar < a_max), kappa=norm_params.kappa,
                      C_cal=C_cal)


def gap_check(params: InitialDataParams, norm_params: NormParams,
              C_cal: float = 1.0, L: float | None = None,
              H: float | None = None) -> tuple[bool, float]:
    """
    Whether C_cal * H^kappa < L^{-1/delta}, using the scaling models
    L ~ lam^mu and H ~ N^2 lam^mu (mu = theta - eps - 1/6) when explicit
    values are not supplied.  Also returns the largest N passing the model
    form of the condition at this lam.
    """
    mu = params.theta - norm_params.eps - 1.0 / 6.0
    if mu <= 0:
        raise ValueError("gap condition needs mu = theta - eps - 1/6 > 0")
    kappa = norm_params.kappa
    lam_mu = params.lam**mu
    L_val = lam_mu if L is None else L
    H_val = params.N**2 * lam_mu if H is None else H
    gap_ok = bool(C_cal * H_val**kappa < L_val ** (-1.0 / norm_params.delta))
    n_max = (params.lam ** (-mu * (1.0 / norm_params.delta + kappa)) / C_cal) ** (
        1.0 / (2.0 * kappa)
    )
    return gap_ok, float(n_max)


def snapped_vertical_frequency(params: InitialDataParams, grid: Grid) -> float:
    """The on-grid frequency actually used for N."""
    return int(round(params.N / grid.dxi)) * grid.dxi
