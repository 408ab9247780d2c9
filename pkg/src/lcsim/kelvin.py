"""
Closed-form single-mode solutions of linearized shear advection-diffusion,
and the decay-law fits built on them.

A mode labeled by its initial wavenumbers (k, xi0) drifts through physical
frequencies xi0 - k t while its amplitude decays like

    exp(-nu I(t)),   I(t) = int_0^t k^2 + (xi0 - k s)^2 ds
                          = k^2 t + t (xi0^2 - xi0 k t + (k t)^2 / 3).

In the moving-frame convention, with xi' = xi0 - k t the frequency observed
at time t, the same exponent reads k^2 t + ((xi' + k t)^3 - xi'^3)/(3 k).
The cubic-in-time part is the shear-enhanced decay; fits against I extract
its nu^{1/3} |k|^{2/3} rate, and the stream-function amplitude along the
drift exhibits the algebraic t^{-2} damping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class KelvinMode:
    """One tracked mode: initial wavenumbers, amplitude, viscosity."""

    k: float
    xi0: float
    amplitude: complex = 1.0
    nu: float = 1.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.k) and np.isfinite(self.xi0)):
            raise ValueError("wavenumbers must be finite")
        if self.nu < 0:
            raise ValueError("nu must be non-negative")


def dissipation_integral(k: float, xi0: float, t) -> np.ndarray | float:
    """int_0^t k^2 + (xi0 - k s)^2 ds in polynomial form (valid at k = 0)."""
    t = np.asarray(t, dtype=float)
    out = k * k * t + t * (xi0 * xi0 - xi0 * k * t + (k * t) ** 2 / 3.0)
    return out if out.ndim else float(out)


def kelvin_exact(mode: KelvinMode, t) -> np.ndarray | complex:
    """Amplitude of the mode at time(s) t >= 0."""
    if np.any(np.asarray(t) < 0):
        raise ValueError("t must be non-negative")
    out = mode.amplitude * np.exp(-mode.nu * dissipation_integral(mode.k, mode.xi0, t))
    return out if np.ndim(out) else complex(out)


def decay_time(k: float, xi0: float, nu: float, depth: float) -> float:
    """
    First time at which the amplitude has decayed by exp(-depth), i.e. the
    root of nu I(t) = depth.  I is strictly increasing for nu, depth > 0, so
    bisection is safe.
    """
    if depth <= 0 or nu <= 0:
        raise ValueError("degenerate fit window: need nu > 0 and depth > 0")
    hi = 1.0
    while nu * dissipation_integral(k, xi0, hi) < depth:
        hi *= 2.0
        if hi > 1e12:
            raise RuntimeError("decay time out of range")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if nu * dissipation_integral(k, xi0, mid) < depth:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass
class DissipationFit:
    """Joint power-law fit of decay rates over the (k, nu) grid."""

    exponent_k: float
    exponent_nu: float
    prefactor: float
    residuals: np.ndarray
    table: list[dict]


def enhanced_dissipation_check(modes: list[KelvinMode], nus=None,
                               c_fit_window: float = 30.0) -> DissipationFit:
    """
    Fit rate ~ C nu^{b} |k|^{a} from envelope decay times of the exact
    solutions; the shear-mixing law predicts a = 2/3, b = 1/3.

    The rate of a mode is depth / t_depth with t_depth the time to decay by
    exp(-depth); a deep window (default depth 30) measures the cubic regime
    rather than the O(1) transient.  Modes with k = 0 carry no streamwise
    structure and are excluded.  At least 4 distinct |k| are required.
    """
    if c_fit_window <= 0:
        raise ValueError("degenerate fit window")
    cells = []
    for mode in modes:
        if mode.k == 0.0:
            continue
        for nu in ([mode.nu] if nus is None else nus):
            cells.append((abs(mode.k), mode.xi0, nu))
    ks = sorted({c[0] for c in cells})
    if len(ks) < 4:
        raise ValueError(f"need >= 4 distinct |k| with k != 0, got {len(ks)}")
    rows, logs = [], []
    for k, xi0, nu in cells:
        t_c = decay_time(k, xi0, nu, c_fit_window)
        rate = c_fit_window / t_c
        rows.append({"k": k, "xi0": xi0, "nu": nu, "t_decay": t_c, "rate": rate})
        logs.append((np.log(k), np.log(nu), np.log(rate)))
    logs = np.asarray(logs)
    design = np.column_stack([np.ones(len(logs)), logs[:, 0], logs[:, 1]])
    coef, *_ = np.linalg.lstsq(design, logs[:, 2], rcond=None)
    resid = logs[:, 2] - design @ coef
    return DissipationFit(float(coef[1]), float(coef[2]), float(np.exp(coef[0])),
                          resid, rows)


def stream_function_amplitude(mode: KelvinMode, t) -> np.ndarray:
    """
    |invLap omega| along the drifting mode: the vorticity amplitude divided
    by k^2 + (xi0 - k t)^2, decaying algebraically once shear dominates.
    """
    t = np.asarray(t, dtype=float)
    xi_t = mode.xi0 - mode.k * t
    return np.abs(kelvin_exact(mode, t)) / (mode.k**2 + xi_t**2)


def inviscid_damping_check(mode: KelvinMode, t_grid) -> float:
    """
    Log-log slope of the stream-function amplitude over t_grid (target -2).
    The window must span at least a factor 2 in t with k != 0.
    """
    t = np.asarray(t_grid, dtype=float)
    if mode.k == 0.0:
        raise ValueError("inviscid damping needs k != 0")
    if t.size < 2 or np.min(t) <= 0 or np.max(t) / np.min(t) < 2.0:
        raise ValueError("t window too short for a slope fit")
    amp = stream_function_amplitude(mode, t)
    slope = np.polyfit(np.log(t), np.log(amp), 1)[0]
    return float(slope)


def inviscid_damping_pointwise_ok(k: float, xi: float, t: float,
                                  C: float = 2.0) -> bool:
    """
    The algebraic bound behind the damping estimate at nu = 0: the stream
    function at observed frequency xi and time t is bounded by
    C <t>^{-2} (1 + k^2 + (xi + k t)^2)/k^4 times the initial amplitude.
    """
    if k == 0.0:
        raise ValueError("k must be nonzero")
    lhs = 1.0 / (k * k + xi * xi)
    rhs = C * (1.0 + k * k + (xi + k * t) ** 2) / ((1.0 + t * t) * k**4)
    return lhs <= rhs * (1.0 + 1e-12)
