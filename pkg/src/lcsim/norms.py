"""
Ghost-weight Fourier multipliers and the weighted energy diagnostics.

Two bounded multipliers are tracked on the (k, xi) plane:

    M1(k, xi) = arctan(A^{-1/3} |k|^{-1/3} sgn(k) xi) + pi/2
    M2(k, xi) = arctan(xi / k) + pi/2
    M = M1 + M2 + 1          with      1 <= M <= 1 + 2 pi.

Their xi-derivative weighted by k,

    k dM/dxi = A^{-1/3}|k|^{2/3} / (1 + A^{-2/3}|k|^{-2/3} xi^2) + k^2/(k^2 + xi^2),

is strictly positive off the k = 0 column and dominates, mode by mode, the
combination (1/(4A^{1/3}))|k|^{2/3} - (1/(2A))xi^2 + k^2/(k^2+xi^2); summed
against |f_hat|^2 this is the coercivity inequality checked here.

On top of these sit the anisotropic norm, weighted in the streamwise
frequency only by Lambda_{m,eps}(k) = (1+k^2)^m (1+k^{-2})^eps, and the
cumulative space-time norm with its exponentially growing per-mode weight
exp(a A^{-1/3} |k|^{2/3} t).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spectral import Grid, SpectralField

A_RATE_BOUND = 1.0 / (16.0 * (1.0 + 2.0 * np.pi))


@dataclass(frozen=True)
class NormParams:
    """
    Parameters of the weighted norms.

    ``a`` is the exponential growth rate of the space-time weight, ``m`` and
    ``eps`` the high/low streamwise-frequency exponents, ``delta`` the
    amplitude-smallness exponent.  ``harmonic_mode`` relaxes the lower bound
    on eps from 1/3 to 1/6 (the regime of the fluid-decoupled equation).
    """

    a: float = 0.008
    m: float = 1.0
    eps: float = 0.4
    delta: float = 1.5
    harmonic_mode: bool = False

    def __post_init__(self) -> None:
        if not 0.0 < self.a < A_RATE_BOUND:
            raise ValueError(f"a must lie in (0, {A_RATE_BOUND:.6e})")
        lo = 1.0 / 6.0 if self.harmonic_mode else 1.0 / 3.0
        if not lo < self.eps < 0.5:
            raise ValueError(f"eps must lie in ({lo:.4f}, 0.5)")
        if self.m <= 0.5:
            raise ValueError("m must exceed 1/2")
        if self.delta <= 1.0:
            raise ValueError("delta must exceed 1")

    @property
    def kappa(self) -> float:
        return max(2.0 / (self.delta - 1.0), 24.0)


def _sign_limit(xi) -> np.ndarray:
    """+inf / -inf / 0 according to the sign of xi (the k -> 0+ limit)."""
    return np.where(xi > 0.0, np.inf, np.where(xi < 0.0, -np.inf, 0.0))


def m1_eval(k, xi, A):
    """Enhanced-dissipation multiplier; k = 0 takes the sgn(xi) limit value."""
    k = np.asarray(k, dtype=float)
    xi = np.asarray(xi, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        arg = A ** (-1.0 / 3.0) * np.abs(k) ** (-1.0 / 3.0) * np.sign(k) * xi
    arg = np.where(k == 0.0, _sign_limit(xi), arg)
    return np.arctan(arg) + np.pi / 2.0


def m2_eval(k, xi):
    """Inviscid-damping multiplier; k = 0 takes the sgn(xi) limit value."""
    k = np.asarray(k, dtype=float)
    xi = np.asarray(xi, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        arg = xi / k
    arg = np.where(k == 0.0, _sign_limit(xi), arg)
    return np.arctan(arg) + np.pi / 2.0


def m_eval(k, xi, A):
    """Total ghost weight M = M1 + M2 + 1, bounded in [1, 1 + 2 pi]."""
    return m1_eval(k, xi, A) + m2_eval(k, xi) + 1.0


def m_xi_derivative_weighted(k, xi, A):
    """
    Closed form of k d_xi M.  Written with non-negative powers of |k| so the
    k = 0 column evaluates to 0 (its limit) instead of 0 * inf.
    """
    k = np.asarray(k, dtype=float)
    xi = np.asarray(xi, dtype=float)
    ak = np.abs(k)
    t1_den = ak ** (2.0 / 3.0) + A ** (-2.0 / 3.0) * xi * xi
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = A ** (-1.0 / 3.0) * ak ** (4.0 / 3.0) / t1_den
        t2 = k * k / (k * k + xi * xi)
    t1 = np.where(t1_den == 0.0, 0.0, t1)
    t2 = np.where(k == 0.0, 0.0, t2)
    return t1 + t2


@dataclass
class MultiplierGrid:
    """Ghost-weight arrays frozen for one (grid, shear_time, A) combination."""

    grid: Grid
    shear_time: float
    A: float
    M: np.ndarray = field(init=False)
    k_dxi_M: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        xe = self.grid.xi_eff(self.shear_time)
        self.M = m_eval(self.grid.KX, xe, self.A)
        self.k_dxi_M = m_xi_derivative_weighted(self.grid.KX, xe, self.A)


def coercivity_check(f: SpectralField, A: float, measure: str = "box"):
    """
    Both sides of the ghost-weight coercivity inequality for a band-limited
    field, plus the margin lhs - rhs (non-negative up to roundoff).

    lhs = sum k d_xi M |f_hat|^2;
    rhs = (1/(4 A^{1/3})) || |D_x|^{1/3} f ||^2 - (1/(2A)) || d_y f ||^2
          + || d_x grad invLap f ||^2.
    """
    if measure != "box":
        raise ValueError("only the box measure is implemented")
    g = f.grid
    xe = f.xi_eff()
    p = np.abs(f.coeffs) ** 2 * g.measure
    lhs = float(np.sum(m_xi_derivative_weighted(g.KX, xe, A) * p))
    dx13 = float(np.sum(np.abs(g.KX) ** (2.0 / 3.0) * p))
    dy = float(np.sum(xe * xe * p))
    ksq = g.KX**2 + xe**2
    with np.errstate(divide="ignore", invalid="ignore"):
        low = np.where(ksq == 0.0, 0.0, g.KX**2 / ksq)
    lowfreq = float(np.sum(low * p))
    rhs = dx13 / (4.0 * A ** (1.0 / 3.0)) - dy / (2.0 * A) + lowfreq
    return lhs, rhs, lhs - rhs


def lambda_weight(k: np.ndarray, params: NormParams, k_zero_proxy: float) -> np.ndarray:
    """
    Streamwise weight (1+k^2)^m (1+1/k^2)^eps; the k = 0 slot is evaluated at
    ``k_zero_proxy`` since the low-frequency factor diverges there.
    """
    ak = np.where(k == 0.0, k_zero_proxy, np.abs(k))
    return (1.0 + ak**2) ** params.m * (1.0 + ak ** (-2.0)) ** params.eps


def _as_field_list(f) -> list[SpectralField]:
    return list(f) if isinstance(f, (list, tuple)) else [f]


def y_norm(f, params: NormParams, weight_op=None) -> float:
    """
    Anisotropic norm || <D_x>^m <1/D_x>^eps w ||_{L^2} where w is the field
    (or the sum over listed components), optionally pre-multiplied by
    ``weight_op`` (a SpectralField -> SpectralField map).
    """
    fields = _as_field_list(f)
    total = 0.0
    for fc in fields:
        if weight_op is not None:
            fc = weight_op(fc)
        g = fc.grid
        lam = lambda_weight(g.KX, params, 0.5 * g.dk)
        total += float(np.sum(lam * np.abs(fc.coeffs) ** 2)) * g.measure
    return float(np.sqrt(total))


@dataclass
class XNormAccumulator:
    """
    Running value of the four-term space-time norm of one monitored field
    (possibly multi-component).

    Term 1 is the sup in time of the exponentially weighted anisotropic norm;
    terms 2-4 are trapezoid-in-time integrals of the weighted gradient,
    |D_x|^{1/3}, and d_x grad invLap dissipation functionals, scaled by 1/A,
    1/A^{1/3} and 1 respectively.
    """

    params: NormParams
    A: float
    sup_sq: float = 0.0
    grad_int: float = 0.0
    dx13_int: float = 0.0
    lowfreq_int: float = 0.0
    last_t: float | None = None
    _last: tuple[float, float, float] | None = None

    def update(self, fields, t: float) -> "XNormAccumulator":
        if self.last_t is not None and t < self.last_t:
            raise ValueError(f"time regression: {t} < {self.last_t}")
        q_sup = q_grad = q_dx13 = q_low = 0.0
        for fc in _as_field_list(fields):
            g = fc.grid
            xe = fc.xi_eff()
            wgt = np.exp(2.0 * self.params.a * self.A ** (-1.0 / 3.0)
                         * np.abs(g.KX) ** (2.0 / 3.0) * t)
            wgt *= lambda_weight(g.KX, self.params, 0.5 * g.dk)
            p = wgt * np.abs(fc.coeffs) ** 2 * g.measure
            ksq = g.KX**2 + xe**2
            with np.errstate(divide="ignore", invalid="ignore"):
                low = np.where(ksq == 0.0, 0.0, g.KX**2 / ksq)
            q_sup += float(np.sum(p))
            q_grad += float(np.sum(ksq * p))
            q_dx13 += float(np.sum(np.abs(g.KX) ** (2.0 / 3.0) * p))
            q_low += float(np.sum(low * p))
        q_grad /= self.A
        q_dx13 /= self.A ** (1.0 / 3.0)
        self.sup_sq = max(self.sup_sq, q_sup)
        if self.last_t is not None:
            h = 0.5 * (t - self.last_t)
            g0, x0, l0 = self._last
            self.grad_int += h * (g0 + q_grad)
            self.dx13_int += h * (x0 + q_dx13)
            self.lowfreq_int += h * (l0 + q_low)
        self.last_t = t
        self._last = (q_grad, q_dx13, q_low)
        return self

    def terms(self) -> tuple[float, float, float, float]:
        return (self.sup_sq, self.grad_int, self.dx13_int, self.lowfreq_int)

    def total_sq(self) -> float:
        return self.sup_sq + self.grad_int + self.dx13_int + self.lowfreq_int

    def norm(self) -> float:
        return float(np.sqrt(self.total_sq()))


def x_norm_update(acc: XNormAccumulator, f, t: float,
                  params: NormParams, A: float) -> XNormAccumulator:
    """Push one time sample into the accumulator (params/A must match)."""
    if acc.params != params or acc.A != A:
        raise ValueError("accumulator was built with different norm parameters")
    return acc.update(f, t)


def energy_functional(accs: dict, params: NormParams, A: float):
    """
    Bootstrap energy E(t) = A^delta X(|D_x|^{1/3} d) + X((dxx,dyy)|D_x|^{1/3} d)
    + X(omega), from accumulators keyed 'd13', 'hess_d13', 'omega'.
    Returns (E, addends).
    """
    try:
        e1 = A**params.delta * accs["d13"].norm()
        e2 = accs["hess_d13"].norm()
        e3 = accs["omega"].norm()
    except KeyError as exc:
        raise ValueError(f"missing accumulator {exc}") from exc
    return e1 + e2 + e3, (e1, e2, e3)


# -- frequency-region machinery ---------------------------------------------


def region_classify(k: float, l: float) -> str:
    """
    Place the interaction pair in one of the three convolution regions:
    'res' when |k| is comparable to |k-l| (within a factor 2), 'HL' when the
    output frequency dominates, 'LH' when the input difference dominates.
    """
    dk = abs(k - l)
    if 0.5 * dk <= abs(k) <= 2.0 * dk:
        return "res"
    if abs(k) > 2.0 * dk:
        return "HL"
    return "LH"


def _bracket(x: float) -> float:
    return float(np.sqrt(1.0 + x * x))


def _inv_bracket(x: float) -> float:
    if x == 0.0:
        return np.inf
    return float(np.sqrt(1.0 + 1.0 / (x * x)))


def region_inequality_check(k: float, l: float, s: float = 1.0,
                            s1: float = 1.0, s2: float = 1.0) -> bool:
    """
    Verify the constant-explicit frequency comparisons in the region of
    (k, l): in 'res', |l| <= 3|k| and the streamwise weight of k is bounded
    by 2^{s1+s2} times that of k-l; in 'HL', |k-l| <= |k|/2, |k|/2 <= |l| <=
    3|k|/2 and the weight transfers to l with constant 2^{s1} (3/2)^{s2};
    in 'LH', <k>^{2s} <= 3^{2s} <l>^s <k-l>^s.
    """
    if min(s, s1, s2) < 0:
        raise ValueError("exponents must be non-negative")
    region = region_classify(k, l)
    dk = abs(k - l)
    if region == "res":
        ok = abs(l) <= 3.0 * abs(k) + 1e-15
        lhs = _bracket(k) ** s1 * _inv_bracket(k) ** s2
        rhs = 2.0 ** (s1 + s2) * _bracket(dk) ** s1 * _inv_bracket(dk) ** s2
        return ok and (lhs <= rhs * (1.0 + 1e-12) or (np.isinf(lhs) and np.isinf(rhs)))
    if region == "HL":
        ok = dk <= 0.5 * abs(k) and 0.5 * abs(k) <= abs(l) <= 1.5 * abs(k) + 1e-15
        lhs = _bracket(k) ** s1 * _inv_bracket(k) ** s2
        rhs = 2.0**s1 * 1.5**s2 * _bracket(l) ** s1 * _inv_bracket(l) ** s2
        return ok and lhs <= rhs * (1.0 + 1e-12)
    lhs = _bracket(k) ** (2.0 * s)
    rhs = 3.0 ** (2.0 * s) * (_bracket(l) * _bracket(dk)) ** s
    return abs(k) <= 0.5 * dk and lhs <= rhs * (1.0 + 1e-12)


def build_multiplier_grid(grid: Grid, shear_time: float, A: float) -> MultiplierGrid:
    return MultiplierGrid(grid, shear_time, A)


def ghost_norm_sq(f: SpectralField, mult: MultiplierGrid) -> float:
    """|| sqrt(M) f ||^2 with the multiplier evaluated in f's frame."""
    if mult.shear_time != f.shear_time:
        mult = MultiplierGrid(f.grid, f.shear_time, mult.A)
    return float(np.sum(mult.M * np.abs(f.coeffs) ** 2) * f.grid.measure)


def ghost_dissipation(f: SpectralField, A: float) -> float:
    """sum k d_xi M |f_hat|^2, the sign-definite commutator production term."""
    xe = f.xi_eff()
    w = m_xi_derivative_weighted(f.grid.KX, xe, A)
    return float(np.sum(w * np.abs(f.coeffs) ** 2) * f.grid.measure)


__all__ = [
    "A_RATE_BOUND", "NormParams", "MultiplierGrid", "XNormAccumulator",
    "m1_eval", "m2_eval", "m_eval", "m_xi_derivative_weighted",
    "coercivity_check", "lambda_weight", "y_norm", "x_norm_update",
    "energy_functional", "region_classify", "region_inequality_check",
    "build_multiplier_grid", "ghost_norm_sq", "ghost_dissipation",
]
