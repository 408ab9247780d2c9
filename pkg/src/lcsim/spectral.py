"""
Spectral fields on a shear-periodic 2-D box.

Fields live on a rectangular box ``[-lx, lx) x [-ly, ly)`` and are stored as
Fourier-series coefficients ``f(x, y) = sum_{j,i} c[j, i] exp(i(k_j x + xi_i y))``
with ``k_j = pi j / lx`` and ``xi_i = pi i / ly`` in FFT index order.

A field carries a ``shear_time`` offset ``s``: the coordinates are the
shear-following ones, ``X = x + s y``, so the physical-frame vertical
wavenumber of the label ``(k, xi)`` is ``xi_eff = xi + k s``.  Pure shear
transport by ``y d/dx`` leaves coefficients constant while ``s`` decreases
with time; spatial derivatives in the physical frame are the multipliers
``i k`` and ``i xi_eff``.

Nonlinear products are evaluated pointwise in the shear frame on a grid
zero-padded by an integer factor (2 is exactly alias-free up to cubic
products for fields with empty Nyquist slots, which this module enforces).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid:
    """
    Truncated Fourier grid for the doubly periodic box.

    Parameters
    ----------
    nx, ny : int
        Mode counts per direction; even and at least 8.
    lx, ly : float
        Half-periods of the box ``[-lx, lx) x [-ly, ly)``.
    dealias_pad : int
        Zero-padding factor for pointwise products (>= 2).
    """

    nx: int
    ny: int
    lx: float = 4.0 * np.pi
    ly: float = 4.0 * np.pi
    dealias_pad: int = 2

    def __post_init__(self) -> None:
        if self.nx < 8 or self.ny < 8 or self.nx % 2 or self.ny % 2:
            raise ValueError("nx, ny must be even and >= 8")
        if self.lx <= 0 or self.ly <= 0:
            raise ValueError("lx, ly must be positive")
        if self.dealias_pad < 2:
            raise ValueError("dealias_pad must be an integer >= 2")
        jj = np.fft.fftfreq(self.nx, 1.0 / self.nx)
        ii = np.fft.fftfreq(self.ny, 1.0 / self.ny)
        object.__setattr__(self, "kx", np.pi * jj / self.lx)
        object.__setattr__(self, "xi", np.pi * ii / self.ly)
        kk, xx = np.meshgrid(self.kx, self.xi, indexing="ij")
        object.__setattr__(self, "KX", kk)
        object.__setattr__(self, "XI", xx)
        # Alternating-sign phases map FFT output to the [-l, l) spatial origin.
        px = np.where(jj.astype(int) % 2 == 0, 1.0, -1.0)
        py = np.where(ii.astype(int) % 2 == 0, 1.0, -1.0)
        object.__setattr__(self, "_phase", np.outer(px, py))
        object.__setattr__(self, "x", -self.lx + (2.0 * self.lx / self.nx) * np.arange(self.nx))
        object.__setattr__(self, "y", -self.ly + (2.0 * self.ly / self.ny) * np.arange(self.ny))

    @property
    def measure(self) -> float:
        """Area of the box, the weight turning sum|c|^2 into the L2 integral."""
        return 4.0 * self.lx * self.ly

    @property
    def dk(self) -> float:
        return np.pi / self.lx

    @property
    def dxi(self) -> float:
        return np.pi / self.ly

    @property
    def kx_max(self) -> float:
        """Largest resolved |k| once the Nyquist slot is excluded."""
        return self.dk * (self.nx // 2 - 1)

    @property
    def xi_max(self) -> float:
        return self.dxi * (self.ny // 2 - 1)

    def xi_eff(self, shear_time: float) -> np.ndarray:
        """Physical-frame vertical wavenumbers for labels at offset ``shear_time``."""
        return self.XI + self.KX * shear_time


@dataclass
class SpectralField:
    """Complex Fourier coefficients of a scalar field, plus its frame offset."""

    grid: Grid
    coeffs: np.ndarray
    shear_time: float = 0.0

    def __post_init__(self) -> None:
        if self.coeffs.shape != (self.grid.nx, self.grid.ny):
            raise ValueError(
                f"coefficient shape {self.coeffs.shape} does not match grid "
                f"({self.grid.nx}, {self.grid.ny})"
            )
        self.coeffs = np.asarray(self.coeffs, dtype=np.complex128)

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs.copy(), self.shear_time)

    def zeros_like(self) -> "SpectralField":
        return SpectralField(self.grid, np.zeros_like(self.coeffs), self.shear_time)

    def l2_norm(self) -> float:
        """Discrete L2 norm of the field over the box."""
        return float(np.sqrt(self.grid.measure * np.sum(np.abs(self.coeffs) ** 2)))

    def xi_eff(self) -> np.ndarray:
        return self.grid.xi_eff(self.shear_time)


@dataclass
class PhysicalField:
    """Real collocation values on the (shear-frame) grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.shape != (self.grid.nx, self.grid.ny):
            raise ValueError(
                f"value shape {self.values.shape} does not match grid "
                f"({self.grid.nx}, {self.grid.ny})"
            )


def zero_nyquist(coeffs: np.ndarray) -> np.ndarray:
    """Empty the unpaired -n/2 slots so conjugate symmetry is exactly representable."""
    coeffs[coeffs.shape[0] // 2, :] = 0.0
    coeffs[:, coeffs.shape[1] // 2] = 0.0
    return coeffs


def to_spectral(p: PhysicalField, shear_time: float = 0.0) -> SpectralField:
    """Forward transform (exactly invertible, Nyquist content retained)."""
    c = np.fft.fft2(p.values) / (p.grid.nx * p.grid.ny) * p.grid._phase
    return SpectralField(p.grid, c, shear_time)


def to_physical(f: SpectralField) -> PhysicalField:
    """Inverse transform to real collocation values (imaginary part discarded)."""
    vals = np.fft.ifft2(f.coeffs * f.grid._phase) * (f.grid.nx * f.grid.ny)
    return PhysicalField(f.grid, np.real(vals))


def deriv_x(f: SpectralField) -> SpectralField:
    """
    Streamwise derivative; the multiplier ``i k`` is frame independent.
    The unpaired Nyquist slots are emptied (an odd operator cannot represent
    them with conjugate symmetry intact).
    """
    return SpectralField(f.grid, zero_nyquist(1j * f.grid.KX * f.coeffs), f.shear_time)


def deriv_y_phys(f: SpectralField) -> SpectralField:
    """Physical-frame vertical derivative, multiplier ``i (xi + k s)``."""
    return SpectralField(f.grid, zero_nyquist(1j * f.xi_eff() * f.coeffs), f.shear_time)


def laplacian(f: SpectralField) -> SpectralField:
    """Physical-frame Laplacian, multiplier ``-(k^2 + xi_eff^2)``."""
    xe = f.xi_eff()
    return SpectralField(f.grid, -(f.grid.KX**2 + xe**2) * f.coeffs, f.shear_time)


def inv_laplacian(f: SpectralField) -> SpectralField:
    """
    Invert the physical-frame Laplacian mode by mode.

    The ``(k, xi_eff) = (0, 0)`` mode has no preimage and is gauged to zero.
    """
    xe = f.xi_eff()
    denom = -(f.grid.KX**2 + xe**2)
    denom[0, 0] = 1.0
    out = f.coeffs / denom
    out[0, 0] = 0.0
    return SpectralField(f.grid, out, f.shear_time)


def _pad_slices(n: int, n_big: int):
    h = n // 2
    return (slice(0, h), slice(0, h)), (slice(n_big - h, n_big), slice(n - h, n))


def pad_coeffs(coeffs: np.ndarray, pad: int) -> np.ndarray:
    """Embed coefficients into a grid ``pad`` times finer (index space)."""
    nx, ny = coeffs.shape
    big = np.zeros((pad * nx, pad * ny), dtype=np.complex128)
    (xa, xb), (xc, xd) = _pad_slices(nx, pad * nx)
    (ya, yb), (yc, yd) = _pad_slices(ny, pad * ny)
    big[xa, ya] = coeffs[xb, yb]
    big[xa, yc] = coeffs[xb, yd]
    big[xc, ya] = coeffs[xd, yb]
    big[xc, yc] = coeffs[xd, yd]
    return big


def truncate_coeffs(big: np.ndarray, nx: int, ny: int) -> np.ndarray:
    """Extract the retained band from a padded coefficient array."""
    out = np.zeros((nx, ny), dtype=np.complex128)
    pad_x, pad_y = big.shape[0] // nx, big.shape[1] // ny
    (xa, xb), (xc, xd) = _pad_slices(nx, pad_x * nx)
    (ya, yb), (yc, yd) = _pad_slices(ny, pad_y * ny)
    out[xb, yb] = big[xa, ya]
    out[xb, yd] = big[xa, yc]
    out[xd, yb] = big[xc, ya]
    out[xd, yd] = big[xc, yc]
    return out


def pad_to_values(coeffs: np.ndarray, pad: int) -> np.ndarray:
    """Collocation values of the padded field (spatial origin irrelevant for products)."""
    big = pad_coeffs(coeffs, pad)
    return np.real(np.fft.ifft2(big)) * big.size


def values_to_truncated(values: np.ndarray, nx: int, ny: int) -> np.ndarray:
    big = np.fft.fft2(values) / values.size
    return zero_nyquist(truncate_coeffs(big, nx, ny))


def multiply_dealiased(fs: list[SpectralField], degree: int | None = None) -> SpectralField:
    """
    Pointwise product of fields, exactly alias-free on the padded grid.

    All factors must share grid and shear frame.  ``degree`` defaults to the
    number of factors and is validated against the padding factor: padding by
    p dealiases products of degree up to 2p - 1.  Complex (non conjugate
    symmetric) fields are supported; real fields give a real product.
    """
    if not fs:
        raise ValueError("need at least one factor")
    g = fs[0].grid
    for f in fs[1:]:
        if f.grid is not g and f.grid != g:
            raise ValueError("factors live on different grids")
        if f.shear_time != fs[0].shear_time:
            raise ValueError(
                f"mismatched shear_time: {f.shear_time} vs {fs[0].shear_time}"
            )
    degree = len(fs) if degree is None else degree
    if degree > 2 * g.dealias_pad - 1:
        raise ValueError(f"padding {g.dealias_pad} cannot dealias degree {degree}")
    scale = (g.dealias_pad * g.nx) * (g.dealias_pad * g.ny)
    prod = np.fft.ifft2(pad_coeffs(fs[0].coeffs, g.dealias_pad)) * scale
    for f in fs[1:]:
        prod *= np.fft.ifft2(pad_coeffs(f.coeffs, g.dealias_pad)) * scale
    big = np.fft.fft2(prod) / scale
    return SpectralField(g, zero_nyquist(truncate_coeffs(big, g.nx, g.ny)),
                         fs[0].shear_time)


def remap_shear_frame(f: SpectralField, new_shear_time: float) -> tuple[SpectralField, float]:
    """
    Relabel coefficients to a new frame offset representing the same field.

    The label change ``xi -> xi + k (s - s')`` must move every column by an
    integer number of xi slots, i.e. ``(s - s') ly / lx`` must be an integer.
    Modes shifted outside the resolved band are zeroed; their L2 energy is
    returned alongside the remapped field.
    """
    ds = f.shear_time - new_shear_time
    r = ds * f.grid.ly / f.grid.lx
    if abs(r - round(r)) > 1e-9:
        raise ValueError(
            f"shear_time change {ds} shifts columns by non-integer offsets"
        )
    r = int(round(r))
    nx, ny = f.grid.nx, f.grid.ny
    shifted = np.fft.fftshift(f.coeffs)  # rows ordered j = -nx/2 .. nx/2-1
    out = np.zeros_like(shifted)
    dropped = 0.0
    positions = np.arange(ny)
    js = np.arange(-nx // 2, nx // 2)
    for row, j in enumerate(js):
        delta = j * r
        src = positions - delta
        valid = (src >= 0) & (src < ny)
        line = np.zeros(ny, dtype=np.complex128)
        line[positions[valid]] = shifted[row, src[valid]]
        line[0] = 0.0  # destination xi-Nyquist slot stays outside the band
        dropped += float(np.sum(np.abs(shifted[row]) ** 2)
                         - np.sum(np.abs(line) ** 2))
        out[row] = line
    out = np.fft.ifftshift(out)
    return SpectralField(f.grid, out, new_shear_time), f.grid.measure * dropped


def conjugate_symmetry_error(f: SpectralField) -> float:
    """Max |c(-k,-xi) - conj(c(k,xi))| relative to the largest coefficient."""
    c = f.coeffs
    flipped = np.conj(np.roll(np.flip(c), 1, axis=(0, 1)))
    scale = np.max(np.abs(c))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(c - flipped)) / scale)


def single_mode(grid: Grid, j: int, i: int, amplitude: complex = 1.0,
                shear_time: float = 0.0, real: bool = True) -> SpectralField:
    """
    Field with one populated label (index pair ``(j, i)``).

    With ``real=True`` the conjugate label is filled as well so the physical
    field is real.
    """
    c = np.zeros((grid.nx, grid.ny), dtype=np.complex128)
    c[j % grid.nx, i % grid.ny] = amplitude
    if real and (j % grid.nx, i % grid.ny) != (0, 0):
        c[-j % grid.nx, -i % grid.ny] = np.conj(amplitude)
    return SpectralField(grid, c, shear_time)


def random_real_field(grid: Grid, rng: np.random.Generator, band: int | None = None,
                      shear_time: float = 0.0) -> SpectralField:
    """Random band-limited field with conjugate symmetry (real in physical space)."""
    vals = rng.standard_normal((grid.nx, grid.ny))
    f = to_spectral(PhysicalField(grid, vals), shear_time)
    zero_nyquist(f.coeffs)
    if band is not None:
        jj = np.abs(np.fft.fftfreq(grid.nx, 1.0 / grid.nx))
        ii = np.abs(np.fft.fftfreq(grid.ny, 1.0 / grid.ny))
        mask = (jj[:, None] <= band) & (ii[None, :] <= band)
        f.coeffs *= mask
    return f
