"""Periodic Fourier grids and the two-branch Dirac symbol layer.

Conventions used throughout the package:

* Spinor fields are complex arrays of shape ``(2, n1)`` in 1D or
  ``(2, n1, n2)`` in 2D.  Leading batch axes are allowed; the component
  axis always sits immediately left of the spatial axes.
* The forward transform divides by the number of points, so mode
  coefficients are amplitudes: exp(i xi . x) has coefficient one at xi.
* Wavenumbers follow FFT ordering ``(0, 1, ..., n/2-1, -n/2, ..., -1)``
  scaled by ``2 pi / (hi - lo)``.  The unpaired mode ``-n/2`` is kept and
  treated like every other mode.

The momentum-space structure of the operator
``Q = -i eps (sigma1 d/dx1 + sigma2 d/dx2) + sigma3`` drives everything:
at wavenumber xi its symbol is the Hermitian matrix

    H(xi) = [[1,                  eps (xi1 - i xi2)],
             [eps (xi1 + i xi2), -1               ]]

with eigenvalues +-s(xi), s = sqrt(1 + eps^2 |xi|^2), and spectral
projectors P+- = (I +- H/s) / 2.  The shifted dispersion
d(xi) = (s(xi) - 1) / eps^2 is evaluated cancellation-free as
|xi|^2 / (s + 1), so it stays accurate down to eps = 0 and inherits the
bounds 0 <= d <= |xi|^2 / 2.  The free flow factorizes as

    exp(i t Q / eps^2) = e^{ i t/eps^2} e^{ i t d} P+
                       + e^{-i t/eps^2} e^{-i t d} P-

which is the only form used here (never the raw 1/eps^2 exponent on a
matrix), keeping all phases unimodular for any eps > 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.fft as sfft

from .errors import ConfigurationError, ShapeError

__all__ = [
    "SpatialGrid",
    "build_grid",
    "DiracSymbols",
    "dirac_symbols",
    "to_modes",
    "from_modes",
    "apply_mode_multiplier",
    "apply_projector_pair",
    "apply_free_flow",
    "apply_dirac_operator",
]


def _as_tuple(v, ndim: int | None = None) -> tuple:
    if np.isscalar(v):
        t = (v,)
    else:
        t = tuple(v)
    if ndim is not None and len(t) != ndim:
        raise ConfigurationError(f"expected {ndim} per-axis values, got {t!r}")
    return t


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform periodic grid on a box [lo, hi) in one or two dimensions.

    Derived fields are filled in by __post_init__: per-axis spacings ``dx``,
    node coordinates ``x`` (right endpoint excluded), wavenumbers ``xi`` in
    FFT order, and the full |xi|^2 mesh ``xi_sq`` of shape ``shape``.
    """

    lo: tuple[float, ...]
    hi: tuple[float, ...]
    shape: tuple[int, ...]
    dx: tuple[float, ...] = field(init=False, repr=False)
    x: tuple[np.ndarray, ...] = field(init=False, repr=False)
    xi: tuple[np.ndarray, ...] = field(init=False, repr=False)
    xi_sq: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or len(self.lo) != len(self.shape):
            raise ConfigurationError("lo, hi and shape must have equal length")
        if self.ndim not in (1, 2):
            raise ConfigurationError(f"only 1D and 2D grids supported, got {self.ndim}D")
        for a, b, n in zip(self.lo, self.hi, self.shape):
            if not b > a:
                raise ConfigurationError(f"domain edge hi={b} must exceed lo={a}")
            if n < 2 or n % 2 != 0:
                raise ConfigurationError(f"points per axis must be even and >= 2, got {n}")
        dx = tuple((b - a) / n for a, b, n in zip(self.lo, self.hi, self.shape))
        x = tuple(a + d * np.arange(n) for a, d, n in zip(self.lo, dx, self.shape))
        xi = tuple(2.0 * np.pi * np.fft.fftfreq(n, d=d) for n, d in zip(self.shape, dx))
        if self.ndim == 1:
            xi_sq = xi[0] ** 2
        else:
            xi_sq = xi[0][:, None] ** 2 + xi[1][None, :] ** 2
        object.__setattr__(self, "dx", dx)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "xi_sq", xi_sq)

    @property
    def ndim(self) -> int:
        return len(self.shape)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.dx))

    @property
    def num_points(self) -> int:
        return int(np.prod(self.shape))

    def meshes(self) -> tuple[np.ndarray, ...]:
        """Full coordinate arrays of shape ``shape``, for sampling fields."""
        if self.ndim == 1:
            return (self.x[0],)
        return tuple(np.meshgrid(self.x[0], self.x[1], indexing="ij"))

    def spatial_axes(self, arr: np.ndarray) -> tuple[int, ...]:
        return tuple(range(arr.ndim - self.ndim, arr.ndim))

    def check_spinor(self, arr: np.ndarray) -> None:
        """Raise ShapeError unless arr ends in (2, *shape)."""
        want = (2,) + self.shape
        if arr.ndim < len(want) or arr.shape[-len(want):] != want:
            raise ShapeError(f"spinor layout (..., 2, {self.shape}) expected, got {arr.shape}")


def build_grid(lo, hi, num) -> SpatialGrid:
    """Build a periodic grid; lo/hi scalars make a 1D grid, pairs make 2D.

    A scalar ``num`` is used for every axis.
    """
    lo_t = _as_tuple(lo)
    hi_t = _as_tuple(hi, len(lo_t))
    num_t = (num,) * len(lo_t) if np.isscalar(num) else _as_tuple(num, len(lo_t))
    return SpatialGrid(tuple(float(v) for v in lo_t),
                       tuple(float(v) for v in hi_t),
                       tuple(int(n) for n in num_t))


def to_modes(grid: SpatialGrid, arr: np.ndarray) -> np.ndarray:
    """Physical values -> amplitude-normalized mode coefficients."""
    return sfft.fftn(arr, axes=grid.spatial_axes(arr), norm="forward")


def from_modes(grid: SpatialGrid, arr: np.ndarray) -> np.ndarray:
    return sfft.ifftn(arr, axes=grid.spatial_axes(arr), norm="forward")


def apply_mode_multiplier(grid: SpatialGrid, fld: np.ndarray, symbol: np.ndarray) -> np.ndarray:
    """Apply a scalar Fourier multiplier; symbol has shape ``grid.shape``."""
    if symbol.shape != grid.shape:
        raise ShapeError(f"symbol shape {symbol.shape} does not match grid {grid.shape}")
    return from_modes(grid, symbol * to_modes(grid, fld))


@dataclass(frozen=True)
class DiracSymbols:
    """Per-mode spectral data of Q at a fixed eps on a fixed grid.

    ``s`` and ``d_eps`` are real arrays of shape ``grid.shape``; p11/p12/p22
    are the entries of the upper projector P+ (p21 = conj(p12), and
    P- = I - P+ follows from the same three arrays).
    """

    grid: SpatialGrid
    eps: float
    s: np.ndarray = field(repr=False)
    d_eps: np.ndarray = field(repr=False)
    p11: np.ndarray = field(repr=False)
    p12: np.ndarray = field(repr=False)
    p22: np.ndarray = field(repr=False)


def dirac_symbols(grid: SpatialGrid, eps: float) -> DiracSymbols:
    if not eps > 0.0:
        raise ConfigurationError(f"eps must be positive, got {eps}")
    s = np.sqrt(1.0 + (eps * eps) * grid.xi_sq)
    d_eps = grid.xi_sq / (s + 1.0)
    if grid.ndim == 1:
        w = eps * grid.xi[0].astype(complex)            # xi1 - i xi2, xi2 = 0
    else:
        w = eps * (grid.xi[0][:, None] - 1j * grid.xi[1][None, :])
    inv2s = 0.5 / s
    p11 = 0.5 + inv2s
    p22 = 0.5 - inv2s
    p12 = w * inv2s
    return DiracSymbols(grid, float(eps), s, d_eps, p11, p12, p22)


def _split_components(grid: SpatialGrid, arr: np.ndarray):
    ax = arr.ndim - grid.ndim - 1
    return np.take(arr, 0, axis=ax), np.take(arr, 1, axis=ax), ax


def apply_projector_pair(sym: DiracSymbols, fhat: np.ndarray,
                         coeff_plus, coeff_minus) -> np.ndarray:
    """Apply coeff_plus * P+ + coeff_minus * P- to mode coefficients.

    The coefficients are scalars or arrays broadcastable against the
    spatial mode axes (extra leading axes allowed, e.g. one multiplier
    per fast-phase node).  This one primitive realizes the free flow,
    the operator Q itself, and the phase-split conjugation operators of
    the two-scale layer.
    """
    sym.grid.check_spinor(fhat)
    f1, f2, ax = _split_components(sym.grid, fhat)
    diff = coeff_plus - coeff_minus
    out1 = (coeff_plus * sym.p11 + coeff_minus * sym.p22) * f1 + (diff * sym.p12) * f2
    out2 = (diff * np.conj(sym.p12)) * f1 + (coeff_plus * sym.p22 + coeff_minus * sym.p11) * f2
    return np.stack([out1, out2], axis=ax)


def apply_free_flow(sym: DiracSymbols, fld: np.ndarray, t: float,
                    sign: int = 1) -> np.ndarray:
    """exp(sign * i t Q / eps^2) applied in physical space.

    Uses the factored unimodular phases e^{+-i t/eps^2} e^{+-i t d(xi)} on
    the two branches; exact (to rounding) for every t and eps.
    """
    if sign not in (1, -1):
        raise ConfigurationError("sign must be +1 or -1")
    carrier = np.exp(sign * 1j * (t / (sym.eps * sym.eps)))
    branch = np.exp(sign * 1j * t * sym.d_eps)
    fhat = to_modes(sym.grid, fld)
    out = apply_projector_pair(sym, fhat, carrier * branch, np.conj(carrier * branch))
    return from_modes(sym.grid, out)


def apply_dirac_operator(sym: DiracSymbols, fld: np.ndarray) -> np.ndarray:
    """Q applied in physical space (branch values +-s(xi))."""
    fhat = to_modes(sym.grid, fld)
    return from_modes(sym.grid, apply_projector_pair(sym, fhat, sym.s, -sym.s))
