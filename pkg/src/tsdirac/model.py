"""Equation data: potentials, nonlinearity, invariants, exact solutions.

The evolution solved in this package is

    i dPhi/dt = (1/eps^2) Q Phi + V(x) Phi + F(Phi) Phi

for a two-component spinor Phi, with Q from the spectral layer and a cubic
coupling F(Phi) = lam1 (Phi* s3 Phi) s3 + lam2 |Phi|^2 I.  A second variant
replaces the cubic term by a linear magnetic coupling -sum_j A_j(x) s_j.
Everything downstream consumes these only through g(Phi) = -i (V + F(Phi)) Phi
and its first two directional derivatives.

The derivatives are Gateaux derivatives over the reals: the cubic term
involves conjugates, so g is not complex-differentiable, and directions must
not be rescaled by complex phases when comparing against difference
quotients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, ConsistencyError, ShapeError
from .spectral import DiracSymbols, SpatialGrid, apply_dirac_operator, dirac_symbols

__all__ = [
    "ModelSpec",
    "make_model",
    "g_eval",
    "dg_eval",
    "d2g_eval",
    "mass",
    "energy",
    "soliton_state",
    "sample_named_field",
    "NAMED_FIELDS",
]

VARIANTS = ("nonlinear", "linear_magnetic")


@dataclass(frozen=True)
class ModelSpec:
    """Grid, eps and coupling data for one concrete problem.

    ``potential`` is sampled on the grid; ``magnetic`` holds one sampled
    component per axis and is required exactly when variant is
    "linear_magnetic".  Symbols for the given eps are precomputed.
    """

    grid: SpatialGrid
    eps: float
    potential: np.ndarray
    lam1: float = 0.0
    lam2: float = 0.0
    magnetic: Optional[tuple[np.ndarray, ...]] = None
    variant: str = "nonlinear"
    symbols: DiracSymbols = field(init=False, repr=False)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigurationError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.potential.shape != self.grid.shape:
            raise ShapeError(f"potential shape {self.potential.shape} != grid {self.grid.shape}")
        if self.variant == "linear_magnetic":
            if self.magnetic is None or len(self.magnetic) != self.grid.ndim:
                raise ConfigurationError("linear_magnetic needs one magnetic component per axis")
            for a in self.magnetic:
                if a.shape != self.grid.shape:
                    raise ShapeError(f"magnetic shape {a.shape} != grid {self.grid.shape}")
            if self.lam1 != 0.0 or self.lam2 != 0.0:
                raise ConfigurationError("linear_magnetic variant has no cubic coupling")
        elif self.magnetic is not None:
            raise ConfigurationError("magnetic field only enters the linear_magnetic variant")
        object.__setattr__(self, "symbols", dirac_symbols(self.grid, self.eps))


def make_model(grid: SpatialGrid, eps: float, potential: np.ndarray,
               lam1: float = 0.0, lam2: float = 0.0,
               magnetic=None, variant: str = "nonlinear") -> ModelSpec:
    mag = None if magnetic is None else tuple(np.asarray(a, dtype=float) for a in magnetic)
    return ModelSpec(grid, float(eps), np.asarray(potential, dtype=float),
                     float(lam1), float(lam2), mag, variant)


def _components(grid: SpatialGrid, arr: np.ndarray):
    grid.check_spinor(arr)
    ax = arr.ndim - grid.ndim - 1
    return np.take(arr, 0, axis=ax), np.take(arr, 1, axis=ax), ax


def g_eval(model: ModelSpec, phi: np.ndarray) -> np.ndarray:
    """g(Phi) = -i (V + F(Phi)) Phi, batched over leading axes."""
    f1, f2, ax = _components(model.grid, phi)
    V = model.potential
    if model.variant == "nonlinear":
        q = np.abs(f1) ** 2 - np.abs(f2) ** 2
        rho = np.abs(f1) ** 2 + np.abs(f2) ** 2
        u1 = (V + model.lam1 * q + model.lam2 * rho) * f1
        u2 = (V - model.lam1 * q + model.lam2 * rho) * f2
    else:
        u1 = V * f1
        u2 = V * f2
        u1 = u1 - model.magnetic[0] * f2          # sigma1
        u2 = u2 - model.magnetic[0] * f1
        if model.grid.ndim == 2:
            u1 = u1 - model.magnetic[1] * (-1j * f2)   # sigma2
            u2 = u2 - model.magnetic[1] * (1j * f1)
    return -1j * np.stack([u1, u2], axis=ax)


def dg_eval(model: ModelSpec, phi: np.ndarray, v: np.ndarray) -> np.ndarray:
    """First real-linear derivative of g at phi in direction v."""
    if model.variant == "linear_magnetic":
        return g_eval(model, v)
    f1, f2, ax = _components(model.grid, phi)
    v1, v2, _ = _components(model.grid, v)
    q = np.abs(f1) ** 2 - np.abs(f2) ** 2
    rho = np.abs(f1) ** 2 + np.abs(f2) ** 2
    dq = 2.0 * np.real(np.conj(f1) * v1 - np.conj(f2) * v2)
    drho = 2.0 * np.real(np.conj(f1) * v1 + np.conj(f2) * v2)
    V = model.potential
    u1 = V * v1 + model.lam1 * (dq * f1 + q * v1) + model.lam2 * (drho * f1 + rho * v1)
    u2 = V * v2 + model.lam1 * (-dq * f2 - q * v2) + model.lam2 * (drho * f2 + rho * v2)
    return -1j * np.stack([u1, u2], axis=ax)


def d2g_eval(model: ModelSpec, phi: np.ndarray, v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Second real-bilinear derivative of g; symmetric in (v, w)."""
    if model.variant == "linear_magnetic":
        return np.zeros(np.broadcast_shapes(v.shape, w.shape), dtype=complex)
    f1, f2, ax = _components(model.grid, phi)
    v1, v2, _ = _components(model.grid, v)
    w1, w2, _ = _components(model.grid, w)
    dq_v = 2.0 * np.real(np.conj(f1) * v1 - np.conj(f2) * v2)
    dq_w = 2.0 * np.real(np.conj(f1) * w1 - np.conj(f2) * w2)
    dq_vw = 2.0 * np.real(np.conj(w1) * v1 - np.conj(w2) * v2)
    dr_v = 2.0 * np.real(np.conj(f1) * v1 + np.conj(f2) * v2)
    dr_w = 2.0 * np.real(np.conj(f1) * w1 + np.conj(f2) * w2)
    dr_vw = 2.0 * np.real(np.conj(w1) * v1 + np.conj(w2) * v2)
    u1 = model.lam1 * (dq_vw * f1 + dq_v * w1 + dq_w * v1) \
        + model.lam2 * (dr_vw * f1 + dr_v * w1 + dr_w * v1)
    u2 = -model.lam1 * (dq_vw * f2 + dq_v * w2 + dq_w * v2) \
        + model.lam2 * (dr_vw * f2 + dr_v * w2 + dr_w * v2)
    return -1j * np.stack([u1, u2], axis=ax)


def mass(grid: SpatialGrid, phi: np.ndarray) -> float:
    """Trapezoid-on-torus quadrature of |Phi|^2 (exact for band-limited data)."""
    grid.check_spinor(phi)
    return grid.cell_volume * float(np.sum(np.abs(phi) ** 2))


def energy(model: ModelSpec, phi: np.ndarray, imag_tol: float = 1e-10) -> float:
    """Conserved energy of the evolution; errors out if the quadrature
    develops an imaginary residue beyond ``imag_tol`` (relative)."""
    grid = model.grid
    f1, f2, _ = _components(grid, phi)
    qphi = apply_dirac_operator(model.symbols, phi)
    quad = np.sum(np.conj(phi) * qphi) / (model.eps * model.eps)
    dens1 = np.abs(f1) ** 2
    dens2 = np.abs(f2) ** 2
    total = quad + np.sum(model.potential * (dens1 + dens2))
    if model.variant == "nonlinear":
        q = dens1 - dens2
        rho = dens1 + dens2
        total = total + 0.5 * model.lam1 * np.sum(q * q) + 0.5 * model.lam2 * np.sum(rho * rho)
    else:
        s1 = 2.0 * np.real(np.conj(f1) * f2)
        total = total - np.sum(model.magnetic[0] * s1)
        if grid.ndim == 2:
            s2 = 2.0 * np.imag(np.conj(f1) * f2)
            total = total - np.sum(model.magnetic[1] * s2)
    total = total * grid.cell_volume
    if abs(total.imag) > imag_tol * max(1.0, abs(total.real)):
        raise ConsistencyError(f"energy quadrature imaginary residue {total.imag:.3e}")
    return float(total.real)


def soliton_state(grid: SpatialGrid, lam1: float, omega: float,
                  x0: float = 0.0, speed: float = 0.0, t: float = 0.0) -> np.ndarray:
    """Boosted standing-wave solution of the 1D cubic equation at eps = 1.

    Exact for V = 0, lam2 = 0, lam1 < 0 on the whole line; on the periodic
    box it is exact up to the (exponentially small) tail wraparound.
    """
    if grid.ndim != 1:
        raise ConfigurationError("soliton_state is one-dimensional")
    if lam1 >= 0.0:
        raise ConfigurationError(f"soliton needs attractive coupling lam1 < 0, got {lam1}")
    if not 0.0 < omega <= 1.0:
        raise ConfigurationError(f"soliton frequency must lie in (0, 1], got {omega}")
    if not abs(speed) < 1.0:
        raise ConfigurationError(f"soliton speed must satisfy |v| < 1, got {speed}")
    x = grid.x[0]
    gam = 1.0 / np.sqrt(1.0 - speed * speed)
    xt = gam * ((x - x0) - speed * t)
    tt = gam * (t - speed * (x - x0))
    k = np.sqrt(1.0 - omega * omega)
    den = 1.0 + omega * np.cosh(2.0 * k * xt)
    amp_a = np.sqrt(-(2.0 / lam1) * (1.0 - omega * omega) * (1.0 + omega))
    amp_b = np.sqrt(-(2.0 / lam1) * (1.0 - omega * omega) * (1.0 - omega))
    a = amp_a * np.cosh(k * xt) / den
    b = amp_b * np.sinh(k * xt) / den
    phase = np.exp(-1j * omega * tt)
    up = a * phase
    dn = 1j * b * phase
    ca = np.sqrt((gam + 1.0) / 2.0)
    cb = np.sign(speed) * np.sqrt((gam - 1.0) / 2.0)
    return np.stack([ca * up + cb * dn, cb * up + ca * dn])


# ---------------------------------------------------------------------------
# Named closed-form fields used by the bundled experiment setups.

def _pot_rational_odd(grid):
    (x,) = grid.meshes()
    return (x - 1.0) / (x * x + 1.0)


def _pot_rational_neg(grid):
    (x,) = grid.meshes()
    return (1.0 - x) / (1.0 + x * x)


def _mag_rational_sq(grid):
    (x,) = grid.meshes()
    return (x + 1.0) ** 2 / (1.0 + x * x)


def _pot_cosine(grid):
    # single harmonic per axis: exactly periodic, no boundary seam
    out = 0.0
    for ax, x in enumerate(grid.meshes()):
        length = grid.hi[ax] - grid.lo[ax]
        out = out + 0.5 * np.cos(2.0 * np.pi * (x - grid.lo[ax]) / length)
    return out


def _pot_honeycomb(grid):
    x1, x2 = grid.meshes()
    k = 4.0 * np.pi / np.sqrt(3.0)
    return (np.cos(k * (-x1))
            + np.cos(k * (0.5 * x1 + 0.5 * np.sqrt(3.0) * x2))
            + np.cos(k * (0.5 * x1 - 0.5 * np.sqrt(3.0) * x2)))


def _gauss_pair(grid):
    (x,) = grid.meshes()
    return np.stack([np.exp(-x * x / 2.0) + 0j, np.exp(-((x - 1.0) ** 2) / 2.0) + 0j])


def _gauss_pair_wide(grid):
    (x,) = grid.meshes()
    return np.stack([np.exp(-x * x / 8.0) + 0j, np.exp(-((x - 1.0) ** 2) / 8.0) + 0j])


def _gauss_pair_narrow(grid):
    (x,) = grid.meshes()
    return np.stack([np.exp(-x * x / 2.0) + 0j, np.exp(-1.5 * (x - 1.0) ** 2) + 0j])


def _gauss_pair_2d(grid):
    x1, x2 = grid.meshes()
    r2 = x1 * x1 + x2 * x2
    return np.stack([np.exp(-r2 / 2.0) + 0j,
                     np.exp(-((x1 - 1.0) ** 2 + x2 * x2) / 2.0) + 0j])


NAMED_FIELDS: dict[str, Callable[[SpatialGrid], np.ndarray]] = {
    "pot_rational_odd": _pot_rational_odd,
    "pot_rational_neg": _pot_rational_neg,
    "mag_rational_sq": _mag_rational_sq,
    "pot_cosine": _pot_cosine,
    "pot_honeycomb": _pot_honeycomb,
    "gauss_pair": _gauss_pair,
    "gauss_pair_wide": _gauss_pair_wide,
    "gauss_pair_narrow": _gauss_pair_narrow,
    "gauss_pair_2d": _gauss_pair_2d,
}


def sample_named_field(name: str, grid: SpatialGrid) -> np.ndarray:
    try:
        fn = NAMED_FIELDS[name]
    except KeyError:
        raise ConfigurationError(f"unknown field {name!r}; known: {sorted(NAMED_FIELDS)}") from None
    return fn(grid)
