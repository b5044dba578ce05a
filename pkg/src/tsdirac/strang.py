"""Strang-splitting reference integrator on the physical spinor.

Operator split: a half step of the pointwise potential/nonlinear flow, a
full step of the stiff free flow, another half step of the pointwise flow.
Both substeps are exact, so the only error is the splitting commutator.
The densities q and rho are invariant under the diagonal nonlinear flow,
which is why its phase rotation is exact; the magnetic substep is a 2x2
matrix exponential with (A . sigma)^2 = |A|^2 Id.

Accuracy degrades like dt^2 / eps^4: the reference is trustworthy for
moderate eps and should be driven with dt well below eps^2 (a warning is
emitted otherwise).  For small eps prefer a self-refined two-scale run.
"""

from __future__ import annotations

import logging

import numpy as np

from .errors import ConfigurationError
from .model import ModelSpec
from .spectral import apply_free_flow

__all__ = ["nonlinear_phase_step", "strang_step", "run_reference"]

log = logging.getLogger(__name__)


def nonlinear_phase_step(model: ModelSpec, phi: np.ndarray, dt: float) -> np.ndarray:
    """Exact flow of d phi/dt = -i (V + F(phi)) phi over dt (pointwise)."""
    f1, f2 = phi[0], phi[1]
    v = model.potential
    if model.variant == "nonlinear":
        n1 = np.abs(f1) ** 2
        n2 = np.abs(f2) ** 2
        q = model.lam1 * (n1 - n2)
        rho = model.lam2 * (n1 + n2)
        out = np.empty_like(phi)
        out[0] = np.exp(-1j * dt * (v + q + rho)) * f1
        out[1] = np.exp(-1j * dt * (v - q + rho)) * f2
        return out
    # linear magnetic: exp(-i dt V) exp(+i dt A.sigma)
    a = model.magnetic
    if model.grid.ndim == 1:
        a1, a2 = a[0], 0.0
        amag = np.abs(a[0])
    else:
        a1, a2 = a[0], a[1]
        amag = np.hypot(a[0], a[1])
    cosm = np.cos(dt * amag)
    sinc = dt * np.sinc(dt * amag / np.pi)  # sin(dt|A|)/|A|, safe at |A|=0
    out = np.empty_like(phi)
    out[0] = cosm * f1 + 1j * sinc * ((a1 - 1j * a2) * f2)
    out[1] = cosm * f2 + 1j * sinc * ((a1 + 1j * a2) * f1)
    phase = np.exp(-1j * dt * v)
    out[0] *= phase
    out[1] *= phase
    return out


def strang_step(model: ModelSpec, phi: np.ndarray, dt: float) -> np.ndarray:
    """One symmetric split step: half pointwise, full free flow, half pointwise."""
    phi = nonlinear_phase_step(model, phi, 0.5 * dt)
    phi = apply_free_flow(model.symbols, phi, dt, sign=-1)
    return nonlinear_phase_step(model, phi, 0.5 * dt)


def run_reference(model: ModelSpec, phi0: np.ndarray, t_end: float,
                  dt_ref: float = 1e-5) -> np.ndarray:
    """Integrate to t_end with fixed step dt_ref; returns the final spinor."""
    model.grid.check_spinor(phi0)
    if dt_ref <= 0.0 or t_end <= 0.0:
        raise ConfigurationError("dt_ref and t_end must be positive")
    n = int(round(t_end / dt_ref))
    if n < 1 or abs(n * dt_ref - t_end) > 1e-9 * max(1.0, abs(t_end)):
        raise ConfigurationError(f"dt_ref={dt_ref} does not divide t_end={t_end}")
    gate = model.eps * model.eps / 10.0
    if dt_ref > gate:
        log.warning("reference step %.3g exceeds eps^2/10 = %.3g; "
                    "splitting error may dominate", dt_ref, gate)
    phi = np.asarray(phi0, dtype=complex)
    for _ in range(n):
        phi = strang_step(model, phi, dt_ref)
    return phi
