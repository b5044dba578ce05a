"""phi-functions on the imaginary axis and the two exponential tableaux.

phi_rho(z) = int_0^1 theta^{rho-1} e^{(1-theta) z} / (rho-1)! dtheta, so
phi_0 = e^z, phi_rho(0) = 1/rho!, and (phi_rho(z) - 1/rho!) / z =
phi_{rho+1}(z).  Arguments here are always i*Theta*dt, purely imaginary, so
|e^z| = 1 and no scaling-and-squaring is needed: a 30-term Taylor sum below
|z| = 0.1 and the upward recurrence from e^z elsewhere cover the axis.

Two tableaux are built on top:

* ``sep_ts4``: three stages, nodes c = (1, 1/2, 0), symmetric and
  diagonally implicit through its first two stages (a_1k = b_k, a_3k = 0).
  How the nodes are pinned down: requiring the stiff residuals
  Psi_2 = Psi_3 = 0 with the weights b_j(z) used below forces exactly
  this c, which also satisfies c_rho = 1 - c_{s+1-rho}.
* ``eep_ts4``: five stages, nodes c = (0, 1/2, 1/2, 1, 1/2), explicit.
  The default "classical" variant uses a52 = phi_{2,5}/2 - phi_{3,4}
  + phi_{2,4}/4 - phi_{3,5}/2 and a54 = phi_{2,5}/4 - a52, which keeps
  the stiff residuals Psi_2 = Psi_3 = 0; the "literal" variant swaps in
  the superficially similar pair phi_{2,4}/2 and phi_5(z/2) and is kept
  only for comparison (it degrades the observed order; see tests).

Order residuals Psi_rho(z) = phi_rho(z) - sum_j b_j(z) c_j^{rho-1}/(rho-1)!
vanish identically for rho <= 3 on sep_ts4; Psi_4 vanishes at z = 0 but not
identically: Psi_4(z) = (e^z (1 - z/2 + z^2/12) - (1 + z/2 + z^2/12)) / z^4,
e.g. Psi_4(1) = (7e - 19)/12 ~ 2.33e-3.  The convergence suite shows the
scheme is nonetheless fourth order on the oscillatory systems it targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "phi_eval",
    "Tableau",
    "build_tableau",
    "SCHEMES",
    "order_residuals",
    "stage_order_residuals",
    "symmetry_defects",
]

TAYLOR_CUTOFF = 0.1
TAYLOR_TERMS = 30


def phi_eval(rho_max: int, z) -> np.ndarray:
    """phi_0..phi_rho_max at z; returns shape (rho_max+1,) + z.shape.

    Vectorized over complex z; the Taylor branch handles |z| below
    TAYLOR_CUTOFF (including 0), the recurrence branch everything else.
    """
    if rho_max < 0:
        raise ConfigurationError("rho_max must be >= 0")
    z = np.asarray(z, dtype=complex)
    out = np.empty((rho_max + 1,) + z.shape, dtype=complex)
    small = np.abs(z) < TAYLOR_CUTOFF
    zs = np.where(small, z, 0.0)        # keep the Taylor branch finite everywhere
    zb = np.where(small, 1.0, z)        # avoid 0-division in the recurrence branch
    out[0] = np.where(small, np.exp(zs), np.exp(z))
    taylor = np.empty_like(out)
    for rho in range(1, rho_max + 1):
        acc = np.zeros_like(zs)
        for m in range(TAYLOR_TERMS - 1, -1, -1):
            acc = acc * zs + 1.0 / math.factorial(m + rho)
        taylor[rho] = acc
    rec = out[0]
    for rho in range(1, rho_max + 1):
        rec = (rec - 1.0 / math.factorial(rho - 1)) / zb
        out[rho] = np.where(small, taylor[rho], rec)
    return out


@dataclass(frozen=True)
class Tableau:
    """One exponential Runge-Kutta scheme with z-dependent coefficients.

    ``a(z)`` returns shape (s, s) + z.shape, ``b(z)`` shape (s,) + z.shape.
    ``coupled`` lists the stage indices that must be solved together when
    the scheme is not explicit (empty for explicit schemes).
    """

    name: str
    nodes: tuple[float, ...]
    explicit: bool
    symmetric: bool
    coupled: tuple[int, ...]
    a: Callable[[np.ndarray], np.ndarray]
    b: Callable[[np.ndarray], np.ndarray]

    @property
    def stages(self) -> int:
        return len(self.nodes)


def _sep_b(z: np.ndarray) -> np.ndarray:
    ph = phi_eval(3, z)
    return np.stack([
        4.0 * ph[3] - ph[2],
        4.0 * ph[2] - 8.0 * ph[3],
        ph[1] - 3.0 * ph[2] + 4.0 * ph[3],
    ])


def _sep_a(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    ph2 = phi_eval(3, 0.5 * z)
    zero = np.zeros_like(z)
    row1 = _sep_b(z)
    row2 = np.stack([
        -0.25 * ph2[2] + 0.5 * ph2[3],
        ph2[2] - ph2[3],
        0.5 * ph2[1] - 0.75 * ph2[2] + 0.5 * ph2[3],
    ])
    row3 = np.stack([zero, zero, zero])
    return np.stack([row1, row2, row3])


def _eep_b(z: np.ndarray) -> np.ndarray:
    ph = phi_eval(3, z)
    zero = np.zeros_like(np.asarray(z, dtype=complex))
    return np.stack([
        ph[1] - 3.0 * ph[2] + 4.0 * ph[3],
        zero,
        zero,
        -ph[2] + 4.0 * ph[3],
        4.0 * ph[2] - 8.0 * ph[3],
    ])


def _eep_a_factory(literal: bool):
    def _eep_a(z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        rho_half = 5 if literal else 3
        ph_h = phi_eval(rho_half, 0.5 * z)      # nodes 2, 3, 5 sit at z/2
        ph_f = phi_eval(3, z)                   # node 4 sits at z
        zero = np.zeros_like(z)
        a21 = 0.5 * ph_h[1]
        a31 = 0.5 * ph_h[1] - ph_h[2]
        a32 = ph_h[2]
        a41 = ph_f[1] - 2.0 * ph_f[2]
        a42 = ph_f[2]
        if literal:
            a52 = 0.5 * ph_h[2] - ph_f[3] + 0.5 * ph_f[2] - 0.5 * ph_h[3]
            a54 = 0.25 * ph_h[2] - ph_h[5]
        else:
            a52 = 0.5 * ph_h[2] - ph_f[3] + 0.25 * ph_f[2] - 0.5 * ph_h[3]
            a54 = 0.25 * ph_h[2] - a52
        a51 = 0.5 * ph_h[1] - 2.0 * a52 - a54
        rows = [
            [zero, zero, zero, zero, zero],
            [a21, zero, zero, zero, zero],
            [a31, a32, zero, zero, zero],
            [a41, a42, a42, zero, zero],
            [a51, a52, a52, a54, zero],
        ]
        return np.stack([np.stack(r) for r in rows])
    return _eep_a


SCHEMES = ("sep_ts4", "eep_ts4")


def build_tableau(scheme: str, variant: str = "classical") -> Tableau:
    """Build one of the two bundled schemes.

    ``variant`` selects between the "classical" (default) and "literal"
    readings of the two ambiguous eep_ts4 entries; it is ignored for
    sep_ts4, whose coefficients are unambiguous.
    """
    if variant not in ("classical", "literal"):
        raise ConfigurationError(f"variant must be classical|literal, got {variant!r}")
    if scheme == "sep_ts4":
        return Tableau("sep_ts4", (1.0, 0.5, 0.0), explicit=False, symmetric=True,
                       coupled=(0, 1), a=_sep_a, b=_sep_b)
    if scheme == "eep_ts4":
        return Tableau("eep_ts4", (0.0, 0.5, 0.5, 1.0, 0.5), explicit=True,
                       symmetric=False, coupled=(),
                       a=_eep_a_factory(variant == "literal"), b=_eep_b)
    raise ConfigurationError(f"unknown scheme {scheme!r}; known: {SCHEMES}")


def order_residuals(tab: Tableau, z, rho_max: int = 4) -> np.ndarray:
    """Psi_rho(z) for rho = 1..rho_max; shape (rho_max,) + z.shape."""
    z = np.asarray(z, dtype=complex)
    ph = phi_eval(rho_max, z)
    bw = tab.b(z)
    c = np.asarray(tab.nodes)
    out = np.empty((rho_max,) + z.shape, dtype=complex)
    for rho in range(1, rho_max + 1):
        mom = sum(bw[j] * c[j] ** (rho - 1) for j in range(tab.stages))
        out[rho - 1] = ph[rho] - mom / math.factorial(rho - 1)
    return out


def stage_order_residuals(tab: Tableau, z, rho_max: int = 3) -> np.ndarray:
    """Psi_{rho,j}(z); shape (rho_max, s) + z.shape."""
    z = np.asarray(z, dtype=complex)
    c = np.asarray(tab.nodes)
    am = tab.a(z)
    out = np.empty((rho_max, tab.stages) + z.shape, dtype=complex)
    for j in range(tab.stages):
        ph_j = phi_eval(rho_max, c[j] * z)
        for rho in range(1, rho_max + 1):
            mom = sum(am[j, k] * c[k] ** (rho - 1) for k in range(tab.stages))
            out[rho - 1, j] = ph_j[rho] * c[j] ** rho - mom / math.factorial(rho - 1)
    return out


def symmetry_defects(tab: Tableau, z) -> float:
    """Max deviation from the three time-symmetry conditions at samples z.

    Conditions: c_rho = 1 - c_{s+1-rho};  b_rho(z) = e^z b_{s+1-rho}(-z);
    a_{j,rho}(z) = e^{c_j z} b_{s+1-rho}(-z) - a_{s+1-j, s+1-rho}(-z).
    """
    z = np.asarray(z, dtype=complex)
    s = tab.stages
    c = np.asarray(tab.nodes)
    worst = float(np.max(np.abs(c + c[::-1] - 1.0)))
    bp, bm = tab.b(z), tab.b(-z)
    ap, am = tab.a(z), tab.a(-z)
    ez = np.exp(z)
    for rho in range(s):
        worst = max(worst, float(np.max(np.abs(bp[rho] - ez * bm[s - 1 - rho]))))
        for j in range(s):
            lhs = ap[j, rho]
            rhs = np.exp(c[j] * z) * bm[s - 1 - rho] - am[s - 1 - j, s - 1 - rho]
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst
