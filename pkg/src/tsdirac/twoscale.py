"""Augmented two-scale layer: fast-phase averaging and prepared initial data.

The stiff problem i dPhi/dt = (1/eps^2) Q Phi + ... is traded for an
augmented unknown U(t, tau, x), 2*pi-periodic in the fast phase tau, solving

    dU/dt + (1/eps^2) dU/dtau = G(t, tau, U),
    G(t, tau, U) = C-(t, tau) g( C+(t, tau) U ),

where C+ = e^{-i tau} e^{-i t D} P+ + e^{i tau} e^{i t D} P- splits off the
carrier phase on the two dispersion branches and C- is its conjugate
(C- C+ = Id).  The original solution is recovered on the diagonal
tau = t/eps^2.  Arrays here carry the tau axis first: nodal fields have
shape (n_tau, 2, n1[, n2]); modal fields use FFT mode ordering along axis 0
with amplitude normalization (mode coefficients, not sums).

Averaging operators act modally: Pi keeps mode 0, A multiplies mode l != 0
by 1/(i l) and zeroes mode 0, A^p uses (i l)^{-p}.  On tau-independent
input the output of G carries only even tau-modes: the inner C+ makes modes
+-1, a cubic map of those stays odd, and the outer C- shifts by +-1 again.

The smooth part Ubar of U = Ubar + eps^2 h1 + eps^4 h2 + eps^6 h3 obeys
corrections h_l built from G and its derivatives at t = 0, where the
t-dependence of C+- reduces to inserting -+ i d(xi) (branch-wise) per
t-derivative.  Fourth-order initial data U0 comes from three fixed-point
sweeps of Ubar followed by adding the corrections back; by construction
U0 at tau = 0 reproduces the physical initial datum exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import scipy.fft as sfft

from .errors import ConfigurationError, ShapeError
from .model import ModelSpec, d2g_eval, dg_eval, g_eval
from .spectral import apply_projector_pair, from_modes, to_modes

__all__ = [
    "TauGrid",
    "tau_modal",
    "tau_nodal",
    "tau_average",
    "tau_inverse_power",
    "lift",
    "g_big",
    "g_big_derivative",
    "chapman_enskog_h",
    "preparation_level",
    "prepare_initial_data",
]

H3Reading = Literal["composition", "bilinear"]


@dataclass(frozen=True)
class TauGrid:
    """Uniform fast-phase grid: nodes 2 pi k / n on [0, 2 pi), FFT modes."""

    n: int
    nodes: np.ndarray = field(init=False, repr=False)
    modes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 4 or self.n % 2 != 0:
            raise ConfigurationError(f"tau grid size must be even and >= 4, got {self.n}")
        object.__setattr__(self, "nodes", 2.0 * np.pi * np.arange(self.n) / self.n)
        object.__setattr__(self, "modes", np.fft.fftfreq(self.n, d=1.0 / self.n).astype(int))


def _check_tau(tau: TauGrid, arr: np.ndarray) -> None:
    if arr.ndim < 1 or arr.shape[0] != tau.n:
        raise ShapeError(f"leading tau axis of length {tau.n} expected, got {arr.shape}")


def tau_modal(tau: TauGrid, nodal: np.ndarray) -> np.ndarray:
    _check_tau(tau, nodal)
    return sfft.fft(nodal, axis=0, norm="forward")


def tau_nodal(tau: TauGrid, modal: np.ndarray) -> np.ndarray:
    _check_tau(tau, modal)
    return sfft.ifft(modal, axis=0, norm="forward")


def tau_average(tau: TauGrid, nodal: np.ndarray) -> np.ndarray:
    """Pi: the mode-0 coefficient, i.e. the node average; drops the tau axis."""
    _check_tau(tau, nodal)
    return np.mean(nodal, axis=0)


def tau_inverse_power(tau: TauGrid, nodal: np.ndarray, power: int = 1) -> np.ndarray:
    """A^power: modal multiplication by (i l)^{-power}, mode 0 zeroed."""
    if power < 1:
        raise ConfigurationError("power must be >= 1")
    mul = np.zeros(tau.n, dtype=complex)
    nz = tau.modes != 0
    mul[nz] = (1j * tau.modes[nz]) ** (-power)
    shape = (tau.n,) + (1,) * (nodal.ndim - 1)
    return tau_nodal(tau, mul.reshape(shape) * tau_modal(tau, nodal))


def lift(tau: TauGrid, fld: np.ndarray) -> np.ndarray:
    """Broadcast a tau-independent field onto the tau nodes (view)."""
    return np.broadcast_to(fld, (tau.n,) + fld.shape)


def _shaped(tau: TauGrid, vec: np.ndarray, ndim_rest: int) -> np.ndarray:
    return vec.reshape((tau.n,) + (1,) * ndim_rest)


def _apply_c(model: ModelSpec, tau: TauGrid, t: float, fld: np.ndarray,
             conj_side: bool, insert: np.ndarray | None = None) -> np.ndarray:
    """Apply C+ (conj_side=False) or C- (True) at time t, nodal in/out.

    ``insert`` multiplies the plus branch and its conjugate the minus
    branch, realizing t-derivatives of the operator (insert = (-i d)^m).
    """
    sym = model.symbols
    nd = model.grid.ndim  # coefficients act on component arrays (n_tau, *modes)
    em = _shaped(tau, np.exp(-1j * tau.nodes), nd)
    ep = _shaped(tau, np.exp(1j * tau.nodes), nd)
    branch = np.exp(-1j * t * sym.d_eps) if t != 0.0 else 1.0
    plus = em * branch
    minus = ep * np.conj(branch)
    if insert is not None:
        plus = plus * insert
        minus = minus * np.conj(insert)
    if conj_side:
        # C- carries the conjugate coefficient on each branch
        plus, minus = np.conj(plus), np.conj(minus)
    fhat = to_modes(model.grid, fld)
    return from_modes(model.grid, apply_projector_pair(sym, fhat, plus, minus))


def g_big(model: ModelSpec, tau: TauGrid, t: float, u_nodal: np.ndarray) -> np.ndarray:
    """G(t, tau, U) on the tau nodes."""
    _check_tau(tau, u_nodal)
    w = _apply_c(model, tau, t, u_nodal, conj_side=False)
    return _apply_c(model, tau, t, g_eval(model, w), conj_side=True)


_DERIVS = ("dt", "du", "du2", "dtdu", "dt2")


def g_big_derivative(model: ModelSpec, tau: TauGrid, u_nodal: np.ndarray,
                     which: str, *directions: np.ndarray) -> np.ndarray:
    """Derivatives of G at t = 0 in t and/or the field argument.

    which: "dt" (no direction), "du" (v), "du2" (v, w), "dtdu" (v),
    "dt2" (no direction).  Directions are real-linear, tau-nodal.
    Only t = 0 is supported: there the operator derivatives collapse to
    branch insertions of -+ i d(xi), which is all the correction formulas
    need.
    """
    if which not in _DERIVS:
        raise ConfigurationError(f"which must be one of {_DERIVS}, got {which!r}")
    want = {"dt": 0, "du": 1, "du2": 2, "dtdu": 1, "dt2": 0}[which]
    if len(directions) != want:
        raise ConfigurationError(f"{which} takes {want} direction(s), got {len(directions)}")
    d = model.symbols.d_eps
    ins1 = -1j * d
    ins2 = -d * d

    def cp(f, insert=None):
        return _apply_c(model, tau, 0.0, f, conj_side=False, insert=insert)

    def cm(f, insert=None):
        return _apply_c(model, tau, 0.0, f, conj_side=True, insert=insert)

    phi = cp(u_nodal)
    if which == "du":
        (v,) = directions
        return cm(dg_eval(model, phi, cp(v)))
    if which == "du2":
        v, w = directions
        return cm(d2g_eval(model, phi, cp(v), cp(w)))
    if which == "dt":
        return cm(g_eval(model, phi), insert=ins1) + cm(dg_eval(model, phi, cp(u_nodal, ins1)))
    if which == "dtdu":
        (v,) = directions
        cpv = cp(v)
        return (cm(dg_eval(model, phi, cpv), insert=ins1)
                + cm(d2g_eval(model, phi, cp(u_nodal, ins1), cpv))
                + cm(dg_eval(model, phi, cp(v, ins1))))
    # dt2
    du1 = cp(u_nodal, ins1)
    return (cm(g_eval(model, phi), insert=ins2)
            + 2.0 * cm(dg_eval(model, phi, du1), insert=ins1)
            + cm(d2g_eval(model, phi, du1, du1))
            + cm(dg_eval(model, phi, cp(u_nodal, ins2))))


def chapman_enskog_h(model: ModelSpec, tau: TauGrid, ubar: np.ndarray,
                     level: int, h3_mixed_term: H3Reading = "composition") -> np.ndarray:
    """Correction h_level(0, tau, ubar) on the tau nodes.

    ``ubar`` is a single tau-independent spinor field.  Every returned
    level is an A-image, so its tau average vanishes (to rounding).

    The h3 assembly is a ten-term expansion; its one ambiguous term (a
    first derivative of G meeting a pair of arguments, which admits two
    type-correct readings) is implemented by default as the composition
    -A^2 duG(Pi[duG(AG)]), which is also what re-deriving the hierarchy
    from h = eps^2 (A G(Ubar + h) - L^{-1} dt h) produces via the eps^2
    correction to dUbar/dt.  Reading "bilinear" swaps in
    -A^2 d2uG(Pi[duG(AG)], AG) for comparison.
    """
    if level not in (1, 2, 3):
        raise ConfigurationError(f"level must be 1, 2 or 3, got {level}")
    if h3_mixed_term not in ("composition", "bilinear"):
        raise ConfigurationError(f"unknown h3 reading {h3_mixed_term!r}")
    model.grid.check_spinor(ubar)

    def A(f, p=1):
        return tau_inverse_power(tau, f, p)

    def avg(f):
        return lift(tau, tau_average(tau, f))

    def du(v):
        return g_big_derivative(model, tau, u, "du", v)

    def du2(v, w):
        return g_big_derivative(model, tau, u, "du2", v, w)

    u = lift(tau, ubar)
    G = g_big(model, tau, 0.0, u)
    h1 = A(G)
    if level == 1:
        return h1
    piG = avg(G)
    dtG = g_big_derivative(model, tau, u, "dt")
    h2 = A(du(h1)) - A(dtG, 2) - A(du(piG), 2)
    if level == 2:
        return h2
    du_h1 = du(h1)
    if h3_mixed_term == "composition":
        mixed = A(du(avg(du_h1)), 2)
    else:
        mixed = A(du2(avg(du_h1), h1), 2)
    return (A(du(h2))
            + 0.5 * A(du2(h1, h1))
            - A(g_big_derivative(model, tau, u, "dtdu", h1), 2)
            - A(du2(piG, h1), 2)
            - A(du(A(dtG)), 2)
            - A(du(A(du(piG))), 2)
            - mixed
            + A(g_big_derivative(model, tau, u, "dt2"), 3)
            + 2.0 * A(g_big_derivative(model, tau, u, "dtdu", piG), 3)
            + A(du2(piG, piG), 3)
            + A(du(avg(dtG)), 3)
            + A(du(avg(du(piG))), 3))


def preparation_level(model: ModelSpec, tau: TauGrid, phi0: np.ndarray,
                      h3_mixed_term: H3Reading = "composition") -> int:
    """Number of correction levels (0..3) the eps^2 expansion supports.

    The corrections form an asymptotic series in eps^2; outside the
    small-eps regime its terms grow and adding them inflates the datum
    (and with it the stiffness seen by the stepper) instead of improving
    it.  Standard optimal truncation: keep level 1 only if its max-norm
    does not exceed the profile's own, and each further level only while
    the term norms keep shrinking.
    """
    model.grid.check_spinor(phi0)
    e2 = model.eps * model.eps
    last = float(np.max(np.abs(phi0)))
    for level, scale in ((1, e2), (2, e2 * e2), (3, e2 * e2 * e2)):
        term = scale * np.max(np.abs(
            chapman_enskog_h(model, tau, phi0, level, h3_mixed_term)))
        if not term < last:
            return level - 1
        last = term
    return 3


def prepare_initial_data(model: ModelSpec, tau: TauGrid, phi0: np.ndarray,
                         h3_mixed_term: H3Reading = "composition") -> np.ndarray:
    """Fourth-order well-prepared two-scale initial datum U0(tau, x), nodal.

    Up to three sweeps refine the smooth part against corrections
    evaluated on earlier iterates (each sweep gains eps^2 in accuracy);
    the returned field adds the corrections back, so the tau = 0 slice
    telescopes to phi0 exactly and the stepper starts consistent with the
    original problem.  The number of levels actually used follows
    preparation_level, so far outside the small-eps regime the datum
    degrades gracefully toward the plain lift of phi0.
    """
    model.grid.check_spinor(phi0)
    e2 = model.eps * model.eps
    e4, e6 = e2 * e2, e2 * e2 * e2
    level = preparation_level(model, tau, phi0, h3_mixed_term)

    if level == 0:
        return np.array(lift(tau, phi0.astype(complex)))
    h1_of_0 = chapman_enskog_h(model, tau, phi0, 1, h3_mixed_term)
    if level == 1:
        correction = e2 * h1_of_0
        return lift(tau, phi0 - correction[0]) + correction
    ub1 = phi0 - e2 * h1_of_0[0]
    h1_of_1 = chapman_enskog_h(model, tau, ub1, 1, h3_mixed_term)
    h2_of_0 = chapman_enskog_h(model, tau, phi0, 2, h3_mixed_term)
    if level == 2:
        correction = e2 * h1_of_1 + e4 * h2_of_0
        return lift(tau, phi0 - correction[0]) + correction
    ub2 = phi0 - (e2 * h1_of_1[0] + e4 * h2_of_0[0])
    h1_of_2 = chapman_enskog_h(model, tau, ub2, 1, h3_mixed_term)
    h2_of_1 = chapman_enskog_h(model, tau, ub1, 2, h3_mixed_term)
    h3_of_0 = chapman_enskog_h(model, tau, phi0, 3, h3_mixed_term)
    correction = e2 * h1_of_2 + e4 * h2_of_1 + e6 * h3_of_0
    ub3 = phi0 - correction[0]
    return lift(tau, ub3) + correction
