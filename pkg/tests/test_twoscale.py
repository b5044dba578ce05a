"""Fast-phase layer: averaging operators, G, corrections, prepared data.

The G oracle rebuilds C- g(C+ .) from per-mode eigendecompositions of the
2x2 symbol matrix (numpy eigh), sharing no code with the projector-pair
primitive the implementation routes through.  Derivatives of G are checked
against central differences; the prepared datum against its defining
diagonal property U0(tau=0) = Phi0.
"""

import numpy as np
import pytest

from tsdirac import ConfigurationError, ShapeError, build_grid, g_eval, make_model
from tsdirac.twoscale import (
    TauGrid,
    chapman_enskog_h,
    g_big,
    g_big_derivative,
    lift,
    prepare_initial_data,
    preparation_level,
    tau_average,
    tau_inverse_power,
    tau_modal,
    tau_nodal,
)

RNG = np.random.default_rng(515)


def small_model(eps=0.5, nx=32, lam1=0.8, lam2=-0.3):
    g = build_grid(-8.0, 8.0, nx)
    v = 0.4 * np.cos(2.0 * np.pi * (g.x[0] + 8.0) / 16.0)
    return make_model(g, eps, v, lam1=lam1, lam2=lam2)


def random_u(tau, grid):
    shape = (tau.n, 2) + grid.shape
    return RNG.standard_normal(shape) + 1j * RNG.standard_normal(shape)


def g_big_oracle(model, tau, t, u_nodal):
    """C-(t,tau) g(C+(t,tau) u) from eigh-built branch projectors."""
    grid, eps = model.grid, model.eps
    xi = grid.xi[0]
    mats = np.zeros(grid.shape + (2, 2), dtype=complex)
    mats[..., 0, 0] = 1.0
    mats[..., 0, 1] = eps * xi
    mats[..., 1, 0] = eps * xi
    mats[..., 1, 1] = -1.0
    vals, vecs = np.linalg.eigh(mats)
    proj = {}
    for name, keep in (("plus", vals > 0), ("minus", vals < 0)):
        proj[name] = (vecs * keep[..., None, :]) @ np.swapaxes(np.conj(vecs), -1, -2)
    d = (np.sqrt(1.0 + eps * eps * xi * xi) - 1.0) / (eps * eps)

    def apply_c(fld, conj_side):
        cp = np.exp(-1j * tau.nodes)[:, None] * np.exp(-1j * t * d)[None, :]
        cm = np.conj(cp)
        if conj_side:
            cp, cm = cm, cp
        fhat = np.fft.fft(fld, axis=-1, norm="forward")
        comp = np.moveaxis(fhat, -2, -1)[..., None]
        out = (cp[..., None, None] * proj["plus"]
               + cm[..., None, None] * proj["minus"]) @ comp
        out = np.moveaxis(out[..., 0], -1, -2)
        return np.fft.ifft(out, axis=-1, norm="forward")

    return apply_c(g_eval(model, apply_c(u_nodal, False)), True)


# ---------------------------------------------------------------------------
# averaging operators


def test_tau_modal_roundtrip():
    tau = TauGrid(16)
    u = RNG.standard_normal((16, 2, 4)) + 1j * RNG.standard_normal((16, 2, 4))
    back = tau_nodal(tau, tau_modal(tau, u))
    assert np.max(np.abs(back - u)) <= 1e-13


def test_tau_average_and_inverse_on_harmonics():
    tau = TauGrid(32)
    base = np.exp(3j * tau.nodes)[:, None, None] * np.ones((1, 2, 4))
    mean = np.full((32, 2, 4), 0.7 + 0.2j)
    avg = tau_average(tau, base + mean)
    assert np.max(np.abs(avg - (0.7 + 0.2j))) <= 1e-13
    inv1 = tau_inverse_power(tau, base + mean, power=1)
    assert np.max(np.abs(inv1 - base / 3j)) <= 1e-13
    inv2 = tau_inverse_power(tau, base + mean, power=2)
    assert np.max(np.abs(inv2 - base / (3j) ** 2)) <= 1e-13


def test_lift_broadcasts():
    tau = TauGrid(8)
    fld = RNG.standard_normal((2, 5))
    up = lift(tau, fld)
    assert up.shape == (8, 2, 5)
    assert np.all(up[3] == fld)


# ---------------------------------------------------------------------------
# the averaged field G


@pytest.mark.parametrize("t", [0.0, 0.37])
def test_g_big_matches_eigh_oracle(t):
    model = small_model()
    tau = TauGrid(8)
    u = random_u(tau, model.grid)
    got = g_big(model, tau, t, u)
    want = g_big_oracle(model, tau, t, u)
    assert np.max(np.abs(got - want)) <= 1e-12 * np.max(np.abs(want))


def test_g_big_even_harmonics_on_flat_input():
    # tau-independent input: inner C+ makes modes +-1, the cubic map keeps
    # them odd, the outer C- shifts by +-1 again -> only even modes survive
    model = small_model()
    tau = TauGrid(16)
    u = lift(tau, RNG.standard_normal((2, 32)) + 1j * RNG.standard_normal((2, 32)))
    modal = tau_modal(tau, g_big(model, tau, 0.0, np.array(u)))
    odd = modal[1::2]
    assert np.max(np.abs(odd)) <= 1e-13 * np.max(np.abs(modal))


def test_g_big_shape_mismatch_rejected():
    model = small_model()
    with pytest.raises(ShapeError):
        g_big(model, TauGrid(8), 0.0, random_u(TauGrid(16), model.grid))


@pytest.mark.parametrize("which", ["dt", "du", "du2", "dtdu", "dt2"])
def test_g_big_derivatives_match_finite_differences(which):
    model = small_model()
    tau = TauGrid(8)
    u = random_u(tau, model.grid)
    v = random_u(tau, model.grid)
    w = random_u(tau, model.grid)
    h = 1e-5

    def G(t, uu):
        return g_big(model, tau, t, uu)

    if which == "dt":
        got = g_big_derivative(model, tau, u, "dt")
        want = (G(h, u) - G(-h, u)) / (2 * h)
    elif which == "du":
        got = g_big_derivative(model, tau, u, "du", v)
        want = (G(0.0, u + h * v) - G(0.0, u - h * v)) / (2 * h)
    elif which == "du2":
        got = g_big_derivative(model, tau, u, "du2", v, w)
        want = (G(0.0, u + h * (v + w)) - G(0.0, u + h * (v - w))
                - G(0.0, u - h * (v - w)) + G(0.0, u - h * (v + w))) / (4 * h * h)
    elif which == "dtdu":
        got = g_big_derivative(model, tau, u, "dtdu", v)
        want = (G(h, u + h * v) - G(h, u - h * v)
                - G(-h, u + h * v) + G(-h, u - h * v)) / (4 * h * h)
    else:
        got = g_big_derivative(model, tau, u, "dt2")
        want = (G(h, u) - 2.0 * G(0.0, u) + G(-h, u)) / (h * h)
    scale = np.max(np.abs(want))
    assert np.max(np.abs(got - want)) <= 2e-5 * scale


def test_g_big_derivative_rejects_unknown_kind():
    model = small_model()
    tau = TauGrid(8)
    with pytest.raises(ConfigurationError):
        g_big_derivative(model, tau, random_u(tau, model.grid), "du3")


# ---------------------------------------------------------------------------
# corrections and prepared data


@pytest.mark.parametrize("level", [1, 2, 3])
def test_corrections_are_mean_free(level):
    model = small_model(eps=0.1)
    tau = TauGrid(16)
    phi0 = RNG.standard_normal((2, 32)) + 1j * RNG.standard_normal((2, 32))
    h = chapman_enskog_h(model, tau, phi0, level)
    assert np.max(np.abs(tau_average(tau, h))) <= 1e-14 * np.max(np.abs(h))


def test_chapman_enskog_rejects_bad_level():
    model = small_model()
    tau = TauGrid(8)
    phi0 = np.zeros((2, 32), dtype=complex)
    with pytest.raises(ConfigurationError):
        chapman_enskog_h(model, tau, phi0, 4)


@pytest.mark.parametrize("eps", [1.0, 0.1, 0.01])
def test_prepared_data_hits_datum_on_the_diagonal(eps):
    model = small_model(eps=eps)
    tau = TauGrid(16)
    phi0 = np.asarray(np.exp(-model.grid.x[0] ** 2 / 2.0), dtype=complex)
    phi0 = np.stack([phi0, 0.5 * phi0])
    u0 = prepare_initial_data(model, tau, phi0)
    assert u0.shape == (16, 2, 32)
    assert np.max(np.abs(u0[0] - phi0)) <= 1e-13 * np.max(np.abs(phi0))


def test_preparation_level_drops_at_large_eps():
    # asymptotic series in eps^2: the truncation point must not increase
    # with eps on the same profile
    from tsdirac.experiments.config import ExperimentConfig, build_setup

    cfg = ExperimentConfig(problem="p1_nonlinear_1d", scheme="sep_ts4",
                           eps=(1.0,), dt=(0.1,))
    s = build_setup(cfg)
    tau = TauGrid(16)
    levels = [preparation_level(s.model_for(e), tau, s.phi0)
              for e in (1.0, 0.5, 0.1, 0.01)]
    assert levels == sorted(levels)
    assert levels[0] <= 1
    assert levels[-1] == 3


def test_preparation_is_immaterial_for_the_recovered_solution():
    # any U0 with U0(tau=0) = Phi0 yields the same Phi(t) under accurate
    # integration; preparation only shapes the error constants
    from tsdirac.stepper import run_simulation

    model = small_model(eps=0.5, lam1=0.5, lam2=0.2)
    x = model.grid.x[0]
    phi0 = np.stack([np.exp(-x * x / 2.0) + 0j, np.exp(-(x - 1.0) ** 2 / 2.0) + 0j])
    tau = TauGrid(32)
    prepared = run_simulation(model, tau, "sep_ts4", 1e-3, 0.1, phi0=phi0,
                              diag_stride=0)
    flat = run_simulation(model, tau, "sep_ts4", 1e-3, 0.1,
                          u0_nodal=np.array(lift(tau, phi0)), diag_stride=0)
    diff = np.max(np.abs(prepared.phi - flat.phi))
    assert diff <= 1e-9 * np.max(np.abs(prepared.phi))
