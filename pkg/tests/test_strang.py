"""Splitting reference: exactness on the free part, pointwise phase step,
second order on a driven problem."""

import numpy as np
import pytest

from tsdirac import apply_free_flow, build_grid, make_model, mass, run_reference
from tsdirac.strang import nonlinear_phase_step, strang_step

RNG = np.random.default_rng(6021023)


def gauss_datum(grid):
    x = grid.x[0]
    return np.stack([np.exp(-x * x / 2.0) + 0j,
                     np.exp(-(x - 1.0) ** 2 / 2.0) + 0j])


def driven_model(eps=0.5, nx=32):
    g = build_grid(-8.0, 8.0, nx)
    v = 0.4 * np.cos(2.0 * np.pi * (g.x[0] + 8.0) / 16.0)
    return make_model(g, eps, v, lam1=0.6, lam2=-0.2)


def test_strang_exact_on_free_flow():
    g = build_grid(-8.0, 8.0, 64)
    model = make_model(g, 0.3, np.zeros(g.shape))
    phi0 = gauss_datum(g)
    got = strang_step(model, phi0, 0.17)
    want = apply_free_flow(model.symbols, phi0, 0.17, sign=-1)
    assert np.max(np.abs(got - want)) <= 1e-12 * np.max(np.abs(want))


def test_phase_step_preserves_component_moduli():
    # V real and the coupling commutes with sigma3, so the inner substep
    # only rotates phases pointwise
    model = driven_model()
    phi = RNG.standard_normal((2, 32)) + 1j * RNG.standard_normal((2, 32))
    out = nonlinear_phase_step(model, phi, 0.4)
    assert np.max(np.abs(np.abs(out) - np.abs(phi))) <= 1e-13
    assert not np.allclose(out, phi)  # it did rotate


def test_strang_conserves_mass_to_rounding():
    model = driven_model()
    phi = gauss_datum(model.grid)
    m0 = mass(model.grid, phi)
    for _ in range(50):
        phi = strang_step(model, phi, 0.02)
    assert mass(model.grid, phi) == pytest.approx(m0, rel=1e-12)


def test_strang_second_order():
    model = driven_model()
    phi0 = gauss_datum(model.grid)
    ref = run_reference(model, phi0, 0.25, dt_ref=1.0 / 2560.0)
    errs = []
    for dt in (1.0 / 20.0, 1.0 / 40.0, 1.0 / 80.0):
        phi = run_reference(model, phi0, 0.25, dt_ref=dt)
        errs.append(np.max(np.abs(phi - ref)) / np.max(np.abs(ref)))
    slope = np.polyfit(np.log([20.0, 40.0, 80.0]), -np.log(errs), 1)[0]
    assert 1.7 <= slope <= 2.3, (errs, slope)
