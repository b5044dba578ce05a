"""Operator layer: grids, symbols, projectors, free flow.

Oracles here are built from the per-mode 2x2 Hermitian matrix
M(xi) = [[1, w], [conj(w), -1]], w = eps*(xi1 - i*xi2), using plain numpy
eigendecompositions, independent of the closed-form projector entries the
implementation uses.
"""

import numpy as np
import pytest

from tsdirac import (
    ConfigurationError,
    ShapeError,
    apply_dirac_operator,
    apply_free_flow,
    apply_projector_pair,
    build_grid,
    dirac_symbols,
    from_modes,
    to_modes,
)

RNG = np.random.default_rng(20240817)


def random_spinor(grid):
    shape = (2,) + grid.shape
    return RNG.standard_normal(shape) + 1j * RNG.standard_normal(shape)


def mode_matrices(grid, eps):
    """M(xi) per mode, shape grid.shape + (2, 2)."""
    if grid.ndim == 1:
        w = eps * grid.xi[0].astype(complex)
    else:
        w = eps * (grid.xi[0][:, None] - 1j * grid.xi[1][None, :])
    m = np.empty(grid.shape + (2, 2), dtype=complex)
    m[..., 0, 0] = 1.0
    m[..., 0, 1] = w
    m[..., 1, 0] = np.conj(w)
    m[..., 1, 1] = -1.0
    return m


def apply_matrix_function(grid, eps, fld, fn):
    """IFFT( fn(M(xi)) @ fld_hat ) via eigendecomposition, the slow way."""
    mats = mode_matrices(grid, eps)
    vals, vecs = np.linalg.eigh(mats)
    fhat = np.fft.fftn(fld, axes=tuple(range(1, fld.ndim)), norm="forward")
    comp = np.moveaxis(fhat, 0, -1)[..., None]
    coef = np.swapaxes(np.conj(vecs), -1, -2) @ comp
    out = (vecs * fn(vals)[..., None, :]) @ coef
    out = np.moveaxis(out[..., 0], -1, 0)
    return np.fft.ifftn(out, axes=tuple(range(1, out.ndim)), norm="forward")


# ---------------------------------------------------------------------------
# grids


def test_build_grid_1d_nodes():
    g = build_grid(-4.0, 4.0, 16)
    assert g.ndim == 1 and g.shape == (16,)
    assert g.dx == (0.5,)
    assert g.x[0][0] == -4.0 and g.x[0][-1] == pytest.approx(3.5)


def test_build_grid_2d_scalar_num_broadcasts():
    g = build_grid((-1.0, -2.0), (1.0, 2.0), 8)
    assert g.shape == (8, 8)
    assert g.dx == (0.25, 0.5)


def test_build_grid_rejects_empty_axis():
    with pytest.raises(ConfigurationError):
        build_grid(-1.0, 1.0, 0)


def test_mode_roundtrip_and_parseval():
    g = build_grid(-4.0, 4.0, 32)
    f = random_spinor(g)
    fhat = to_modes(g, f)
    assert np.allclose(from_modes(g, fhat), f, atol=1e-13)
    # forward normalization: coefficients, so Parseval carries a 1/N
    assert np.sum(np.abs(fhat) ** 2) * g.shape[0] == pytest.approx(
        np.sum(np.abs(f) ** 2), rel=1e-12)


# ---------------------------------------------------------------------------
# symbols


@pytest.mark.parametrize("eps", [1.0, 1e-2, 1e-4])
def test_symbol_identities_and_bounds(eps):
    g = build_grid(-8.0, 8.0, 64)
    sym = dirac_symbols(g, eps)
    assert np.all(sym.s >= 1.0)
    assert np.allclose(sym.s ** 2, 1.0 + eps * eps * g.xi_sq, rtol=1e-14)
    # d_eps = (s - 1)/eps^2 without cancellation, bounded by |xi|^2 / 2
    assert np.allclose(sym.d_eps * (sym.s + 1.0), g.xi_sq, rtol=1e-13)
    assert np.all(sym.d_eps >= 0.0)
    assert np.all(sym.d_eps <= 0.5 * g.xi_sq + 1e-15)


def test_deps_approaches_half_laplacian_symbol():
    g = build_grid(-8.0, 8.0, 64)
    gap = float(np.max(np.abs(dirac_symbols(g, 1e-4).d_eps - 0.5 * g.xi_sq)))
    assert gap <= 1e-7 * (1.0 + float(np.max(g.xi_sq)) ** 2)


def test_dirac_symbols_rejects_bad_eps():
    g = build_grid(-1.0, 1.0, 8)
    with pytest.raises(ConfigurationError):
        dirac_symbols(g, 0.0)


# ---------------------------------------------------------------------------
# projectors


@pytest.mark.parametrize("eps", [1.0, 1e-2, 1e-4])
def test_projector_algebra(eps):
    g = build_grid(-6.0, 6.0, 48)
    sym = dirac_symbols(g, eps)
    f = random_spinor(g)
    fhat = to_modes(g, f)
    plus = apply_projector_pair(sym, fhat, 1.0, 0.0)
    minus = apply_projector_pair(sym, fhat, 0.0, 1.0)
    scale = np.max(np.abs(fhat))
    assert np.max(np.abs(plus + minus - fhat)) <= 1e-14 * scale
    again = apply_projector_pair(sym, plus, 1.0, 0.0)
    assert np.max(np.abs(again - plus)) <= 1e-14 * scale
    crossed = apply_projector_pair(sym, plus, 0.0, 1.0)
    assert np.max(np.abs(crossed)) <= 1e-14 * scale


def test_projectors_match_eigh_oracle_2d():
    g = build_grid((-2.0, -2.0), (2.0, 2.0), 12)
    eps = 0.3
    sym = dirac_symbols(g, eps)
    f = random_spinor(g)
    got = from_modes(g, apply_projector_pair(sym, to_modes(g, f), 1.0, 0.0))
    # P+ = (M + s)/(2s): select the +s eigenbranch
    want = apply_matrix_function(g, eps, f, lambda vals: (vals > 0).astype(float))
    assert np.max(np.abs(got - want)) <= 1e-12 * np.max(np.abs(f))


# ---------------------------------------------------------------------------
# operator and flow


@pytest.mark.parametrize("ndim", [1, 2])
def test_dirac_operator_matches_matrix_oracle(ndim):
    eps = 0.7
    g = build_grid(-3.0, 3.0, 24) if ndim == 1 else build_grid((-3.0,) * 2, (3.0,) * 2, 12)
    f = random_spinor(g)
    got = apply_dirac_operator(dirac_symbols(g, eps), f)
    want = apply_matrix_function(g, eps, f, lambda vals: vals)
    assert np.max(np.abs(got - want)) <= 1e-12 * np.max(np.abs(f))


@pytest.mark.parametrize("eps", [1.0, 1e-2, 1e-4])
def test_free_flow_unitary_group_inverse(eps):
    g = build_grid(-6.0, 6.0, 48)
    sym = dirac_symbols(g, eps)
    f = random_spinor(g)
    n0 = np.linalg.norm(f)
    a = apply_free_flow(sym, f, 0.37)
    assert np.linalg.norm(a) == pytest.approx(n0, rel=1e-12)
    b = apply_free_flow(sym, a, 0.21)
    ab = apply_free_flow(sym, f, 0.58)
    # carrier phase t/eps^2 loses absolute accuracy like phase * ulp, so the
    # composition identity degrades proportionally at small eps
    tol = (1e-11 + 100.0 * np.finfo(float).eps * 0.58 / eps ** 2) * np.max(np.abs(f))
    assert np.max(np.abs(b - ab)) <= tol
    back = apply_free_flow(sym, a, 0.37, sign=-1)
    assert np.max(np.abs(back - f)) <= 1e-11 * np.max(np.abs(f))


def test_free_flow_matches_eigh_oracle():
    g = build_grid(-3.0, 3.0, 24)
    eps, t = 0.5, 0.63
    f = random_spinor(g)
    got = apply_free_flow(dirac_symbols(g, eps), f, t)
    want = apply_matrix_function(g, eps, f,
                                 lambda vals: np.exp(1j * t * vals / eps ** 2))
    assert np.max(np.abs(got - want)) <= 1e-11 * np.max(np.abs(f))


def test_free_flow_rejects_bad_sign():
    g = build_grid(-1.0, 1.0, 8)
    sym = dirac_symbols(g, 1.0)
    with pytest.raises(ConfigurationError):
        apply_free_flow(sym, random_spinor(g), 0.1, sign=2)


def test_spinor_shape_checked():
    g = build_grid(-1.0, 1.0, 8)
    sym = dirac_symbols(g, 1.0)
    with pytest.raises(ShapeError):
        apply_dirac_operator(sym, np.zeros((3, 8), dtype=complex))
