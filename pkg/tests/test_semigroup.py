"""Stokes operator blocks, semigroup, phi-1, resolvent, spectrum."""

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from hydrostokes.basis import Grid, VerticalBasis
from hydrostokes.fields import SpectralField
from hydrostokes.projection import project_hydrostatic
from hydrostokes.sampling import random_field, single_mode_field
from hydrostokes.semigroup import SingularityError, StokesOperator, spectral_bound


# -- operator blocks ------------------------------------------------------


def test_vertical_block_origin_mode():
    op = StokesOperator(Grid(4, 1, 1.0))
    # xi = 0: pure vertical heat, eigenvalue -lambda_0^2 = -pi^2/4
    c = np.zeros((2, 4, 4, 1), dtype=complex)
    c[0, 0, 0, 0] = 1.0
    out = op.apply_A(SpectralField(c, op.grid))
    assert out.coeffs[0, 0, 0, 0] == pytest.approx(-np.pi**2 / 4, abs=1e-13)


def test_parallel_block_hand_value():
    # K=1, h=1, xi=(2 pi, 0): the rank-one correction R~_{00} = 2/sigma_1
    # cancels against itself and the block is exactly -4 pi^2
    grid = Grid(4, 1, 1.0)
    op = StokesOperator(grid)
    Mz = op.Mz
    assert Mz.shape == (1, 1)
    # R~_{00} = beta~_0 lambda_0 / h = pi^2/4 cancels -lambda_0^2
    assert Mz[0, 0] == pytest.approx(0.0, abs=1e-13)
    # parallel sine coefficient at xi=(2 pi, 0): c_par has eigenvalue -4 pi^2
    c = np.zeros((2, 4, 4, 1), dtype=complex)
    c[0, 1, 0, 0] = 1.0
    c[0, -1, 0, 0] = 1.0
    out = op.apply_A(SpectralField(c, grid))
    assert out.coeffs[0, 1, 0, 0] == pytest.approx(-4 * np.pi**2, abs=1e-11)


def test_rank_one_correction_brute_force():
    grid = Grid(4, 8, 0.7)
    op = StokesOperator(grid)
    basis = VerticalBasis(grid)
    R = np.outer(basis.betas_t / grid.h, basis.lambdas)
    assert np.allclose(op.Mz - np.diag(-basis.lambdas**2), R, atol=1e-13)


def test_apply_A_perpendicular_mode(grid8):
    op = StokesOperator(grid8)
    basis = VerticalBasis(grid8)
    for k in (0, 3):
        # xi = (2 pi, 0) with velocity along e_y is perpendicular: diagonal
        c = np.zeros((2, 8, 8, 8), dtype=complex)
        c[1, 1, 0, k] = 1.0
        c[1, -1, 0, k] = 1.0
        out = op.apply_A(SpectralField(c, grid8))
        mu = 4 * np.pi**2 + basis.lambdas[k] ** 2
        assert np.abs(out.coeffs + mu * c).max() <= 1e-11


def test_apply_A_assembly_oracle(grid8):
    op = StokesOperator(grid8)
    basis = VerticalBasis(grid8)
    v = random_field(grid8, ncomp=2, seed=8)
    out = op.apply_A(v)
    # independent dense assembly, looping over horizontal modes
    xix, xiy = grid8.xi_vectors()
    lam2 = basis.lambdas**2
    R = np.outer(basis.betas_t / grid8.h, basis.lambdas)
    expect = np.empty_like(v.coeffs)
    for i in range(8):
        for j in range(8):
            s = xix[i, j] ** 2 + xiy[i, j] ** 2
            c = v.coeffs[:, i, j, :]
            if s == 0:
                expect[:, i, j, :] = -lam2 * c
                continue
            e = np.array([xix[i, j], xiy[i, j]]) / np.sqrt(s)
            cpar = e @ c
            cperp = c - np.outer(e, cpar)
            apar = -s * cpar + (np.diag(-lam2) + R) @ cpar
            aperp = -(s + lam2) * cperp
            expect[:, i, j, :] = aperp + np.outer(e, apar)
    assert np.abs(out.coeffs - expect).max() <= 1e-12 * np.abs(expect).max()


# -- semigroup ------------------------------------------------------------


def test_semigroup_identity_at_zero(grid8):
    op = StokesOperator(grid8)
    v = random_field(grid8, ncomp=2, seed=1)
    out = op.semigroup_apply(0.0, v)
    assert np.array_equal(out.coeffs, v.coeffs)


def test_semigroup_rejects_negative_time(grid8):
    op = StokesOperator(grid8)
    v = random_field(grid8, ncomp=2, seed=1)
    with pytest.raises(ValueError):
        op.semigroup_apply(-0.1, v)


def test_semigroup_origin_mode_decay(grid8):
    op = StokesOperator(grid8)
    basis = VerticalBasis(grid8)
    for k in (0, 5):
        c = np.zeros((2, 8, 8, 8), dtype=complex)
        c[0, 0, 0, k] = 1.0
        out = op.semigroup_apply(0.2, SpectralField(c, grid8))
        assert out.coeffs[0, 0, 0, k] == pytest.approx(
            np.exp(-basis.lambdas[k] ** 2 * 0.2), rel=1e-12
        )


def test_semigroup_matches_ode_oracle():
    # K=8, xi=(2 pi, 2 pi), random parallel coefficients: adaptive ODE
    # integration of dc/dt = Mz c - |xi|^2 c must match expm to 1e-8
    grid = Grid(8, 8, 1.0)
    op = StokesOperator(grid)
    rng = np.random.default_rng(42)
    c0 = rng.standard_normal(8)
    s = 8 * np.pi**2
    M = op.Mz - s * np.eye(8)
    sol = solve_ivp(lambda t, y: M @ y, (0, 0.1), c0, rtol=1e-12, atol=1e-14)
    # drive the same coefficients through semigroup_apply
    e = np.array([1.0, 1.0]) / np.sqrt(2)
    c = np.zeros((2, 8, 8, 8), dtype=complex)
    c[:, 1, 1, :] = np.outer(e, c0)
    c[:, -1, -1, :] = np.outer(e, c0)
    out = op.semigroup_apply(0.1, SpectralField(c, grid))
    got = (e @ out.coeffs[:, 1, 1, :]).real
    assert np.abs(got - sol.y[:, -1]).max() <= 1e-8


def test_semigroup_law(grid8):
    op = StokesOperator(grid8)
    v = random_field(grid8, ncomp=2, seed=2)
    ab = op.semigroup_apply(0.07, op.semigroup_apply(0.05, v))
    direct = op.semigroup_apply(0.12, v)
    assert np.abs(ab.coeffs - direct.coeffs).max() <= 1e-10 * np.abs(v.coeffs).max()


def test_generator_consistency_order(grid8):
    op = StokesOperator(grid8)
    v = random_field(grid8, ncomp=2, seed=3, decay=4.0)
    av = op.apply_A(v)
    errs = []
    for tau in (5e-4, 2.5e-4):
        fd = (op.semigroup_apply(tau, v).coeffs - v.coeffs) / tau
        errs.append(np.abs(fd - av.coeffs).max())
    order = np.log2(errs[0] / errs[1])
    assert order >= 0.9


# -- phi-1 ----------------------------------------------------------------


def test_phi1_scalar_closed_form(grid8):
    op = StokesOperator(grid8)
    basis = VerticalBasis(grid8)
    # perpendicular single mode: phi_1(t A) acts as (1 - e^{-t mu})/(t mu)
    c = np.zeros((2, 8, 8, 8), dtype=complex)
    c[1, 1, 0, 2] = 1.0
    c[1, -1, 0, 2] = 1.0
    mu = 4 * np.pi**2 + basis.lambdas[2] ** 2
    out = op.phi1_apply(1.0, SpectralField(c, grid8))
    assert out.coeffs[1, 1, 0, 2] == pytest.approx((1 - np.exp(-mu)) / mu, rel=1e-12)


def test_phi1_small_time_limit(grid8):
    op = StokesOperator(grid8)
    g = random_field(grid8, ncomp=2, seed=4)
    ag = op.apply_A(g)
    t = 1e-6
    out = op.phi1_apply(t, g)
    assert np.abs(out.coeffs - g.coeffs).max() <= t * np.abs(ag.coeffs).max()


def test_exponential_euler_exact_for_constant_forcing(grid8):
    # v(t) = e^{tA} v0 + t phi_1(tA) f solves dv/dt = Av + f exactly
    op = StokesOperator(grid8)
    v0 = random_field(grid8, ncomp=2, seed=5)
    f = random_field(grid8, ncomp=2, seed=6)
    t = 0.05
    got = op.semigroup_apply(t, v0).coeffs + t * op.phi1_apply(t, f).coeffs

    def rhs(_, y):
        c = (y[: y.size // 2] + 1j * y[y.size // 2 :]).reshape(v0.coeffs.shape)
        a = op.apply_A(SpectralField(c, grid8)).coeffs + f.coeffs
        return np.concatenate([a.real.ravel(), a.imag.ravel()])

    y0 = np.concatenate([v0.coeffs.real.ravel(), v0.coeffs.imag.ravel()])
    sol = solve_ivp(rhs, (0, t), y0, rtol=1e-11, atol=1e-13)
    yend = sol.y[:, -1]
    expect = (yend[: yend.size // 2] + 1j * yend[yend.size // 2 :]).reshape(v0.coeffs.shape)
    assert np.abs(got - expect).max() <= 1e-9 * np.abs(expect).max()


# -- resolvent ------------------------------------------------------------


def test_resolvent_diagonal_mode(grid8):
    op = StokesOperator(grid8)
    basis = VerticalBasis(grid8)
    c = np.zeros((2, 8, 8, 8), dtype=complex)
    c[1, 1, 0, 1] = 1.0
    c[1, -1, 0, 1] = 1.0
    out = op.resolvent_apply(1.0, SpectralField(c, grid8))
    mu = 4 * np.pi**2 + basis.lambdas[1] ** 2
    assert out.coeffs[1, 1, 0, 1] == pytest.approx(1.0 / (1.0 + mu), rel=1e-12)


def test_resolvent_residual(grid8):
    op = StokesOperator(grid8)
    f = random_field(grid8, ncomp=2, seed=7)
    for lam in (1.0, 0.3 + 2.0j):
        v = op.resolvent_apply(lam, f)
        res = lam * v.coeffs - op.apply_A(v).coeffs - f.coeffs
        assert np.abs(res).max() <= 1e-12 * np.abs(f.coeffs).max()


def test_resolvent_singular_at_eigenvalue(grid8):
    op = StokesOperator(grid8)
    f = random_field(grid8, ncomp=2, seed=7)
    with pytest.raises(SingularityError):
        op.resolvent_apply(-np.pi**2 / 4, f)


# -- spectrum -------------------------------------------------------------


def test_solenoidal_bound_h1():
    bound, _ = spectral_bound(Grid(8, 8, 1.0), "solenoidal")
    assert bound == pytest.approx(-np.pi**2 / 4, abs=1e-8)


def test_bound_negative_sweep():
    for N, K in ((8, 8), (16, 16), (8, 32)):
        for h in (0.5, 1.0, 2.0):
            bound, _ = spectral_bound(Grid(N, K, h), "solenoidal")
            assert bound < 0
            assert bound == pytest.approx(-((np.pi / (2 * h)) ** 2), abs=1e-8)


def test_full_bound_dominates_solenoidal():
    grid = Grid(8, 8, 1.0)
    bf, _ = spectral_bound(grid, "full")
    bs, _ = spectral_bound(grid, "solenoidal")
    assert bf >= bs - 1e-12


def test_bound_monotone_in_h():
    bounds = [spectral_bound(Grid(8, 8, h), "solenoidal")[0] for h in (0.5, 1.0, 2.0)]
    assert bounds[0] < bounds[1] < bounds[2] < 0


def test_origin_rows_are_vertical_heat():
    grid = Grid(8, 8, 1.0)
    op = StokesOperator(grid)
    basis = VerticalBasis(grid)
    rows = [r for r in op.eigenvalue_report("full") if r[0] == 0 and r[1] == 0]
    evs = sorted(r[3].real for r in rows)
    expect = sorted(np.concatenate([-basis.lambdas**2] * 2))
    assert np.allclose(evs, expect, atol=1e-10)


def test_semigroup_cache_reuse(grid8):
    op = StokesOperator(grid8)
    v = random_field(grid8, ncomp=2, seed=9)
    a = op.semigroup_apply(0.03, v)
    b = op.semigroup_apply(0.03, v)
    assert np.array_equal(a.coeffs, b.coeffs)
