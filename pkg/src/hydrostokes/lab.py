"""Numerical verification of the linear and nonlinear estimates.

Each scan evaluates the ratio (left-hand side) / (right-hand side without
the unknown constant) over a parameter grid and random sample fields, and
reports the empirical supremum.  The constants in the underlying inequalities
are existential, so scans assert only finiteness and stability under
resolution doubling; the few closed-form identities (kernel norms, the
discrete Young inequality, the recursion bound) are checked exactly.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft
from scipy.integrate import quad

from .basis import Grid, VerticalBasis
from .fields import (
    PhysicalField,
    SpectralField,
    forward_transform,
    horizontal_derivative,
    inverse_transform,
    norm_anisotropic,
    vertical_derivative,
)
from .projection import helmholtz_2d, project_hydrostatic
from .sampling import random_field
from .semigroup import SingularityError, StokesOperator
from .solver import grad_mixed_norm, mixed_norm

DENOM_FLOOR = 1e-14


@dataclass
class ScanReport:
    estimate: str
    params: list  # one entry per sample point (tuples or scalars)
    ratios: np.ndarray
    sup_ratio: float = 0.0
    resolutions: tuple = ()
    stable: bool | None = None
    skipped: int = 0
    notes: str = ""

    def __post_init__(self):
        self.ratios = np.asarray(self.ratios, dtype=float)
        if len(self.ratios):
            self.sup_ratio = float(self.ratios.max())

    def rows(self):
        for par, r in zip(self.params, self.ratios):
            yield {"estimate": self.estimate, "params": par, "ratio": r}


# -- kernel identity -------------------------------------------------------


def kernel_l1_norm(lam: complex):
    """L^1 norms of the resolvent kernel e^{-sqrt(lam)|x|}/(4 pi |x|).

    Returns numeric and exact values of |lam| * ||K||_1 (exact sec^2(psi/2))
    and of the upper bound for |lam|^{1/2} * ||grad K||_1 (sec + sec^2).
    """
    lam = complex(lam)
    psi = np.angle(lam)
    if not (abs(psi) < np.pi) or lam == 0:
        raise ValueError(f"lambda must lie in the open sector |arg| < pi, got {lam}")
    rho = np.sqrt(abs(lam)) * np.cos(psi / 2.0)
    val, _ = quad(lambda r: r * np.exp(-rho * r), 0, np.inf)
    grad, _ = quad(lambda r: (1 + np.sqrt(abs(lam)) * r) * np.exp(-rho * r), 0, np.inf)
    sec = 1.0 / np.cos(psi / 2.0)
    return {
        "kernel_numeric": abs(lam) * val,
        "kernel_exact": sec**2,
        "grad_numeric": np.sqrt(abs(lam)) * grad,
        "grad_exact": sec + sec**2,
    }


# -- anisotropic Young -----------------------------------------------------


def _mixed_norm_3d(a: np.ndarray, q, p) -> float:
    """Mixed norm of values on a unit 3-torus grid, z along the last axis."""
    n = a.shape[-1]
    mag = np.abs(a)
    if p == np.inf:
        col = mag.max(axis=-1)
    else:
        col = (np.sum(mag**p, axis=-1) / n) ** (1.0 / p)
    if q == np.inf:
        return float(col.max())
    return float((np.sum(col**q) / col.size) ** (1.0 / q))


def young_anisotropic_test(n_samples: int, q, p, n_grid: int = 8, seed: int = 0) -> ScanReport:
    """Discrete periodic convolution: ||g*f||_{q,p} <= ||g||_1 ||f||_{q,p}."""
    rng = np.random.default_rng(seed)
    ratios, params, skipped = [], [], 0
    vol = 1.0 / n_grid**3
    for i in range(n_samples):
        f = rng.standard_normal((n_grid,) * 3)
        g = rng.standard_normal((n_grid,) * 3)
        conv = sfft.ifftn(sfft.fftn(f) * sfft.fftn(g)).real * vol
        denom = np.sum(np.abs(g)) * vol * _mixed_norm_3d(f, q, p)
        if denom < DENOM_FLOOR:
            skipped += 1
            continue
        ratios.append(_mixed_norm_3d(conv, q, p) / denom)
        params.append(i)
    return ScanReport("young", params, ratios, skipped=skipped, notes=f"(q,p)=({q},{p})")


# -- semigroup decay scans -------------------------------------------------

SEMIGROUP_COMBOS = ("grad_sg", "grad_sg_proj", "sg_proj_dz", "grad_sg_proj_dz")


def _boundary_flat_sample(grid: Grid, seed: int):
    """Smooth field vanishing at both vertical boundaries, and its dz.

    f = bump(z) * G with bump = sin^2(pi (z+h)/h); both factors and their
    z-derivatives are evaluated exactly at the nodes, so dz f is exact and
    P dz f = dz f holds for the continuum field it samples.
    """
    G = random_field(grid, ncomp=2, seed=seed, decay=3.0)
    Gphys = inverse_transform(G).values
    dzG = vertical_derivative(G).values
    z = grid.z
    bump = np.sin(np.pi * (z + grid.h) / grid.h) ** 2
    dbump = 2 * np.pi / grid.h * np.sin(np.pi * (z + grid.h) / grid.h) * np.cos(
        np.pi * (z + grid.h) / grid.h
    )
    f = forward_transform(PhysicalField(bump * Gphys, grid))
    dzf = forward_transform(PhysicalField(dbump * Gphys + bump * dzG, grid))
    return f, dzf


def semigroup_decay_scan(
    combo: str,
    t_grid,
    n_samples: int,
    p: float,
    grid: Grid,
    seed: int = 0,
    beta: float | None = None,
    op: StokesOperator | None = None,
) -> ScanReport:
    """Weighted decay ratios for derivative/projection/semigroup compositions."""
    if combo not in SEMIGROUP_COMBOS:
        raise ValueError(f"unknown combo {combo!r}; choose from {SEMIGROUP_COMBOS}")
    if op is None:
        op = StokesOperator(grid)
    if beta is None:
        beta = op.spectral_bound_value("solenoidal")
    ratios, params, skipped = [], [], 0
    for i in range(n_samples):
        if combo == "grad_sg":
            f = random_field(grid, seed=seed + i, solenoidal=True)
            arg = f
        elif combo == "grad_sg_proj":
            f = random_field(grid, seed=seed + i)
            arg = project_hydrostatic(f)
        else:
            f, dzf = _boundary_flat_sample(grid, seed + i)
            arg = project_hydrostatic(dzf)
        fn = mixed_norm(f, p)
        if fn < DENOM_FLOOR:
            skipped += 1
            continue
        for t in np.asarray(t_grid, dtype=float):
            vt = op.semigroup_apply(t, arg)
            if combo in ("grad_sg", "grad_sg_proj"):
                lhs = np.sqrt(t) * grad_mixed_norm(vt, p)
            elif combo == "sg_proj_dz":
                lhs = np.sqrt(t) * mixed_norm(vt, p)
            else:
                lhs = t * grad_mixed_norm(vt, p)
            ratios.append(lhs / (np.exp(beta * t) * fn))
            params.append((i, t))
    return ScanReport(combo, params, ratios, resolutions=(grid.N, grid.K), skipped=skipped)


def smoothing_trend(grid: Grid, p: float, t_grid=None, seed: int = 0, op=None):
    """t^{1/2} ||grad e^{tA} f|| on a geometric small-t grid, smooth solenoidal f.

    For data in the solenoidal space this quantity tends to 0 with t.
    """
    if op is None:
        op = StokesOperator(grid)
    if t_grid is None:
        t_grid = np.geomspace(1e-5, 1e-1, 9)
    f = random_field(grid, seed=seed, decay=4.0, solenoidal=True)
    return np.asarray(t_grid), np.array(
        [np.sqrt(t) * grad_mixed_norm(op.semigroup_apply(t, f), p) for t in t_grid]
    )


# -- resolvent scans -------------------------------------------------------


def resolvent_scan(
    theta: float,
    lam_moduli,
    n_samples: int,
    q,
    p,
    grid: Grid,
    seed: int = 0,
    derivative_datum: bool = False,
    op: StokesOperator | None = None,
) -> ScanReport:
    """Sectorial resolvent estimate ratios over lambda in Sigma_theta."""
    if op is None:
        op = StokesOperator(grid)
    psis = np.array([0.0, 0.5, 0.9]) * theta
    psis = np.unique(np.concatenate([psis, -psis]))
    ratios, params, skipped = [], [], 0
    for i in range(n_samples):
        f = random_field(grid, seed=seed + i, solenoidal=True)
        fn = norm_anisotropic(inverse_transform(f), q, p)
        if fn < DENOM_FLOOR:
            skipped += 1
            continue
        datum = horizontal_derivative(f, "x") if derivative_datum else f
        for mod in lam_moduli:
            for psi in psis:
                lam = mod * np.exp(1j * psi)
                try:
                    v = op.resolvent_apply(lam, datum)
                except SingularityError:
                    skipped += 1
                    continue
                vphys = inverse_transform(v, check_reality=False)
                if derivative_datum:
                    lhs = np.sqrt(abs(lam)) * norm_anisotropic(vphys, q, p)
                else:
                    gphys = PhysicalField(
                        np.concatenate(
                            [
                                inverse_transform(
                                    horizontal_derivative(v, "x"), check_reality=False
                                ).values,
                                inverse_transform(
                                    horizontal_derivative(v, "y"), check_reality=False
                                ).values,
                                vertical_derivative(v).values,
                            ],
                            axis=0,
                        ),
                        grid,
                    )
                    lhs = abs(lam) * norm_anisotropic(vphys, q, p) + np.sqrt(
                        abs(lam)
                    ) * norm_anisotropic(gphys, q, p)
                ratios.append(lhs / fn)
                params.append((i, mod, psi))
    name = "resolvent_dz" if derivative_datum else "resolvent"
    return ScanReport(name, params, ratios, resolutions=(grid.N, grid.K), skipped=skipped)


# -- 2-d multiplier scan ---------------------------------------------------


def _phys2d(ghat: np.ndarray, N: int) -> np.ndarray:
    return sfft.ifft2(ghat * N**2, axes=(-2, -1))


def horizontal_multiplier_scan(
    tau_grid, n_samples: int, N: int = 32, seed: int = 0, theta: float = np.pi / 3
) -> ScanReport:
    """|tau|^{1/2} ||grad_H e^{tau Delta_H} Q f||_inf / ||f||_inf on the 2-torus."""
    grid = Grid(N, 1, 1.0)
    xix, xiy = grid.xi_vectors()
    xi2 = xix**2 + xiy**2
    rng = np.random.default_rng(seed)
    ratios, params, skipped = [], [], 0
    env = (1.0 + xi2 / (2 * np.pi) ** 2) ** (-1.0)
    for i in range(n_samples):
        ghat = (rng.standard_normal((2, N, N)) + 1j * rng.standard_normal((2, N, N))) * env
        # enforce reality of the sample field
        ghat = 0.5 * (ghat + np.conj(np.roll(ghat[:, ::-1, ::-1], (1, 1), axis=(1, 2))))
        fn = np.abs(np.linalg.norm(_phys2d(ghat, N).real, axis=0)).max()
        if fn < DENOM_FLOOR:
            skipped += 1
            continue
        qf = helmholtz_2d(ghat, grid)
        for tau in np.asarray(tau_grid, dtype=complex):
            if abs(np.angle(tau)) >= theta or theta >= np.pi / 2:
                raise ValueError("tau must lie in a sector of half-angle < pi/2")
            heat = np.exp(-tau * xi2) * qf
            gx = _phys2d(1j * xix * heat, N)
            gy = _phys2d(1j * xiy * heat, N)
            mag = np.sqrt((np.abs(gx) ** 2 + np.abs(gy) ** 2).sum(axis=0)).max()
            ratios.append(np.sqrt(abs(tau)) * mag / fn)
            params.append((i, complex(tau)))
    return ScanReport("multiplier", params, ratios, resolutions=(N,), skipped=skipped)


def q_linfty_growth(N_list, seed: int = 0, n_samples: int = 10):
    """sup ||Qf||_inf / ||f||_inf per resolution.

    The 2-d Helmholtz projection is unbounded on L^inf, so this grows with N;
    reported as a trend, not asserted.
    """
    out = []
    for N in N_list:
        grid = Grid(N, 1, 1.0)
        rng = np.random.default_rng(seed)
        sup = 0.0
        for _ in range(n_samples):
            # rough sample: flat spectrum stresses the unboundedness
            ghat = rng.standard_normal((2, N, N)) + 1j * rng.standard_normal((2, N, N))
            ghat = 0.5 * (ghat + np.conj(np.roll(ghat[:, ::-1, ::-1], (1, 1), axis=(1, 2))))
            f = np.linalg.norm(_phys2d(ghat, N).real, axis=0).max()
            qf = np.linalg.norm(_phys2d(helmholtz_2d(ghat, grid), N).real, axis=0).max()
            sup = max(sup, qf / f)
        # deterministic checkerboard of sign jumps: the known worst case, with
        # Riesz-transform log divergence along the discontinuity lines
        sq = np.sign(np.sin(2 * np.pi * grid.x))
        f1 = sq[:, None] * sq[None, :]
        ghat = np.stack([sfft.fft2(f1) / N**2, np.zeros((N, N), complex)])
        qf = np.linalg.norm(_phys2d(helmholtz_2d(ghat, grid), N).real, axis=0).max()
        sup = max(sup, qf / np.abs(f1).max())
        out.append((N, sup))
    return out


# -- interpolation and log-Riesz scans ------------------------------------


def _disk_mask(grid: Grid, center, r: float) -> np.ndarray:
    x = grid.x
    dx = np.abs(x[:, None] - center[0])
    dy = np.abs(x[None, :] - center[1])
    dx = np.minimum(dx, 1.0 - dx)
    dy = np.minimum(dy, 1.0 - dy)
    return dx**2 + dy**2 <= r**2


def interpolation_ratio(
    n_samples: int, p: float, q, r_grid, grid: Grid, seed: int = 0
) -> ScanReport:
    """Local sup bound via r^{-2/p}(||v|| + r ||grad_H v||) on horizontal disks."""
    if not p > 2:
        raise ValueError(f"interpolation scan needs p > 2, got {p}")
    rng = np.random.default_rng(seed)
    ratios, params, skipped = [], [], 0
    for i in range(n_samples):
        v = random_field(grid, seed=seed + i, decay=2.5)
        vphys = inverse_transform(v)
        gphys = PhysicalField(
            np.concatenate(
                [
                    inverse_transform(horizontal_derivative(v, "x")).values,
                    inverse_transform(horizontal_derivative(v, "y")).values,
                ],
                axis=0,
            ),
            grid,
        )
        vcol = _column_lq(vphys, q, grid)
        gcol = _column_lq(gphys, q, grid)
        center = rng.random(2)
        for r in r_grid:
            mask = _disk_mask(grid, center, r)
            if not mask.any():
                skipped += 1
                continue
            lhs = vcol[mask].max()
            vp = (np.sum(vcol[mask] ** p) / grid.N**2) ** (1.0 / p)
            gp = (np.sum(gcol[mask] ** p) / grid.N**2) ** (1.0 / p)
            denom = r ** (-2.0 / p) * (vp + r * gp)
            if denom < DENOM_FLOOR:
                skipped += 1
                continue
            ratios.append(lhs / denom)
            params.append((i, r))
    return ScanReport("interpolation", params, ratios, resolutions=(grid.N, grid.K), skipped=skipped)


def _column_lq(f: PhysicalField, q, grid: Grid) -> np.ndarray:
    mag = np.sqrt(np.sum(f.values**2, axis=0))
    if q == np.inf:
        return mag.max(axis=2)
    return (np.sum(mag**q, axis=2) * (grid.h / grid.K)) ** (1.0 / q)


def log_riesz_ratio(n_samples: int, p: float, r_grid, N: int = 32, seed: int = 0) -> ScanReport:
    """||grad_H pi||_{L^p(B_r)} / (r^{2/p}(1+|log r|) ||F||_inf), Delta_H pi = div_H F."""
    grid = Grid(N, 1, 1.0)
    xix, xiy = grid.xi_vectors()
    rng = np.random.default_rng(seed)
    ratios, params, skipped = [], [], 0
    env = (1.0 + (xix**2 + xiy**2) / (2 * np.pi) ** 2) ** (-0.75)
    for i in range(n_samples):
        Fhat = (rng.standard_normal((2, N, N)) + 1j * rng.standard_normal((2, N, N))) * env
        Fhat = 0.5 * (Fhat + np.conj(np.roll(Fhat[:, ::-1, ::-1], (1, 1), axis=(1, 2))))
        # grad_H pi is the xi-parallel part of F
        grad = Fhat - helmholtz_2d(Fhat, grid)
        gphys = np.linalg.norm(_phys2d(grad, N).real, axis=0)
        finf = np.linalg.norm(_phys2d(Fhat, N).real, axis=0).max()
        if finf < DENOM_FLOOR:
            skipped += 1
            continue
        center = rng.random(2)
        for r in r_grid:
            mask = _disk_mask(grid, center, r)
            if not mask.any():
                skipped += 1
                continue
            lhs = (np.sum(gphys[mask] ** p) / N**2) ** (1.0 / p)
            denom = r ** (2.0 / p) * (1.0 + abs(np.log(r))) * finf
            ratios.append(lhs / denom)
            params.append((i, r))
    return ScanReport("log_riesz", params, ratios, resolutions=(N,), skipped=skipped)


# -- nonlinear estimate scans ----------------------------------------------


def nonlinear_estimate_scan(
    n_pairs: int,
    t_grid,
    p: float,
    grid: Grid,
    seed: int = 0,
    op: StokesOperator | None = None,
) -> ScanReport:
    """Ratios for the four semigroup-nonlinearity estimates."""
    from .nonlinear import advection

    if op is None:
        op = StokesOperator(grid)
    ratios, params, skipped = [], [], 0
    for i in range(n_pairs):
        v1 = random_field(grid, seed=seed + 2 * i, solenoidal=True)
        v2 = random_field(grid, seed=seed + 2 * i + 1, solenoidal=True)
        n1, n2 = mixed_norm(v1, p), mixed_norm(v2, p)
        g1, g2 = grad_mixed_norm(v1, p), grad_mixed_norm(v2, p)
        if min(n1, n2, g1, g2) < DENOM_FLOOR:
            skipped += 1
            continue
        nl = project_hydrostatic(advection(v1, v2))
        for t in np.asarray(t_grid, dtype=float):
            et = op.semigroup_apply(t, nl)
            a = mixed_norm(et, p)
            b = grad_mixed_norm(et, p)
            ratios.append(np.sqrt(t) * a / (g1 * n2))
            params.append((i, t, "i"))
            ratios.append(np.sqrt(t) * b / (g1 * g2))
            params.append((i, t, "ii"))
            ratios.append(t * b / (g1 * n2))
            params.append((i, t, "iii"))
            denom4 = min(g1 * n2, g2 * n1) / np.sqrt(t) + g1 * g2
            ratios.append(a / denom4)
            params.append((i, t, "iv"))
    return ScanReport("nonlinear", params, ratios, resolutions=(grid.N, grid.K), skipped=skipped)


# -- recursion lemma -------------------------------------------------------


def recursion_bound_check(a0: float, c1: float, c2: float, M: int = 50):
    """Iterate a_{m+1} = a0 + c1 a_m^2 + c2 a_m and check a_m < 2 a0/(1-c2)."""
    if not c1 > 0:
        raise ValueError(f"c1 must be positive, got {c1}")
    if not 0 < c2 < 1:
        raise ValueError(f"c2 must lie in (0,1), got {c2}")
    if not 4 * c1 * a0 < (1 - c2) ** 2:
        raise ValueError(
            f"hypothesis violated: 4*c1*a0 = {4 * c1 * a0:.6g} >= (1-c2)^2 = {(1 - c2) ** 2:.6g}"
        )
    seq = [a0]
    for _ in range(M):
        a = seq[-1]
        seq.append(a0 + c1 * a * a + c2 * a)
    bound = 2.0 * a0 / (1.0 - c2)
    ok = all(a < bound + 1e-12 for a in seq)
    return np.array(seq), bound, ok


# -- stability helper ------------------------------------------------------


def resolution_stability(scan_at_grid, grid: Grid, rel_tol: float = 0.10):
    """Run a grid-parametrized scan at (N,K) and (2N,2K); compare sups."""
    base = scan_at_grid(grid)
    fine = scan_at_grid(Grid(2 * grid.N, 2 * grid.K, grid.h))
    drift = abs(fine.sup_ratio - base.sup_ratio) / max(base.sup_ratio, DENOM_FLOOR)
    base.stable = drift <= rel_tol
    base.notes = (base.notes + f" drift={drift:.3f} vs ({fine.resolutions})").strip()
    return base, fine
