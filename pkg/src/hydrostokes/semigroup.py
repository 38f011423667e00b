"""Per-mode hydrostatic Stokes operator, its semigroup and resolvent.

For each horizontal wavenumber xi the operator acts on the K sine
coefficients of the xi-parallel and xi-perpendicular velocity components.
The perpendicular part is diagonal, -(|xi|^2 + lambda_k^2).  The parallel
part additionally carries the rank-one bottom-shear coupling

    R_{kj} = (betas_t_k / h) * lambda_j,

the truncated form of (1/h)(1-Q) dz v at z = -h.  Since R is independent of
xi and the diagonal shift is a multiple of the identity, a single K x K
matrix exponential of M_z = diag(-lambda^2) + R serves all wavenumbers at a
given time, scaled by exp(-t |xi|^2).
"""

import threading
from collections import OrderedDict

import numpy as np
from scipy.linalg import expm, null_space

from .basis import Grid, VerticalBasis
from .fields import SpectralField

SINGULARITY_TOL = 1e-10


class SingularityError(ValueError):
    """Resolvent parameter within tolerance of a mode eigenvalue."""


class SemigroupCache:
    """Thread-safe LRU memo for exponential and phi1 blocks."""

    def __init__(self, maxsize: int = 4096):
        self.maxsize = maxsize
        self._data: OrderedDict = OrderedDict()
        self._lock = threading.Lock()

    def get_or_compute(self, key, fn):
        with self._lock:
            if key in self._data:
                self._data.move_to_end(key)
                return self._data[key]
        val = fn()
        with self._lock:
            self._data[key] = val
            self._data.move_to_end(key)
            while len(self._data) > self.maxsize:
                self._data.popitem(last=False)
        return val


def _phi1_matrix(A: np.ndarray) -> np.ndarray:
    """phi1(A) = A^{-1}(e^A - I) via the augmented-matrix exponential."""
    n = A.shape[0]
    aug = np.zeros((2 * n, 2 * n), dtype=complex)
    aug[:n, :n] = A
    aug[:n, n:] = np.eye(n)
    return expm(aug)[:n, n:]


class StokesOperator:
    """Discrete hydrostatic Stokes operator A = Delta + B on a grid."""

    def __init__(self, grid: Grid, cache_size: int = 4096):
        self.grid = grid
        self.basis = VerticalBasis(grid)
        lam = self.basis.lambdas
        self.lam2 = lam**2
        # rank-one bottom-shear coupling, parallel component only
        self.R = np.outer(self.basis.betas_t / grid.h, lam)
        self.Mz = np.diag(-self.lam2) + self.R
        self.Mz_eigs = np.linalg.eigvals(self.Mz)

        xix, xiy = grid.xi_vectors()
        self.xi2 = xix**2 + xiy**2
        norm = np.sqrt(self.xi2)
        norm[0, 0] = 1.0
        self.xi_hat = np.stack([xix / norm, xiy / norm])
        self.xi_hat[:, 0, 0] = 0.0
        self.xi_perp = np.stack([-self.xi_hat[1], self.xi_hat[0]])
        self.s_values = np.unique(self.xi2)

        # orthonormal basis of the solenoidal constraint sum c_k/lambda_k = 0
        self.deflation = null_space(np.atleast_2d(1.0 / lam))
        self.cache = SemigroupCache(cache_size)

    # -- component split ---------------------------------------------------

    def _split(self, coeffs):
        cpar = np.einsum("cmn,cmnk->mnk", self.xi_hat, coeffs)
        cperp = np.einsum("cmn,cmnk->mnk", self.xi_perp, coeffs)
        return cpar, cperp

    def _assemble(self, cpar, cperp, origin):
        out = np.einsum("cmn,mnk->cmnk", self.xi_hat, cpar)
        out += np.einsum("cmn,mnk->cmnk", self.xi_perp, cperp)
        out[:, 0, 0, :] = origin
        return out

    # -- operator ----------------------------------------------------------

    def apply_A(self, v: SpectralField) -> SpectralField:
        """Delta v plus the bottom-shear coupling on the parallel part."""
        if v.ncomp != 2:
            raise ValueError(f"apply_A needs ncomp=2, got {v.ncomp}")
        c = v.coeffs
        out = -(self.xi2[None, :, :, None] + self.lam2) * c
        cpar, _ = self._split(c)
        bpar = np.einsum("kj,mnj->mnk", self.R, cpar)
        out += np.einsum("cmn,mnk->cmnk", self.xi_hat, bpar)
        return SpectralField(out, v.grid)

    def _exp_block(self, t: float) -> np.ndarray:
        return self.cache.get_or_compute(("exp", t), lambda: expm(t * self.Mz))

    def _phi1_block(self, t: float, s: float) -> np.ndarray:
        key = ("phi1", t, float(s))
        return self.cache.get_or_compute(
            key, lambda: _phi1_matrix(t * (self.Mz - s * np.eye(self.grid.K)))
        )

    def semigroup_apply(self, t: float, v: SpectralField) -> SpectralField:
        """e^{tA} v via per-mode exponentials."""
        if t < 0:
            raise ValueError(f"semigroup time must be >= 0, got {t}")
        if v.ncomp != 2:
            raise ValueError(f"semigroup_apply needs ncomp=2, got {v.ncomp}")
        if t == 0:
            return v.copy()
        c = v.coeffs
        cpar, cperp = self._split(c)
        E = self._exp_block(t)
        decay_h = np.exp(-t * self.xi2)[:, :, None]
        cpar = decay_h * np.einsum("kj,mnj->mnk", E, cpar)
        cperp = decay_h * np.exp(-t * self.lam2) * cperp
        origin = c[:, 0, 0, :] * np.exp(-t * self.lam2)
        return SpectralField(self._assemble(cpar, cperp, origin), v.grid)

    def phi1_apply(self, t: float, g: SpectralField) -> SpectralField:
        """phi1(tA) g = (tA)^{-1}(e^{tA} - I) g, exponential-Euler weight."""
        if t <= 0:
            raise ValueError(f"phi1 time must be > 0, got {t}")
        if g.ncomp != 2:
            raise ValueError(f"phi1_apply needs ncomp=2, got {g.ncomp}")
        c = g.coeffs
        cpar, cperp = self._split(c)
        out_par = np.empty_like(cpar)
        for s in self.s_values:
            mask = self.xi2 == s
            P = self._phi1_block(t, s)
            out_par[mask] = cpar[mask] @ P.T
        a = -t * (self.xi2[:, :, None] + self.lam2)
        out_perp = np.expm1(a) / a * cperp
        a0 = -t * self.lam2
        origin = np.expm1(a0) / a0 * c[:, 0, 0, :]
        return SpectralField(self._assemble(out_par, out_perp, origin), g.grid)

    def resolvent_apply(self, lam: complex, f: SpectralField) -> SpectralField:
        """(lam - A)^{-1} f by dense per-mode solves."""
        if f.ncomp != 2:
            raise ValueError(f"resolvent_apply needs ncomp=2, got {f.ncomp}")
        self._check_not_spectrum(lam)
        c = f.coeffs
        cpar, cperp = self._split(c)
        out_par = np.empty_like(cpar)
        eye = np.eye(self.grid.K)
        for s in self.s_values:
            mask = self.xi2 == s
            A = (lam + s) * eye - self.Mz
            out_par[mask] = np.linalg.solve(A, cpar[mask].T).T
        out_perp = cperp / (lam + self.xi2[:, :, None] + self.lam2)
        origin = c[:, 0, 0, :] / (lam + self.lam2)
        return SpectralField(self._assemble(out_par, out_perp, origin), f.grid)

    def _check_not_spectrum(self, lam: complex):
        shifts = self.s_values[:, None]
        par = self.Mz_eigs[None, :] - shifts
        diag = -self.lam2[None, :] - shifts
        dist = min(np.abs(lam - par).min(), np.abs(lam - diag).min())
        if dist < SINGULARITY_TOL:
            raise SingularityError(
                f"lambda = {lam} is within {dist:.2e} of the discrete spectrum"
            )

    # -- spectrum ----------------------------------------------------------

    def eigenvalue_report(self, subspace: str = "solenoidal"):
        """Eigenvalues of every mode block.

        Returns a list of rows (m, n, index, eigenvalue).  For the solenoidal
        subspace the parallel block is deflated onto {sum c_k/lambda_k = 0};
        the perpendicular diagonal and the xi = 0 block are solenoidal as is.
        """
        if subspace not in ("full", "solenoidal"):
            raise ValueError(f"unknown subspace {subspace!r}")
        K, N = self.grid.K, self.grid.N
        if subspace == "solenoidal" and self.deflation.shape[1] > 0:
            W = self.deflation
            par_eigs = np.linalg.eigvals(W.T @ self.Mz @ W)
        elif subspace == "solenoidal":
            par_eigs = np.array([])  # K = 1: parallel solenoidal space is {0}
        else:
            par_eigs = self.Mz_eigs
        rows = []
        ms = np.fft.fftfreq(N, d=1.0 / N).astype(int)
        for im, m in enumerate(ms):
            for jn, n in enumerate(ms):
                s = self.xi2[im, jn]
                if im == 0 and jn == 0:
                    eigs = np.concatenate([-self.lam2, -self.lam2])
                else:
                    eigs = np.concatenate([par_eigs - s, -self.lam2 - s])
                for idx, ev in enumerate(eigs):
                    rows.append((m, n, idx, complex(ev)))
        return rows

    def spectral_bound_value(self, subspace: str = "solenoidal") -> float:
        rows = self.eigenvalue_report(subspace)
        return max(ev.real for _, _, _, ev in rows)


def spectral_bound(grid: Grid, subspace: str = "solenoidal"):
    """Max real part of the discrete spectrum plus the per-mode report."""
    op = StokesOperator(grid)
    rows = op.eigenvalue_report(subspace)
    return max(ev.real for _, _, _, ev in rows), rows
