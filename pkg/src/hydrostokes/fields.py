"""Spectral and collocation fields, transforms and calculus on the layer.

Normalization table (tested in tests/test_fields.py):

  horizontal forward   fft2 / N^2      -> classical Fourier coefficients
  horizontal inverse   ifft2 * N^2
  vertical forward     DST-IV / K      -> coefficients of phi_k
  vertical inverse     DST-IV / 2      -> node values
  cosine evaluation    DCT-IV / 2      -> sum a_k cos(lambda_k (z_j+h))

With these scalings coefficients are independent of the grid size, so
padding/truncation for dealiasing is plain index embedding.
"""

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .basis import Grid, VerticalBasis

REALITY_TOL = 1e-12


@dataclass
class SpectralField:
    """Coefficients c[comp, m, n, k] in the Fourier x sine basis."""

    coeffs: np.ndarray  # complex, shape (ncomp, N, N, K)
    grid: Grid

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        expect = (self.ncomp, self.grid.N, self.grid.N, self.grid.K)
        if self.coeffs.shape != expect:
            raise ValueError(
                f"coefficient shape {self.coeffs.shape} does not match grid {expect}"
            )

    @property
    def ncomp(self):
        return self.coeffs.shape[0]

    @classmethod
    def zeros(cls, grid: Grid, ncomp: int = 2):
        return cls(np.zeros((ncomp, grid.N, grid.N, grid.K), dtype=complex), grid)

    def copy(self):
        return SpectralField(self.coeffs.copy(), self.grid)

    def reality_defect(self):
        """Max deviation from c(-m,-n,k) = conj(c(m,n,k))."""
        c = self.coeffs
        flipped = np.conj(np.roll(c[:, ::-1, ::-1, :], shift=(1, 1), axis=(1, 2)))
        return float(np.abs(c - flipped).max())

    def enforce_reality(self):
        c = self.coeffs
        flipped = np.conj(np.roll(c[:, ::-1, ::-1, :], shift=(1, 1), axis=(1, 2)))
        self.coeffs = 0.5 * (c + flipped)
        return self

    def norm2(self):
        """L^2(Omega) norm computed from coefficients (Parseval)."""
        return float(np.sqrt(self.grid.h / 2.0 * np.sum(np.abs(self.coeffs) ** 2)))


@dataclass
class PhysicalField:
    """Node values f[comp, i, j, j_z] on the collocation grid."""

    values: np.ndarray  # real, shape (ncomp, N, N, K)
    grid: Grid

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        expect = (self.ncomp, self.grid.N, self.grid.N, self.grid.K)
        if self.values.shape != expect:
            raise ValueError(
                f"value shape {self.values.shape} does not match grid {expect}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite entries")

    @property
    def ncomp(self):
        return self.values.shape[0]

    @classmethod
    def zeros(cls, grid: Grid, ncomp: int = 2):
        return cls(np.zeros((ncomp, grid.N, grid.N, grid.K)), grid)

    def copy(self):
        return PhysicalField(self.values.copy(), self.grid)


def zero_nyquist(c: SpectralField) -> SpectralField:
    """Zero the unpaired horizontal Nyquist modes m or n = -N/2 in place.

    The Nyquist frequency has no conjugate partner on the grid, so
    direction-dependent operators (projectors, odd derivatives) cannot act on
    it in a reality-preserving way; solver pipelines keep it empty.
    """
    half = c.grid.N // 2
    c.coeffs[:, half, :, :] = 0.0
    c.coeffs[:, :, half, :] = 0.0
    return c


def forward_transform(f: PhysicalField) -> SpectralField:
    """Horizontal DFT composed with the vertical DST-IV projection."""
    g = f.grid
    c = sfft.dst(f.values, type=4, axis=3) / g.K
    c = sfft.fft2(c, axes=(1, 2)) / g.N**2
    return SpectralField(c, g)


def inverse_transform(c: SpectralField, check_reality: bool = True) -> PhysicalField:
    """Exact inverse of :func:`forward_transform`.

    Raises if the coefficients violate the reality constraint beyond
    ``REALITY_TOL`` (relative), since the result is returned as a real field.
    """
    g = c.grid
    u = sfft.ifft2(c.coeffs * g.N**2, axes=(1, 2))
    scale = np.abs(u).max()
    if check_reality and scale > 0 and np.abs(u.imag).max() > REALITY_TOL * scale:
        raise ValueError(
            "coefficients violate the reality constraint: imaginary residue "
            f"{np.abs(u.imag).max():.3e} vs field scale {scale:.3e}"
        )
    v = sfft.dst(u.real, type=4, axis=3) / 2.0
    return PhysicalField(v, g)


def horizontal_derivative(c: SpectralField, axis: str) -> SpectralField:
    """d/dx or d/dy: coefficient-wise multiplication by i*xi."""
    if axis not in ("x", "y"):
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    xi = c.grid.xi
    shape = (1, -1, 1, 1) if axis == "x" else (1, 1, -1, 1)
    return SpectralField(c.coeffs * (1j * xi.reshape(shape)), c.grid)


def vertical_derivative(c: SpectralField) -> PhysicalField:
    """d/dz evaluated at the nodes via the cosine series.

    The derivative of a sine series lives in the cosine span, so the result
    is returned as node values, not re-projected.
    """
    basis = VerticalBasis(c.grid)
    a = c.coeffs * basis.lambdas
    u = sfft.ifft2(a * c.grid.N**2, axes=(1, 2))
    vals = sfft.dct(u, type=4, axis=3) / 2.0
    return PhysicalField(vals.real, c.grid)


def vertical_mean(c: SpectralField) -> np.ndarray:
    """Per-mode vertical average (1/h) * integral over (-h,0).

    Exact: the integral of phi_k is 1/lambda_k.  Returns shape (ncomp, N, N).
    """
    basis = VerticalBasis(c.grid)
    return np.sum(c.coeffs / basis.lambdas, axis=3) / c.grid.h


def vertical_integral_from_bottom(c: SpectralField) -> PhysicalField:
    """Antiderivative int_{-h}^z of a scalar field, as node values.

    Per mode the antiderivative of phi_k is (1 - cos(lambda_k (z+h)))/lambda_k,
    so the result vanishes identically at z = -h.
    """
    if c.ncomp != 1:
        raise ValueError(f"expected a scalar field, got ncomp={c.ncomp}")
    basis = VerticalBasis(c.grid)
    b = c.coeffs / basis.lambdas
    const = np.sum(b, axis=3, keepdims=True)
    prof = const - sfft.dct(b, type=4, axis=3) / 2.0
    u = sfft.ifft2(prof * c.grid.N**2, axes=(1, 2))
    return PhysicalField(u.real, c.grid)


def norm_anisotropic(f: PhysicalField, q, p) -> float:
    """Mixed norm L^q_H L^p_z: vertical L^p per column, then horizontal L^q.

    Vertical integrals use the midpoint rule (weight h/K), horizontal ones
    the node rule (weight 1/N^2); infinite exponents take node maxima.  For
    vector fields the pointwise Euclidean magnitude is taken first.
    """
    for e in (q, p):
        if e != np.inf and e < 1:
            raise ValueError(f"exponents must be in [1, inf], got {e}")
    g = f.grid
    mag = np.sqrt(np.sum(f.values**2, axis=0))
    if p == np.inf:
        col = mag.max(axis=2)
    else:
        col = (np.sum(mag**p, axis=2) * (g.h / g.K)) ** (1.0 / p)
    if q == np.inf:
        return float(col.max())
    return float((np.sum(col**q) / g.N**2) ** (1.0 / q))
