"""Uniform periodic grids on the unit torus and derivative operators.

Scalar fields live on an n x n grid with node (i, j) at (i*h, j*h),
h = 1/n; index n wraps to 0, so the seam is never stored twice.
Symmetric 2x2 per-node matrices are packed as arrays of shape
(n, n, 3) holding (a11, a12, a22).
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ComputationalGrid:
    """Uniform n x n grid covering the unit torus."""

    n: int

    def __post_init__(self):
        if self.n < 8:
            raise ValueError("grid size must be at least 8, got %d" % self.n)

    @property
    def h(self):
        return 1.0 / self.n

    def nodes(self):
        """Node coordinates as two (n, n) arrays (xi, eta), ij-indexed."""
        t = np.arange(self.n) / self.n
        return np.meshgrid(t, t, indexing="ij")

    def wavenumbers(self):
        """Integer Fourier frequencies along each axis."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n)


@dataclass
class PeriodicScalarField:
    """Real values on the nodes of a ComputationalGrid."""

    grid: ComputationalGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        n = self.grid.n
        if self.values.shape != (n, n):
            raise ValueError("field shape %s does not match grid n=%d"
                             % (self.values.shape, n))
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite values")


def _as_values(f):
    return f.values if isinstance(f, PeriodicScalarField) else np.asarray(f, dtype=float)


def gradient_fd(f):
    """Second-order central gradient with periodic wrap.

    Returns an array of shape (n, n, 2) holding (df/dxi, df/deta).
    """
    v = _as_values(f)
    h = 1.0 / v.shape[0]
    gx = (np.roll(v, -1, axis=0) - np.roll(v, 1, axis=0)) / (2 * h)
    gy = (np.roll(v, -1, axis=1) - np.roll(v, 1, axis=1)) / (2 * h)
    return np.stack([gx, gy], axis=-1)


def hessian_fd(f):
    """Second-order central Hessian, packed (fxx, fxy, fyy), shape (n, n, 3)."""
    v = _as_values(f)
    h = 1.0 / v.shape[0]
    fxx = (np.roll(v, -1, axis=0) - 2 * v + np.roll(v, 1, axis=0)) / h**2
    fyy = (np.roll(v, -1, axis=1) - 2 * v + np.roll(v, 1, axis=1)) / h**2
    vp = np.roll(v, -1, axis=0)
    vm = np.roll(v, 1, axis=0)
    fxy = (np.roll(vp, -1, axis=1) - np.roll(vp, 1, axis=1)
           - np.roll(vm, -1, axis=1) + np.roll(vm, 1, axis=1)) / (4 * h**2)
    return np.stack([fxx, fxy, fyy], axis=-1)


def inv_helmholtz(f, gamma):
    """Solve (I - gamma*Laplacian) u = f on the torus, mode by mode.

    Uses the exact spectral symbol 4*pi^2*|k|^2, so each resolvable
    Fourier mode is handled without discretization error.
    """
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    v = _as_values(f)
    n = v.shape[0]
    k = np.fft.fftfreq(n, d=1.0 / n)
    kx = k[:, None]
    ky = k[None, : n // 2 + 1]
    sym = 1.0 + gamma * 4.0 * np.pi**2 * (kx**2 + ky**2)
    u = np.fft.irfft2(np.fft.rfft2(v) / sym, s=(n, n))
    if isinstance(f, PeriodicScalarField):
        return PeriodicScalarField(f.grid, u)
    return u


def spectral_gradient(v):
    """Fourier-differentiated gradient of a periodic field, shape (n, n, 2)."""
    v = _as_values(v)
    n = v.shape[0]
    k = np.fft.fftfreq(n, d=1.0 / n)
    ik = 2j * np.pi * k
    vh = np.fft.fft2(v)
    gx = np.fft.ifft2(ik[:, None] * vh).real
    gy = np.fft.ifft2(ik[None, :] * vh).real
    return np.stack([gx, gy], axis=-1)


def spectral_hessian(v):
    """Fourier-differentiated Hessian, packed (fxx, fxy, fyy)."""
    v = _as_values(v)
    n = v.shape[0]
    k = np.fft.fftfreq(n, d=1.0 / n)
    ik = 2j * np.pi * k
    vh = np.fft.fft2(v)
    fxx = np.fft.ifft2(ik[:, None] ** 2 * vh).real
    fyy = np.fft.ifft2(ik[None, :] ** 2 * vh).real
    fxy = np.fft.ifft2(ik[:, None] * ik[None, :] * vh).real
    return np.stack([fxx, fxy, fyy], axis=-1)
