"""
Lattice Fourier machinery on the periodic N x N square grid.

Spectra are stored in FFT-natural order (index ``k = 0 .. N-1`` along each
axis) and mapped to the signed momentum labels of the frequency window

    W(n) = {-floor((n-1)/2), ..., +floor(n/2)}^2

only when a window is selected. The transform is the unitary 2-D DFT

    F[k, l] = (1/N) * sum_{x,y} f[x, y] exp(-2j pi (k x + l y) / N),

which diagonalizes the nearest-neighbour torus Laplacian with eigenvalues
``4 - 2 cos(2 pi k / N) - 2 cos(2 pi l / N)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import NonHermitianInput, WindowTooLarge

__all__ = [
    "FrequencyWindow",
    "SpectralField",
    "WindowedSpectrum",
    "window",
    "window_labels",
    "lattice_eigenvalue",
    "eigenvalue_grid",
    "as_field",
    "forward_dft",
    "inverse_dft",
    "hermitian_residual",
    "select_window",
    "coarse_grain",
]

# relative imaginary residual above which an inverse transform is flagged
HERMITIAN_RTOL = 1e-8


def _check_size(n, name="n"):
    if isinstance(n, (bool, np.bool_)) or int(n) != n or n < 1:
        raise ValueError(f"{name} must be a positive integer, got {n!r}")
    return int(n)


def window_labels(n):
    """Signed momentum labels ``-floor((n-1)/2) .. floor(n/2)`` along one axis."""
    n = _check_size(n)
    return np.arange(-((n - 1) // 2), n // 2 + 1)


@dataclass(frozen=True)
class FrequencyWindow:
    """The set W(n) of retained momenta, iterated in row-major order."""

    n: int

    def __post_init__(self):
        object.__setattr__(self, "n", _check_size(self.n))

    @property
    def labels(self):
        return window_labels(self.n)

    @property
    def indices(self):
        ks = self.labels.tolist()
        return [(k, l) for k in ks for l in ks]

    def __len__(self):
        return self.n * self.n

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.indices)

    def __contains__(self, kl):
        k, l = kl
        lo, hi = -((self.n - 1) // 2), self.n // 2
        return lo <= k <= hi and lo <= l <= hi


def window(n) -> FrequencyWindow:
    return FrequencyWindow(n)


def lattice_eigenvalue(k, l, N):
    """
    Eigenvalue of the periodic nearest-neighbour Laplacian at momentum (k, l).

    Parameters
    ----------
    k, l : int or array_like
        Momentum labels; any integers (the result is N-periodic).
    N : int
        Side length of the lattice the momenta live on.

    Returns
    -------
    lam : float or ndarray
        ``4 - 2 cos(2 pi k / N) - 2 cos(2 pi l / N)``, in ``[0, 8]``.
    """
    N = _check_size(N, "N")
    k = np.asarray(k)
    l = np.asarray(l)
    # reduce first so that the cosine argument stays in [0, 2 pi)
    kr = np.mod(k, N) / N
    lr = np.mod(l, N) / N
    lam = 4.0 - 2.0 * np.cos(2.0 * np.pi * kr) - 2.0 * np.cos(2.0 * np.pi * lr)
    lam = np.maximum(lam, 0.0)
    if lam.ndim == 0:
        return float(lam)
    return lam


def eigenvalue_grid(N):
    """Laplacian eigenvalues on the full N x N spectrum, FFT-natural order."""
    k = np.arange(N)
    return lattice_eigenvalue(k[:, None], k[None, :], N)


def as_field(f):
    """Validate a pixel field: a finite real square 2-D array (copied to float)."""
    f = np.array(f, dtype=float)
    if f.ndim != 2 or f.shape[0] != f.shape[1] or f.shape[0] < 1:
        raise ValueError(f"expected a square 2-D field, got shape {f.shape}")
    if not np.all(np.isfinite(f)):
        raise ValueError("field contains non-finite values")
    return f


def _readonly(a):
    a = np.array(a)
    a.setflags(write=False)
    return a


def hermitian_residual(coeffs):
    """Max-abs deviation of ``coeffs`` from conjugate symmetry ``F(-k) = conj F(k)``."""
    c = np.asarray(coeffs)
    flipped = np.roll(c[::-1, ::-1], 1, axis=(0, 1))
    return float(np.max(np.abs(c - np.conj(flipped)))) if c.size else 0.0


@dataclass(frozen=True, eq=False)
class SpectralField:
    """
    Fourier coefficients of a lattice field in FFT-natural order.

    ``hermitian`` is True iff the coefficients are conjugate symmetric, i.e.
    the field they came from is real.
    """

    coeffs: np.ndarray
    hermitian: bool

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError(f"expected square coefficient array, got {c.shape}")
        object.__setattr__(self, "coeffs", _readonly(c))

    @property
    def size(self):
        return self.coeffs.shape[0]

    def at(self, k, l):
        N = self.size
        return self.coeffs[k % N, l % N]

    def signed(self):
        """Coefficients laid out on W(N) in signed order, shape (N, N)."""
        return self.coeffs[np.ix_(window_labels(self.size) % self.size,
                                  window_labels(self.size) % self.size)]

    def power(self):
        return np.abs(self.coeffs) ** 2


def forward_dft(f) -> SpectralField:
    """Unitary 2-D DFT of a real pixel field."""
    f = as_field(f)
    return SpectralField(np.fft.fft2(f, norm="ortho"), hermitian=True)


def inverse_dft(F: SpectralField):
    """
    Inverse unitary DFT, returning the real part of the pixel field.

    A :class:`NonHermitianInput` warning is emitted when the imaginary
    residual exceeds ``1e-8`` times the largest pixel magnitude.
    """
    coeffs = F.coeffs if isinstance(F, SpectralField) else np.asarray(F, dtype=complex)
    z = np.fft.ifft2(coeffs, norm="ortho")
    resid = float(np.max(np.abs(z.imag))) if z.size else 0.0
    scale = float(np.max(np.abs(z))) if z.size else 0.0
    if resid > HERMITIAN_RTOL * scale:
        warnings.warn(
            f"spectrum is not Hermitian: imaginary residual {resid:.3e} "
            f"(field max {scale:.3e}); returning the real part",
            NonHermitianInput,
            stacklevel=2,
        )
    return np.ascontiguousarray(z.real)


@dataclass(frozen=True, eq=False)
class WindowedSpectrum:
    """
    Coefficients of an N-lattice spectrum restricted to W(n).

    ``coeffs[i, j]`` holds the mode with signed labels
    ``(window_labels(n)[i], window_labels(n)[j])``.
    """

    coeffs: np.ndarray
    N: int

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError(f"expected square coefficient array, got {c.shape}")
        N = _check_size(self.N, "N")
        if c.shape[0] > N:
            raise WindowTooLarge(f"window side {c.shape[0]} exceeds lattice side {N}")
        object.__setattr__(self, "coeffs", _readonly(c))
        object.__setattr__(self, "N", N)

    @property
    def n(self):
        return self.coeffs.shape[0]

    @property
    def labels(self):
        return window_labels(self.n)

    @property
    def window(self):
        return FrequencyWindow(self.n)

    def power(self):
        return np.abs(self.coeffs) ** 2

    def eigenvalues(self):
        """Laplacian eigenvalues of the retained modes, measured on the N lattice."""
        ks = self.labels
        return lattice_eigenvalue(ks[:, None], ks[None, :], self.N)

    def as_dict(self):
        ks = self.labels.tolist()
        return {(k, l): complex(self.coeffs[i, j])
                for i, k in enumerate(ks) for j, l in enumerate(ks)}


def select_window(F: SpectralField, n) -> WindowedSpectrum:
    """Restrict a spectrum to the modes of W(n) without rescaling."""
    n = _check_size(n)
    N = F.size
    if n > N:
        raise WindowTooLarge(f"window side n={n} exceeds lattice side N={N}")
    idx = window_labels(n) % N
    return WindowedSpectrum(F.coeffs[np.ix_(idx, idx)], N)


def coarse_grain(F: SpectralField, n, exponent=0.0) -> SpectralField:
    """
    Band-limit a spectrum to W(n) and rescale it by ``(n/N)**exponent``.

    The result is re-indexed onto the n x n lattice (FFT-natural order), so
    ``inverse_dft`` of it is the coarse pixel field. For even ``n < N`` the
    unpaired window edge usually breaks conjugate symmetry; the ``hermitian``
    flag reports this.
    """
    W = select_window(F, n)
    scale = (W.n / F.size) ** float(exponent)
    coarse = np.empty((W.n, W.n), dtype=complex)
    pos = W.labels % W.n
    coarse[np.ix_(pos, pos)] = scale * W.coeffs
    tol = HERMITIAN_RTOL * max(float(np.max(np.abs(coarse))), np.finfo(float).tiny)
    return SpectralField(coarse, hermitian=hermitian_residual(coarse) <= tol)
