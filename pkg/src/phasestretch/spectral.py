"""Frequency grids, discrete Fourier transforms and spectral differentiation.

Conventions used throughout the package:

* frequencies are in cycles/sample, laid out DC-first (unshifted), so
  ``u[k] = k/N`` for ``k < N/2`` and ``(k - N)/N`` otherwise;
* the forward transform is unnormalised and the inverse carries the full
  ``1/N`` (or ``1/(Nx*Ny)``) factor.
"""
from dataclasses import dataclass

import numpy as np
import scipy.fft

from .errors import InvalidSizeError, UnsupportedOrderError


@dataclass(frozen=True)
class FrequencyGrid:
    """Spatial-frequency axes for a 1D or 2D sample array.

    ``u`` runs along the last axis (columns), ``v`` along the first axis
    (rows) of a 2D array; ``v`` is ``None`` for 1D grids.  ``r`` has the
    same shape as the array the grid describes.
    """

    u: np.ndarray
    v: np.ndarray | None
    r: np.ndarray

    @property
    def shape(self):
        return self.r.shape

    @property
    def ndim(self):
        return self.r.ndim

    @property
    def r_max(self):
        return float(self.r.max())


def _axis_freqs(n):
    if n < 2:
        raise InvalidSizeError(f"need at least 2 samples per axis, got {n}")
    return scipy.fft.fftfreq(n)


def freq_grid_1d(n):
    """Return the unshifted frequency grid for ``n`` samples."""
    u = _axis_freqs(n)
    return FrequencyGrid(u=u, v=None, r=np.abs(u))


def freq_grid(shape):
    """Frequency grid for a 1D length or a ``(rows, cols)`` shape."""
    if np.ndim(shape) == 0:
        return freq_grid_1d(int(shape))
    shape = tuple(int(s) for s in shape)
    if len(shape) == 1:
        return freq_grid_1d(shape[0])
    if len(shape) != 2:
        raise InvalidSizeError(f"only 1D and 2D grids are supported, got {shape}")
    v = _axis_freqs(shape[0])
    u = _axis_freqs(shape[1])
    r = np.hypot(v[:, None], u[None, :])
    return FrequencyGrid(u=u, v=v, r=r)


def _check_size(x):
    if x.ndim not in (1, 2):
        raise InvalidSizeError(f"expected a 1D or 2D array, got {x.ndim}D")
    if x.size == 0 or min(x.shape) < 2:
        raise InvalidSizeError(f"need at least 2 samples per axis, got shape {x.shape}")


def forward(x):
    """Unnormalised forward DFT over every axis of a 1D or 2D array.

    The DC bin equals the plain sum of the samples.
    """
    x = np.asarray(x)
    _check_size(x)
    return scipy.fft.fftn(x)


def inverse(X, grid=None):
    """Inverse DFT including the full ``1/N`` normalisation.

    Args:
        X: complex spectrum in unshifted layout.
        grid: optional :class:`FrequencyGrid` the spectrum is declared on;
            a shape mismatch raises :class:`InvalidSizeError`.
    """
    X = np.asarray(X)
    _check_size(X)
    if grid is not None and X.shape != grid.shape:
        raise InvalidSizeError(f"spectrum shape {X.shape} does not match grid {grid.shape}")
    return scipy.fft.ifftn(X)


def _check_even_order(m):
    if m < 2 or m % 2:
        raise UnsupportedOrderError(f"only even derivative orders >= 2 are supported, got {m}")


def spectral_derivative(x, m):
    """m-th derivative of a periodic 1D signal, computed in frequency space.

    Returns ``Re IDFT{(j 2 pi u)^m DFT{x}}``.  For even ``m`` the multiplier
    ``(-1)^(m/2) (2 pi u)^m`` is real and even, so the imaginary part is
    rounding noise only.
    """
    _check_even_order(m)
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise InvalidSizeError("spectral_derivative expects a 1D signal")
    _check_size(x)
    u = freq_grid_1d(x.size).u
    mult = (-1.0) ** (m // 2) * (2.0 * np.pi * u) ** m
    # the mean carries no derivative; removing it keeps constants exactly flat
    return scipy.fft.ifft(mult * scipy.fft.fft(x - x.mean())).real
