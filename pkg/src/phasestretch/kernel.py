"""Warped phase kernel, localization low-pass and Taylor coefficients."""
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, UnsupportedOrderError
from .spectral import FrequencyGrid


@dataclass(frozen=True)
class PhaseKernel:
    """Phase grid ``phi`` (radians) on a frequency grid.

    The complex kernel is ``exp(1j * phi)``.  ``warp`` and ``strength`` are
    ``None`` for kernels that are not built from the warped profile (the
    quadratic test kernel).
    """

    phase: np.ndarray
    warp: float | None
    strength: float | None
    r_max: float

    @property
    def complex(self):
        return np.exp(1j * self.phase)


@dataclass(frozen=True)
class LocalizationKernel:
    gain: np.ndarray
    cutoff: float


@dataclass(frozen=True)
class TaylorCoeffs:
    """Even-order Taylor coefficients ``[phi2, phi4, ..., phiM]`` of the phase at 0."""

    coeffs: tuple
    order: int

    @property
    def orders(self):
        return tuple(range(2, self.order + 1, 2))

    def __iter__(self):
        return iter(zip(self.orders, self.coeffs))

    def evaluate(self, u):
        """Truncated series ``sum phi_m u^m / m!``."""
        u = np.asarray(u, dtype=float)
        out = np.zeros_like(u)
        for m, c in self:
            out = out + c * u**m / math.factorial(m)
        return out


def _profile_g(x):
    # x*arctan(x) - ln(1 + x^2)/2; log1p keeps small-x accuracy
    return x * np.arctan(x) - 0.5 * np.log1p(x * x)


def _check_warp(warp, r_max):
    if not warp > 0:
        raise InvalidParameterError(f"warp must be > 0, got {warp}")
    if not r_max > 0:
        raise InvalidParameterError(f"r_max must be > 0, got {r_max}")


def phase_profile(r, warp, strength, r_max):
    """Radial phase ``S * g(W r) / g(W r_max)``, ``g(x) = x atan x - ln(1+x^2)/2``.

    The profile is 0 at DC, even in ``r`` and reaches exactly ``strength`` at
    ``r_max``.
    """
    _check_warp(warp, r_max)
    if strength < 0:
        raise InvalidParameterError(f"strength must be >= 0, got {strength}")
    r = np.asarray(r, dtype=float)
    # ratio first so r == r_max gives exactly ``strength``
    return strength * (_profile_g(warp * r) / _profile_g(warp * r_max))


def build_phase_kernel(grid: FrequencyGrid, warp, strength):
    r_max = grid.r_max
    phase = phase_profile(grid.r, warp, strength, r_max)
    return PhaseKernel(phase=phase, warp=float(warp), strength=float(strength), r_max=r_max)


def build_quadratic_kernel(grid: FrequencyGrid, coefficient=1.0):
    """Test kernel ``phi = c * r^2`` used to check the closed-form oracles."""
    return PhaseKernel(phase=coefficient * grid.r**2, warp=None, strength=None, r_max=grid.r_max)


def lpf_gain(r, cutoff):
    """Gaussian gain with half amplitude at ``r == cutoff``; ``cutoff=inf`` gives 1."""
    if not cutoff > 0:
        raise InvalidParameterError(f"lpf cutoff must be > 0, got {cutoff}")
    r = np.asarray(r, dtype=float)
    return np.exp(-((r / cutoff) ** 2) * math.log(2.0))


def build_lpf(grid: FrequencyGrid, cutoff):
    return LocalizationKernel(gain=lpf_gain(grid.r, cutoff), cutoff=float(cutoff))


def sigma_to_cutoff(sigma):
    """Half-amplitude cutoff of the spectrum of a spatial Gaussian of ``sigma`` px.

    ``exp(-2 pi^2 sigma^2 r^2)`` is 0.5 at ``r = sqrt(ln 2 / 2) / (pi sigma)``.
    """
    if not sigma > 0:
        raise InvalidParameterError(f"sigma must be > 0, got {sigma}")
    return math.sqrt(math.log(2.0) / 2.0) / (math.pi * sigma)


def cutoff_to_sigma(cutoff):
    if not cutoff > 0:
        raise InvalidParameterError(f"lpf cutoff must be > 0, got {cutoff}")
    return math.sqrt(math.log(2.0) / 2.0) / (math.pi * cutoff)


def taylor_coeffs(warp, strength, r_max, order=6):
    """Closed-form Taylor coefficients of :func:`phase_profile` at ``r = 0``.

    From ``g(x) = sum_k (-1)^k x^(2k+2) / ((2k+1)(2k+2))`` the m-th
    derivative at 0 is ``(-1)^(m/2-1) (m-2)! W^m`` scaled by ``S / g(W r_max)``.
    The series only converges for ``W |u| < 1``.
    """
    if order < 2 or order % 2:
        raise UnsupportedOrderError(f"Taylor order must be even and >= 2, got {order}")
    _check_warp(warp, r_max)
    scale = strength / float(_profile_g(warp * r_max))
    coeffs = tuple(
        scale * (-1.0) ** (m // 2 - 1) * math.factorial(m - 2) * warp**m
        for m in range(2, order + 1, 2)
    )
    return TaylorCoeffs(coeffs=coeffs, order=order)
