"""Closed-form small-phase approximations of the PST, used as oracles.

All three approximations divide a weighted sum of even spectral derivatives
by a brightness term.  Samples whose denominator does not exceed the floor
are excluded and come back as NaN; :func:`compare_oracle` ignores them.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import spectral
from .errors import EmptyDomainError, InvalidSizeError
from .kernel import TaylorCoeffs
from .spectral import spectral_derivative

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class OracleReport:
    max_abs_deviation: float
    normalized_deviation: float
    correlation: float
    oracle_peak: float
    n_valid: int
    mask: np.ndarray

    def to_dict(self):
        return {
            "max_abs_deviation": self.max_abs_deviation,
            "normalized_deviation": self.normalized_deviation,
            "correlation": self.correlation,
            "oracle_peak": self.oracle_peak,
            "n_valid": self.n_valid,
        }


def _as_signal(signal):
    x = np.asarray(signal, dtype=float)
    if x.ndim != 1:
        raise InvalidSizeError("analytic oracles expect a 1D signal")
    return x


def _floor(x, eps):
    # eps is relative to the peak intensity
    return eps * float(np.max(np.abs(x))) if x.size else 0.0


def _masked_ratio(num, den, floor):
    valid = den > floor
    if not valid.any():
        raise EmptyDomainError("no sample has a denominator above the floor")
    out = np.full(num.shape, np.nan)
    out[valid] = num[valid] / den[valid]
    return out


def derivative_weight(m, coeff):
    """Weight ``(-1)^(m/2) phi_m / (m! (2 pi)^m)`` of the m-th derivative."""
    return (-1.0) ** (m // 2) * coeff / (math.factorial(m) * TWO_PI**m)


def pst_smallphase(signal, coeffs: TaylorCoeffs, eps=1e-6):
    """Small-phase transfer function for an arbitrary even kernel.

    ``sum_m w_m D_m(x) / x`` with ``w_m`` from :func:`derivative_weight`.
    """
    x = _as_signal(signal)
    num = np.zeros_like(x)
    for m, c in coeffs:
        num += derivative_weight(m, c) * spectral_derivative(x, m)
    return _masked_ratio(num, x, _floor(x, eps))


def pst_smallphase_field(signal, coeffs: TaylorCoeffs, eps=1e-6):
    """Same quantity via the linearised field ``IDFT{(1 + j phi_T(u)) X}``.

    The imaginary part of the linearised output over the input; agrees with
    :func:`pst_smallphase` up to rounding.
    """
    x = _as_signal(signal)
    u = spectral.freq_grid_1d(x.size).u
    field = spectral.inverse((1.0 + 1j * coeffs.evaluate(u)) * spectral.forward(x))
    return _masked_ratio(field.imag, x, _floor(x, eps))


def pst_quadratic(signal, eps=1e-6):
    """Small-phase response of the unit quadratic kernel ``phi = u^2``."""
    x = _as_signal(signal)
    num = -spectral_derivative(x, 2) / TWO_PI**2
    return _masked_ratio(num, x, _floor(x, eps))


def pst_quadratic_order3(signal, eps=1e-6):
    """Quadratic kernel with cos/sin expanded through three terms each."""
    x = _as_signal(signal)
    d = {m: spectral_derivative(x, m) for m in (2, 4, 6, 8, 10)}
    num = (-d[2] / TWO_PI**2
           + d[6] / (math.factorial(3) * TWO_PI**6)
           - d[10] / (math.factorial(5) * TWO_PI**10))
    den = (x
           - d[4] / (math.factorial(2) * TWO_PI**4)
           + d[8] / (math.factorial(4) * TWO_PI**8))
    return _masked_ratio(num, den, _floor(x, eps))


def compare_oracle(numerical, analytic, mask=None):
    """Deviation and correlation between a numerical run and an oracle.

    ``mask`` defaults to the samples where both inputs are finite.
    """
    a = np.asarray(numerical, dtype=float)
    b = np.asarray(analytic, dtype=float)
    if a.shape != b.shape:
        raise InvalidSizeError(f"length mismatch: {a.shape} vs {b.shape}")
    if mask is None:
        mask = np.isfinite(a) & np.isfinite(b)
    else:
        mask = np.asarray(mask, dtype=bool) & np.isfinite(a) & np.isfinite(b)
    if not mask.any():
        raise EmptyDomainError("comparison mask is empty")
    a, b = a[mask], b[mask]
    dev = float(np.max(np.abs(a - b)))
    peak = float(np.max(np.abs(b)))
    norm_dev = dev / peak if peak > 0 else (0.0 if dev == 0 else math.inf)
    if np.ptp(a) == 0 or np.ptp(b) == 0:
        corr = 1.0 if np.array_equal(a, b) else 0.0
    else:
        corr = float(np.clip(np.corrcoef(a, b)[0, 1], -1.0, 1.0))
    return OracleReport(dev, norm_dev, corr, peak, int(mask.sum()), mask)
