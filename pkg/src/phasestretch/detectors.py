"""Derivative-of-Gaussian baseline, hybrid detector and response post-processing."""
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import InvalidParameterError, InvalidSizeError
from .transform import FeatureMap, ImageF, as_samples


@dataclass(frozen=True)
class HybridPolicy:
    """How PST and derivative maps are merged.

    ``percentile`` is the quantile of ``|map|`` each input is divided by
    before the per-pixel maximum is taken.
    """

    percentile: float = 0.99
    rule: str = "max"

    def __post_init__(self):
        if not 0.5 < self.percentile <= 1:
            raise InvalidParameterError(f"percentile must be in (0.5, 1], got {self.percentile}")
        if self.rule != "max":
            raise InvalidParameterError(f"unsupported combination rule {self.rule!r}")


def smooth_derivative(image, sigma=2.0, mode="mirror"):
    """Gradient magnitude of derivative-of-Gaussian responses.

    2D input gives ``sqrt(gx^2 + gy^2)``; 1D input gives ``|gx|``.
    """
    if not sigma > 0:
        raise InvalidParameterError(f"sigma must be > 0, got {sigma}")
    x = as_samples(image)
    if x.ndim == 1:
        values = np.abs(ndimage.gaussian_filter1d(x, sigma, order=1, mode=mode))
    elif x.ndim == 2:
        gy = ndimage.gaussian_filter(x, sigma, order=(1, 0), mode=mode)
        gx = ndimage.gaussian_filter(x, sigma, order=(0, 1), mode=mode)
        values = np.hypot(gx, gy)
    else:
        raise InvalidSizeError(f"expected 1D or 2D input, got {x.ndim}D")
    return FeatureMap(values, "derivative", {"sigma": sigma})


def log_equalize(image, k=255.0):
    """Brightness equalisation ``ln(1 + k x) / ln(1 + k)``.

    Maps [0, 1] onto itself with slope ``(1 + k)`` times larger at 0 than at 1.
    """
    if not k > 0:
        raise InvalidParameterError(f"k must be > 0, got {k}")
    x = as_samples(image)
    out = np.log1p(k * x) / math.log1p(k)
    if isinstance(image, ImageF):
        return ImageF(np.clip(out, 0.0, 1.0), image.bit_depth, image.comments)
    return out


def _values_and_method(fmap, default):
    if isinstance(fmap, FeatureMap):
        return np.asarray(fmap.values, dtype=float), fmap.method
    return np.asarray(fmap, dtype=float), default


def normalize_robust(fmap, p=0.99):
    """``|map|`` divided by its ``p``-quantile and clipped to [0, 1].

    An all-zero map is returned unchanged.  When the quantile itself is 0
    (sparse maps) the maximum is used instead.
    """
    if not 0.5 < p <= 1:
        raise InvalidParameterError(f"p must be in (0.5, 1], got {p}")
    values, method = _values_and_method(fmap, "map")
    mag = np.abs(values)
    peak = mag.max() if mag.size else 0.0
    if peak == 0:
        return FeatureMap(values.copy(), method)
    scale = np.quantile(mag, p)
    if scale == 0:
        scale = peak
    return FeatureMap(np.clip(mag / scale, 0.0, 1.0), method, {"scale": float(scale), "p": p})


def hybrid(pst_map, deriv_map, policy: HybridPolicy | None = None):
    """Per-pixel maximum of the robustly normalised PST and derivative maps."""
    policy = policy or HybridPolicy()
    a = normalize_robust(pst_map, policy.percentile)
    b = normalize_robust(deriv_map, policy.percentile)
    if a.shape != b.shape:
        raise InvalidSizeError(f"map shapes differ: {a.shape} vs {b.shape}")
    values = np.maximum(np.abs(a.values), np.abs(b.values))
    return FeatureMap(values, "hybrid", {"percentile": policy.percentile, "rule": policy.rule})


def threshold(fmap, q_lo=0.9, q_hi=1.0):
    """Binary map of pixels whose magnitude lies in a quantile band.

    Quantiles are taken over the nonzero magnitudes (inverted-CDF
    definition, i.e. order statistics), and zero pixels are never selected.
    The upper bound clips over-bright responses.
    """
    if not 0 <= q_lo < q_hi <= 1:
        raise InvalidParameterError(f"need 0 <= q_lo < q_hi <= 1, got {q_lo}, {q_hi}")
    values, _ = _values_and_method(fmap, "map")
    mag = np.abs(values)
    nz = mag[mag > 0]
    if nz.size == 0:
        return np.zeros(mag.shape, dtype=bool)
    lo, hi = np.quantile(nz, [q_lo, q_hi], method="inverted_cdf")
    return (mag > 0) & (mag >= lo) & (mag <= hi)
