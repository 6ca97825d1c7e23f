"""The stretch operator and PST phase extraction for 1D signals and 2D images."""
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.fft
from scipy import ndimage

from . import spectral
from .config import PstConfig
from .errors import InvalidParameterError, InvalidSizeError
from .kernel import (
    LocalizationKernel,
    PhaseKernel,
    lpf_gain,
    phase_profile,
    sigma_to_cutoff,
)

# |E_o| below this fraction of its maximum is treated as zero magnitude.
ZERO_MAGNITUDE_RTOL = 1e-13


@dataclass(frozen=True)
class ImageF:
    """Real intensity image with samples in [0, 1].

    ``bit_depth`` records the integer depth the samples were promoted from
    (``None`` for synthetic float data); ``comments`` carries PGM header
    comments through a load/save round trip.
    """

    samples: np.ndarray
    bit_depth: int | None = None
    comments: tuple = ()

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if not np.all(np.isfinite(s)):
            raise InvalidParameterError("image samples must be finite")
        if s.size and (s.min() < 0 or s.max() > 1):
            raise InvalidParameterError("image samples must lie in [0, 1]")
        object.__setattr__(self, "samples", s)

    @property
    def shape(self):
        return self.samples.shape

    @property
    def height(self):
        return self.samples.shape[0]

    @property
    def width(self):
        return self.samples.shape[-1]

    def __array__(self, dtype=None, copy=None):
        return self.samples if dtype is None else self.samples.astype(dtype)


@dataclass(frozen=True)
class FeatureMap:
    """Per-sample detector response tagged with the method that produced it."""

    values: np.ndarray
    method: str
    params: dict = field(default_factory=dict, compare=False)

    @property
    def shape(self):
        return self.values.shape

    @property
    def value_range(self):
        return float(self.values.min()), float(self.values.max())

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def as_samples(x):
    """Float64 view of an :class:`ImageF`, :class:`FeatureMap` or array-like."""
    if isinstance(x, ImageF):
        return x.samples
    if isinstance(x, FeatureMap):
        return np.asarray(x.values, dtype=float)
    return np.asarray(x, dtype=float)


_NP_PAD_MODES = {"mirror": "reflect", "periodic": "wrap", "zero": "constant"}


def _per_axis(width, ndim):
    if np.ndim(width) == 0:
        return (int(width),) * ndim
    width = tuple(int(w) for w in width)
    if len(width) != ndim:
        raise InvalidParameterError(f"pad width {width} does not match {ndim} axes")
    return width


def pad(x, mode, width):
    """Extend ``x`` by ``width`` samples on both sides of every axis.

    ``mirror`` reflects about the edge sample without repeating it, so
    ``[1, 2, 3]`` with width 2 becomes ``[3, 2, 1, 2, 3, 2, 1]``.
    ``width`` may be an int or one int per axis.
    """
    if mode not in _NP_PAD_MODES:
        raise InvalidParameterError(f"unknown pad mode {mode!r}")
    x = as_samples(x)
    widths = _per_axis(width, x.ndim)
    for w, n in zip(widths, x.shape):
        if w < 0:
            raise InvalidParameterError("pad width must be >= 0")
        if w >= n:
            raise InvalidParameterError(f"pad width {w} must be smaller than axis length {n}")
    if not any(widths):
        return x.copy()
    return np.pad(x, [(w, w) for w in widths], mode=_NP_PAD_MODES[mode])


def crop(x, width):
    """Undo :func:`pad`."""
    x = np.asarray(x)
    widths = _per_axis(width, x.ndim)
    return x[tuple(slice(w, n - w) for w, n in zip(widths, x.shape))]


def default_pad_width(shape):
    return tuple(min(max(16, n // 8), n - 1) for n in shape)


def stretch(x, kernel: PhaseKernel, lpf: LocalizationKernel | None = None):
    """Complex field ``IDFT{ exp(j phi) * L * DFT{x} }`` on the grid of ``x``.

    No padding is applied here; kernel grids must match ``x``'s shape.
    """
    x = as_samples(x)
    if kernel.phase.shape != x.shape:
        raise InvalidSizeError(f"kernel shape {kernel.phase.shape} != input shape {x.shape}")
    K = kernel.complex
    if lpf is not None:
        if lpf.gain.shape != x.shape:
            raise InvalidSizeError(f"lpf shape {lpf.gain.shape} != input shape {x.shape}")
        K = K * lpf.gain
    return spectral.inverse(K * spectral.forward(x))


def _half_radius(shape):
    # radial frequency on the rfft half-spectrum, plus r_max of the full grid
    u = scipy.fft.rfftfreq(shape[-1])
    r_max = float(np.sqrt(sum(np.abs(scipy.fft.fftfreq(n)).max() ** 2 for n in shape)))
    if len(shape) == 1:
        return u, r_max
    # rows k and n - k share |v|; evaluate the first half and mirror it
    n = shape[0]
    v = np.abs(scipy.fft.fftfreq(n)[: n // 2 + 1])
    return np.hypot(v[:, None], u[None, :]), r_max


def _mirror_rows(a, n):
    return np.concatenate([a, a[1:(n + 1) // 2][::-1]], axis=0)


@lru_cache(maxsize=16)
def _half_kernels(shape, warp, strength, cutoff):
    r, r_max = _half_radius(shape)
    phi = phase_profile(r, warp, strength, r_max)
    cos_k, sin_k = np.cos(phi), np.sin(phi)
    if cutoff is not None:
        gain = lpf_gain(r, cutoff)
        cos_k *= gain
        sin_k *= gain
    if len(shape) == 2:
        cos_k, sin_k = _mirror_rows(cos_k, shape[0]), _mirror_rows(sin_k, shape[0])
    cos_k.setflags(write=False)
    sin_k.setflags(write=False)
    return cos_k, sin_k


def stretch_parts(x, warp, strength, cutoff=None):
    """Real and imaginary parts of the stretched field for the warped kernel.

    Equivalent to :func:`stretch` with :func:`~phasestretch.kernel.build_phase_kernel`
    but uses real transforms: ``cos(phi) L`` and ``sin(phi) L`` are real and
    even, so each part is the inverse real transform of a Hermitian spectrum.
    """
    x = as_samples(x)
    spectral._check_size(x)
    cos_k, sin_k = _half_kernels(x.shape, float(warp), float(strength),
                                 None if cutoff is None else float(cutoff))
    # transform relative to one sample so flat inputs give an exactly empty
    # AC spectrum (and hence an exactly zero imaginary part)
    ref = x.flat[0]
    X = scipy.fft.rfftn(x - ref)
    X.flat[0] += ref * x.size
    re = scipy.fft.irfftn(X * cos_k, s=x.shape, overwrite_x=True)
    im = scipy.fft.irfftn(X * sin_k, s=x.shape, overwrite_x=True)
    return re, im


def spatial_lowpass(x, cutoff):
    """Circular pre-smoothing equivalent to multiplying the spectrum by the LPF.

    The Gaussian gain is separable, so each axis is convolved (with wrap
    boundaries) with the exact inverse DFT of its 1D gain.  Taps below
    double-precision relevance are dropped; a wide gain that is still
    non-negligible at Nyquist keeps the full circular kernel.
    """
    x = as_samples(x)
    out = x
    for axis, n in enumerate(x.shape):
        taps = scipy.fft.ifft(lpf_gain(np.abs(scipy.fft.fftfreq(n)), cutoff)).real
        offsets = np.arange(n) - n // 2
        centered = taps[offsets % n]
        keep = np.abs(offsets[np.abs(centered) > 1e-18 * np.abs(centered).max()])
        half = int(keep.max())
        if 2 * half + 1 < n:
            offsets = np.arange(-half, half + 1)
        out = ndimage.correlate1d(out, taps[offsets % n], axis=axis, mode="wrap")
    return out


def _resolve_cutoff(cfg: PstConfig):
    if cfg.lpf is None:
        return None
    if cfg.lpf_domain == "spatial":
        return sigma_to_cutoff(cfg.lpf)
    return float(cfg.lpf)


def phase_angle(re, im):
    """``atan2(im, re)`` folded into (-pi, pi], 0 where the magnitude vanishes."""
    theta = np.arctan2(im, re)
    theta[theta == -np.pi] = np.pi
    mag2 = re * re
    mag2 += im * im
    peak2 = mag2.max() if mag2.size else 0.0
    theta[mag2 <= ZERO_MAGNITUDE_RTOL**2 * peak2] = 0.0
    return theta


def _pst(x, cfg: PstConfig):
    width = default_pad_width(x.shape) if cfg.pad_width is None else _per_axis(cfg.pad_width, x.ndim)
    xp = pad(x, cfg.pad_mode, width)
    re, im = stretch_parts(xp, cfg.warp, cfg.strength, _resolve_cutoff(cfg))
    return phase_angle(crop(re, width), crop(im, width))


def pst2d(image, cfg: PstConfig | None = None):
    """Phase Stretch Transform of a 2D image; returns a ``pst`` FeatureMap."""
    cfg = cfg or PstConfig()
    x = as_samples(image)
    if x.ndim != 2:
        raise InvalidSizeError(f"pst2d expects a 2D image, got {x.ndim}D")
    return FeatureMap(_pst(x, cfg), "pst", cfg.to_dict())


def pst1d(signal, cfg: PstConfig | None = None):
    """Phase Stretch Transform of a 1D signal (radial frequency ``|u|``)."""
    cfg = cfg or PstConfig()
    x = as_samples(signal)
    if x.ndim != 1:
        raise InvalidSizeError(f"pst1d expects a 1D signal, got {x.ndim}D")
    return _pst(x, cfg)
