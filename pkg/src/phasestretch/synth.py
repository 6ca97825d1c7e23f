"""Deterministic synthetic inputs with known edge locations."""
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import ndimage
from scipy.special import ndtr

from .errors import InvalidIndexError, InvalidParameterError
from .transform import ImageF, as_samples


@dataclass(frozen=True)
class Edge:
    """One ground-truth edge.

    ``position`` is a sample coordinate (half-integers sit between samples)
    along ``axis``, the axis across which the intensity changes.  For 2D
    edges ``span`` is the ``[start, stop)`` index range along the other
    axis.  ``polarity`` is +1 for a dark-to-bright transition in increasing
    coordinate and -1 otherwise.
    """

    position: float
    contrast: float
    base: float
    polarity: int = 1
    axis: int = 0
    span: tuple | None = None
    region: str | None = None


@dataclass(frozen=True)
class EdgeGroundTruth:
    edges: tuple = ()

    def __post_init__(self):
        for e in self.edges:
            if not e.contrast > 0:
                raise InvalidParameterError(f"edge contrast must be > 0: {e}")
            if e.base + e.contrast > 1 + 1e-12:
                raise InvalidParameterError(f"edge exceeds unit brightness: {e}")

    def __len__(self):
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)

    def region(self, name):
        return EdgeGroundTruth(tuple(e for e in self.edges if e.region == name))

    def to_dict(self):
        return {"edges": [{**asdict(e), "span": list(e.span) if e.span else None}
                          for e in self.edges]}

    @classmethod
    def from_dict(cls, data):
        edges = []
        for d in data.get("edges", []):
            d = dict(d)
            if d.get("span") is not None:
                d["span"] = tuple(d["span"])
            edges.append(Edge(**d))
        return cls(tuple(edges))


def _smooth_step(x, position, sigma):
    if sigma == 0:
        return (x > position).astype(float)
    return ndtr((x - position) / sigma)


def smooth_pulse(n=512, center=None, width=None, amplitude=0.6, base=0.2, sigma=0.0):
    """Raised-cosine pulse on a constant base.

    The pulse is ``amplitude * (1 + cos(pi (x - center) / width)) / 2`` for
    ``|x - center| <= width``, so ``width`` is its full width at half
    maximum; the two half-maximum points are the ground-truth edges.
    ``sigma > 0`` additionally blurs it with a Gaussian of that many
    samples, which suppresses the algebraic (1/u^3) spectral tail.
    """
    center = n // 2 if center is None else center
    width = n / 4 if width is None else width
    if not 0 < width < n:
        raise InvalidParameterError(f"need 0 < width < n, got width={width}, n={n}")
    if base < 0 or amplitude < 0 or base + amplitude > 1:
        raise InvalidParameterError("need base >= 0, amplitude >= 0, base + amplitude <= 1")
    if not 0 <= center < n:
        raise InvalidParameterError(f"center {center} outside [0, {n})")
    if sigma < 0:
        raise InvalidParameterError("sigma must be >= 0")
    offset = np.arange(n) - center
    inside = np.abs(offset) <= width
    pulse = np.where(inside, 0.5 * (1 + np.cos(np.pi * np.clip(offset / width, -1, 1))), 0.0)
    signal = base + amplitude * pulse
    if sigma > 0:
        signal = ndimage.gaussian_filter1d(signal, sigma, mode="nearest")
    if amplitude == 0:
        return signal, EdgeGroundTruth()
    edges = (
        Edge(center - width / 2, amplitude, base, polarity=1),
        Edge(center + width / 2, amplitude, base, polarity=-1),
    )
    return signal, EdgeGroundTruth(edges)


def staircase(n=512, contrasts=(0.05, 0.1, 0.2), base=0.3, sigma=1.0):
    """Rectangular steps that each rise from ``base`` and return to it.

    The signal is split into ``2k + 1`` equal segments for ``k`` steps and
    the odd segments are raised by the corresponding contrast.  Edges are
    Gaussian-blurred with ``sigma`` samples (0 keeps them hard).
    """
    contrasts = [float(c) for c in contrasts]
    if base < 0 or any(c <= 0 for c in contrasts):
        raise InvalidParameterError("need base >= 0 and positive contrasts")
    if contrasts and base + max(contrasts) > 1:
        raise InvalidParameterError("base + contrast exceeds 1")
    if sigma < 0:
        raise InvalidParameterError("sigma must be >= 0")
    k = len(contrasts)
    seg = n // (2 * k + 1)
    if k and seg < 4:
        raise InvalidParameterError(f"n={n} too short for {k} steps")
    lead = (n - seg * (2 * k + 1)) // 2
    x = np.arange(n, dtype=float)
    signal = np.full(n, float(base))
    edges = []
    for i, c in enumerate(contrasts):
        rise = lead + (2 * i + 1) * seg - 0.5
        fall = rise + seg
        signal += c * (_smooth_step(x, rise, sigma) - _smooth_step(x, fall, sigma))
        edges.append(Edge(rise, c, base, polarity=1))
        edges.append(Edge(fall, c, base, polarity=-1))
    return signal, EdgeGroundTruth(tuple(edges))


def _bar_edges(col0, col1, row0, row1, contrast, base_fn, region):
    # four edges of the rectangle [row0, row1) x [col0, col1)
    return [
        Edge(col0 - 0.5, contrast, base_fn(col0), 1, axis=1, span=(row0, row1), region=region),
        Edge(col1 - 0.5, contrast, base_fn(col1 - 1), -1, axis=1, span=(row0, row1), region=region),
        Edge(row0 - 0.5, contrast, base_fn((col0 + col1) / 2), 1, axis=0, span=(col0, col1), region=region),
        Edge(row1 - 0.5, contrast, base_fn((col0 + col1) / 2), -1, axis=0, span=(col0, col1), region=region),
    ]


def hdr_testcard(width=256, height=256, sigma=1.0, n_bars=3):
    """Four-quadrant high-dynamic-range card.

    * top-left ``dark``: base 0.02, bars of contrast 0.01;
    * top-right ``bright``: base 0.9, bars of contrast 0.05;
    * bottom-left ``ramp``: brightness falling from 0.9 to 0.1 left to
      right (with a sub-column shift per row) under bars of contrast 0.05;
    * bottom-right: blank mid-gray, no edges.

    Returns the card as an :class:`ImageF` tagged 14-bit plus its ground truth.
    """
    if width < 64 or height < 64:
        raise InvalidParameterError(f"test card needs at least 64x64, got {width}x{height}")
    qh, qw = height // 2, width // 2
    img = np.empty((height, width))
    img[:qh, :qw] = 0.02
    img[:qh, qw:] = 0.9
    img[qh:, qw:] = 0.5
    yl = np.arange(height - qh)[:, None]
    xl = np.arange(width - qw)[None, :]
    ramp_t = (xl + yl / (height - qh)) / (width - qw)
    img[qh:, :qw] = 0.9 - 0.8 * ramp_t

    def ramp_at(col):
        return 0.9 - 0.8 * (col + 0.5) / (width - qw)

    bar_w = max(2, qw // (2 * n_bars + 2))
    row_margin = max(4, qh // 8)
    edges = []
    quads = (
        ("dark", 0, 0, 0.01, lambda c: 0.02),
        ("bright", 0, qw, 0.05, lambda c: 0.9),
        ("ramp", qh, 0, 0.05, ramp_at),
    )
    for region, r_off, c_off, contrast, base_fn in quads:
        r0, r1 = r_off + row_margin, r_off + qh - row_margin
        for i in range(n_bars):
            c0 = c_off + bar_w * (2 * i + 1)
            c1 = c0 + bar_w
            img[r0:r1, c0:c1] += contrast
            edges += _bar_edges(c0, c1, r0, r1, contrast,
                                lambda c, f=base_fn, o=c_off: f(c - o), region)
    if sigma > 0:
        img = ndimage.gaussian_filter(img, sigma, mode="nearest")
    img = np.clip(img, 0.0, 1.0)
    return ImageF(img, bit_depth=14), EdgeGroundTruth(tuple(edges))


def line_scan(image, row):
    """Copy of one image row as a 1D signal."""
    x = as_samples(image)
    if x.ndim != 2:
        raise InvalidIndexError("line_scan expects a 2D image")
    if not 0 <= row < x.shape[0]:
        raise InvalidIndexError(f"row {row} outside [0, {x.shape[0]})")
    return x[row].copy()


def add_noise(x, std, seed=0):
    """Additive Gaussian noise from a seeded generator, clipped to [0, 1]."""
    x = as_samples(x)
    if std == 0:
        return x.copy()
    rng = np.random.default_rng(seed)
    return np.clip(x + rng.normal(0.0, std, x.shape), 0.0, 1.0)


def _window(position, halfwidth, n):
    lo = max(0, math.ceil(position - halfwidth))
    hi = min(n, math.floor(position + halfwidth) + 1)
    return slice(lo, hi)


def _peak(block, axis):
    return np.abs(block).max(axis=axis)


def _swing(block, axis):
    return block.max(axis=axis) - block.min(axis=axis)


MEASURES = {"peak": _peak, "swing": _swing}


def edge_profile(feature, edge: Edge, window=3.0, trim=3, measure="peak"):
    """Edge strength at each point along a ground-truth edge.

    ``measure="peak"`` takes the largest ``|response|`` within ``window``
    samples across the edge; ``"swing"`` takes the peak-to-peak excursion of
    the signed response, which captures both lobes of a bipolar detector.
    1D maps give a single value.  For 2D maps ``trim`` points are dropped
    from both ends of the edge's span so bar corners do not count.
    """
    reduce = MEASURES[measure]
    m = as_samples(feature)
    if m.ndim == 1:
        return np.array([reduce(m[_window(edge.position, window, m.size)], 0)])
    across = _window(edge.position, window, m.shape[edge.axis])
    start, stop = edge.span
    trim = min(trim, (stop - start - 1) // 2)
    along = slice(start + trim, stop - trim)
    if edge.axis == 1:
        return reduce(m[along, across], 1)
    return reduce(m[across, along], 0)


def edge_peaks(feature, truth: EdgeGroundTruth, window=3.0, trim=3, measure="peak"):
    """Strongest response of every ground-truth edge, in ground-truth order."""
    return np.array([edge_profile(feature, e, window, trim, measure).max() for e in truth])


def edge_minimum(feature, truth: EdgeGroundTruth, window=3.0, trim=3, measure="peak"):
    """Weakest point response over all ground-truth edge points."""
    if not len(truth):
        raise InvalidParameterError("ground truth has no edges")
    return float(min(edge_profile(feature, e, window, trim, measure).min() for e in truth))


def proportionality_deviation(strengths, contrasts):
    """Largest relative departure of ``strength / contrast`` from the first edge's ratio."""
    ratio = np.asarray(strengths, dtype=float) / np.asarray(contrasts, dtype=float)
    return float(np.max(np.abs(ratio / ratio[0] - 1.0)))


def edge_table(feature, truth: EdgeGroundTruth, window=3.0, trim=3):
    """Per-edge peak and swing alongside the ground-truth attributes."""
    rows = []
    for e in truth:
        rows.append({
            "position": e.position,
            "contrast": e.contrast,
            "base": e.base,
            "polarity": e.polarity,
            "region": e.region,
            "peak": float(edge_profile(feature, e, window, trim, "peak").max()),
            "swing": float(edge_profile(feature, e, window, trim, "swing").max()),
        })
    return rows
