"""Tunable parameters and the published warp/strength presets."""
from dataclasses import asdict, dataclass, replace

from .errors import InvalidParameterError

# (warp, strength) pairs used for the road scenes, the 1D oracle comparison
# and the contrast-staircase / HDR experiments respectively.
PRESETS = {
    "fig1": (22.0, 500.0),
    "fig2": (12.5, 4000.0),
    "fig3-4": (12.15, 0.48),
}

PAD_MODES = ("mirror", "periodic", "zero")
LPF_DOMAINS = ("freq", "spatial")


@dataclass(frozen=True)
class PstConfig:
    """All knobs of a PST run.

    Attributes:
        warp: warp ``W`` of the phase profile.
        strength: peak phase ``S`` in radians, reached at the grid's
            largest radial frequency.
        lpf: localization kernel size, or ``None`` for ``L = 1``.  Read as
            a half-amplitude cutoff in cycles/sample when ``lpf_domain`` is
            ``"freq"`` and as a spatial Gaussian sigma in pixels when it is
            ``"spatial"``.
        pad_mode: boundary extension, one of ``mirror``, ``periodic``, ``zero``.
        pad_width: pixels added on each side; ``None`` picks
            ``max(16, n // 8)`` per axis (capped below the axis length).
        order: Taylor order used by the analytic oracles.
        eps: denominator floor as a fraction of the maximum intensity.
        q_lo, q_hi: quantile band kept by thresholding.
    """

    warp: float = 12.15
    strength: float = 0.48
    lpf: float | None = None
    lpf_domain: str = "freq"
    pad_mode: str = "mirror"
    pad_width: int | None = None
    order: int = 6
    eps: float = 1e-6
    q_lo: float = 0.9
    q_hi: float = 1.0

    def __post_init__(self):
        if not self.warp > 0:
            raise InvalidParameterError(f"warp must be > 0, got {self.warp}")
        if not self.strength >= 0:
            raise InvalidParameterError(f"strength must be >= 0, got {self.strength}")
        if self.lpf is not None and not self.lpf > 0:
            raise InvalidParameterError(f"lpf must be > 0, got {self.lpf}")
        if self.lpf_domain not in LPF_DOMAINS:
            raise InvalidParameterError(f"lpf_domain must be one of {LPF_DOMAINS}")
        if self.pad_mode not in PAD_MODES:
            raise InvalidParameterError(f"pad_mode must be one of {PAD_MODES}")
        if self.pad_width is not None and self.pad_width < 0:
            raise InvalidParameterError("pad_width must be >= 0")
        if self.order < 2 or self.order % 2:
            raise InvalidParameterError(f"order must be even and >= 2, got {self.order}")
        if not self.eps > 0:
            raise InvalidParameterError("eps must be > 0")
        if not 0 <= self.q_lo < self.q_hi <= 1:
            raise InvalidParameterError(f"need 0 <= q_lo < q_hi <= 1, got {self.q_lo}, {self.q_hi}")

    @classmethod
    def from_preset(cls, name, **overrides):
        try:
            warp, strength = PRESETS[name]
        except KeyError:
            raise InvalidParameterError(
                f"unknown preset {name!r}; choose from {sorted(PRESETS)}"
            ) from None
        return cls(warp=warp, strength=strength, **overrides)

    def replace(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        return asdict(self)
