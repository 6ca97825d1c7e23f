import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import ndimage

from phasestretch import (
    FeatureMap,
    ImageF,
    PstConfig,
    build_lpf,
    build_phase_kernel,
    crop,
    freq_grid,
    freq_grid_1d,
    pad,
    phase_profile,
    pst1d,
    pst2d,
    stretch,
)
from phasestretch.errors import InvalidParameterError, InvalidSizeError
from phasestretch.kernel import _profile_g
from phasestretch.transform import (
    default_pad_width,
    phase_angle,
    spatial_lowpass,
    stretch_parts,
)

images = st.tuples(st.integers(4, 24), st.integers(4, 24)).flatmap(
    lambda s: arrays(float, s, elements=st.floats(0, 1)))


def smooth_image(rng, shape=(48, 40), sigma=2.0):
    return ndimage.gaussian_filter(rng.uniform(0, 1, shape), sigma)


class TestPadCrop:
    def test_mirror_example(self):
        assert pad([1.0, 2.0, 3.0], "mirror", 2).tolist() == [3, 2, 1, 2, 3, 2, 1]

    def test_other_modes(self):
        assert pad([1.0, 2.0, 3.0], "periodic", 2).tolist() == [2, 3, 1, 2, 3, 1, 2]
        assert pad([1.0, 2.0, 3.0], "zero", 1).tolist() == [0, 1, 2, 3, 0]

    def test_width_zero_is_identity(self, rng):
        x = rng.uniform(size=(5, 7))
        assert np.array_equal(pad(x, "mirror", 0), x)
        assert np.array_equal(crop(x, 0), x)

    @pytest.mark.parametrize("mode", ["mirror", "periodic", "zero"])
    def test_crop_undoes_pad(self, rng, mode):
        x = rng.uniform(size=(9, 13))
        assert np.array_equal(crop(pad(x, mode, (3, 5)), (3, 5)), x)

    def test_rejects(self):
        with pytest.raises(InvalidParameterError):
            pad([1.0, 2.0, 3.0], "mirror", 3)
        with pytest.raises(InvalidParameterError):
            pad([1.0, 2.0, 3.0], "edge", 1)
        with pytest.raises(InvalidParameterError):
            pad(np.ones((4, 4)), "mirror", (1, 2, 3))

    def test_default_width(self):
        assert default_pad_width((512, 64, 20)) == (64, 16, 16)
        assert default_pad_width((8,)) == (7,)


class TestStretch:
    def test_identity_kernel(self, rng):
        x = rng.uniform(size=(12, 10))
        grid = freq_grid(x.shape)
        out = stretch(x, build_phase_kernel(grid, 12.5, 0.0), build_lpf(grid, math.inf))
        assert np.abs(out - x).max() <= 1e-12

    def test_constant(self):
        x = np.full((8, 6), 0.3)
        grid = freq_grid(x.shape)
        out = stretch(x, build_phase_kernel(grid, 22.0, 500.0), build_lpf(grid, 0.1))
        assert np.abs(out - 0.3).max() <= 1e-12

    def test_impulse_first_order(self):
        # first-order expansion exp(j phi) ~ 1 + j phi, evaluated as a direct DFT sum
        n = 64
        x = np.zeros(n)
        x[0] = 1.0
        grid = freq_grid_1d(n)
        phi = phase_profile(grid.r, 12.5, 0.01, grid.r_max)
        k = np.arange(n)
        basis = np.exp(2j * np.pi * np.outer(k, grid.u))
        expected = basis @ (1 + 1j * phi) / n
        out = stretch(x, build_phase_kernel(grid, 12.5, 0.01))
        assert np.abs(out - expected).max() <= 0.01 * np.abs(expected).max()
        assert np.abs(out.imag - expected.imag).max() <= 0.01 * np.abs(expected.imag).max()

    def test_shape_mismatch(self):
        k = build_phase_kernel(freq_grid((4, 4)), 1.0, 1.0)
        with pytest.raises(InvalidSizeError):
            stretch(np.ones((4, 5)), k)
        with pytest.raises(InvalidSizeError):
            stretch(np.ones((4, 4)), k, build_lpf(freq_grid((5, 4)), 0.1))

    @pytest.mark.parametrize("shape", [(16, 16), (17, 10), (9, 33), (64,), (65,)])
    @pytest.mark.parametrize("cutoff", [None, 0.08])
    def test_real_transform_route(self, rng, shape, cutoff):
        x = rng.uniform(size=shape)
        grid = freq_grid(shape)
        lpf = None if cutoff is None else build_lpf(grid, cutoff)
        full = stretch(x, build_phase_kernel(grid, 12.15, 0.48), lpf)
        re, im = stretch_parts(x, 12.15, 0.48, cutoff)
        assert np.abs(re - full.real).max() <= 1e-12
        assert np.abs(im - full.imag).max() <= 1e-12

    @pytest.mark.parametrize("shape", [(40, 40), (33, 20), (128,)])
    @pytest.mark.parametrize("sigma", [1.0, 2.0, 4.0])
    def test_spatial_lowpass_matches_frequency(self, rng, shape, sigma):
        from phasestretch.kernel import sigma_to_cutoff

        c = sigma_to_cutoff(sigma)
        x = rng.uniform(size=shape)
        freq = stretch_parts(x, 12.15, 0.48, c)
        spat = stretch_parts(spatial_lowpass(x, c), 12.15, 0.48)
        assert np.abs(freq[0] - spat[0]).max() <= 1e-9
        assert np.abs(freq[1] - spat[1]).max() <= 1e-9


class TestPhaseAngle:
    def test_branch(self):
        theta = phase_angle(np.array([-1.0, -1.0, 1.0]), np.array([0.0, -0.0, 0.0]))
        assert theta.tolist() == [math.pi, math.pi, 0.0]

    def test_zero_magnitude(self):
        assert phase_angle(np.zeros(4), np.zeros(4)).tolist() == [0.0] * 4


class TestPst2d:
    def test_constant(self):
        out = pst2d(np.full((20, 30), 0.6), PstConfig.from_preset("fig1"))
        assert isinstance(out, FeatureMap) and out.method == "pst"
        assert not np.any(out.values)

    def test_zero_image(self):
        assert not np.any(pst2d(np.zeros((16, 16))).values)

    def test_zero_strength(self, rng):
        out = pst2d(smooth_image(rng), PstConfig(strength=0.0))
        assert not np.any(out.values)

    @settings(max_examples=40, deadline=None)
    @given(images, st.sampled_from([0.01, 0.5, 3.0, 1e4]))
    def test_scale_invariance(self, img, alpha):
        cfg = PstConfig.from_preset("fig2", pad_mode="periodic", pad_width=0)
        ref = pst2d(img, cfg).values
        assert np.abs(pst2d(alpha * img, cfg).values - ref).max() <= 1e-9

    @settings(max_examples=40, deadline=None)
    @given(images, st.sampled_from(["fig1", "fig2", "fig3-4"]))
    def test_range(self, img, preset):
        v = pst2d(img, PstConfig.from_preset(preset)).values
        assert np.all(v > -np.pi) and np.all(v <= np.pi)
        assert np.all(np.isfinite(v))

    @pytest.mark.parametrize("shift", [(3, 5), (-7, 0), (0, 11)])
    def test_periodic_shift_equivariance(self, rng, shift):
        img = smooth_image(rng, (32, 45))
        cfg = PstConfig(lpf=0.1, pad_mode="periodic", pad_width=0)
        a = np.roll(pst2d(img, cfg).values, shift, axis=(0, 1))
        b = pst2d(np.roll(img, shift, axis=(0, 1)), cfg).values
        assert np.abs(a - b).max() <= 1e-9

    def test_separable_step(self):
        n, w = 96, 12.15
        profile = np.where(np.arange(n) < n // 2, 0.2, 0.5)
        profile = ndimage.gaussian_filter1d(profile, 1.0, mode="nearest")
        img = np.tile(profile, (40, 1))
        cfg2 = PstConfig(warp=w, strength=0.05)
        out2 = pst2d(img, cfg2).values
        # the 2D grid's r_max is larger, so rescale S for the same kernel on |u|
        pw = default_pad_width(img.shape)
        r2 = math.hypot(*(np.abs(np.fft.fftfreq(s + 2 * p)).max() for s, p in zip(img.shape, pw)))
        s1 = 0.05 * _profile_g(w * 0.5) / _profile_g(w * r2)
        out1 = pst1d(profile, PstConfig(warp=w, strength=s1))
        assert np.abs(out2[20] - out1).max() <= 1e-6
        assert np.abs(out2 - out2[20]).max() <= 1e-12

    def test_rejects_1d(self):
        with pytest.raises(InvalidSizeError):
            pst2d(np.ones(16))

    def test_imagef_input(self, rng):
        img = smooth_image(rng)
        assert np.array_equal(pst2d(ImageF(img)).values, pst2d(img).values)

    def test_lpf_domains(self, rng):
        from phasestretch.kernel import sigma_to_cutoff

        img = smooth_image(rng)
        a = pst2d(img, PstConfig(lpf=2.0, lpf_domain="spatial")).values
        b = pst2d(img, PstConfig(lpf=sigma_to_cutoff(2.0), lpf_domain="freq")).values
        assert np.array_equal(a, b)

    def test_threads_agree(self, rng):
        imgs = [smooth_image(rng, (64, 64)) for _ in range(8)]
        cfg = PstConfig(lpf=0.2)
        serial = [pst2d(i, cfg).values for i in imgs]
        with ThreadPoolExecutor(4) as ex:
            threaded = list(ex.map(lambda i: pst2d(i, cfg).values, imgs))
        assert all(np.array_equal(a, b) for a, b in zip(serial, threaded))


class TestPst1d:
    def test_constant(self):
        assert not np.any(pst1d(np.full(50, 0.25)))

    def test_rejects_2d(self):
        with pytest.raises(InvalidSizeError):
            pst1d(np.ones((4, 4)))

    def test_sign_flip(self):
        x = np.where(np.arange(32) < 16, 0.2, 0.7)
        y = -x + 2 * np.abs(x).max()
        px, py = pst1d(x), pst1d(y)
        edge = slice(14, 18)
        assert np.all(np.sign(px[edge]) == -np.sign(py[edge]))
        assert np.all(np.sign(px[edge]) != 0)

    def test_returns_plain_array(self):
        out = pst1d(np.linspace(0.1, 0.9, 40))
        assert type(out) is np.ndarray and out.shape == (40,)


class TestImageAndConfig:
    def test_image_validation(self):
        with pytest.raises(InvalidParameterError):
            ImageF(np.array([[0.0, 1.5]]))
        with pytest.raises(InvalidParameterError):
            ImageF(np.array([[np.nan, 0.5]]))
        img = ImageF(np.array([[0, 1]], dtype=np.uint8), bit_depth=8)
        assert img.samples.dtype == float and img.shape == (1, 2)
        assert img.height == 1 and img.width == 2
        assert np.asarray(img).tolist() == [[0.0, 1.0]]

    def test_feature_map(self):
        m = FeatureMap(np.array([-1.0, 2.0]), "pst")
        assert m.value_range == (-1.0, 2.0)
        assert np.asarray(m).tolist() == [-1.0, 2.0]

    @pytest.mark.parametrize("kwargs", [
        {"warp": 0}, {"strength": -1}, {"lpf": 0}, {"lpf_domain": "time"},
        {"pad_mode": "edge"}, {"pad_width": -1}, {"order": 5}, {"eps": 0},
        {"q_lo": 0.5, "q_hi": 0.5}, {"q_hi": 1.2},
    ])
    def test_config_rejects(self, kwargs):
        with pytest.raises(InvalidParameterError):
            PstConfig(**kwargs)

    def test_presets(self):
        assert PstConfig.from_preset("fig1").warp == 22.0
        assert PstConfig.from_preset("fig2", lpf=0.1).lpf == 0.1
        with pytest.raises(InvalidParameterError):
            PstConfig.from_preset("fig9")

    def test_replace_and_dict(self):
        cfg = PstConfig().replace(strength=2.0)
        assert cfg.to_dict()["strength"] == 2.0 and cfg.warp == 12.15
