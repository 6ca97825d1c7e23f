import math
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasestretch import (
    build_lpf,
    build_phase_kernel,
    build_quadratic_kernel,
    freq_grid,
    freq_grid_1d,
    phase_profile,
    taylor_coeffs,
)
from phasestretch.errors import InvalidParameterError, UnsupportedOrderError
from phasestretch.kernel import cutoff_to_sigma, lpf_gain, sigma_to_cutoff

# 50-digit mpmath evaluation of S g(W r) / g(W r_max), W=12.5, S=4000, r_max=sqrt(2)/2
GOLDEN_PHASE = {0.1: 242.77081567380879113, 0.25: 1028.798446437929504}
INV_G_HALF = 8.3158680116999244183  # 1 / g(0.5)


def central_difference(f, m, h):
    return sum((-1) ** k * comb(m, k) * f((m / 2 - k) * h) for k in range(m + 1)) / h**m


def fd_derivative(f, m, h):
    # one Richardson step on the O(h^2) central stencil
    return (4 * central_difference(f, m, h / 2) - central_difference(f, m, h)) / 3


class TestPhaseProfile:
    @pytest.mark.parametrize("w, s", [(1, 1), (12.5, 4000), (22, 500), (0.3, 0.01)])
    def test_endpoints(self, w, s):
        assert phase_profile(0.0, w, s, 0.5) == 0.0
        assert phase_profile(0.5, w, s, 0.5) == s

    @pytest.mark.parametrize("r", sorted(GOLDEN_PHASE))
    def test_golden(self, r):
        got = phase_profile(r, 12.5, 4000.0, 0.5 * math.sqrt(2))
        assert got == pytest.approx(GOLDEN_PHASE[r], rel=1e-13)

    def test_small_argument_accuracy(self):
        # g(x) ~ x^2/2 near 0; log1p keeps this from cancelling to zero
        r = 1e-9
        assert phase_profile(r, 1.0, 1.0, 0.5) == pytest.approx(r**2 / 2 * INV_G_HALF, rel=1e-6)

    @pytest.mark.parametrize("w, s, r_max", [(0, 1, 0.5), (-1, 1, 0.5), (1, -1, 0.5), (1, 1, 0)])
    def test_rejects(self, w, s, r_max):
        with pytest.raises(InvalidParameterError):
            phase_profile(0.1, w, s, r_max)


class TestPhaseKernel:
    def test_zero_strength(self):
        assert not np.any(build_phase_kernel(freq_grid((8, 8)), 12.5, 0.0).phase)

    def test_bin_value(self):
        grid = freq_grid((4, 4))
        k = build_phase_kernel(grid, 1.0, 1.0)
        assert k.phase[0, 1] == phase_profile(0.25, 1.0, 1.0, math.sqrt(0.5))
        assert k.phase[1, 0] == k.phase[0, 1]

    @pytest.mark.parametrize("shape", [(4, 4), (7, 10), (9,), (16,)])
    def test_even_symmetry(self, shape):
        phi = build_phase_kernel(freq_grid(shape), 12.15, 0.48).phase
        idx = tuple((-np.arange(n)) % n for n in shape)
        assert np.array_equal(phi[np.ix_(*idx)], phi)

    def test_peak_equals_strength(self):
        for shape in [(8, 8), (9, 6), (33,)]:
            k = build_phase_kernel(freq_grid(shape), 12.5, 4000.0)
            assert abs(np.abs(k.phase).max() - 4000.0) <= 1e-12 * 4000
            assert k.phase.flat[0] == 0.0

    def test_radially_non_decreasing(self):
        k = build_phase_kernel(freq_grid((32, 32)), 22.0, 500.0)
        r = freq_grid((32, 32)).r.ravel()
        order = np.argsort(r, kind="stable")
        assert np.all(np.diff(k.phase.ravel()[order]) >= 0)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.1, 50), st.floats(0, 10), st.floats(0, 10))
    def test_strength_linearity(self, w, s, a):
        grid = freq_grid((6, 9))
        lhs = build_phase_kernel(grid, w, a * s).phase
        rhs = a * build_phase_kernel(grid, w, s).phase
        assert np.abs(lhs - rhs).max() <= 1e-12 * max(1.0, np.abs(rhs).max())

    def test_complex_has_unit_modulus(self):
        k = build_phase_kernel(freq_grid((8, 8)), 12.5, 4000.0)
        assert np.allclose(np.abs(k.complex), 1.0, atol=1e-12)

    def test_quadratic_kernel(self):
        grid = freq_grid_1d(8)
        assert np.allclose(build_quadratic_kernel(grid, 3.0).phase, 3.0 * grid.u**2)


class TestLocalization:
    def test_values(self):
        assert lpf_gain(0.0, 0.1) == 1.0
        assert abs(lpf_gain(0.1, 0.1) - 0.5) <= 1e-12

    def test_infinite_cutoff(self):
        assert np.all(build_lpf(freq_grid((8, 8)), math.inf).gain == 1.0)

    def test_monotone(self):
        r = np.linspace(0, 0.8, 200)
        assert np.all(np.diff(lpf_gain(r, 0.2)) < 0)

    @pytest.mark.parametrize("c", [0, -0.1])
    def test_rejects(self, c):
        with pytest.raises(InvalidParameterError):
            build_lpf(freq_grid((4, 4)), c)

    def test_sigma_cutoff_inverse(self):
        for s in (0.5, 1.0, 2.0, 7.0):
            assert cutoff_to_sigma(sigma_to_cutoff(s)) == pytest.approx(s, rel=1e-14)

    def test_sigma_cutoff_matches_sampled_gaussian(self):
        # the DFT of a wide sampled Gaussian is half its DC value at the cutoff
        n, sigma = 4096, 8.0
        x = np.arange(n) - n // 2
        spec = np.abs(np.fft.fft(np.exp(-x**2 / (2 * sigma**2))))
        u = np.fft.fftfreq(n)[: n // 2]
        half = np.interp(0.5, spec[: n // 2][::-1] / spec[0], u[::-1])
        assert half == pytest.approx(sigma_to_cutoff(sigma), rel=1e-4)


class TestTaylor:
    def test_zero_strength(self):
        assert taylor_coeffs(12.5, 0.0, 0.5, 8).coeffs == (0.0,) * 4

    def test_m2_example(self):
        (c,) = taylor_coeffs(1.0, 1.0, 0.5, 2).coeffs
        assert c == pytest.approx(INV_G_HALF, rel=1e-14)
        f = lambda r: float(phase_profile(abs(r), 1.0, 1.0, 0.5))
        assert fd_derivative(f, 2, 0.02) == pytest.approx(c, rel=1e-3)

    @pytest.mark.parametrize("w", [0.5, 1.0, 4.0, 12.15, 12.5, 22.0])
    def test_finite_difference_agreement(self, w):
        c = taylor_coeffs(w, 0.7, 0.5, 6)
        f = lambda r: float(phase_profile(abs(r), w, 0.7, 0.5))
        for m, cm in c:
            assert fd_derivative(f, m, 0.02 / w) == pytest.approx(cm, rel=1e-3)

    def test_only_even_orders(self):
        c = taylor_coeffs(3.0, 1.0, 0.5, 10)
        assert c.orders == (2, 4, 6, 8, 10)
        assert [m for m, _ in c] == [2, 4, 6, 8, 10]
        assert len(c.coeffs) == 5

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.1, 30), st.floats(0.001, 100), st.one_of(st.just(0.0), st.floats(1e-6, 5)))
    def test_linear_in_strength(self, w, s, a):
        base = np.array(taylor_coeffs(w, s, 0.5, 6).coeffs)
        scaled = np.array(taylor_coeffs(w, a * s, 0.5, 6).coeffs)
        assert np.allclose(scaled, a * base, rtol=1e-12, atol=0)

    @pytest.mark.parametrize("w", [0.5, 1.0, 4.0, 12.15, 12.5])
    def test_fidelity_near_dc(self, w):
        # the series converges only for W|u| < 1; these warps keep
        # |u| <= 0.1 r_max (1D, r_max = 0.5) inside that radius
        c = taylor_coeffs(w, 1.0, 0.5, 6)
        u = np.linspace(1e-4, 0.05, 200)
        exact = phase_profile(u, w, 1.0, 0.5)
        assert np.all(np.abs(c.evaluate(u) - exact) <= 0.01 * exact)

    def test_evaluate_2d(self):
        c = taylor_coeffs(2.0, 1.0, 0.5, 4)
        u = np.array([[0.0, 0.1], [0.2, 0.3]])
        expected = c.coeffs[0] * u**2 / 2 + c.coeffs[1] * u**4 / 24
        assert np.allclose(c.evaluate(u), expected, rtol=1e-15)

    @pytest.mark.parametrize("order", [0, 1, 3, 7])
    def test_rejects_order(self, order):
        with pytest.raises(UnsupportedOrderError):
            taylor_coeffs(1.0, 1.0, 0.5, order)

    def test_rejects_warp(self):
        with pytest.raises(InvalidParameterError):
            taylor_coeffs(0.0, 1.0, 0.5)
