import json
import math

import numpy as np
import pytest

from wtshock.cwt import (
    ScaleSet,
    convolve_1d,
    convolve_2d,
    cwt1d,
    gradient_transform,
    multiscale_derivative_2d,
)
from wtshock.grids import Field2D, InitialDataSpec, Signal1D, make_grid1d, make_grid2d, sample_initial_data
from wtshock.kernels import scaled_kernel_1d, scaled_kernel_2d, theta

THETA0 = float(theta(0, 0.0))


def square_field(n=128, seed=0):
    g = make_grid2d(0, 1, n, 0, 1, n)
    rng = np.random.default_rng(seed)
    return Field2D(g, rng.standard_normal((n, n)))


class TestScaleSet:
    def test_dyadic_values(self):
        s = ScaleSet(1, 5, 0.25)
        assert np.allclose(s.sigmas, [0.5, 1.0, 2.0, 4.0, 8.0])
        assert len(s) == 5

    def test_reversed_range_rejected(self):
        with pytest.raises(ValueError):
            ScaleSet(3, 2, 0.1)

    def test_unresolvable_floor_rejected(self):
        with pytest.raises(ValueError):
            ScaleSet(0, 3, 0.1)


class TestConvolve1D:
    def test_derivative_kernel_annihilates_constants(self):
        g = make_grid1d(0, 1, 256)
        c = 3.7
        sig = Signal1D(g, np.full(g.n, c))
        k = scaled_kernel_1d(1, 8 * g.dx, g.dx)
        out = convolve_1d(sig, k)
        assert np.abs(out.values).max() <= 1e-10 * abs(c)

    def test_step_response_is_smoothed_step_peak(self):
        # sigma * d/dx (theta_sigma * H)(x0) = theta(0); global max at the jump
        g = make_grid1d(-2, 2, 2049)
        sig = sample_initial_data(InitialDataSpec("step", x0=0.0), g)
        k = scaled_kernel_1d(1, 16 * g.dx, g.dx)
        out = convolve_1d(sig, k).values
        i = np.argmax(np.abs(out))
        assert abs(g.coord(i)) <= g.dx
        assert out.max() == pytest.approx(THETA0, abs=0.01)

    def test_impulse_response_is_kernel(self):
        g = make_grid1d(-2, 2, 801)
        sig = sample_initial_data(InitialDataSpec("dirac", x0=0.0), g)
        out = convolve_1d(sig, scaled_kernel_1d(0, 8 * g.dx, g.dx)).values
        assert out.sum() * g.dx == pytest.approx(1.0, abs=1e-6)
        assert out.max() == pytest.approx(theta(0, 0.0) / (8 * g.dx), rel=1e-6)

    def test_oversized_kernel_rejected(self):
        g = make_grid1d(0, 1, 8)
        sig = Signal1D(g, np.zeros(8))
        with pytest.raises(ValueError):
            convolve_1d(sig, scaled_kernel_1d(0, 2.0, g.dx))

    def test_unknown_boundary_rejected(self):
        g = make_grid1d(0, 1, 64)
        sig = Signal1D(g, np.zeros(64))
        with pytest.raises(ValueError):
            convolve_1d(sig, scaled_kernel_1d(0, 4 * g.dx, g.dx), boundary="wrap")

    @pytest.mark.parametrize("boundary", ["reflect", "zero"])
    def test_direct_fast_equivalence_1d(self, boundary):
        g = make_grid1d(0, 1, 300)
        rng = np.random.default_rng(5)
        sig = Signal1D(g, rng.standard_normal(300))
        k = scaled_kernel_1d(1, 8 * g.dx, g.dx)
        a = convolve_1d(sig, k, boundary, "direct").values
        b = convolve_1d(sig, k, boundary, "fast").values
        assert np.abs(a - b).max() <= 1e-9 * np.abs(a).max()


class TestCwt1D:
    def test_second_derivative_annihilates_affine(self):
        g = make_grid1d(0, 1, 512)
        sig = Signal1D(g, 2.0 * g.coords() - 0.3)
        stack = cwt1d(sig, 2, ScaleSet(1, 3, g.dx))
        for row, border in zip(stack.coefficients, stack.border_samples):
            assert np.abs(row[border:-border]).max() < 1e-8

    def test_step_maxima_amplitude_scale_invariant(self):
        # alpha = 0: peak amplitude theta(0) at every dyadic scale, within 2%
        g = make_grid1d(-2, 2, 4097)
        sig = sample_initial_data(InitialDataSpec("step", x0=0.0), g)
        stack = cwt1d(sig, 1, ScaleSet(1, 5, g.dx))
        peaks = np.abs(stack.coefficients).max(axis=1)
        # identical across scales within 2% (of their common level), and that
        # level is the closed-form theta(0)
        assert np.all(np.abs(peaks - peaks.mean()) <= 0.02 * peaks.mean())
        assert peaks.mean() == pytest.approx(THETA0, rel=0.02)

    def test_impulse_maxima_halve_per_scale_doubling(self):
        # alpha = -1: closed form peak is theta(1)/sigma
        g = make_grid1d(-2, 2, 4097)
        sig = sample_initial_data(InitialDataSpec("dirac", x0=0.0), g)
        stack = cwt1d(sig, 1, ScaleSet(1, 5, g.dx))
        peaks = np.abs(stack.coefficients).max(axis=1)
        ratios = peaks[:-1] / peaks[1:]
        assert np.all(np.abs(ratios - 2.0) <= 0.1)
        expected = float(theta(0, 1.0)) / stack.scales.sigmas
        assert np.allclose(peaks, expected, rtol=0.05)

    def test_smooth_sine_maxima_match_closed_form(self):
        # theta_sigma * sin = exp(-sigma^2/2) sin, so the order-1 transform has
        # peak amplitude sigma * exp(-sigma^2 omega^2 / 2) at unit frequency
        g = make_grid1d(-2 * math.pi, 2 * math.pi, 2049)
        sig = Signal1D(g, np.sin(g.coords()))
        stack = cwt1d(sig, 1, ScaleSet(1, 5, g.dx))
        peaks = np.abs(stack.coefficients).max(axis=1)
        sigmas = stack.scales.sigmas
        assert np.allclose(peaks, sigmas * np.exp(-0.5 * sigmas**2), rtol=1e-3)


class TestGradientTransform:
    def test_constant_field_zero_modulus(self):
        g = make_grid2d(0, 1, 64, 0, 1, 64)
        gf = gradient_transform(Field2D(g, np.full((64, 64), 2.0)), 4 * g.x.dx)
        assert np.abs(gf.modulus.values).max() <= 1e-12

    def test_vertical_edge_angle_zero(self):
        g = make_grid2d(-1, 1, 128, 0, 1, 64)
        vals = np.tile(np.where(g.x.coords() >= 0.1, 1.0, 0.0), (64, 1))
        gf = gradient_transform(Field2D(g, vals), 4 * g.x.dx)
        r, c = np.unravel_index(np.argmax(gf.modulus.values), gf.modulus.values.shape)
        assert abs(gf.angle.values[r, c]) <= 1e-3

    def test_horizontal_edge_angle_pi_over_2(self):
        g = make_grid2d(-1, 1, 128, 0, 1, 128)
        vals = np.tile(np.where(g.t_coords() >= 0.5, 1.0, 0.0)[:, None], (1, 128))
        gf = gradient_transform(Field2D(g, vals), 4 * g.x.dx)
        r, c = np.unravel_index(np.argmax(gf.modulus.values), gf.modulus.values.shape)
        assert abs(gf.angle.values[r, c] - math.pi / 2) <= 1e-3

    def test_commutation_with_multiscale_derivative(self):
        fld = square_field()
        sigma = 4 * fld.grid.x.dx
        gf = gradient_transform(fld, sigma)
        wx = multiscale_derivative_2d(fld, 1, 0, sigma)
        wt = multiscale_derivative_2d(fld, 0, 1, sigma)
        assert np.array_equal(gf.wt_x.values, wx.values)
        assert np.array_equal(gf.wt_t.values, wt.values)

    def test_modulus_invariant_under_field_rotation(self):
        # rotating the field by 90 degrees maps (wt_x, wt_t) -> (-wt_t, wt_x)
        fld = square_field(seed=3)
        sigma = 4 * fld.grid.x.dx
        gf = gradient_transform(fld, sigma)
        rot = Field2D(fld.grid, np.rot90(fld.values).copy())
        gf_rot = gradient_transform(rot, sigma)
        m = np.rot90(gf.modulus.values)
        assert np.abs(gf_rot.modulus.values - m).max() <= 1e-9 * m.max()


class TestMultiscaleDerivative2D:
    def test_bilinear_annihilated_by_xx(self):
        g = make_grid2d(0, 1, 128, 0, 1, 128)
        vals = g.x.coords()[None, :] * g.t_coords()[:, None]
        out = multiscale_derivative_2d(Field2D(g, vals), 2, 0, 4 * g.x.dx)
        k = scaled_kernel_2d(2, 0, 4 * g.x.dx, g.x.dx, g.dt)
        bx, bt = k.factor_x.radius_samples, k.factor_t.radius_samples
        assert np.abs(out.values[bt:-bt, bx:-bx]).max() < 1e-8

    def test_kink_rows_have_maxima_near_characteristics(self):
        from wtshock.wave import CauchyProblem, solve_on_grid

        g = make_grid2d(-2, 2, 513, 0, 1, 129)
        pb = CauchyProblem(1.0, phi=InitialDataSpec("c1_parabolic_kink", x0=0.0))
        fld = solve_on_grid(pb, g)
        sigma = 4 * g.x.dx
        surf = multiscale_derivative_2d(fld, 2, 0, sigma)
        # |d/dx WT| per row peaks within 2 cells of x = +-t
        k = scaled_kernel_2d(2, 0, sigma, g.x.dx, g.dt)
        bt = k.factor_t.radius_samples
        for r in range(bt + 10, g.m - bt - 10, 17):
            t = g.t_coord(r)
            row = np.abs(np.gradient(surf.values[r], g.x.dx))
            for target in (t, -t):
                if abs(target) < 4 * sigma:
                    continue  # apex region: the two fronts overlap
                i0 = g.x.index_of(target)
                window = row[i0 - 6 : i0 + 7]
                assert abs(np.argmax(window) - 6) <= 2

    def test_smooth_gaussian_modulus_scales_as_sigma_squared(self):
        from wtshock.wave import CauchyProblem, solve_on_grid

        g = make_grid2d(-2, 2, 1025, 0, 1, 257)
        pb = CauchyProblem(1.0, phi=InitialDataSpec("smooth_gaussian", x0=0.0))
        fld = solve_on_grid(pb, g)
        peaks = []
        sigmas = [2 * g.x.dx * 2**i for i in range(3)]
        for sigma in sigmas:
            out = multiscale_derivative_2d(fld, 2, 0, sigma)
            k = scaled_kernel_2d(2, 0, sigma, g.x.dx, g.dt)
            bx, bt = k.factor_x.radius_samples, k.factor_t.radius_samples
            peaks.append(np.abs(out.values[bt:-bt, bx:-bx]).max())
        for i in range(len(peaks) - 1):
            assert peaks[i + 1] / peaks[i] == pytest.approx(4.0, rel=0.10)


class TestStructuralProperties:
    @pytest.mark.parametrize("boundary", ["reflect", "zero"])
    def test_direct_fast_equivalence_2d(self, boundary):
        fld = square_field(seed=11)
        k = scaled_kernel_2d(1, 1, 4 * fld.grid.x.dx, fld.grid.x.dx, fld.grid.dt)
        a = convolve_2d(fld, k, boundary, "direct").values
        b = convolve_2d(fld, k, boundary, "fast").values
        assert np.abs(a - b).max() <= 1e-9 * np.abs(a).max()

    def test_translation_covariance(self):
        # whole-cell shift of the input shifts the output by the same cells
        g = make_grid1d(0, 1, 256)
        rng = np.random.default_rng(9)
        base = rng.standard_normal(256)
        k = scaled_kernel_1d(1, 4 * g.dx, g.dx)
        shift = 7
        out1 = convolve_1d(Signal1D(g, base), k, method="direct").values
        out2 = convolve_1d(Signal1D(g, np.roll(base, shift)), k, method="direct").values
        band = k.radius_samples + shift
        assert np.array_equal(out2[band:-band], out1[band - shift : -band - shift])

    def test_export_writes_components_and_manifest(self, tmp_path):
        fld = square_field(32)
        gf = gradient_transform(fld, 4 * fld.grid.x.dx)
        gf.export(str(tmp_path), "g", "reflect")
        names = {p.name for p in tmp_path.iterdir()}
        assert names == {
            "g_wt_x.txt",
            "g_wt_t.txt",
            "g_modulus.txt",
            "g_angle.txt",
            "g_manifest.json",
        }
        manifest = json.loads((tmp_path / "g_manifest.json").read_text())
        assert manifest["boundary"] == "reflect"
        assert manifest["sigma"] == pytest.approx(4 * fld.grid.x.dx)
