import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wtshock.characteristics import (
    CharacteristicLine,
    PdeCoefficients,
    char_roots,
    fit_ridge_lines,
    lines_to_table,
    report_to_text,
    verify_alignment,
)
from wtshock.wtmm import MaximaChain, MaximaPoint


def ridge_from(ts, xs, ws=None):
    ws = ws if ws is not None else [1.0] * len(ts)
    pts = [
        MaximaPoint(x=float(x), t=float(t), sigma=0.01, modulus=float(w), angle=0.0, row=r)
        for r, (t, x, w) in enumerate(zip(ts, xs, ws))
    ]
    return MaximaChain(tuple(pts), "ridge")


class TestCharRoots:
    def test_wave_operator_roots(self):
        # u_tt - 4 u_xx: slopes dx/dt = +-2
        assert char_roots(PdeCoefficients(-4.0, 0.0, 1.0)) == (-2.0, 2.0)

    def test_mixed_term_roots(self):
        # l^2 - 4l + 3 = 0 -> l = 1, 3
        lam1, lam2 = char_roots(PdeCoefficients(3.0, 2.0, 1.0))
        assert lam1 == pytest.approx(1.0, abs=1e-14)
        assert lam2 == pytest.approx(3.0, abs=1e-14)

    def test_from_wave_speed(self):
        coeffs = PdeCoefficients.from_wave_speed(1.5)
        assert (coeffs.a, coeffs.b, coeffs.c) == (-2.25, 0.0, 1.0)
        assert char_roots(coeffs) == (-1.5, 1.5)

    def test_non_hyperbolic_rejected(self):
        with pytest.raises(ValueError):
            PdeCoefficients(1.0, 0.0, 1.0)  # elliptic
        with pytest.raises(ValueError):
            PdeCoefficients(0.0, 0.0, 1.0)  # parabolic (double root)
        with pytest.raises(ValueError):
            PdeCoefficients(-1.0, 0.0, -1.0)  # c <= 0

    @given(
        a=st.floats(-10, 10),
        b=st.floats(-10, 10),
        c=st.floats(0.1, 10),
    )
    @settings(max_examples=1000, deadline=None)
    def test_vieta_property(self, a, b, c):
        if b * b - a * c <= 1e-9:
            return
        coeffs = PdeCoefficients(a, b, c)
        lam1, lam2 = char_roots(coeffs)
        scale = max(1.0, abs(a), abs(b), abs(c))
        # Vieta: sum = 2b/c, product = a/c; each root satisfies the quadratic
        assert lam1 + lam2 == pytest.approx(2 * b / c, rel=1e-12, abs=1e-12 * scale)
        assert lam1 * lam2 == pytest.approx(a / c, rel=1e-12, abs=1e-12 * scale)
        for lam in (lam1, lam2):
            resid = c * lam * lam - 2 * b * lam + a
            mag = max(1.0, abs(c * lam * lam), abs(2 * b * lam), abs(a))
            assert abs(resid) <= 1e-12 * mag


class TestFitRidgeLines:
    def test_exact_line_recovered(self):
        ts = np.linspace(0.05, 0.95, 40)
        ridge = ridge_from(ts, 0.2 + 0.8 * ts)
        (fl,) = fit_ridge_lines([ridge], 1, cell_size=0.01)
        assert fl.line.lam == pytest.approx(0.8, abs=1e-9)
        assert fl.line.x0 == pytest.approx(0.2, abs=1e-9)
        assert fl.n_inliers == 40
        assert fl.rms_residual <= 1e-12

    def test_two_branches_two_lines(self):
        # the two branches of |x| = t as separate ridges
        ts = np.linspace(0.05, 0.95, 60)
        left = ridge_from(ts, -ts)
        right = ridge_from(ts, ts)
        fitted = fit_ridge_lines([left, right], 2, cell_size=0.005)
        slopes = sorted(fl.line.lam for fl in fitted)
        assert slopes[0] == pytest.approx(-1.0, abs=0.02)
        assert slopes[1] == pytest.approx(1.0, abs=0.02)

    def test_leftover_points_yield_second_line(self):
        # a single ridge whose tail switches to the other branch: the robust
        # fit takes the majority branch, the outliers refit to the second line
        ts = np.linspace(0.05, 0.95, 45)
        xs = np.where(ts < 0.6, ts, 1.2 - ts)
        ridge = ridge_from(ts, xs)
        fitted = fit_ridge_lines([ridge], 2, cell_size=0.002)
        assert len(fitted) == 2
        slopes = sorted(fl.line.lam for fl in fitted)
        assert slopes[0] == pytest.approx(-1.0, abs=0.02)
        assert slopes[1] == pytest.approx(1.0, abs=0.02)

    def test_outlier_excluded(self):
        ts = np.linspace(0.1, 0.9, 9)
        xs = 0.5 * ts
        xs[4] += 0.3  # one gross outlier
        (fl,) = fit_ridge_lines([ridge_from(ts, xs)], 1, cell_size=0.01)
        assert fl.n_inliers == 8
        assert fl.line.lam == pytest.approx(0.5, abs=1e-9)

    def test_modulus_weighting_breaks_ties(self):
        # equal split between two parallel tracks: weights decide the inlier set
        ts = np.tile(np.linspace(0.1, 0.9, 5), 2)
        xs = np.concatenate([np.zeros(5), np.ones(5)])
        ws = np.concatenate([np.full(5, 3.0), np.ones(5)])
        rows = np.argsort(ts, kind="stable")
        pts = tuple(
            MaximaPoint(x=float(xs[i]), t=float(ts[i]) + 1e-6 * r, sigma=0.01,
                        modulus=float(ws[i]), angle=0.0, row=r)
            for r, i in enumerate(rows)
        )
        (fl,) = fit_ridge_lines([MaximaChain(pts, "ridge")], 1, cell_size=0.02)
        assert fl.line.x0 == pytest.approx(0.0, abs=1e-6)

    def test_translation_equivariance(self):
        ts = np.linspace(0.05, 0.95, 30)
        base = ridge_from(ts, 0.1 + 0.7 * ts)
        shifted = ridge_from(ts + 2.0, 0.1 + 0.7 * (ts + 2.0) + 0.5)
        (a,) = fit_ridge_lines([base], 1, cell_size=0.01)
        (b,) = fit_ridge_lines([shifted], 1, cell_size=0.01)
        assert b.line.lam == pytest.approx(a.line.lam, abs=1e-9)
        assert b.line.x0 == pytest.approx(a.line.x0 + 0.5, abs=1e-9)

    def test_short_ridge_rejected(self):
        ridge = ridge_from([0.1, 0.2, 0.3], [0.0, 0.0, 0.0])
        with pytest.raises(ValueError):
            fit_ridge_lines([ridge], 1, cell_size=0.01)

    def test_degenerate_same_t_rejected(self):
        pts = tuple(
            MaximaPoint(x=0.1 * k, t=0.5, sigma=0.01, modulus=1.0, angle=0.0, row=k)
            for k in range(5)
        )
        # rows must be strictly increasing in t; same-t points cannot even form
        # a valid ridge, so the degenerate case is caught at construction
        with pytest.raises(ValueError):
            MaximaChain(pts, "ridge")

    def test_n_lines_validated(self):
        ts = np.linspace(0.1, 0.9, 10)
        with pytest.raises(ValueError):
            fit_ridge_lines([ridge_from(ts, ts)], 3, cell_size=0.01)


class TestVerifyAlignment:
    def fit(self, lam_pairs, x0=0.0):
        ts = np.linspace(0.05, 0.95, 20)
        ridges = [ridge_from(ts, x0 + lam * ts) for lam in lam_pairs]
        return fit_ridge_lines(ridges, min(2, len(ridges)), cell_size=0.01)

    def test_matching_lines_aligned(self):
        fitted = self.fit([-1.0, 1.0])
        report = verify_alignment(
            fitted, PdeCoefficients.from_wave_speed(1.0), 0.0, 0.05, 0.02
        )
        assert report.aligned
        assert len(report.matching) == 2
        for _, _, serr, ierr in report.matching:
            assert serr <= 1e-9 and ierr <= 1e-9

    def test_wrong_speed_not_aligned(self):
        fitted = self.fit([-1.0, 1.0])
        report = verify_alignment(
            fitted, PdeCoefficients.from_wave_speed(2.0), 0.0, 0.05, 0.02
        )
        assert not report.aligned

    def test_missing_branch_not_aligned(self):
        fitted = self.fit([1.0])
        report = verify_alignment(
            fitted, PdeCoefficients.from_wave_speed(1.0), 0.0, 0.05, 0.02
        )
        assert not report.aligned

    def test_wrong_intercept_not_aligned(self):
        fitted = self.fit([-1.0, 1.0], x0=0.3)
        report = verify_alignment(
            fitted, PdeCoefficients.from_wave_speed(1.0), 0.0, 0.05, 0.02
        )
        assert not report.aligned

    def test_tolerances_validated(self):
        with pytest.raises(ValueError):
            verify_alignment([], PdeCoefficients.from_wave_speed(1.0), 0.0, 0.0, 0.02)

    def test_report_text_and_table(self):
        fitted = self.fit([-1.0, 1.0])
        report = verify_alignment(
            fitted, PdeCoefficients.from_wave_speed(1.0), 0.0, 0.05, 0.02
        )
        text = report_to_text(report)
        assert text.startswith("aligned: true")
        table = lines_to_table(report).strip().splitlines()
        assert table[0] == "which index x0 lambda n_inliers rms_residual"
        assert sum(1 for row in table if row.startswith("expected")) == 2
        assert sum(1 for row in table if row.startswith("fitted")) == 2
