"""Characteristic slopes of the hyperbolic operator and ridge-line verification.

For a u_xx + 2b u_xt + c u_tt = 0 with b^2 - ac > 0 and c > 0, the
characteristic slopes dx/dt are the roots of c l^2 - 2b l + a = 0.  Detected
singularity ridges are fitted with (modulus-weighted, outlier-robust) total
least squares lines x = x0 + lambda t and matched against those roots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .wtmm import MaximaChain

__all__ = [
    "PdeCoefficients",
    "CharacteristicLine",
    "FittedLine",
    "CharacteristicReport",
    "char_roots",
    "fit_ridge_lines",
    "verify_alignment",
    "report_to_text",
    "lines_to_table",
]


@dataclass(frozen=True)
class PdeCoefficients:
    """Second-order coefficients (a, b, c); lower-order terms are zero."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(f"hyperbolicity requires c > 0, got c={self.c}")
        if not self.b * self.b - self.a * self.c > 0:
            raise ValueError(
                f"not hyperbolic: b^2 - ac = {self.b**2 - self.a * self.c} <= 0"
            )

    @classmethod
    def from_wave_speed(cls, nu: float) -> "PdeCoefficients":
        """u_tt - nu^2 u_xx = 0, i.e. a = -nu^2, b = 0, c = 1."""
        return cls(a=-nu * nu, b=0.0, c=1.0)


@dataclass(frozen=True)
class CharacteristicLine:
    x0: float  # intercept at t = 0
    lam: float  # slope dx/dt

    def x_at(self, t):
        return self.x0 + self.lam * np.asarray(t)


@dataclass(frozen=True)
class FittedLine:
    line: CharacteristicLine
    n_inliers: int
    rms_residual: float


@dataclass(frozen=True)
class CharacteristicReport:
    fitted: tuple  # FittedLine entries
    expected: tuple  # CharacteristicLine entries
    matching: tuple  # (expected_idx, fitted_idx, slope_err, intercept_err)
    aligned: bool


def char_roots(coeffs: PdeCoefficients) -> tuple:
    """Real roots (lam1 <= lam2) of c lam^2 - 2b lam + a = 0, computed stably."""
    a, b, c = coeffs.a, coeffs.b, coeffs.c
    disc = b * b - a * c
    root = math.sqrt(disc)
    if b >= 0:
        q = b + root
    else:
        q = b - root
    if q == 0.0:  # b == 0 and disc == 0 is excluded by hyperbolicity
        lam1 = lam2 = 0.0
    else:
        lam1, lam2 = q / c, a / q
    return (lam1, lam2) if lam1 <= lam2 else (lam2, lam1)


def _tls_line(ts: np.ndarray, xs: np.ndarray, ws: np.ndarray) -> CharacteristicLine:
    """Weighted orthogonal (total least squares) fit of x = x0 + lam * t."""
    wsum = ws.sum()
    tbar = float((ws * ts).sum() / wsum)
    xbar = float((ws * xs).sum() / wsum)
    dt = ts - tbar
    dx = xs - xbar
    stt = float((ws * dt * dt).sum())
    sxx = float((ws * dx * dx).sum())
    stx = float((ws * dt * dx).sum())
    # principal direction of the weighted scatter matrix [[stt, stx], [stx, sxx]]
    ang = 0.5 * math.atan2(2.0 * stx, stt - sxx)
    vt, vx = math.cos(ang), math.sin(ang)
    if abs(vt) < 1e-12:
        raise ValueError("degenerate ridge: no spread in t (vertical line in (t, x))")
    lam = vx / vt
    return CharacteristicLine(x0=xbar - lam * tbar, lam=lam)


def _residuals(line: CharacteristicLine, ts, xs) -> np.ndarray:
    """Orthogonal distances from points to the line x = x0 + lam t."""
    return np.abs(xs - line.x0 - line.lam * ts) / math.sqrt(1.0 + line.lam**2)


def _fit_one_robust(ts, xs, ws, inlier_tol: float):
    """Best line by exhaustive two-point RANSAC, refit on its inliers.

    Deterministic: candidate pairs are scanned in index order and scored by
    (weighted inlier count, -inlier rms).  Points within inlier_tol of the
    line (orthogonal distance) count as inliers.
    """
    n = len(ts)
    stride = max(1, n // 40)  # cap candidate pairs at ~800 for long ridges
    idx = np.arange(0, n, stride)
    best = None
    for ii, i in enumerate(idx):
        for j in idx[ii + 1 :]:
            if ts[j] == ts[i]:
                continue
            lam = (xs[j] - xs[i]) / (ts[j] - ts[i])
            cand = CharacteristicLine(x0=xs[i] - lam * ts[i], lam=lam)
            r = _residuals(cand, ts, xs)
            mask = r <= inlier_tol
            score = (float(ws[mask].sum()), -float(np.sqrt(np.mean(r[mask] ** 2))))
            if best is None or score > best[0]:
                best = (score, mask)
    if best is None:
        raise ValueError("degenerate ridge: all points share one t")
    mask = best[1]
    line = _tls_line(ts[mask], xs[mask], ws[mask])
    # one re-gating pass after the refit
    mask = _residuals(line, ts, xs) <= inlier_tol
    if mask.sum() >= 2 and len(np.unique(ts[mask])) >= 2:
        line = _tls_line(ts[mask], xs[mask], ws[mask])
    rms = float(np.sqrt(np.mean(_residuals(line, ts[mask], xs[mask]) ** 2)))
    return FittedLine(line, int(mask.sum()), rms), mask


def fit_ridge_lines(
    ridges: Sequence[MaximaChain],
    n_lines: int,
    cell_size: float,
    inlier_cells: float = 3.0,
) -> list:
    """Fit up to n_lines straight lines x = x0 + lam t to detected ridges.

    One robust TLS line per ridge (points weighted by modulus, outliers
    farther than inlier_cells cells rejected).  If fewer lines than requested
    are produced, remaining ridges' leftover points are refit: this resolves
    the apex case where a single ridge carries both characteristic branches.
    """
    if n_lines not in (1, 2):
        raise ValueError("n_lines must be 1 or 2")
    for ridge in ridges:
        if len(ridge) < 5:
            raise ValueError("each ridge needs at least 5 points for a stable fit")
    tol = inlier_cells * cell_size
    fitted = []
    leftovers = []
    for ridge in sorted(ridges, key=len, reverse=True):
        ts = np.array([p.t for p in ridge.points])
        xs = np.array([p.x for p in ridge.points])
        ws = np.array([p.modulus for p in ridge.points])
        fl, mask = _fit_one_robust(ts, xs, ws, tol)
        fitted.append(fl)
        if (~mask).sum() >= 5:
            leftovers.append((ts[~mask], xs[~mask], ws[~mask]))
        if len(fitted) == n_lines:
            break
    for ts, xs, ws in leftovers:
        if len(fitted) >= n_lines:
            break
        if len(np.unique(ts)) < 2:
            continue
        fl, _ = _fit_one_robust(ts, xs, ws, tol)
        fitted.append(fl)
    return fitted


def verify_alignment(
    fitted: Sequence[FittedLine],
    coeffs: PdeCoefficients,
    x0_true: float,
    slope_tol: float,
    intercept_tol: float,
) -> CharacteristicReport:
    """Match fitted lines to the characteristic roots through (x0_true, 0).

    Greedy matching by slope error; the verdict is true iff every expected
    line found a distinct fitted partner within both tolerances.
    """
    if not (slope_tol > 0 and intercept_tol > 0):
        raise ValueError("tolerances must be positive")
    lam1, lam2 = char_roots(coeffs)
    expected = (CharacteristicLine(x0_true, lam1), CharacteristicLine(x0_true, lam2))
    used = set()
    matching = []
    aligned = True
    for ei, exp in enumerate(expected):
        best = None
        for fi, fl in enumerate(fitted):
            if fi in used:
                continue
            serr = abs(fl.line.lam - exp.lam)
            if best is None or serr < best[1]:
                best = (fi, serr)
        if best is None:
            aligned = False
            continue
        fi, serr = best
        ierr = abs(fitted[fi].line.x0 - exp.x0)
        used.add(fi)
        matching.append((ei, fi, serr, ierr))
        if serr > slope_tol or ierr > intercept_tol:
            aligned = False
    return CharacteristicReport(tuple(fitted), expected, tuple(matching), aligned)


def report_to_text(report: CharacteristicReport) -> str:
    """Human-readable key-value report with nested line lists."""
    lines = [f"aligned: {str(report.aligned).lower()}"]
    lines.append("expected:")
    for e in report.expected:
        lines.append(f"  - x0: {e.x0!r}  lambda: {e.lam!r}")
    lines.append("fitted:")
    for f in report.fitted:
        lines.append(
            f"  - x0: {f.line.x0!r}  lambda: {f.line.lam!r}"
            f"  inliers: {f.n_inliers}  rms: {f.rms_residual!r}"
        )
    lines.append("matching:")
    for ei, fi, serr, ierr in report.matching:
        lines.append(
            f"  - expected: {ei}  fitted: {fi}  slope_error: {serr!r}  intercept_error: {ierr!r}"
        )
    return "\n".join(lines) + "\n"


LINES_HEADER = "which index x0 lambda n_inliers rms_residual"


def lines_to_table(report: CharacteristicReport) -> str:
    rows = [LINES_HEADER]
    for i, e in enumerate(report.expected):
        rows.append(f"expected {i} {e.x0!r} {e.lam!r} 0 0.0")
    for i, f in enumerate(report.fitted):
        rows.append(
            f"fitted {i} {f.line.x0!r} {f.line.lam!r} {f.n_inliers} {f.rms_residual!r}"
        )
    return "\n".join(rows) + "\n"
