"""Modulus-maxima detection and chaining.

1D: strict local maxima of |coefficients| per scale, refined to sub-cell
accuracy by a quadratic fit through the three straddling samples.

2D: non-maximum suppression of the gradient modulus along the gradient
direction, with bilinearly interpolated neighbors at +/- one cell.

Chaining links maxima greedily -- across dyadic scales (finest to coarsest)
into scale chains, and across time rows into ridges, the discrete traces of
candidate weakly discontinuous curves x = x(t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .cwt import CwtStack1D, GradientField

__all__ = [
    "MaximaPoint",
    "MaximaChain",
    "find_maxima_1d",
    "find_maxima_2d",
    "chain_across_scales",
    "chain_ridges",
    "chains_to_table",
]


@dataclass(frozen=True)
class MaximaPoint:
    x: float
    t: Optional[float]  # None for 1D maxima
    sigma: float
    modulus: float
    angle: float
    row: Optional[int] = None  # originating t-row for 2D maxima

    def __post_init__(self):
        if not self.modulus > 0:
            raise ValueError("modulus at a maximum must be strictly positive")


@dataclass(frozen=True)
class MaximaChain:
    """Either a scale chain (one point per dyadic scale) or a ridge (per t-row)."""

    points: tuple
    kind: str  # "scale_chain" | "ridge"

    def __post_init__(self):
        if self.kind not in ("scale_chain", "ridge"):
            raise ValueError(f"unknown chain kind {self.kind!r}")
        if self.kind == "scale_chain":
            sigmas = [p.sigma for p in self.points]
            if any(b <= a for a, b in zip(sigmas, sigmas[1:])):
                raise ValueError("scale chain must be strictly increasing in sigma")
        else:
            ts = [p.t for p in self.points]
            if any(b <= a for a, b in zip(ts, ts[1:])):
                raise ValueError("ridge must be strictly increasing in t")

    def __len__(self):
        return len(self.points)


def _quadratic_refine(ym: float, y0: float, yp: float):
    """Vertex of the parabola through (-1, ym), (0, y0), (1, yp).

    Returns (offset in cells, peak value); offset clamped to [-0.5, 0.5].
    """
    denom = ym - 2.0 * y0 + yp
    if denom >= 0.0:
        return 0.0, y0
    delta = 0.5 * (ym - yp) / denom
    delta = float(np.clip(delta, -0.5, 0.5))
    peak = y0 - 0.25 * (ym - yp) * delta
    return delta, max(peak, y0)


def _plateau_maxima(values: np.ndarray, thresh: float):
    """Index runs [a, b] of equal values that strictly exceed both sides.

    Single-sample maxima are runs with a == b.  Exact ties occur routinely
    (e.g. an antisymmetric kernel against a sampled step), so plateau runs
    must count as one maximum, located at the run center.
    """
    n = len(values)
    runs = []
    a = 0
    while a < n:
        b = a
        while b + 1 < n and values[b + 1] == values[a]:
            b += 1
        if (
            a > 0
            and b < n - 1
            and values[a] > values[a - 1]
            and values[b] > values[b + 1]
            and values[a] >= thresh
        ):
            runs.append((a, b))
        a = b + 1
    return runs


def find_maxima_1d(
    stack: CwtStack1D,
    threshold_rel: float = 0.1,
) -> list:
    """Per-scale strict local maxima of |coefficients| above a relative threshold.

    Returns a list (one entry per scale) of lists of MaximaPoint.  The border
    band recorded in the stack is excluded from both search and threshold
    normalization.
    """
    if not 0.0 < threshold_rel < 1.0:
        raise ValueError(f"threshold_rel must lie in (0, 1), got {threshold_rel}")
    if len(stack.scales) == 0 or stack.coefficients.size == 0:
        raise ValueError("empty coefficient stack")
    out = []
    for idx, sigma in enumerate(stack.scales.sigmas):
        coeff = stack.coefficients[idx]
        mod = np.abs(coeff)
        border = stack.border_samples[idx] if stack.border_samples else 0
        lo, hi = border, stack.grid.n - border
        points = []
        if hi - lo >= 3:
            interior = mod[lo:hi]
            peak = interior.max()
            if peak > 0.0:
                thresh = threshold_rel * peak
                for a, b in _plateau_maxima(interior, thresh):
                    # a..b is a run of equal values strictly above both sides
                    i, j = a + lo, b + lo
                    center = 0.5 * (i + j)
                    if i == j:
                        delta, value = _quadratic_refine(mod[i - 1], mod[i], mod[i + 1])
                    else:
                        delta, value = 0.0, mod[i]
                    angle = 0.0 if coeff[i] >= 0 else math.pi
                    points.append(
                        MaximaPoint(
                            x=float(stack.grid.coord(center + delta)),
                            t=None,
                            sigma=float(sigma),
                            modulus=float(value),
                            angle=angle,
                        )
                    )
        out.append(points)
    return out


def _bilinear(values: np.ndarray, r: float, c: float) -> float:
    """Bilinear sample of a (rows, cols) array at fractional (r, c)."""
    r0, c0 = int(math.floor(r)), int(math.floor(c))
    fr, fc = r - r0, c - c0
    r1, c1 = min(r0 + 1, values.shape[0] - 1), min(c0 + 1, values.shape[1] - 1)
    v00 = values[r0, c0]
    v01 = values[r0, c1]
    v10 = values[r1, c0]
    v11 = values[r1, c1]
    return (
        v00 * (1 - fr) * (1 - fc)
        + v01 * (1 - fr) * fc
        + v10 * fr * (1 - fc)
        + v11 * fr * fc
    )


def find_maxima_2d(
    gf: GradientField,
    threshold_rel: float = 0.1,
    extra_border_x: int = 0,
    extra_border_t: int = 0,
    min_separation_cells: float = 2.0,
    degenerate_floor: float = 1e-12,
) -> list:
    """Non-maximum suppression of the gradient modulus along its own direction.

    A point survives when its modulus strictly exceeds the bilinearly
    interpolated modulus one cell ahead along (cos A, sin A) and is at least
    the one behind, and clears threshold_rel times the trusted-region peak.
    The asymmetric comparison keeps exactly one member of an exact two-sample
    tie (routine for a sampled step edge).  Survivors closer than
    min_separation_cells within one row collapse to the strongest of them, so
    each edge crossing yields a single point per row.  A trusted-region peak
    at or below degenerate_floor (rounding noise left by a constant input)
    yields the empty list.
    """
    if not 0.0 < threshold_rel < 1.0:
        raise ValueError(f"threshold_rel must lie in (0, 1), got {threshold_rel}")
    mod = gf.modulus.values
    ang = gf.angle.values
    bx = gf.border_x + extra_border_x
    bt = gf.border_t + extra_border_t
    m, n = mod.shape
    if m - 2 * bt < 3 or n - 2 * bx < 3:
        return []
    trusted = mod[bt : m - bt, bx : n - bx]
    peak = trusted.max()
    if peak <= degenerate_floor:
        return []  # degenerate (constant input): nothing to suppress
    thresh = threshold_rel * peak
    grid = gf.grid
    points = []
    rows, cols = np.nonzero(
        (mod >= thresh)
        & (np.arange(m)[:, None] >= max(bt, 1))
        & (np.arange(m)[:, None] < m - max(bt, 1))
        & (np.arange(n)[None, :] >= max(bx, 1))
        & (np.arange(n)[None, :] < n - max(bx, 1))
    )
    for r, c in zip(rows, cols):
        a = ang[r, c]
        dc, dr = math.cos(a), math.sin(a)
        ahead = _bilinear(mod, r + dr, c + dc)
        behind = _bilinear(mod, r - dr, c - dc)
        if not (mod[r, c] > ahead and mod[r, c] >= behind):
            continue
        delta, value = _quadratic_refine(behind, mod[r, c], ahead)
        points.append(
            MaximaPoint(
                x=float(grid.x.coord(c) + delta * dc * grid.x.dx),
                t=float(grid.t_coord(r) + delta * dr * grid.dt),
                sigma=gf.sigma,
                modulus=float(value),
                angle=float(a),
                row=int(r),
            )
        )
    return _dedup_rows(points, min_separation_cells * grid.x.dx)


def _dedup_rows(points: list, min_sep: float) -> list:
    """Within each row keep only the strongest of any cluster closer than min_sep."""
    by_row = {}
    for p in points:
        by_row.setdefault(p.row, []).append(p)
    kept = []
    for r in sorted(by_row):
        accepted = []
        for p in sorted(by_row[r], key=lambda p: (-p.modulus, p.x)):
            if all(abs(p.x - q.x) >= min_sep for q in accepted):
                accepted.append(p)
        kept.extend(sorted(accepted, key=lambda p: p.x))
    return kept


def chain_across_scales(
    per_scale_maxima: Sequence[Sequence[MaximaPoint]],
    linking_radius_cells: int = 1,
    base_unit: float | None = None,
) -> list:
    """Greedy nearest-neighbor linking from finest to coarsest dyadic scale.

    The allowed jump between scale levels grows with the coarser scale:
    linking_radius_cells * sigma_next.  Chains spanning fewer than 3 scales
    are discarded; ties go to the candidate with larger modulus.
    """
    if len(per_scale_maxima) < 3:
        raise ValueError("need maxima from at least 3 dyadic scales")
    chains = [[p] for p in per_scale_maxima[0]]
    for level in range(1, len(per_scale_maxima)):
        candidates = list(per_scale_maxima[level])
        if not candidates:
            continue
        radius = linking_radius_cells * candidates[0].sigma
        taken = [False] * len(candidates)
        # chains with larger current modulus get first pick (deterministic ties)
        order = sorted(
            range(len(chains)),
            key=lambda ci: (-chains[ci][-1].modulus, chains[ci][-1].x),
        )
        for ci in order:
            last = chains[ci][-1]
            if last.sigma >= candidates[0].sigma:
                continue  # chain already ended at an earlier level
            best, best_key = None, None
            for k, cand in enumerate(candidates):
                if taken[k]:
                    continue
                d = abs(cand.x - last.x)
                if d > radius:
                    continue
                key = (d, -cand.modulus)
                if best is None or key < best_key:
                    best, best_key = k, key
            if best is not None:
                taken[best] = True
                chains[ci].append(candidates[best])
    return [MaximaChain(tuple(c), "scale_chain") for c in chains if len(c) >= 3]


def chain_ridges(
    maxima: Sequence[MaximaPoint],
    max_jump_cells: int = 2,
    cell_size: float | None = None,
    max_row_gap: int = 1,
) -> list:
    """Link per-row 2D maxima into ridges by nearest neighbor in x.

    A ridge absorbs at most one point per row; it is closed after
    max_row_gap consecutive rows without a match, and a candidate farther
    than max_jump_cells cells (in x) from the ridge tip starts a new ridge.
    """
    if not maxima:
        return []
    if cell_size is None:
        raise ValueError("cell_size (grid dx) is required")
    jump = max_jump_cells * cell_size
    by_row = {}
    for p in maxima:
        if p.row is None or p.t is None:
            raise ValueError("ridge chaining needs 2D maxima with row indices")
        by_row.setdefault(p.row, []).append(p)
    active = []  # [list of points]
    done = []
    for r in sorted(by_row):
        cands = sorted(by_row[r], key=lambda p: (p.x, -p.modulus))
        still_open = []
        for ridge in active:
            if r - ridge[-1].row > max_row_gap:
                done.append(ridge)
            else:
                still_open.append(ridge)
        active = still_open
        # larger-modulus tips choose first
        order = sorted(range(len(active)), key=lambda i: (-active[i][-1].modulus, active[i][-1].x))
        taken = [False] * len(cands)
        for i in order:
            tip = active[i][-1]
            best, best_key = None, None
            for k, cand in enumerate(cands):
                if taken[k]:
                    continue
                d = abs(cand.x - tip.x)
                if d > jump * (r - tip.row):
                    continue
                key = (d, -cand.modulus)
                if best is None or key < best_key:
                    best, best_key = k, key
            if best is not None:
                taken[best] = True
                active[i].append(cands[best])
        for k, cand in enumerate(cands):
            if not taken[k]:
                active.append([cand])
    done.extend(active)
    done.sort(key=lambda ridge: (ridge[0].row, ridge[0].x))
    return [MaximaChain(tuple(r), "ridge") for r in done]


TABLE_HEADER = "kind chain_id sigma t x modulus angle"


def chains_to_table(chains: Sequence[MaximaChain]) -> str:
    """Tabular text export; decimal formatting is round-trip exact (repr)."""
    lines = [TABLE_HEADER]
    for cid, chain in enumerate(chains):
        for p in chain.points:
            t_txt = repr(float(p.t)) if p.t is not None else "nan"
            lines.append(
                f"{chain.kind} {cid} {float(p.sigma)!r} {t_txt} {float(p.x)!r} "
                f"{float(p.modulus)!r} {float(p.angle)!r}"
            )
    return "\n".join(lines) + "\n"
