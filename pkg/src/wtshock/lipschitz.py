"""Lipschitz (Holder) exponent estimation from maxima decay across scales.

The amplitude of a modulus-maxima chain obeys |W(sigma)| <= K sigma^alpha;
regressing log2 |W| on j (= log2 of sigma in grid units) estimates alpha as
the slope and log2 K as the intercept.  alpha near 0 marks a jump, near -1 a
Dirac-type impulse, and >= 1 smooth (or smoother-than-jump) behavior.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .wtmm import MaximaChain

__all__ = [
    "ClassificationBands",
    "LipschitzEstimate",
    "estimate_exponent",
    "classify",
    "estimates_to_table",
]


@dataclass(frozen=True)
class ClassificationBands:
    """Decision thresholds for mapping a fitted exponent to a verdict."""

    jump_halfwidth: float = 0.35
    dirac_max: float = -0.65
    smooth_min: float = 0.65
    residual_max: float = 0.5


DEFAULT_BANDS = ClassificationBands()


@dataclass(frozen=True)
class LipschitzEstimate:
    alpha: float
    log_K: float
    residual_rms: float
    n_scales: int
    classification: str = "indeterminate"

    def __post_init__(self):
        if self.n_scales < 3:
            raise ValueError("an exponent estimate needs at least 3 scales")
        if self.residual_rms < 0:
            raise ValueError("residual rms cannot be negative")


def estimate_exponent(
    chain: MaximaChain,
    bands: ClassificationBands = DEFAULT_BANDS,
) -> LipschitzEstimate:
    """Least-squares fit of log2(modulus) against log2(sigma).

    The slope is the exponent alpha; the intercept log_K is reported at
    sigma = 1 (log_K shifts under scale relabeling, alpha does not).
    """
    if chain.kind != "scale_chain":
        raise ValueError("exponent estimation applies to scale chains")
    moduli = np.array([p.modulus for p in chain.points])
    sigmas = np.array([p.sigma for p in chain.points])
    if len(moduli) < 3:
        raise ValueError("chain spans fewer than 3 scales")
    if np.any(moduli <= 0):
        raise ValueError("chain contains non-positive modulus")
    js = np.log2(sigmas)
    logw = np.log2(moduli)
    alpha, log_k = np.polyfit(js, logw, 1)
    resid = logw - (alpha * js + log_k)
    rms = float(np.sqrt(np.mean(resid**2)))
    est = LipschitzEstimate(float(alpha), float(log_k), rms, len(moduli))
    return LipschitzEstimate(
        est.alpha, est.log_K, est.residual_rms, est.n_scales, classify(est, bands)
    )


def classify(est: LipschitzEstimate, bands: ClassificationBands = DEFAULT_BANDS) -> str:
    """Map an estimate to {smooth, jump, dirac_like, indeterminate}."""
    if est.residual_rms > bands.residual_max:
        return "indeterminate"
    if abs(est.alpha) <= bands.jump_halfwidth:
        return "jump"
    if est.alpha <= bands.dirac_max:
        return "dirac_like"
    if est.alpha >= bands.smooth_min:
        return "smooth"
    return "indeterminate"


ESTIMATE_HEADER = "chain_id alpha log_K residual_rms classification"


def estimates_to_table(estimates: Sequence[LipschitzEstimate]) -> str:
    lines = [ESTIMATE_HEADER]
    for cid, est in enumerate(estimates):
        lines.append(
            f"{cid} {est.alpha!r} {est.log_K!r} {est.residual_rms!r} {est.classification}"
        )
    return "\n".join(lines) + "\n"
