"""Simplified local-fdr estimation and the MDR comparator cutoff.

This is a deliberately plain estimator: theoretical N(0, 1) null, a
Gaussian-kernel estimate of the marginal density with Silverman's
bandwidth, and ``lfdr = min(1, pi0 phi(z) / f(z))``. It does not fit an
empirical null.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .pvalues import EPS_CLAMP, PValueVector
from .screening import ScreeningResult

BANDWIDTH_FLOOR = 1e-3
DENSITY_FLOOR = 1e-12
MIN_STATISTICS = 50
_CHUNK = 512


@dataclass(frozen=True)
class LfdrVector:
    z: np.ndarray
    lfdr: np.ndarray
    pi0: float
    bandwidth: float

    @property
    def m(self) -> int:
        return int(self.lfdr.size)


def zscores_from_pvalues(p, sided: str = "one") -> np.ndarray:
    """Map p-values to z-scores: ``isf(p)`` (one-sided) or ``isf(p/2)``."""
    vals = np.clip(PValueVector.from_any(p).values, EPS_CLAMP, 1.0 - EPS_CLAMP)
    if sided == "one":
        return stats.norm.isf(vals)
    if sided == "two":
        return stats.norm.isf(vals / 2.0)
    raise ValueError("sided must be 'one' or 'two'")


def kernel_density(z: np.ndarray, at: np.ndarray, bandwidth: float) -> np.ndarray:
    """Gaussian-kernel density estimate of sample ``z`` evaluated at ``at``."""
    out = np.empty(at.size)
    norm = 1.0 / (z.size * bandwidth * math.sqrt(2.0 * math.pi))
    for lo in range(0, at.size, _CHUNK):
        d = (at[lo:lo + _CHUNK, None] - z[None, :]) / bandwidth
        out[lo:lo + _CHUNK] = np.exp(-0.5 * d * d).sum(axis=1) * norm
    return out


def estimate_lfdr(z, pi0: float = 1.0) -> LfdrVector:
    """Local fdr under a theoretical N(0, 1) null.

    Parameters
    ----------
    z : array_like
        Test statistics, at least 50 of them.
    pi0 : float
        Null proportion in (0, 1].
    """
    z = np.asarray(z, dtype=float).ravel()
    if z.size < MIN_STATISTICS:
        raise ValueError("too few statistics for density estimation")
    if not 0.0 < pi0 <= 1.0:
        raise ValueError("pi0 must lie in (0, 1]")
    if not np.all(np.isfinite(z)):
        raise ValueError("statistics must be finite")
    h = max(1.06 * np.std(z, ddof=1) * z.size ** (-0.2), BANDWIDTH_FLOOR)
    f = np.maximum(kernel_density(z, z, h), DENSITY_FLOOR)
    lfdr = np.minimum(1.0, pi0 * stats.norm.pdf(z) / f)
    return LfdrVector(z=z, lfdr=lfdr, pi0=float(pi0), bandwidth=float(h))


def mdr_cutoff(lfdr: LfdrVector | np.ndarray, s_hat: int, beta: float
               ) -> ScreeningResult:
    """Smallest ``k`` whose estimated missed-signal mass is at most ``beta s_hat``.

    Variables are ranked by ascending lfdr (ties by original index) and the
    missed mass after the top ``k`` is ``sum_{i > k} (1 - lfdr_(i))``.
    """
    vals = lfdr.lfdr if isinstance(lfdr, LfdrVector) else np.asarray(lfdr, float)
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie in (0, 1)")
    order = np.argsort(vals, kind="stable")
    m = vals.size
    params = {"beta": beta}
    if s_hat <= 0:
        return ScreeningResult("mdr", 0, order[:0], 0, params, ["s_hat_zero"])
    mass = 1.0 - vals[order]
    # missed[k] = sum of mass[k:], k = 0..m
    missed = np.concatenate([np.cumsum(mass[::-1])[::-1], [0.0]])
    ok = np.flatnonzero(missed <= beta * s_hat)
    k = int(ok[0]) if ok.size else m
    return ScreeningResult("mdr", k, order[:k].copy(), int(s_hat), params)
