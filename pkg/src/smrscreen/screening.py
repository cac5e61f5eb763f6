"""Cutoff rules on ranked p-values: AdSMR, cvSMR and Benjamini-Hochberg.

All rules return a :class:`ScreeningResult` that selects the top ``k_star``
variables of the ascending p-value order. Original indices are 0-based.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import special

from .mr_estimator import default_alpha_m
from .pvalues import PValueVector

PROCEDURES = ("adsmr", "cvsmr", "bh", "mdr")
MODES = ("ratio-approximation", "exact-beta-median")


@dataclass
class ScreeningResult:
    """Output of a screening rule.

    ``selected`` lists original indices in rank order, so
    ``selected == p.order[:k_star]``. ``flags`` carries non-fatal notes such
    as ``"s_hat_above_cap"``.
    """

    procedure: str
    k_star: int
    selected: np.ndarray
    s_hat_used: int | None
    params: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)

    def __post_init__(self):
        if self.procedure not in PROCEDURES:
            raise ValueError(f"unknown procedure {self.procedure!r}")
        self.selected = np.asarray(self.selected, dtype=np.int64)
        if self.selected.size != self.k_star:
            raise ValueError("selected size must equal k_star")

    def mask(self, m: int) -> np.ndarray:
        out = np.zeros(m, dtype=bool)
        out[self.selected] = True
        return out

    def to_dict(self) -> dict:
        return {
            "procedure": self.procedure,
            "k_star": int(self.k_star),
            "s_hat_used": None if self.s_hat_used is None else int(self.s_hat_used),
            "params": self.params,
            "flags": list(self.flags),
            "selected": [int(i) for i in self.selected],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "ScreeningResult":
        return cls(procedure=d["procedure"], k_star=int(d["k_star"]),
                   selected=np.array(d["selected"], dtype=np.int64),
                   s_hat_used=d.get("s_hat_used"), params=d.get("params", {}),
                   flags=d.get("flags", []))

    def write_tsv(self, path, p) -> None:
        """One row per variable: rank (1-based), original index, p, selected."""
        p = PValueVector.from_any(p)
        with Path(path).open("w") as fh:
            fh.write("rank\tindex\tp\tselected\n")
            for r, (idx, pv) in enumerate(zip(p.order, p.sorted), start=1):
                fh.write(f"{r}\t{int(idx)}\t{float(pv)!r}\t{int(r <= self.k_star)}\n")


def _result(procedure, p, k_star, s_hat, params, flags=()):
    return ScreeningResult(procedure=procedure, k_star=int(k_star),
                           selected=p.order[:k_star].copy(), s_hat_used=s_hat,
                           params=params, flags=list(flags))


# -- beta medians -----------------------------------------------------------

def beta_median(a, b, tol: float = 1e-12):
    """Median of Beta(a, b) by bisection on the regularized incomplete beta.

    Accepts scalars or broadcastable arrays of positive integers (any
    positive reals work). Returns a float for scalar input.
    """
    a_arr, b_arr = np.broadcast_arrays(np.asarray(a, dtype=float),
                                       np.asarray(b, dtype=float))
    if np.any(a_arr <= 0) or np.any(b_arr <= 0):
        raise ValueError("beta parameters must be positive")
    lo = np.zeros(a_arr.shape)
    hi = np.ones(a_arr.shape)
    # 0.5 ** n < tol after n = ceil(log2(1 / tol)) halvings
    for _ in range(int(math.ceil(math.log2(1.0 / tol))) + 1):
        mid = 0.5 * (lo + hi)
        below = special.betainc(a_arr, b_arr, mid) < 0.5
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    med = 0.5 * (lo + hi)
    return float(med) if med.ndim == 0 else med


@dataclass(frozen=True)
class CriticalSequence:
    """AdSMR critical values ``b_j`` for ``j = 1, 2, ...`` given ``(m, s_hat)``.

    ``mode="ratio-approximation"`` uses ``j / (m - s_hat)``;
    ``mode="exact-beta-median"`` uses the median of
    ``Beta(j, m - s_hat - j + 1)``.
    """

    m: int
    s_hat: int
    mode: str = "ratio-approximation"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown critical-sequence mode {self.mode!r}")
        if not 0 <= self.s_hat < self.m:
            raise ValueError("need 0 <= s_hat < m")

    def values(self, j) -> np.ndarray:
        j = np.asarray(j, dtype=float)
        n0 = self.m - self.s_hat
        if np.any(j < 1) or np.any(j > n0):
            raise ValueError("critical index j must lie in [1, m - s_hat]")
        if self.mode == "ratio-approximation":
            return j / n0
        return np.asarray(beta_median(j, n0 - j + 1))

    def value(self, j: int) -> float:
        return float(self.values(j))


# -- cutoff rules -----------------------------------------------------------

def compute_t1(p, alpha_m: float) -> int:
    """Number of p-values strictly below ``alpha_m / m`` (0 if none)."""
    if not 0.0 < alpha_m < 1.0:
        raise ValueError("alpha_m must lie in (0, 1)")
    p = PValueVector.from_any(p)
    return int(np.searchsorted(p.sorted, alpha_m / p.m, side="left"))


def _check_s_hat(s_hat, m):
    if s_hat < 0 or s_hat >= m:
        raise ValueError(f"s_hat must satisfy 0 <= s_hat < m (got {s_hat}, m={m})")
    return int(s_hat)


def _first_trigger(psorted, s_hat, stop, crit):
    """Smallest j >= 1 with ``psorted[s_hat + j - 1] <= crit(j)`` and
    ``s_hat + j <= stop``; ``None`` if there is none."""
    if stop <= s_hat:
        return None
    j = np.arange(1, stop - s_hat + 1)
    hits = np.flatnonzero(psorted[s_hat:stop] <= crit(j))
    return int(j[hits[0]]) if hits.size else None


def adsmr_cutoff(p, s_hat: int, alpha_m: float | None = None,
                 seq: CriticalSequence | str | None = None) -> ScreeningResult:
    """Adaptive SMR cutoff, capped at ``floor(m / 2)``.

    Parameters
    ----------
    p : PValueVector or array_like
    s_hat : int
        Estimated number of signals, ``0 <= s_hat < m``.
    alpha_m : float, optional
        Level for the ``t1`` guard; defaults to ``1 / sqrt(log m)``.
    seq : CriticalSequence or str, optional
        Critical sequence or its mode name; default ratio approximation.
    """
    p = PValueVector.from_any(p)
    m = p.m
    s_hat = _check_s_hat(s_hat, m)
    if alpha_m is None:
        alpha_m = default_alpha_m(m)
    if seq is None or isinstance(seq, str):
        seq = CriticalSequence(m, s_hat, seq or "ratio-approximation")
    elif (seq.m, seq.s_hat) != (m, s_hat):
        raise ValueError("critical sequence was built for a different (m, s_hat)")
    cap = m // 2
    t1 = compute_t1(p, alpha_m)
    params = {"alpha_m": alpha_m, "mode": seq.mode, "cap": cap, "t1": t1}
    flags = []
    if s_hat > cap:
        flags.append("s_hat_above_cap")
    if s_hat <= t1:
        k = min(s_hat, cap)
    else:
        j = _first_trigger(p.sorted, s_hat, cap, seq.values)
        if j is None:
            k = cap
            flags.append("search_exhausted")
        else:
            k = s_hat + j
    return _result("adsmr", p, k, s_hat, params, flags)


def cvsmr_cutoff(p, s_hat: int, alpha: float = 0.1,
                 alpha_m: float | None = None) -> ScreeningResult:
    """Conservative SMR cutoff with critical values ``(j / m) alpha``.

    No cap is applied; an exhausted search selects all ``m`` variables.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    p = PValueVector.from_any(p)
    m = p.m
    s_hat = _check_s_hat(s_hat, m)
    if alpha_m is None:
        alpha_m = default_alpha_m(m)
    t1 = compute_t1(p, alpha_m)
    params = {"alpha": alpha, "alpha_m": alpha_m, "t1": t1}
    flags = []
    if s_hat <= t1:
        k = s_hat
    else:
        j = _first_trigger(p.sorted, s_hat, m, lambda j: j * alpha / m)
        if j is None:
            k = m
            flags.append("search_exhausted")
        else:
            k = s_hat + j
    return _result("cvsmr", p, k, s_hat, params, flags)


def bh_select(p, q: float) -> ScreeningResult:
    """Benjamini-Hochberg step-up: ``k = max{i : p_(i) <= i q / m}``."""
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0, 1)")
    p = PValueVector.from_any(p)
    m = p.m
    ok = np.flatnonzero(p.sorted <= np.arange(1, m + 1) * q / m)
    k = int(ok[-1]) + 1 if ok.size else 0
    return _result("bh", p, k, None, {"q": q})
