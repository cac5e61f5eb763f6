"""Signal-proportion estimation with a simulated bounding sequence.

The estimator works on the empirical cdf ``F_m`` of the p-values. Its
noise-only counterpart is summarised by the normalised deviation statistic

    V_m = sup_t (U_m(t) - t) / sqrt(t (1 - t)),

whose upper ``alpha_m`` quantile ``c_m`` is calibrated by Monte Carlo (iid
uniforms) or from a matrix of permutation null p-values. The proportion
estimate is

    pi_hat = max(0, sup_t (F_m(t) - t - c_m sqrt(t (1 - t))) / (1 - t)).

Both suprema are evaluated on the jump points of the empirical cdf joined
with a uniform interior grid of ``max(1000, m)`` points. Between jumps both
objectives are strictly decreasing in ``t``, so the jump points carry the
supremum and the grid only guards against degenerate inputs.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import rng as _rng
from .pvalues import EPS_CLAMP, PValueVector

SOURCES = ("simulated-uniform", "permutation-matrix")
_BELOW_ONE = float(np.nextafter(1.0, 0.0))
MIN_NULL_REPS = 100


def default_alpha_m(m: int) -> float:
    """``1 / sqrt(log m)``, the default tail level for ``c_m`` and ``t1``."""
    if m < 2:
        raise ValueError("default alpha_m needs m >= 2")
    return 1.0 / math.sqrt(math.log(m))


@dataclass(frozen=True)
class NullCalibration:
    """Bounding sequence value ``c_m`` and the context it was computed in."""

    m: int
    alpha_m: float
    c_m: float
    n_reps: int
    seed: int | None
    source: str = "simulated-uniform"

    def __post_init__(self):
        if not 0.0 < self.alpha_m < 1.0:
            raise ValueError("alpha_m must lie in (0, 1)")
        if not (self.c_m >= 0.0 and math.isfinite(self.c_m)):
            raise ValueError("c_m must be finite and nonnegative")
        if self.n_reps < 1:
            raise ValueError("n_reps must be >= 1")
        if self.source not in SOURCES:
            raise ValueError(f"unknown calibration source {self.source!r}")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "NullCalibration":
        d = json.loads(text)
        return cls(
            m=int(d["m"]),
            alpha_m=float(d["alpha_m"]),
            c_m=float(d["c_m"]),
            n_reps=int(d["n_reps"]),
            seed=None if d.get("seed") is None else int(d["seed"]),
            source=d.get("source", "simulated-uniform"),
        )

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def load(cls, path) -> "NullCalibration":
        return cls.from_json(Path(path).read_text())


@dataclass(frozen=True)
class PiEstimate:
    pi_hat: float
    s_hat: int
    t_star: float
    objective: float


def _grid(m: int) -> np.ndarray:
    g = max(1000, m)
    return np.arange(1, g + 1) / (g + 1.0)


def _candidates(srt: np.ndarray):
    """Candidate ``t`` values and ``F_m(t)`` for a clamped ascending sample."""
    m = srt.size
    grid = _grid(m)
    t = np.concatenate([srt, grid])
    # right-continuous ecdf: ties at a jump all count
    f = np.searchsorted(srt, t, side="right") / m
    return t, f


def _vm_sorted(srt: np.ndarray) -> float:
    t, f = _candidates(srt)
    return float(np.max((f - t) / np.sqrt(t * (1.0 - t))))


def compute_vm(p) -> float:
    """Normalised supremum deviation of the p-value ecdf from uniform.

    Parameters
    ----------
    p : PValueVector or array_like
        p-values; 0 and 1 are clamped by ``1e-12``.

    Returns
    -------
    float
        ``sup_t (F_m(t) - t) / sqrt(t (1 - t))`` over jump points and grid.
    """
    p = PValueVector.from_any(p)
    return _vm_sorted(p.clamped_sorted())


def _vm_rows(mat: np.ndarray) -> np.ndarray:
    srt = np.sort(np.clip(mat, EPS_CLAMP, 1.0 - EPS_CLAMP), axis=1)
    return np.array([_vm_sorted(row) for row in srt])


def _upper_quantile(sample: np.ndarray, alpha_m: float) -> float:
    # type-7 (numpy "linear") quantile
    return float(np.quantile(sample, 1.0 - alpha_m, method="linear"))


def null_vm_sample(m: int, n_reps: int, seed: int, *, start: int = 0) -> np.ndarray:
    """V_m for replicates ``start .. start + n_reps - 1`` of iid uniform nulls."""
    out = np.empty(n_reps)
    for i in range(n_reps):
        u = _rng.stream(seed, _rng.CALIBRATION, start + i).random(m)
        u.sort()
        out[i] = _vm_sorted(np.clip(u, EPS_CLAMP, 1.0 - EPS_CLAMP))
    return out


def calibrate_cm(m: int, alpha_m: float | None = None, n_reps: int = 1000,
                 seed: int = 0) -> NullCalibration:
    """Calibrate ``c_m`` as the upper ``alpha_m`` quantile of simulated V_m.

    Replicate ``r`` draws its ``m`` uniforms from
    ``rng.stream(seed, rng.CALIBRATION, r)``, so the result does not depend
    on how replicates are scheduled.

    Parameters
    ----------
    m : int
        Number of p-values (>= 2).
    alpha_m : float, optional
        Tail level; defaults to ``1 / sqrt(log m)``.
    n_reps : int
        Null replicates (>= 100).
    seed : int
        Base seed.
    """
    if m < 2:
        raise ValueError("calibration needs m >= 2")
    if alpha_m is None:
        alpha_m = default_alpha_m(m)
    if not 0.0 < alpha_m < 1.0:
        raise ValueError("alpha_m must lie in (0, 1)")
    if n_reps < MIN_NULL_REPS:
        raise ValueError("insufficient null replicates")
    sample = null_vm_sample(m, n_reps, seed)
    return NullCalibration(m=m, alpha_m=float(alpha_m),
                           c_m=max(0.0, _upper_quantile(sample, alpha_m)),
                           n_reps=n_reps, seed=int(seed),
                           source="simulated-uniform")


def calibrate_cm_from_matrix(null_pvals, alpha_m: float | None = None
                             ) -> NullCalibration:
    """Calibrate ``c_m`` from a ``B x m`` matrix of null p-values.

    Each row is one null realisation (for example one phenotype
    permutation), so the dependence between variables is kept.
    """
    mat = np.asarray(null_pvals, dtype=float)
    if mat.ndim != 2:
        raise ValueError("null p-values must be a 2-d array (B x m)")
    B, m = mat.shape
    if B < MIN_NULL_REPS:
        raise ValueError("insufficient null replicates")
    if not np.all(np.isfinite(mat)) or mat.min() < 0.0 or mat.max() > 1.0:
        raise ValueError("null p-values must lie in [0, 1]")
    if alpha_m is None:
        alpha_m = default_alpha_m(m)
    if not 0.0 < alpha_m < 1.0:
        raise ValueError("alpha_m must lie in (0, 1)")
    sample = _vm_rows(mat)
    return NullCalibration(m=m, alpha_m=float(alpha_m),
                           c_m=max(0.0, _upper_quantile(sample, alpha_m)),
                           n_reps=B, seed=None, source="permutation-matrix")


def mr_objective(t, f, c_m: float) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return (f - t - c_m * np.sqrt(t * (1.0 - t))) / (1.0 - t)


def estimate_pi(p, cal: NullCalibration | float) -> PiEstimate:
    """Lower-bound estimate of the signal proportion and signal count.

    Parameters
    ----------
    p : PValueVector or array_like
    cal : NullCalibration or float
        Calibration whose ``m`` matches ``p``; a bare float is taken as
        ``c_m`` directly.

    Returns
    -------
    PiEstimate
        ``pi_hat`` clipped to ``[0, 1)`` and ``s_hat = round(m pi_hat)``
        (half up) clipped to ``[0, m - 1]``.
    """
    p = PValueVector.from_any(p)
    if isinstance(cal, NullCalibration):
        if cal.m != p.m:
            raise ValueError(
                f"dimension mismatch: calibration m={cal.m}, p-values m={p.m}")
        c_m = cal.c_m
    else:
        c_m = float(cal)
    t, f = _candidates(p.clamped_sorted())
    obj = mr_objective(t, f, c_m)
    i = int(np.argmax(obj))
    best = float(obj[i])
    # c_m = 0 with every p at the clamp floor would give exactly 1
    pi_hat = min(max(0.0, best), _BELOW_ONE)
    s_hat = int(math.floor(p.m * pi_hat + 0.5))
    s_hat = min(max(s_hat, 0), p.m - 1)
    return PiEstimate(pi_hat=pi_hat, s_hat=s_hat, t_star=float(t[i]),
                      objective=best)
