"""Covariate-adjusted marginal regression scans and permutation nulls.

Every variable ``x_j`` is tested in the model ``y ~ W + x_j``. By the
Frisch-Waugh-Lovell theorem the t statistic for ``x_j`` only depends on the
residuals of ``y`` and ``x_j`` after projecting out ``W``, so ``W`` is
factored once and each variable costs one inner product.

Permutation nulls shuffle the raw phenotype, re-residualize it against the
fixed covariates and reuse the cached residualized ``X``. Because the
projection is linear this equals refitting every model on shuffled data.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import stats

from . import rng as _rng
from .pvalues import PValueVector

MIN_PERMUTATIONS = 100
_RANK_TOL = 1e-10


@dataclass(frozen=True)
class DesignData:
    """Phenotype ``y`` (n), covariates ``W`` (n x q, intercept first) and
    variables ``X`` (n x m)."""

    y: np.ndarray
    W: np.ndarray
    X: np.ndarray
    covariate_names: tuple = ()
    variable_names: tuple = ()

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).ravel()
        W = np.asarray(self.W, dtype=float)
        X = np.asarray(self.X, dtype=float)
        if W.ndim == 1:
            W = W[:, None]
        if X.ndim == 1:
            X = X[:, None]
        n = y.size
        if W.shape[0] != n or X.shape[0] != n:
            raise ValueError("y, W and X must have the same number of rows")
        for name, a in (("y", y), ("W", W), ("X", X)):
            if not np.all(np.isfinite(a)):
                raise ValueError(f"missing or non-finite values in {name}")
        if n <= W.shape[1] + 1:
            raise ValueError("need n > q + 1 observations")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "X", X)

    @property
    def n(self) -> int:
        return self.y.size

    @property
    def m(self) -> int:
        return self.X.shape[1]

    @classmethod
    def with_intercept(cls, y, X, covariates=None, **kw) -> "DesignData":
        y = np.asarray(y, dtype=float)
        cols = [np.ones(y.size)]
        if covariates is not None:
            c = np.asarray(covariates, dtype=float)
            cols.extend(c.T if c.ndim == 2 else [c])
        return cls(y, np.column_stack(cols), X, **kw)


@dataclass(frozen=True)
class Residualized:
    """Residuals after projecting out the covariates.

    ``Q`` is an orthonormal basis of the covariate column space.
    """

    y_res: np.ndarray
    X_res: np.ndarray
    df: int
    Q: np.ndarray
    x_norms: np.ndarray
    degenerate: np.ndarray


def covariate_basis(W: np.ndarray, names=None) -> np.ndarray:
    """Orthonormal basis of ``span(W)``; raises if ``W`` is rank deficient."""
    q, r = np.linalg.qr(W)
    d = np.abs(np.diag(r))
    scale = max(np.abs(r).max(), 1.0)
    bad = np.flatnonzero(d <= _RANK_TOL * scale)
    if bad.size:
        labels = [names[i] if names else str(i) for i in bad]
        raise ValueError("covariate matrix is rank deficient; offending columns: "
                         + ", ".join(labels))
    return q


def _project_out(Q, A):
    return A - Q @ (Q.T @ A)


def residualize(data: DesignData) -> Residualized:
    """Project ``y`` and every column of ``X`` off the covariate space."""
    Q = covariate_basis(data.W, list(data.covariate_names) or None)
    X_res = _project_out(Q, data.X)
    x_norms = np.linalg.norm(X_res, axis=0)
    return Residualized(
        y_res=_project_out(Q, data.y),
        X_res=X_res,
        df=data.n - data.W.shape[1] - 1,
        Q=Q,
        x_norms=x_norms,
        degenerate=x_norms <= 1e-10 * np.linalg.norm(data.X, axis=0),
    )


def _t_to_p(t, df, sided):
    if sided == "two":
        return 2.0 * stats.t.sf(np.abs(t), df)
    if sided == "one":
        return stats.t.sf(t, df)
    raise ValueError("sided must be 'one' or 'two'")


def _pvalue_matrix(X_res, x_norms, Y_res, df, sided, degenerate):
    """p-values for each column of ``Y_res`` (n x B) against every variable.

    Returns an ``m x B`` array.
    """
    y_norms = np.linalg.norm(Y_res, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = (X_res.T @ Y_res) / np.outer(x_norms, y_norms)
        r = np.clip(r, -1.0, 1.0)
        t = r * np.sqrt(df / (1.0 - r * r))
    t = np.where(np.isnan(t), 0.0, t)
    t[degenerate, :] = 0.0
    t[:, y_norms == 0] = 0.0
    p = _t_to_p(t, df, sided)
    p[degenerate, :] = 1.0
    return np.clip(p, 0.0, 1.0)


def marginal_pvalues(y_res, X_res, df: int, sided: str = "two",
                     x_norms=None, degenerate=None) -> PValueVector:
    """t-test p-values for each residualized variable.

    ``t_j = r_j sqrt(df / (1 - r_j^2))`` with ``r_j`` the correlation of
    ``X_res[:, j]`` and ``y_res``. Zero-variance columns get ``p = 1`` and a
    :class:`RuntimeWarning`.
    """
    if df < 1:
        raise ValueError("need df >= 1")
    X_res = np.asarray(X_res, dtype=float)
    y_res = np.asarray(y_res, dtype=float).ravel()
    if x_norms is None:
        x_norms = np.linalg.norm(X_res, axis=0)
    if degenerate is None:
        degenerate = x_norms <= 1e-10 * max(1.0, float(np.max(x_norms, initial=0.0)))
    if degenerate.any():
        warnings.warn(f"zero-variance variables set to p=1: {np.flatnonzero(degenerate).tolist()}",
                      RuntimeWarning, stacklevel=2)
    p = _pvalue_matrix(X_res, x_norms, y_res[:, None], df, sided, degenerate)
    return PValueVector(p[:, 0])


def scan(data: DesignData, sided: str = "two") -> PValueVector:
    """Residualize and test every variable."""
    res = residualize(data)
    return marginal_pvalues(res.y_res, res.X_res, res.df, sided, res.x_norms,
                            res.degenerate)


def permutation_null(data: DesignData, B: int = 1000, seed: int = 0,
                     sided: str = "two", permutations=None,
                     chunk: int = 64) -> np.ndarray:
    """``B x m`` matrix of marginal p-values under phenotype permutation.

    Permutation ``b`` is ``rng.stream(seed, rng.PERMUTATION, b).permutation(n)``
    unless explicit ``permutations`` (B x n index arrays) are supplied.
    """
    if B < MIN_PERMUTATIONS:
        raise ValueError("insufficient null replicates")
    res = residualize(data)
    if permutations is not None:
        permutations = np.asarray(permutations, dtype=np.int64)
        if permutations.shape != (B, data.n):
            raise ValueError("permutations must have shape (B, n)")
    out = np.empty((B, data.m))
    for lo in range(0, B, chunk):
        hi = min(B, lo + chunk)
        Y = np.empty((data.n, hi - lo))
        for b in range(lo, hi):
            perm = (permutations[b] if permutations is not None else
                    _rng.stream(seed, _rng.PERMUTATION, b).permutation(data.n))
            Y[:, b - lo] = data.y[perm]
        Y_res = _project_out(res.Q, Y)
        out[lo:hi] = _pvalue_matrix(res.X_res, res.x_norms, Y_res, res.df,
                                    sided, res.degenerate).T
    return out


# -- ingestion ---------------------------------------------------------------

def read_design_csv(path, covariates=(), y_column: str = "y") -> DesignData:
    """Read a CSV with a header row.

    The ``y_column`` is the phenotype, ``covariates`` name covariate columns
    (an intercept is always added), every other column is a variable.
    Empty or non-numeric cells are rejected.
    """
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        rows = [row for row in reader if row]
    if y_column not in header:
        raise ValueError(f"no {y_column!r} column in {path}")
    missing = [c for c in covariates if c not in header]
    if missing:
        raise ValueError(f"covariate columns not found: {missing}")
    try:
        data = np.array([[float(v) for v in row] for row in rows], dtype=float)
    except ValueError as exc:
        raise ValueError(f"missing or non-numeric value in {path}: {exc}") from None
    if data.ndim != 2 or data.shape[1] != len(header):
        raise ValueError("ragged CSV rows")
    col = {h: i for i, h in enumerate(header)}
    var_names = [h for h in header if h != y_column and h not in covariates]
    return DesignData.with_intercept(
        data[:, col[y_column]],
        data[:, [col[v] for v in var_names]],
        data[:, [col[c] for c in covariates]] if covariates else None,
        covariate_names=("(intercept)",) + tuple(covariates),
        variable_names=tuple(var_names),
    )


def read_design_pair(pheno_csv, matrix_path, covariates=(), y_column="y"
                     ) -> DesignData:
    """Phenotype/covariate CSV plus a binary float64 variable matrix."""
    from .io import read_f64_matrix

    with Path(pheno_csv).open(newline="") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
    try:
        y = np.array([float(r[y_column]) for r in rows])
        cov = np.array([[float(r[c]) for c in covariates] for r in rows]) if covariates else None
    except (KeyError, ValueError) as exc:
        raise ValueError(f"bad phenotype/covariate file: {exc}") from None
    X, _ = read_f64_matrix(matrix_path)
    return DesignData.with_intercept(y, X, cov,
                                     covariate_names=("(intercept)",) + tuple(covariates))
