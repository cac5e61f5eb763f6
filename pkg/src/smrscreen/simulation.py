"""Multivariate-normal test statistics with planted signals.

Four dependence designs are supported:

* ``BlockDesign(l, rho)``: block-diagonal exchangeable correlation, sampled
  block by block from one ``l x l`` Cholesky factor (plus one for a
  trailing partial block);
* ``SparseDesign(rho, density)``: random sparse correlation, shifted to be
  positive definite and rescaled to unit diagonal;
* ``FactorDesign(n_sample)``: sample correlation of a two-factor model,
  sampled through its exact low-rank square root;
* ``IdentityDesign()``: independent statistics.

Replicate ``r`` of a config is a deterministic function of
``(config.seed, r)``; see :mod:`smrscreen.rng` for the stream keys.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from functools import cached_property

import numpy as np
from scipy import linalg, stats

from . import rng as _rng
from .pvalues import PValueVector

SCHEMA_VERSION = 1


# -- designs ----------------------------------------------------------------

@dataclass(frozen=True)
class IdentityDesign:
    kind: str = field(default="identity", init=False)


@dataclass(frozen=True)
class BlockDesign:
    """Block-diagonal correlation; ``structure`` is ``"exchangeable"``
    (constant ``rho`` within a block) or ``"ar1"`` (``rho ** |i - j|``)."""

    l: int = 50
    rho: float = 0.7
    structure: str = "exchangeable"
    kind: str = field(default="block", init=False)


@dataclass(frozen=True)
class SparseDesign:
    rho: float = 0.7
    density: float = 0.1
    kind: str = field(default="sparse", init=False)


@dataclass(frozen=True)
class FactorDesign:
    n_sample: int = 100
    kind: str = field(default="two_factor", init=False)


_DESIGNS = {"identity": IdentityDesign, "block": BlockDesign,
            "sparse": SparseDesign, "two_factor": FactorDesign}


def design_from_dict(d: dict):
    d = dict(d)
    kind = d.pop("kind")
    try:
        cls = _DESIGNS[kind]
    except KeyError:
        raise ValueError(f"unknown design kind {kind!r}") from None
    return cls(**d)


@dataclass(frozen=True)
class SimulationConfig:
    """One simulation scenario.

    The number of signals is ``s = round(m * pi)``; signals have mean ``mu``
    and noise mean 0.
    """

    m: int
    pi: float
    mu: float
    design: object = field(default_factory=lambda: BlockDesign())
    sided: str = "one"
    n_reps: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be positive")
        if not 0.0 <= self.pi < 1.0:
            raise ValueError("pi must lie in [0, 1)")
        if self.mu < 0:
            raise ValueError("mu must be nonnegative")
        if self.sided not in ("one", "two"):
            raise ValueError("sided must be 'one' or 'two'")
        if self.n_reps < 1:
            raise ValueError("n_reps must be positive")
        if isinstance(self.design, dict):
            object.__setattr__(self, "design", design_from_dict(self.design))

    @property
    def s(self) -> int:
        return int(math.floor(self.m * self.pi + 0.5))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["schema_version"] = SCHEMA_VERSION
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "SimulationConfig":
        d = dict(d)
        version = d.pop("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {version}")
        return cls(**d)


# -- covariance descriptions ------------------------------------------------

class FactorizationError(RuntimeError):
    """A covariance matrix could not be factorised."""


class IdentityCovariance:
    def __init__(self, m: int):
        self.m = m

    def sample(self, gen: np.random.Generator) -> np.ndarray:
        return gen.standard_normal(self.m)

    def dense(self) -> np.ndarray:
        return np.eye(self.m)


class BlockCovariance:
    """Block-diagonal correlation stored as ``(m, l, rho, structure)``.

    Never materialises the ``m x m`` matrix; sampling costs ``O(m l)``.
    """

    def __init__(self, m: int, l: int, rho: float, structure: str = "exchangeable"):
        if l < 1:
            raise ValueError("block size must be >= 1")
        if not -1.0 < rho < 1.0:
            raise ValueError("rho must lie in (-1, 1)")
        if structure not in ("exchangeable", "ar1"):
            raise ValueError(f"unknown block structure {structure!r}")
        if structure == "exchangeable" and l > 1 and rho <= -1.0 / (l - 1):
            raise ValueError("exchangeable block is not positive definite")
        self.m, self.l, self.rho = int(m), int(l), float(rho)
        self.structure = structure
        self.n_full, self.tail = divmod(self.m, self.l)

    def block(self, size: int) -> np.ndarray:
        if self.structure == "ar1":
            i = np.arange(size)
            return self.rho ** np.abs(i[:, None] - i[None, :])
        b = np.full((size, size), self.rho)
        np.fill_diagonal(b, 1.0)
        return b

    @cached_property
    def factor(self) -> np.ndarray:
        """Lower Cholesky factor of one full ``l x l`` block."""
        return np.linalg.cholesky(self.block(self.l))

    @cached_property
    def tail_factor(self) -> np.ndarray:
        return np.linalg.cholesky(self.block(self.tail))

    def sample(self, gen: np.random.Generator) -> np.ndarray:
        xi = gen.standard_normal(self.m)
        out = np.empty(self.m)
        full = self.n_full * self.l
        out[:full] = (xi[:full].reshape(self.n_full, self.l) @ self.factor.T).ravel()
        if self.tail:
            out[full:] = self.tail_factor @ xi[full:]
        return out

    def dense(self) -> np.ndarray:
        sizes = [self.l] * self.n_full + ([self.tail] if self.tail else [])
        return linalg.block_diag(*[self.block(k) for k in sizes])


class DenseCovariance:
    """Explicit covariance, sampled through its lower Cholesky factor."""

    def __init__(self, sigma: np.ndarray):
        self.sigma = np.asarray(sigma, dtype=float)
        self.m = self.sigma.shape[0]
        try:
            self.factor = np.linalg.cholesky(self.sigma)
        except np.linalg.LinAlgError as exc:
            raise FactorizationError("covariance factorization failed") from exc

    def sample(self, gen):
        return self.factor @ gen.standard_normal(self.m)

    def dense(self):
        return self.sigma


class RootCovariance:
    """Covariance ``R R^T`` given a (possibly low-rank) root ``R`` (m x r)."""

    def __init__(self, root: np.ndarray, unit_diagonal: bool = False):
        self.root = np.asarray(root, dtype=float)
        self.m = self.root.shape[0]
        self.unit_diagonal = unit_diagonal

    def sample(self, gen):
        return self.root @ gen.standard_normal(self.root.shape[1])

    def dense(self):
        c = self.root @ self.root.T
        if self.unit_diagonal:
            np.fill_diagonal(c, 1.0)
        return c


def build_block_sigma(m: int, l: int, rho: float,
                      structure: str = "exchangeable") -> BlockCovariance:
    return BlockCovariance(m, l, rho, structure)


def sparse_sigma_from_mask(mask_upper: np.ndarray, rho: float = 0.7) -> np.ndarray:
    """Shift-and-rescale construction from a 0/1 strict upper-triangle mask."""
    s = np.triu(np.asarray(mask_upper, dtype=float), k=1) * rho
    s = s + s.T
    np.fill_diagonal(s, 1.0)
    delta = abs(np.linalg.eigvalsh(s)[0]) + 0.05
    sigma = (s + delta * np.eye(s.shape[0])) / (1.0 + delta)
    np.fill_diagonal(sigma, 1.0)
    return sigma


def build_sparse_sigma(m: int, seed, rho: float = 0.7, density: float = 0.1
                       ) -> DenseCovariance:
    """Random sparse correlation: off-diagonals ``rho * Bernoulli(density)``,
    shifted by ``|lambda_min| + 0.05`` and rescaled to unit diagonal."""
    if m > 5000:
        raise ValueError("sparse design is built densely; m must be <= 5000")
    if not 0.0 < density < 1.0:
        raise ValueError("density must lie in (0, 1)")
    gen = seed if isinstance(seed, np.random.Generator) else _rng.stream(seed, _rng.COVARIANCE)
    mask = gen.random((m, m)) < density
    return DenseCovariance(sparse_sigma_from_mask(mask, rho))


def factor_root(m: int, n_sample: int, gen: np.random.Generator,
                loadings: np.ndarray | None = None) -> np.ndarray:
    """Root ``R`` with ``R R^T`` equal to the sample correlation of
    ``n_sample`` draws of ``X_j = a_j W1 + b_j W2 + H_j``."""
    if n_sample < 3:
        raise ValueError("n_sample must be >= 3")
    if loadings is None:
        loadings = gen.uniform(-1.0, 1.0, size=(2, m))
    w = gen.standard_normal((n_sample, 2))
    h = gen.standard_normal((n_sample, m))
    x = w @ loadings + h
    x = x - x.mean(axis=0)
    x /= np.linalg.norm(x, axis=0)
    return x.T


def build_factor_sigma(m: int, n_sample: int = 100, seed=0,
                       loadings: np.ndarray | None = None) -> RootCovariance:
    gen = seed if isinstance(seed, np.random.Generator) else _rng.stream(seed, _rng.COVARIANCE)
    return RootCovariance(factor_root(m, n_sample, gen, loadings), unit_diagonal=True)


def build_covariance(config: SimulationConfig):
    d = config.design
    if isinstance(d, IdentityDesign):
        return IdentityCovariance(config.m)
    if isinstance(d, BlockDesign):
        return build_block_sigma(config.m, d.l, d.rho, d.structure)
    if isinstance(d, SparseDesign):
        return build_sparse_sigma(config.m, config.seed, d.rho, d.density)
    if isinstance(d, FactorDesign):
        return build_factor_sigma(config.m, d.n_sample, config.seed)
    raise TypeError(f"unsupported design {d!r}")


# -- replicates -------------------------------------------------------------

def place_signals(m: int, s: int, seed) -> np.ndarray:
    """Boolean mask with ``s`` signal positions drawn uniformly at random."""
    if not 0 <= s <= m:
        raise ValueError("need 0 <= s <= m")
    gen = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    mask = np.zeros(m, dtype=bool)
    mask[gen.choice(m, size=s, replace=False)] = True
    return mask


def stats_to_pvalues(z: np.ndarray, sided: str = "one") -> np.ndarray:
    if sided == "one":
        return stats.norm.sf(z)
    if sided == "two":
        return 2.0 * stats.norm.sf(np.abs(z))
    raise ValueError("sided must be 'one' or 'two'")


@dataclass(frozen=True)
class LabeledReplicate:
    stats: np.ndarray
    pvals: PValueVector
    labels: np.ndarray

    @property
    def s(self) -> int:
        return int(self.labels.sum())


def draw_replicate(config: SimulationConfig, rep_index: int, cov=None
                   ) -> LabeledReplicate:
    """Draw replicate ``rep_index``; pass ``cov`` to reuse a covariance."""
    if cov is None:
        cov = build_covariance(config)
    labels = place_signals(config.m, config.s,
                           _rng.stream(config.seed, _rng.REPLICATE, rep_index, 0))
    z = cov.sample(_rng.stream(config.seed, _rng.REPLICATE, rep_index, 1))
    z[labels] += config.mu
    return LabeledReplicate(stats=z, pvals=PValueVector(stats_to_pvalues(z, config.sided)),
                            labels=labels)


def draw_null_matrix(config: SimulationConfig, n_rows: int, cov=None,
                     start: int = 0) -> np.ndarray:
    """``n_rows x m`` p-values drawn from the design with no signals.

    Uses replicate indices ``start ..``, so pick ``start`` disjoint from
    the indices used for the analysed replicates.
    """
    if cov is None:
        cov = build_covariance(config)
    out = np.empty((n_rows, config.m))
    for i in range(n_rows):
        z = cov.sample(_rng.stream(config.seed, _rng.REPLICATE, start + i, 1))
        out[i] = stats_to_pvalues(z, config.sided)
    return out


# -- oracle diagnostics -----------------------------------------------------

@dataclass(frozen=True)
class OracleDiagnostics:
    """Rank diagnostics for a labelled replicate (ranks are 1-based).

    ``fn_curve[k]`` and ``fp_curve[k]`` are defined for ``k = 0..m``.
    ``T1``, ``T2`` and ``L`` are ``None`` when there are no signals.
    """

    T1: int | None
    T2: int | None
    L: int | None
    fn_curve: np.ndarray
    fp_curve: np.ndarray


def diagnostics_from_sorted_labels(sorted_labels) -> OracleDiagnostics:
    lab = np.asarray(sorted_labels, dtype=bool)
    m = lab.size
    s = int(lab.sum())
    tp = np.concatenate([[0], np.cumsum(lab)])
    fn_curve = s - tp
    fp_curve = np.arange(m + 1) - tp
    if s == 0:
        return OracleDiagnostics(None, None, None, fn_curve, fp_curve)
    noise = np.flatnonzero(~lab)
    t1 = int(noise[0]) if noise.size else m
    t2 = int(np.flatnonzero(lab)[-1]) + 1
    return OracleDiagnostics(t1, t2, t2 - s, fn_curve, fp_curve)


def oracle_diagnostics(rep: LabeledReplicate) -> OracleDiagnostics:
    return diagnostics_from_sorted_labels(rep.labels[rep.pvals.order])
