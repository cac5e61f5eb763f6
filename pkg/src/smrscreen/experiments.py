"""Monte Carlo scenarios: replicate draws, screening, metrics, summaries."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .metrics import ReplicateMetrics, aggregate, confusion, empirical_smr
from .mr_estimator import calibrate_cm, calibrate_cm_from_matrix, estimate_pi
from .pipeline import screen
from .simulation import (SimulationConfig, build_covariance, draw_null_matrix,
                         draw_replicate, oracle_diagnostics)

#: replicate indices at or above this offset are reserved for design nulls
NULL_REP_OFFSET = 1 << 32


@dataclass(frozen=True)
class ProcedureSpec:
    """A named screening procedure with its tuning parameters.

    ``label`` is what appears in summary tables, e.g. ``"bh0.5"``.
    """

    procedure: str
    label: str
    params: dict = field(default_factory=dict)


def parse_procedure(text: str) -> ProcedureSpec:
    """Parse ``adsmr``, ``adsmr-exact``, ``cvsmr[:alpha]``, ``bh:q``, ``mdr[:beta]``."""
    name, _, arg = text.partition(":")
    if name == "adsmr":
        return ProcedureSpec("adsmr", text)
    if name == "adsmr-exact":
        return ProcedureSpec("adsmr", text, {"mode": "exact-beta-median"})
    if name == "cvsmr":
        return ProcedureSpec("cvsmr", text, {"alpha": float(arg or 0.1)})
    if name == "bh":
        if not arg:
            raise ValueError("bh needs a level, e.g. bh:0.5")
        return ProcedureSpec("bh", f"bh{arg}", {"q": float(arg)})
    if name == "mdr":
        return ProcedureSpec("mdr", text, {"beta": float(arg)} if arg else {})
    raise ValueError(f"unknown procedure {text!r}")


DEFAULT_PROCEDURES = ("adsmr", "cvsmr", "bh:0.5", "bh:0.7", "mdr")


@dataclass
class ReplicateRecord:
    rep_index: int
    pi_hat: float
    s_hat: int
    T1: int | None
    T2: int | None
    L: int | None
    metrics: dict[str, ReplicateMetrics]


@dataclass
class ScenarioResult:
    config: SimulationConfig
    c_m: float
    alpha_m: float
    records: list[ReplicateRecord]

    def values(self, label: str, metric: str) -> np.ndarray:
        return np.array([getattr(r.metrics[label], metric) for r in self.records],
                        dtype=float)

    def pi_hats(self) -> np.ndarray:
        return np.array([r.pi_hat for r in self.records])

    def summary(self):
        labels = self.records[0].metrics.keys()
        return {lab: aggregate(r.metrics[lab] for r in self.records) for lab in labels}

    def smr(self, label: str, epsilon: float) -> float:
        return empirical_smr(self.values(label, "fn_prop"), epsilon)


def calibrate_for(config: SimulationConfig, cal_reps: int = 1000,
                  null_source: str = "design", alpha_m: float | None = None,
                  cov=None):
    """Calibrate ``c_m`` for a scenario.

    ``null_source="uniform"`` simulates iid uniform nulls; ``"design"``
    draws signal-free replicates from the scenario's own covariance, the
    simulation analogue of permutation nulls that keep the dependence.
    """
    if null_source == "uniform":
        return calibrate_cm(config.m, alpha_m, cal_reps, config.seed)
    if null_source == "design":
        null = draw_null_matrix(config, cal_reps, cov, start=NULL_REP_OFFSET)
        return calibrate_cm_from_matrix(null, alpha_m)
    raise ValueError("null_source must be 'uniform' or 'design'")


def run_replicate(config, rep_index, cal, procedures, cov=None) -> ReplicateRecord:
    rep = draw_replicate(config, rep_index, cov)
    est = estimate_pi(rep.pvals, cal)
    diag = oracle_diagnostics(rep)
    out = {}
    for spec in procedures:
        res = screen(rep.pvals, spec.procedure, cal, estimate=est,
                     sided=config.sided, **spec.params)
        out[spec.label] = confusion(res, rep.labels)
    return ReplicateRecord(rep_index, est.pi_hat, est.s_hat, diag.T1, diag.T2,
                           diag.L, out)


def run_scenario(config: SimulationConfig, procedures=DEFAULT_PROCEDURES, *,
                 cal=None, cal_reps: int = 1000, null_source: str = "design",
                 threads: int = 1) -> ScenarioResult:
    """Simulate ``config.n_reps`` replicates and score every procedure.

    Results are identical for any ``threads`` value.
    """
    specs = [p if isinstance(p, ProcedureSpec) else parse_procedure(p)
             for p in procedures]
    cov = build_covariance(config)
    if cal is None:
        cal = calibrate_for(config, cal_reps, null_source, cov=cov)
    work = lambda r: run_replicate(config, r, cal, specs, cov)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            records = list(pool.map(work, range(config.n_reps)))
    else:
        records = [work(r) for r in range(config.n_reps)]
    return ScenarioResult(config, cal.c_m, cal.alpha_m, records)
