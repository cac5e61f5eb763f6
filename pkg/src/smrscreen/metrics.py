"""Replicate-level accuracy metrics and their aggregation."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .screening import ScreeningResult

METRIC_NAMES = ("k_star", "tp", "fp", "fn", "tn", "fn_prop", "fdp",
                "precision", "recall", "f_measure")


@dataclass(frozen=True)
class ReplicateMetrics:
    k_star: int
    tp: int
    fp: int
    fn: int
    tn: int
    fn_prop: float
    fdp: float
    precision: float
    recall: float
    f_measure: float

    def as_dict(self) -> dict:
        return asdict(self)


def confusion(result: ScreeningResult | np.ndarray, labels) -> ReplicateMetrics:
    """Confusion counts and derived rates for one selection.

    ``result`` may be a :class:`ScreeningResult` or a boolean selection mask.
    With nothing selected, ``fdp = 0`` and ``precision = 0``; with no
    signals, ``fn_prop = 0`` and ``recall = 0``.
    """
    labels = np.asarray(labels, dtype=bool)
    m = labels.size
    if isinstance(result, ScreeningResult):
        sel = result.mask(m)
    else:
        sel = np.asarray(result, dtype=bool)
        if sel.size != m:
            raise ValueError("selection and labels differ in size")
    tp = int(np.count_nonzero(sel & labels))
    fp = int(np.count_nonzero(sel & ~labels))
    fn = int(np.count_nonzero(~sel & labels))
    tn = m - tp - fp - fn
    k = tp + fp
    s = tp + fn
    denom = 2 * tp + fp + fn
    return ReplicateMetrics(
        k_star=k, tp=tp, fp=fp, fn=fn, tn=tn,
        fn_prop=fn / max(s, 1),
        fdp=fp / max(k, 1),
        precision=tp / max(k, 1),
        recall=tp / max(s, 1),
        f_measure=2 * tp / denom if tp > 0 else 0.0,
    )


def empirical_smr(fn_props, epsilon: float) -> float:
    """Fraction of replicates whose FN proportion exceeds ``epsilon``."""
    x = np.asarray(fn_props, dtype=float)
    if x.size == 0:
        raise ValueError("empirical SMR needs at least one replicate")
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    return float(np.count_nonzero(x > epsilon)) / x.size


@dataclass(frozen=True)
class MetricSummary:
    median: float
    mean: float
    sd: float


def aggregate(metrics) -> dict[str, MetricSummary]:
    """Median, mean and sample sd (0 for one replicate) of every metric."""
    metrics = list(metrics)
    if not metrics:
        raise ValueError("aggregate needs at least one replicate")
    out = {}
    for name in METRIC_NAMES:
        x = np.array([getattr(r, name) for r in metrics], dtype=float)
        sd = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
        out[name] = MetricSummary(float(np.median(x)), float(np.mean(x)), sd)
    return out


def write_summary_tsv(path, rows) -> None:
    """Write ``(scenario, procedure, metric, median, mean, sd)`` rows.

    ``rows`` is an iterable of ``(scenario, procedure, {metric: MetricSummary})``.
    """
    with open(path, "w") as fh:
        fh.write("scenario\tprocedure\tmetric\tmedian\tmean\tsd\n")
        for scenario, procedure, summary in rows:
            for metric, v in summary.items():
                fh.write(f"{scenario}\t{procedure}\t{metric}\t"
                         f"{float(v.median)!r}\t{float(v.mean)!r}\t{float(v.sd)!r}\n")
