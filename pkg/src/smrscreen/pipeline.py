"""End-to-end screening: estimate the signal count, then apply a cutoff."""

from __future__ import annotations

import math

from .lfdr import estimate_lfdr, mdr_cutoff, zscores_from_pvalues
from .mr_estimator import NullCalibration, PiEstimate, estimate_pi
from .pvalues import PValueVector
from .screening import ScreeningResult, adsmr_cutoff, bh_select, cvsmr_cutoff


def screen(p, procedure: str, cal: NullCalibration | None = None, *,
           estimate: PiEstimate | None = None, s_hat: int | None = None,
           alpha: float = 0.1, q: float = 0.5, beta: float | None = None,
           mode: str = "ratio-approximation", sided: str = "one"
           ) -> ScreeningResult:
    """Run one screening procedure on raw p-values.

    AdSMR, cvSMR and MDR need a signal count. It is taken from ``s_hat``
    when given, otherwise from ``estimate`` or ``estimate_pi(p, cal)``.
    ``alpha_m`` for the ``t1`` guard is ``cal.alpha_m`` when a calibration
    is supplied, else ``1 / sqrt(log m)``.

    Parameters
    ----------
    procedure : {"adsmr", "cvsmr", "bh", "mdr"}
    alpha : float
        cvSMR level.
    q : float
        BH level.
    beta : float, optional
        MDR level, default ``1 / log m``.
    mode : str
        AdSMR critical-sequence mode.
    sided : {"one", "two"}
        How p-values map back to z-scores for MDR.
    """
    p = PValueVector.from_any(p)
    if procedure == "bh":
        return bh_select(p, q)
    if estimate is None and s_hat is None:
        if cal is None:
            raise ValueError(f"{procedure} needs a calibration or an explicit s_hat")
        estimate = estimate_pi(p, cal)
    if s_hat is None:
        s_hat = estimate.s_hat
    alpha_m = cal.alpha_m if cal is not None else None
    if procedure == "adsmr":
        res = adsmr_cutoff(p, s_hat, alpha_m, mode)
    elif procedure == "cvsmr":
        res = cvsmr_cutoff(p, s_hat, alpha, alpha_m)
    elif procedure == "mdr":
        pi_hat = estimate.pi_hat if estimate is not None else s_hat / p.m
        pi0 = min(1.0, max(1.0 - pi_hat, 1e-6))
        if beta is None:
            beta = 1.0 / math.log(p.m)
        lf = estimate_lfdr(zscores_from_pvalues(p, sided), pi0)
        res = mdr_cutoff(lf, s_hat, beta)
        res.params.update(pi0=pi0, bandwidth=lf.bandwidth, sided=sided,
                          lfdr="gaussian-kernel, theoretical null (simplified)")
    else:
        raise ValueError(f"unknown procedure {procedure!r}")
    if estimate is not None:
        res.params.update(pi_hat=estimate.pi_hat, c_m=cal.c_m if cal else None)
    return res
