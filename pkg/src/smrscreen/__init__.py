"""Signal-missing-rate controlled variable screening under dependence.

Typical use::

    import smrscreen as ss

    cal = ss.calibrate_cm(m=len(p), n_reps=1000, seed=1)
    est = ss.estimate_pi(p, cal)
    res = ss.adsmr_cutoff(p, est.s_hat, cal.alpha_m)
    res.selected          # original indices of the retained variables
"""

from .lfdr import LfdrVector, estimate_lfdr, mdr_cutoff, zscores_from_pvalues
from .metrics import (ReplicateMetrics, aggregate, confusion, empirical_smr)
from .mr_estimator import (NullCalibration, PiEstimate, calibrate_cm,
                           calibrate_cm_from_matrix, compute_vm,
                           default_alpha_m, estimate_pi)
from .pipeline import screen
from .pvalues import PValueVector, read_pvalues, write_pvalues
from .regression import (DesignData, marginal_pvalues, permutation_null,
                         residualize, scan)
from .screening import (CriticalSequence, ScreeningResult, adsmr_cutoff,
                        beta_median, bh_select, compute_t1, cvsmr_cutoff)
from .simulation import (BlockDesign, FactorDesign, IdentityDesign,
                         SimulationConfig, SparseDesign, draw_replicate,
                         oracle_diagnostics, place_signals)

__version__ = "0.1.0"
