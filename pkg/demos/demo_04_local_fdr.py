"""
Local fdr and the MDR comparator
================================

A plain local-fdr estimate (theoretical null, kernel density for the
marginal) and the cutoff that keeps the estimated missed-signal mass below
``beta`` times the estimated signal count.
"""

import math

import numpy as np
from scipy import stats

from smrscreen import calibrate_cm, estimate_pi
from smrscreen.lfdr import estimate_lfdr, mdr_cutoff, zscores_from_pvalues

gen = np.random.default_rng(3)
m = 3000
z = gen.standard_normal(m)
z[:150] += 4.0
p = stats.norm.sf(z)

est = estimate_pi(p, calibrate_cm(m, n_reps=500, seed=0))
lf = estimate_lfdr(zscores_from_pvalues(p, "one"), pi0=1 - est.pi_hat)
print(f"pi_hat = {est.pi_hat:.4f}, bandwidth = {lf.bandwidth:.3f}")

# %%
# lfdr is close to one in the bulk and falls off in the signal tail.
for lo, hi in ((-1, 1), (2, 3), (3, 4), (4, 8)):
    sel = (lf.z > lo) & (lf.z <= hi)
    print(f"z in ({lo}, {hi}]: mean lfdr {lf.lfdr[sel].mean():.3f} over {sel.sum()} variables")

# %%
# A smaller beta tolerates less missed mass and therefore selects more.
for beta in (0.05, 1 / math.log(m), 0.3):
    res = mdr_cutoff(lf, est.s_hat, beta)
    tp = int(np.sum(res.selected < 150))
    print(f"beta = {beta:.3f}: k* = {res.k_star}, true signals kept {tp}/150")
