"""
Cutoffs on a ten-variable toy problem
=====================================

Ten ordered p-values, three cutoff rules. Given an estimate of the number
of signals, AdSMR walks past it and stops at the first p-value that looks
like an ordinary uniform order statistic. cvSMR does the same with a more
conservative critical sequence, and BH is shown for contrast.
"""

import math

import numpy as np

from smrscreen import adsmr_cutoff, bh_select, compute_t1, cvsmr_cutoff

p = np.array([0.02, 0.11, 0.12, 0.21, 0.36, 0.49, 0.69, 0.77, 0.87, 0.99])
m = p.size
alpha_m = 1 / math.sqrt(math.log(m))

# %%
# The t1 guard counts p-values that are already tiny relative to alpha_m / m.
# If the signal-count estimate does not exceed it, no search is needed.
print("alpha_m / m =", round(alpha_m / m, 4), "  t1 =", compute_t1(p, alpha_m))

# %%
# With one estimated signal the guard is active and the cutoff is 1.
print("AdSMR, s_hat=1:", adsmr_cutoff(p, 1, alpha_m).k_star)

# %%
# With two, the search starts after the second p-value and stops at the
# first j with p_(s_hat + j) <= b_j, where b_j = j / (m - s_hat) = 1/8, 2/8, ...
# Already p_(3) = 0.12 is below 1/8, so k* = s_hat + 1 = 3.
res = adsmr_cutoff(p, 2, alpha_m)
print("AdSMR, s_hat=2:", res.k_star, "selected indices", res.selected.tolist())

# %%
# cvSMR's critical values (j/m) * alpha are far smaller. No p-value after the
# second falls below them, so the search runs out and everything is kept.
print("cvSMR, s_hat=2, alpha=0.1:", cvsmr_cutoff(p, 2, 0.1, alpha_m).k_star)

# %%
# BH at a generous level for comparison.
for q in (0.1, 0.5):
    print(f"BH q={q}:", bh_select(p, q).k_star)
