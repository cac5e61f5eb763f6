"""Stream derivation for reproducible, schedule-independent randomness.

Every random draw in the package comes from a generator built by
:func:`stream`. The stream for a given purpose is fully determined by the
user seed and a tuple of non-negative integer keys::

    numpy.random.Generator(PCG64(SeedSequence(seed, spawn_key=keys)))

Key conventions used by the package:

=====================  ==========================================
``(CALIBRATION, r)``   r-th null replicate in :func:`calibrate_cm`
``(COVARIANCE,)``      random covariance construction
``(REPLICATE, r, 0)``  signal placement for simulation replicate r
``(REPLICATE, r, 1)``  Gaussian noise for simulation replicate r
``(PERMUTATION, b)``   b-th phenotype permutation
=====================  ==========================================
"""

import numpy as np

CALIBRATION = 0
COVARIANCE = 1
REPLICATE = 2
PERMUTATION = 3

_MASK64 = (1 << 64) - 1


def stream(seed, *keys) -> np.random.Generator:
    seed = int(seed)
    if seed < 0:
        seed &= _MASK64
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))
