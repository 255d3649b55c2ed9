"""Evolving a pseudo-stationary start changes its mass but not its shape.

Run: python3 demos/03_pseudo_stationarity.py
"""

import numpy as np

from ipe_lab import RngStream, sample_pseudo_stationary, sample_ssip2_marginal
from ipe_lab.harness import ks_check
from ipe_lab.immigration import STAT_NAMES, normalized_stats

gen = RngStream(seed=3, stream_id=0).gen
alpha, t1, t2, y, n = 0.5, 1.0, 0.5, 0.25, 1500

evolved, fresh = [], []
for _ in range(n):
    g0 = sample_pseudo_stationary(alpha, t1, t2, gen, eps=1e-4)
    b = sample_ssip2_marginal(alpha, t1, t2, g0, y, 1e-4, gen)
    evolved.append(normalized_stats(b, 1e-2))
    fresh.append(normalized_stats(sample_pseudo_stationary(alpha, t1, t2, gen, eps=1e-4), 1e-2))
evolved, fresh = np.array(evolved), np.array(fresh)
for i, name in enumerate(STAT_NAMES):
    c = ks_check(evolved[:, i], fresh[:, i])
    print(f"{name:9s} KS distance {c['distance']:.3f}  p = {c['p_value']:.3f}")
