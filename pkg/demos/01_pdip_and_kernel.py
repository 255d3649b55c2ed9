"""Draw a Poisson-Dirichlet interval partition, then move it one level up with the kernel.

Run: python3 demos/01_pdip_and_kernel.py
"""

import numpy as np

from ipe_lab import IntervalPartition, KernelParams, RngStream, kernel_step, sample_pdip

gen = RngStream(seed=1, stream_id=0).gen

# A PDIP(0.5, 1) of unit mass, resolved down to blocks of length 1e-3.
beta = sample_pdip(0.5, 1.0, 1e-3, gen)
print(f"PDIP(0.5, 1): {beta.n_blocks} blocks >= 1e-3, dust mass {beta.dust_mass:.4f}")
print("five longest:", np.round(beta.ranked(5), 4))

# Each block survives a level step y with probability 1 - exp(-b / 2y) and is
# replaced by a leading block followed by a fresh PDIP(alpha, alpha).
start = IntervalPartition([0.5, 0.3, 0.2])
params = KernelParams(alpha=0.5, theta=0.0, y=0.25)
masses = [kernel_step(start, params, 1e-3, gen).total_mass for _ in range(4000)]
print(f"kernel step from mass 1: mean mass {np.mean(masses):.3f} (martingale: 1), "
      f"P(empty) {np.mean(np.array(masses) == 0):.3f} (exp(-1/(2*0.25)) = {np.exp(-2):.3f})")

# With immigration theta > 0 the mean grows linearly: E = 1 + 2 theta y.
params = KernelParams(alpha=0.5, theta=1.0, y=0.25)
masses = [kernel_step(start, params, 1e-3, gen).total_mass for _ in range(4000)]
print(f"theta = 1: mean mass {np.mean(masses):.3f} (expected 1.5)")
