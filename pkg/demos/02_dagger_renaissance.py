"""Follow the three-parameter evolution through its renaissance times.

The state is (left, middle block, right).  When the middle block dies the
partition is split again at its longest block.  With theta1 + theta2 - alpha
>= 1 the mass never reaches 0; below 1 it does, after infinitely many
renaissances accumulating at a finite time.

Run: python3 demos/02_dagger_renaissance.py
"""

import math

import numpy as np

from ipe_lab import IntervalPartition, RngStream, evolve_dagger

gen = RngStream(seed=2, stream_id=0).gen
start = IntervalPartition([0.5, 0.3, 0.2])
grid = [0.25, 0.5, 1.0]

tr = evolve_dagger(start, 0.5, 1.0, 0.5, 1.0, grid=grid, eps=1e-3, rng=gen)
print(f"theta = 1: {tr.n_renaissance} renaissances up to time 1")
for t, s in tr.grid_states:
    print(f"  t = {t:4.2f}  mass {s.total_mass:6.3f}  middle {s.mid:6.3f}  "
          f"blocks left/right {s.left.n_blocks}/{s.right.n_blocks}")

for t1, t2 in ((1.0, 0.5), (0.25, 0.25)):
    theta = t1 + t2 - 0.5
    ends = []
    for _ in range(200):
        tr = evolve_dagger(start, 0.5, t1, t2, math.inf if theta < 1 else 2.0, eps=1e-3,
                           mass_floor=1e-40 if theta >= 1 else 1e-6, rng=gen)
        ends.append(tr.terminated_reason)
    kinds, counts = np.unique(ends, return_counts=True)
    print(f"theta = {theta:4.2f}: outcomes", dict(zip(kinds.tolist(), counts.tolist())))
