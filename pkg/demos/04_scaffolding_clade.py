"""Build one clade from spindles on a stable scaffolding and read skewers off it.

Writes the scaffolding path to clade_scaffold.csv in the working directory.

Run: python3 demos/04_scaffolding_clade.py
"""

from ipe_lab import RngStream
from ipe_lab.scaffolding import sample_clade, scaffold, skewer

gen = RngStream(seed=4, stream_id=0).gen
N = sample_clade(1.0, 0.5, 1e-3, gen)
X = scaffold(N)
print(f"clade of mass 1: {N.n_atoms} spindles, scaffold length {N.length:.4f}, "
      f"highest level {X.post.max():.3f}")
for y in (0.0, 0.1, 0.2, 0.4):
    s = skewer(y, N, X, gen)
    print(f"  level {y:3.1f}: {s.n_blocks:4d} blocks, mass {s.total_mass:.4f}")

with open("clade_scaffold.csv", "w") as fh:
    fh.write(X.to_csv())
print("scaffold corners written to clade_scaffold.csv")
