"""Counting packets through two spacetime points.

Samples point pairs near the light cone, counts common packets per class,
and prints the normalized counts used by the overlap scaling experiment.
"""

import numpy as np

from wavepacket_lab import SpacetimePoint, make_frame, make_profiles
from wavepacket_lab.overlap import (IndexThresholds, OverlapQuery, class_counts, class_table,
                                    light_cone_sampler, n_lambda)

params = make_frame(128, 0.25)
profiles = make_profiles(params)
table = class_table(params, IndexThresholds())
print("class sizes (A1, A2, A3):", [int(np.sum(table == c)) for c in range(3)])

# two points on a common ray at distance t apart
q = OverlapQuery.ordered(SpacetimePoint(0.0, (0.0, 0.0)), SpacetimePoint(0.5, (0.5, 0.0)))
print(f"t={q.t}, m={q.m:+.2e}, N_lambda={n_lambda(params, profiles, q)}, "
      f"by class={class_counts(params, q)}")

rng = np.random.default_rng(0)
for q in light_cone_sampler(params, rng, 5):
    n1, n2, n3 = class_counts(params, q)
    print(f"t={q.t:.3f} m={q.m:+.4f}  N1={n1:3d}  N2={n2:3d}  N3={n3:3d}  "
          f"eps0^1.5 t^0.5 N1={params.eps0 ** 1.5 * q.t ** 0.5 * n1:.3f}")

# the regime constant c is unspecified; sweep it for one rotation
from wavepacket_lab.overlap import rotation_scan  # noqa: E402

for c in (0.5, 1.0, 2.0, 4.0):
    scan = rotation_scan(params, 0.5, 0.9, 0.35, c=c)
    print(f"c={c:4.2f}: first step past c/(eps0 lam t) k1={scan.k1}, k1-k2={scan.k_diff}")
