"""Pointwise envelopes and tube disjointness under rotation.

Compares a radial packet with its decay envelope, then finds the index
thresholds past which a tube and its rotation by M theta never meet.
"""

from wavepacket_lab import make_frame, make_profiles
from wavepacket_lab.packet_bounds import disjointness_check, envelope_regime, linf_scan

params = make_frame(64, 0.25)
profiles = make_profiles(params)

for j, k in [(0, 0), (0, 40), (1, 128)]:
    res = linf_scan(params, profiles, j, k)
    print(f"(j={j}, k={k:3d}) regime={envelope_regime(params, j, k):8s} "
          f"max |chi|/envelope={res.max_ratio:.3f}  zero-region violations={res.zero_violations}")

for lam in (64, 256, 1024):
    p = make_frame(lam, 0.25)
    for M in (1, 2, 4):
        d = disjointness_check(p, M)
        print(f"lambda={lam:5d} M={M}  J*={d.J_star}  K*={d.K_star:6d}  "
              f"K* theta^2 M={d.k_scaled:.3f}")
