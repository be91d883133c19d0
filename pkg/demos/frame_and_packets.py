"""Frame parameters and radial wave packets.

Builds the frame at one scale, evaluates a directional packet and its radial
average, and checks that a packet vanishes outside its tube.
"""

import numpy as np

from wavepacket_lab import PacketIndex, SpacetimePoint, make_frame, make_profiles
from wavepacket_lab import packet_eval, radial_packet_eval, tube_contains
from wavepacket_lab.frame import FrameParameterError

params = make_frame(64, 0.25)
print("frame:", params.to_dict())
print(f"tube width delta = {params.delta:.4f}, directions D = {params.dir_count}")

profiles = make_profiles(params)

# a directional packet along l = 0, sampled on a line through its tube
idx = PacketIndex(j=1, k=3)
for x in np.linspace(0.0, 0.2, 6):
    p = SpacetimePoint(0.0, (x, params.delta))
    print(f"x1={x:.3f}  in tube={tube_contains(params, idx, p)!s:5}  "
          f"chi={packet_eval(params, profiles, idx, p): .4e}")

# the radial packet averages the directional ones over all D directions
for r in (0.0, 3 / 64, 6 / 64, 0.5):
    v = radial_packet_eval(params, profiles, 0, 3, SpacetimePoint(0.0, (r, 0.0)))
    print(f"r={r:.4f}  radial packet (j=0, k=3) = {v: .4e}")

# invalid cells are rejected with a named constraint
try:
    make_frame(64, 0.0625)
except FrameParameterError as err:
    print("rejected:", err)
