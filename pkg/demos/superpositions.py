"""Dispersive norms of packet superpositions.

Evaluates the one-dimensional discrete model for several coefficient families,
then the L^2_t L^inf_x norm of a random superposition of radial packets split
by index class.
"""

import numpy as np

from wavepacket_lab import make_frame
from wavepacket_lab.superposition import (DispersiveGrid, dispersive_batch, dispersive_rhs,
                                          extremal_model_coefficients,
                                          gaussian_coefficients, gaussian_model_coefficients,
                                          model_ratio_with_error, single_index_coefficients)

for lam in (64, 128, 256):
    fams = {"gaussian": gaussian_model_coefficients(lam, seed=0)[0],
            "single": single_index_coefficients(lam),
            "extremal": extremal_model_coefficients(lam)}
    line = ", ".join(f"{k} {float(model_ratio_with_error(a, lam)[0]):.3f}"
                     for k, a in fams.items())
    print(f"lambda={lam}: model ratios {line}")

params = make_frame(64, 0.25)
a = gaussian_coefficients(params, seed=1, count=3)
res = dispersive_batch(params, None, a, DispersiveGrid(r_max=4.0, n_angles=1, nq=32))
for key in ("full", "A1", "A3"):
    ratio = res.norms[key] / np.array([dispersive_rhs(params, key, c)
                                       for c in res.coef_norms[key]])
    print(f"{key:4s} ratio to right side: {np.round(ratio, 3)}  "
          f"relative half-resolution gap: {np.round(res.error(key) / res.norms[key], 3)}")
