"""Radial wave equation: free flow, Strichartz ratios, Picard iteration,
stability and the variable-coefficient energy estimate."""

import numpy as np

from wavepacket_lab.radial.fields import FourierBesselBasis, RadialField, gaussian_field, hs_norm
from wavepacket_lab.radial.metric import bump_metric, energy_estimate_check, refinement_study
from wavepacket_lab.radial.wave import (Nonlinearity, SolverState, band_state, free_trajectory,
                                        picard_solve, stability_check, strichartz_basis,
                                        strichartz_ratio)

basis = FourierBesselBasis(8.0, 256)
data = SolverState(gaussian_field(basis, 0.5), gaussian_field(basis, 0.3, 0.5))
e = free_trajectory(data, 2.0, 64).energy()
print(f"free flow: relative energy drift {np.max(np.abs(e - e[0])) / e[0]:.1e}")

for lam in (32, 64, 128):
    res = strichartz_ratio(band_state(strichartz_basis(lam), lam), 1.6)
    print(f"lambda={lam:3d}: Strichartz ratio {res.ratio:.4f} (resolution {res.resolution_error:.1e})")

u0 = gaussian_field(basis, 0.5)
small = SolverState(u0 * (0.01 / hs_norm(u0, 1.6)), RadialField.zeros(basis))
pic = picard_solve(small, Nonlinearity(1.0, 1.0), 1.6, 0.25)
print(f"Picard: {pic.iterations} iterations, max contraction factor {pic.max_factor:.2e}, "
      f"residual {pic.residual:.1e}")

bg = SolverState(gaussian_field(basis, 0.5, 0.5), gaussian_field(basis, 0.5, 0.5))
for delta in (1e-1, 1e-3):
    v = SolverState(bg.u, bg.ut + gaussian_field(basis, 0.4) * delta)
    st = stability_check(bg, v, Nonlinearity(1.0, 1.0), 1.6, 0.25)
    print(f"stability delta={delta:.0e}: fitted C {st.fitted_C:.4f}")


def gauss(r):
    return np.exp(-(np.asarray(r) / 0.5) ** 2)


def still(r):
    return np.zeros_like(np.asarray(r, dtype=float))


flat = energy_estimate_check(None, (gauss, still), 2.0, 1.0, basis=basis)
ratios, change = refinement_study(bump_metric(1.2), (gauss, still), 2.0, 1.0, basis=basis)
print(f"energy ratio flat {flat.energy_ratio:.12f}; bump {np.round(ratios, 4)} "
      f"(relative change {change:.1e})")
