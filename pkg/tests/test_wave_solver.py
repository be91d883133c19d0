import math
import warnings

import numpy as np
import pytest

from wavepacket_lab.radial.fields import (FourierBesselBasis, RadialField, gaussian_field,
                                          hs_norm)
from wavepacket_lab.radial.wave import (BoundaryContaminationWarning, Nonlinearity,
                                        PicardDivergence, SolverState, band_state, duhamel_solve,
                                        free_trajectory, linear_propagate, picard_solve,
                                        stability_check, strichartz_basis, strichartz_ratio)

B = FourierBesselBasis(8.0, 256)


def state():
    return SolverState(gaussian_field(B, 0.5), gaussian_field(B, 0.3, 0.5))


def small_data(amplitude=1e-2, s=1.6):
    u0 = gaussian_field(B, 0.5)
    return SolverState(u0 * (amplitude / hs_norm(u0, s)), RadialField.zeros(B))


# ------------------------------------------------------------- free flow

def test_zero_step_is_identity():
    st = state()
    out = linear_propagate(st, 0.0)
    assert np.array_equal(out.u.coeffs, st.u.coeffs)
    assert np.array_equal(out.ut.coeffs, st.ut.coeffs)


def test_energy_conservation():
    st = state()
    traj = free_trajectory(st, 2.0, 64)
    e = traj.energy()
    assert np.max(np.abs(e - e[0])) / e[0] < 1e-8


def test_group_property():
    st = state()
    back = linear_propagate(linear_propagate(st, 0.7), -0.7)
    assert np.max(np.abs(back.u.coeffs - st.u.coeffs)) < 1e-10 * np.max(np.abs(st.u.coeffs))
    assert np.max(np.abs(back.ut.coeffs - st.ut.coeffs)) < 1e-10 * np.max(np.abs(st.ut.coeffs))


def test_boundary_warning():
    st = state()
    with pytest.warns(BoundaryContaminationWarning):
        linear_propagate(st, 7.9)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        linear_propagate(st, 1.0)


# ------------------------------------------------------------- Duhamel

def test_zero_source_matches_free_flow():
    st = state()
    a = duhamel_solve(st, None, 1.0, 256)
    b = free_trajectory(st, 1.0, 256)
    assert np.array_equal(a.c, b.c)
    z = duhamel_solve(st, np.zeros((257, B.N)), 1.0, 256)
    assert np.allclose(z.c, b.c, atol=1e-15)


def test_manufactured_solution_second_order():
    # u* = cos(t) exp(-r^2/a), F = box u* = -u* - Delta u*
    a = 0.25
    exact = RadialField.from_function(B, lambda r: math.cos(1.0) * np.exp(-r ** 2 / a))

    shape = RadialField.from_function(
        B, lambda r: np.exp(-r ** 2 / a) * (-1 - (4 * r ** 2 / a ** 2 - 4 / a)))

    def source(t):
        return shape * math.cos(t)

    data = SolverState(RadialField.from_function(B, lambda r: np.exp(-r ** 2 / a)),
                       RadialField.zeros(B))
    errs = []
    for nt in (256, 512, 1024):
        tr = duhamel_solve(data, source, 1.0, nt)
        errs.append(np.max(np.abs(tr.c[-1] - exact.coeffs)))
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert min(orders) > 1.9


def test_duhamel_linearity(rng):
    st1, st2 = state(), small_data(0.3)
    f = rng.standard_normal((257, B.N)) * np.exp(-B.xi / 4)
    g = rng.standard_normal((257, B.N)) * np.exp(-B.xi / 4)
    a = duhamel_solve(st1, f, 1.0, 256)
    b = duhamel_solve(st2, g, 1.0, 256)
    both = SolverState(st1.u + st2.u, st1.ut + st2.ut)
    c = duhamel_solve(both, f + g, 1.0, 256)
    assert np.allclose(c.c, a.c + b.c, atol=1e-12)


def test_duhamel_time_step_check():
    with pytest.raises(ValueError, match="time step"):
        duhamel_solve(state(), None, 1.0, 10)


# ------------------------------------------------------------- Strichartz

def test_strichartz_homogeneity_and_errors():
    basis = strichartz_basis(32)
    d = band_state(basis, 32)
    d2 = band_state(basis, 32, scale=2.0)
    r1, r2 = strichartz_ratio(d, 1.6), strichartz_ratio(d2, 1.6)
    assert r2.ratio == pytest.approx(r1.ratio, rel=1e-12)
    assert r1.resolution_error < 0.01 * r1.ratio
    with pytest.raises(ValueError):
        strichartz_ratio(d, 1.0)
    zero = SolverState(RadialField.zeros(basis), RadialField.zeros(basis), 0.0, 0.0)
    with pytest.raises(ValueError):
        strichartz_ratio(zero, 1.6)


# ------------------------------------------------------------- Picard

def test_linear_picard_converges_in_one_iteration():
    res = picard_solve(small_data(), Nonlinearity(), 1.6, 0.25)
    assert res.iterations == 1
    free = free_trajectory(small_data(), 0.25, res.trajectory.times.size - 1)
    assert np.allclose(res.trajectory.c, free.c, atol=1e-15)


def test_small_data_contraction():
    res = picard_solve(small_data(), Nonlinearity(1.0, 1.0), 1.6, 0.25, tol=1e-10)
    assert res.max_factor <= 0.5
    assert res.residual <= 10 * 1e-10
    assert all(b < a for a, b in zip(res.increments, res.increments[1:]))


def test_time_symmetry_for_zero_velocity():
    d = SolverState(gaussian_field(B, 0.5, 0.5), RadialField.zeros(B))
    nl = Nonlinearity(lambda u: 1 + u, 1.0)
    fwd = picard_solve(d, nl, 1.6, 0.25, tol=1e-12)
    bwd = picard_solve(d, nl, 1.6, -0.25, tol=1e-12)
    assert np.max(np.abs(fwd.trajectory.c[-1] - bwd.trajectory.c[-1])) < 1e-10


def test_picard_preconditions_and_divergence():
    with pytest.raises(ValueError):
        picard_solve(small_data(), Nonlinearity(1.0, 1.0), 1.4, 0.25)
    with pytest.raises(ValueError):
        picard_solve(small_data(), Nonlinearity(1.0, 1.0), 1.6, 1.5)
    big = SolverState(gaussian_field(B, 0.5, 20.0), RadialField.zeros(B))
    with pytest.raises(PicardDivergence) as info:
        picard_solve(big, Nonlinearity(1.0, 1.0), 1.6, 1.0, max_iter=5)
    assert len(info.value.trace) == 5


# ------------------------------------------------------------- stability

def test_identical_data_gives_zero():
    d = SolverState(gaussian_field(B, 0.5, 0.5), gaussian_field(B, 0.5, 0.5))
    res = stability_check(d, d, Nonlinearity(1.0, 1.0), 1.6, 0.25)
    assert res.lhs <= 1e-10


def test_linear_difference_energy_is_conserved():
    d = SolverState(gaussian_field(B, 0.5, 0.5), gaussian_field(B, 0.5, 0.5))
    v = SolverState(d.u, d.ut + gaussian_field(B, 0.4) * 1e-2)
    res = stability_check(d, v, Nonlinearity(), 1.6, 0.25)
    assert res.lhs == pytest.approx(res.data_energy, rel=1e-10)
    assert res.fitted_C == 0.0


def test_stability_constant_is_stable_across_perturbations():
    d = SolverState(gaussian_field(B, 0.5, 0.5), gaussian_field(B, 0.5, 0.5))
    cs = []
    for delta in (1e-1, 1e-2, 1e-3, 1e-4):
        v = SolverState(d.u, d.ut + gaussian_field(B, 0.4) * delta)
        res = stability_check(d, v, Nonlinearity(1.0, 1.0), 1.6, 0.25)
        assert res.lhs <= res.data_diff * math.exp(res.fitted_C * res.gronwall_x) * (1 + 1e-12)
        cs.append(res.fitted_C)
    assert min(cs) > 0 and max(cs) / min(cs) <= 4
