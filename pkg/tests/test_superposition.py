import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wavepacket_lab import make_frame, make_profiles
from wavepacket_lab.frame import radial_packet_grid
from wavepacket_lab.overlap import class_table
from wavepacket_lab.superposition import (DiscreteModelGrid, DispersiveGrid, classwise_dispersive,
                                          coefficient_shape, directional_l2, dispersive_batch,
                                          dispersive_norm, extremal_model_coefficients, f_k_eval,
                                          gaussian_coefficients, gaussian_model_coefficients,
                                          reduceA3_check, single_index_coefficients, split_fk,
                                          superposed_model_norm)

F64 = make_frame(64, 0.25)


# ------------------------------------------------------------- model profile

def test_fk_at_origin():
    assert f_k_eval(0, 0.0, 0.0, 64) == pytest.approx(2 ** -0.25)


def test_fk_heaviside_boundary():
    # m + 1 = |k + t lam| gives <m>^-1/2
    k, t, lam = 10, 0.0, 64
    m = 9.0
    assert f_k_eval(k, t, m, lam) == pytest.approx((1 + m * m) ** -0.25)
    assert f_k_eval(k, t, m - 1e-9, lam) == 0.0


def test_split_identity_and_bounds(rng):
    n = 10_000
    lam = 64
    k = rng.integers(-lam, lam + 1, n)
    t = rng.uniform(-2, 2, n)
    m = rng.uniform(0, 4 * lam, n)
    # include exact boundary cases
    m[:1000] = np.abs(k[:1000] + t[:1000] * lam) - 1.0
    m = np.maximum(m, 0.0)
    f = f_k_eval(k, t, m, lam)
    f0, f1, fm1 = split_fk(k, t, m, lam)
    assert np.array_equal(f, f0 + f1 + fm1)
    assert np.all((f >= 0) & (f <= 1))
    assert np.all(f <= (1 + m * m) ** -0.25 + 1e-15)
    kappa = k + t * lam
    assert np.all(f0[np.abs(kappa) >= 2] == 0)
    # at most one piece is nonzero at any point
    assert np.all(((f0 > 0).astype(int) + (f1 > 0) + (fm1 > 0)) <= 1)


@given(st.integers(-64, 64), st.floats(-2, 2), st.floats(0, 256))
def test_split_identity_property(k, t, m):
    f = f_k_eval(k, t, m, 64)
    parts = split_fk(k, t, m, 64)
    assert float(f) == float(sum(parts))


# ------------------------------------------------------------- model norm

def direct_model_norm(a, lam):
    ks = np.arange(-lam, lam + 1)
    total = 0.0
    for i in range(-2 * lam, 2 * lam):
        t = (i + 0.5) / lam
        best = 0.0
        for m in range(0, 4 * lam + 1):
            best = max(best, abs(sum(a[n] * f_k_eval(ks[n], t, m, lam) for n in range(ks.size)
                                     if a[n] != 0)))
        total += best ** 2 / lam
    return math.sqrt(total)


def test_model_norm_matches_direct_sum():
    lam = 16
    rng = np.random.default_rng(0)
    a = np.zeros(2 * lam + 1)
    a[rng.integers(0, 2 * lam + 1, 5)] = rng.standard_normal(5)
    assert superposed_model_norm(a, lam) == pytest.approx(direct_model_norm(a, lam), rel=1e-12)


def test_model_grid_tiles_time_interval():
    g = DiscreteModelGrid(64)
    assert g.times.size * g.weight == pytest.approx(4.0)
    assert g.m_values[0] == 0 and g.m_values[-1] == 256
    assert g.coarse().times.size == g.times.size // 2


def test_model_homogeneity_and_batch():
    lam = 64
    a = gaussian_model_coefficients(lam, 1, 3)
    r = reduceA3_check(a, lam)
    assert np.allclose(reduceA3_check(2 * a, lam), r, rtol=1e-13)
    assert reduceA3_check(a[1], lam) == pytest.approx(r[1], rel=1e-13)


def test_model_zero_vector_rejected():
    with pytest.raises(ValueError):
        reduceA3_check(np.zeros(129), 64)
    with pytest.raises(ValueError):
        reduceA3_check(np.ones(10), 64)


def test_model_families_bounded():
    for lam in (64, 128):
        assert reduceA3_check(single_index_coefficients(lam), lam) <= 1.0
        assert reduceA3_check(extremal_model_coefficients(lam), lam) <= 10.0


def test_model_is_deterministic():
    a = gaussian_model_coefficients(64, 7, 2)
    b = gaussian_model_coefficients(64, 7, 2)
    assert np.array_equal(a, b)
    assert np.array_equal(reduceA3_check(a, 64), reduceA3_check(b, 64))


# ------------------------------------------------------------- true superposition

def test_index_change_identity(rng):
    a = rng.standard_normal(coefficient_shape(F64))
    D = F64.dir_count
    assert directional_l2(a, D) ** 2 == pytest.approx(D * np.sum(a ** 2), rel=1e-13)
    ones = np.ones((3, 4))
    assert directional_l2(ones, 25) == math.sqrt(25 * 12)


def test_zero_coefficients_give_zero():
    assert dispersive_norm(F64, None, np.zeros(coefficient_shape(F64))) == 0.0


def test_single_packet_against_dense_evaluation():
    grid = DispersiveGrid()
    prof = make_profiles(F64, nq=grid.nq)
    a = np.zeros(coefficient_shape(F64))
    a[F64.j_max, F64.k_max] = 1.0
    got = dispersive_norm(F64, prof, a, grid)
    radii = grid.radii(F64)
    ts = np.arange(-128, 129) / 64
    sups = np.array([np.max(np.abs(radial_packet_grid(F64, prof, 0, 0, t, radii,
                                                      np.zeros_like(radii)))) for t in ts])
    w = np.full(ts.size, 1 / 64)
    w[[0, -1]] = 0.5 / 64
    assert got == pytest.approx(math.sqrt(np.sum(w * sups ** 2)), rel=1e-12)


def test_norms_scale_linearly_and_obey_triangle():
    a = gaussian_coefficients(F64, 5, 1)[0]
    res = dispersive_batch(F64, None, np.stack([a, 2 * a]))
    assert res.norms["full"][1] == pytest.approx(2 * res.norms["full"][0], rel=1e-12)
    parts = sum(res.norms[k][0] for k in ("A1", "A2", "A3"))
    assert res.norms["full"][0] <= parts * (1 + 1e-12)
    assert res.coef_norms["A2"][0] == 0.0  # A2 empty at lambda=64


def test_classwise_restriction_and_errors():
    a = gaussian_coefficients(F64, 2, 1)[0]
    r = classwise_dispersive(F64, None, a, "A3")
    assert r > 0
    with pytest.raises(ValueError):
        classwise_dispersive(F64, None, a, "A2")


def test_packets_outside_window_contribute_nothing():
    a = np.zeros(coefficient_shape(F64))
    a[-1, :] = 1.0  # j = j_max: tube sits at transverse distance 4
    assert class_table(F64)[-1, 0] == 0
    assert dispersive_norm(F64, None, a, DispersiveGrid(r_max=2.0)) == 0.0


def test_dispersive_shape_and_resolution_checks():
    with pytest.raises(ValueError):
        dispersive_norm(F64, None, np.zeros((3, 3)))
    with pytest.raises(ValueError, match="grid too coarse"):
        dispersive_norm(F64, None, np.zeros(coefficient_shape(F64)), DispersiveGrid(dr=0.1))


def test_dispersive_is_deterministic():
    a = gaussian_coefficients(F64, 9, 2)
    r1 = dispersive_batch(F64, None, a)
    r2 = dispersive_batch(F64, None, a)
    assert np.array_equal(r1.norms["full"], r2.norms["full"])
