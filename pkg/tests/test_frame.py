import math
import re

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from wavepacket_lab import (FrameParameterError, PacketIndex, SpacetimePoint, make_frame,
                            make_profiles, packet_eval, radial_packet_eval, tube_contains)
from wavepacket_lab.frame import (PSI_CONST, directional_terms, enlarged_tube_contains,
                                  frame_coordinates, psi, radial_packet_grid, w0)


# ------------------------------------------------------------- parameters

def test_scale_triple_at_64():
    p = make_frame(64, 0.25)
    assert p.theta == pytest.approx(1.0 / 16.0)
    assert p.dir_count == math.ceil(32 * math.pi) == 101
    assert p.delta == pytest.approx(0.25)
    assert p.j_max == 16 and p.k_max == 256


@pytest.mark.parametrize("lam, eps0, fragment", [
    (32, 0.25, "lambda >= 64"),
    (64, 0.5, "eps0 in (0, 1/4]"),
    (64, 0.0, "eps0 in (0, 1/4]"),
    (64, 1 / 16, "eps0*lambda >= 16"),
    (128, 1 / 16, "eps0*lambda >= 16"),
])
def test_invalid_parameters_name_the_constraint(lam, eps0, fragment):
    with pytest.raises(FrameParameterError, match=re.escape(fragment)):
        make_frame(lam, eps0)


def test_boundary_cell_is_valid():
    assert make_frame(256, 1 / 16).eps0 * 256 == 16


def test_packet_index_validation(frame64):
    PacketIndex(0, 0, 0).validate(frame64)
    with pytest.raises(ValueError):
        PacketIndex(0, 0, frame64.dir_count).validate(frame64)
    with pytest.raises(ValueError):
        PacketIndex(frame64.j_max + 1, 0, 0).validate(frame64)


# ------------------------------------------------------------- bumps

def test_psi_has_unit_mass():
    mass, _ = integrate.quad(lambda r: 2 * math.pi * r * psi(np.array([r, 0.0])), 0, 1,
                             epsabs=1e-14)
    assert mass == pytest.approx(1.0, rel=1e-10)
    assert psi(np.array([0.0, 0.0])) == pytest.approx(PSI_CONST * math.exp(-1.0))
    assert psi(np.array([1.0, 0.0])) == 0.0


def test_w0_values():
    assert w0(0.0) == 1.0
    assert w0(1.0) == 0.0 and w0(-1.0) == 0.0
    assert w0(0.5) == pytest.approx(math.exp(-1.0 / 3.0))


# Values of lam^-1 (psi_lam * (delta_{a=0} W))(a, s) at lam=64, eps0=1/4 from
# adaptive quadrature of the defining one-dimensional integral.
PROFILE_ORACLE = [
    (0.0, 0.0, 0.9511417457829483),
    (0.3 / 64, 0.05, 0.7687107240993154),
    (0.9 / 64, -0.12, 0.00247027495055872),
    (0.5 / 64, 0.25 - 0.2 / 64, 3.724193944860415e-06),
]


@pytest.mark.parametrize("a, s, expected", PROFILE_ORACLE)
def test_profile_matches_quadrature_oracle(profiles64, a, s, expected):
    assert profiles64.raw(a, s) == pytest.approx(expected, rel=1e-8)


def test_normalization_puts_peak_at_one(frame64, profiles64):
    assert profiles64.norm_const == pytest.approx(1.0 / 0.9511417457829483, rel=1e-9)
    centre = SpacetimePoint(0.0, (0.0, 0.0))
    assert packet_eval(frame64, profiles64, PacketIndex(0, 0, 0), centre) == pytest.approx(1.0)


def test_profile_is_bounded_by_one(frame64, profiles64, rng):
    a = rng.uniform(-1.2 / 64, 1.2 / 64, 400)
    s = rng.uniform(-0.3, 0.3, 400)
    vals = np.array([profiles64.value(x, y) for x, y in zip(a, s)])
    assert np.all(vals <= 1.0 + 1e-12) and np.all(vals >= 0.0)


# ------------------------------------------------------------- tubes and support

def test_tube_is_closed(frame64):
    idx = PacketIndex(2, 5, 0)
    corner = SpacetimePoint(0.0, (5 / 64 + 1 / 64, 2 * 0.25 + 0.25))
    assert tube_contains(frame64, idx, corner)
    assert not tube_contains(frame64, idx, SpacetimePoint(2.5, (0.0, 0.0)))


coords = st.floats(-0.5, 0.5, allow_nan=False)


_FRAME = make_frame(64, 0.25)
_PROFILES = make_profiles(_FRAME)


@given(coords, coords, st.floats(-1.0, 1.0), st.integers(-4, 4), st.integers(-40, 40),
       st.integers(0, 100))
def test_packet_vanishes_off_support(x, y, t, j, k, l):
    idx = PacketIndex(j, k, l)
    pt = SpacetimePoint(t, (x, y))
    if not enlarged_tube_contains(_FRAME, idx, pt):
        assert packet_eval(_FRAME, _PROFILES, idx, pt) == 0.0


def test_frame_coordinates_of_tube_centre(frame64):
    idx = PacketIndex(3, 7, 10)
    w = frame64.directions[10]
    wp = np.array([-w[1], w[0]])
    x = (0.5 + 7 / 64) * w + 3 * 0.25 * wp
    a, s = frame_coordinates(frame64, idx, SpacetimePoint(0.5, tuple(x)))
    assert abs(a) < 1e-14 and abs(s) < 1e-14


# ------------------------------------------------------------- radial sums

def test_pruned_sum_equals_full_sum(frame64, profiles64, rng):
    for _ in range(40):
        j, k = int(rng.integers(-3, 4)), int(rng.integers(-20, 21))
        t = float(rng.uniform(-0.5, 0.5))
        r = abs(k / 64 + t) + rng.uniform(-0.05, 0.05)
        phi = rng.uniform(0, 2 * math.pi)
        p = SpacetimePoint(t, (r * math.cos(phi), r * math.sin(phi)))
        full = float(np.sum(directional_terms(frame64, profiles64, j, k, p)))
        assert radial_packet_eval(frame64, profiles64, j, k, p) == pytest.approx(full, abs=1e-12)


def test_rotation_by_grid_step_is_exact(frame64, profiles64, rng):
    step = frame64.angular_step
    r = rng.uniform(0.0, 0.4, 50)
    phi = rng.uniform(0, 2 * math.pi, 50)
    base = radial_packet_grid(frame64, profiles64, 1, 10, 0.0, r * np.cos(phi), r * np.sin(phi))
    rot = radial_packet_grid(frame64, profiles64, 1, 10, 0.0, r * np.cos(phi + 3 * step),
                             r * np.sin(phi + 3 * step))
    assert np.max(np.abs(base - rot)) < 1e-12


def test_shift_covariance(frame64, profiles64, rng):
    # chi_{j,k}(t, x) = chi_{j,k-n}(t + n/lam, x) for integer n
    r = rng.uniform(0.0, 0.5, 60)
    phi = rng.uniform(0, 2 * math.pi, 60)
    x, y = r * np.cos(phi), r * np.sin(phi)
    for n in (1, 7, -12):
        a = radial_packet_grid(frame64, profiles64, 2, 15, 0.1, x, y)
        b = radial_packet_grid(frame64, profiles64, 2, 15 - n, 0.1 + n / 64, x, y)
        assert np.max(np.abs(a - b)) < 1e-12


def test_vectorized_matches_pointwise(frame64, profiles64):
    xs = np.array([0.1, 0.2, 0.3])
    ys = np.array([0.0, 0.05, -0.1])
    grid = radial_packet_grid(frame64, profiles64, 0, 12, 0.0, xs, ys)
    for i in range(3):
        p = SpacetimePoint(0.0, (xs[i], ys[i]))
        assert grid[i] == radial_packet_eval(frame64, profiles64, 0, 12, p)


def test_packet_is_zero_outside_time_slab(frame64, profiles64):
    p = SpacetimePoint(2.5, (2.5, 0.0))
    assert packet_eval(frame64, profiles64, PacketIndex(0, 0, 0), p) == 0.0
