import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, special

from wavepacket_lab.radial.fields import (FourierBesselBasis, RadialField, band_bump,
                                          bessel_j0_zeros, gaussian_field, grad_hs_norm_coeffs,
                                          hs_norm, lp_multiplier, lp_project, low_multiplier,
                                          smooth_step)

B = FourierBesselBasis(8.0, 256)


def test_bessel_zeros_match_scipy():
    assert np.allclose(bessel_j0_zeros(200), special.jn_zeros(0, 200), rtol=0, atol=1e-12)


def test_zero_field_has_zero_norm():
    assert hs_norm(RadialField.zeros(B), 1.3) == 0.0


@given(st.integers(0, 255), st.floats(-2, 4))
def test_single_mode_norm(n, s):
    c = np.zeros(B.N)
    c[n] = 1.0
    f = RadialField(B, c)
    assert hs_norm(f, s) == pytest.approx((1 + B.xi[n] ** 2) ** (s / 2) * f.l2_norm(), rel=1e-12)


def test_sobolev_order_range():
    with pytest.raises(ValueError):
        hs_norm(RadialField.zeros(B), 4.5)


def test_gaussian_h1_against_grid_quadrature():
    w = 0.5
    f = gaussian_field(B, w)
    l2, _ = integrate.quad(lambda r: 2 * math.pi * r * math.exp(-2 * (r / w) ** 2), 0, 8,
                           epsabs=1e-14)
    grad, _ = integrate.quad(lambda r: 2 * math.pi * r * (2 * r / w ** 2) ** 2 *
                             math.exp(-2 * (r / w) ** 2), 0, 8, epsabs=1e-14)
    assert hs_norm(f, 1.0) ** 2 == pytest.approx(l2 + grad, rel=1e-6)
    assert float(grad_hs_norm_coeffs(B, f.coeffs, 0.0)) ** 2 == pytest.approx(grad, rel=1e-6)


def test_round_trip_for_band_limited_fields(rng):
    for _ in range(5):
        c = np.zeros(B.N)
        c[:B.N // 2] = rng.standard_normal(B.N // 2)
        f = RadialField(B, c)
        back = RadialField.from_samples(B, f.samples)
        samples = back.samples
        assert np.max(np.abs(samples - f.samples)) <= 1e-10 * np.max(np.abs(f.samples))


def test_projection_reproduces_modes():
    c = np.zeros(B.N)
    c[[0, 5, 40]] = [1.0, -0.5, 0.25]
    f = RadialField(B, c)
    g = RadialField.from_function(B, f)
    assert np.max(np.abs(g.coeffs - c)) < 1e-10


def test_radial_derivative():
    f = gaussian_field(B, 0.5)
    r = np.linspace(0.05, 2, 20)
    exact = -2 * r / 0.25 * np.exp(-(r / 0.5) ** 2)
    assert np.max(np.abs(f.dr(r) - exact)) < 1e-8


def test_field_arithmetic():
    f, g = gaussian_field(B, 0.5), gaussian_field(B, 0.3)
    assert np.allclose((f + g - g).coeffs, f.coeffs)
    assert np.allclose((2 * f).coeffs, (f * 2).coeffs)
    with pytest.raises(ValueError):
        RadialField(B, np.zeros(3))


# ------------------------------------------------------------- Littlewood-Paley

def test_smooth_step():
    x = np.array([0.0, 1.0, 1.5, 2.0, 3.0])
    v = smooth_step(x)
    assert v[0] == 1 and v[1] == 1 and v[3] == 0 and v[4] == 0
    assert v[2] == pytest.approx(0.5)
    assert np.all(np.diff(smooth_step(np.linspace(0, 3, 500))) <= 0)


def test_band_projector_is_identity_on_band():
    big = FourierBesselBasis(8.0, 1024)
    lam = 64.0
    c = np.where((big.xi >= lam / 4) & (big.xi <= lam), 1.0, 0.0)
    f = RadialField(big, c)
    assert np.max(np.abs(lp_project(f, (lam / 4, lam)).coeffs - c)) < 1e-10


def test_wide_band_support():
    xi = np.linspace(0, 2000, 20001)
    lam = 100.0
    m = lp_multiplier(xi, (lam / 4, 4 * lam))
    assert np.all(m[(xi < lam / 8) | (xi > 8 * lam)] == 0)
    assert np.all(m[(xi >= lam / 4) & (xi <= 4 * lam)] == 1)


def test_dyadic_partition_of_unity():
    xi = np.linspace(1.0, 500.0, 5000)
    total = low_multiplier(xi, 0.5)
    for k in range(0, 12):
        total = total + lp_multiplier(xi, 2.0 ** k)
    assert np.max(np.abs(total - 1.0)) < 1e-12


def test_far_bands_are_orthogonal():
    big = FourierBesselBasis(8.0, 1024)
    f = RadialField(big, np.ones(big.N))
    out = lp_project(lp_project(f, 128.0), 2.0)
    assert np.max(np.abs(out.coeffs)) == 0.0


def test_band_bump_lives_in_band():
    big = FourierBesselBasis(8.0, 1024)
    f = band_bump(big, 64)
    on = f.coeffs != 0
    assert big.xi[on].min() >= 32 and big.xi[on].max() <= 128
