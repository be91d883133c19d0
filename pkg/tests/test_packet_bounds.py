import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wavepacket_lab import SpacetimePoint, make_frame, make_profiles
from wavepacket_lab.frame import radial_packet_grid
from wavepacket_lab.packet_bounds import (MID_K, OTHER, SMALL_JK, PolarGrid,
                                          boundary_counterexamples, disjointness_check,
                                          envelope_decay_fit, envelope_eval, envelope_regime,
                                          heaviside, jbracket, linf_scan, points_in_tube,
                                          tubes_intersect)

F64 = make_frame(64, 0.25)
P64 = make_profiles(F64)


def test_bracket_and_heaviside():
    assert jbracket(0.0) == 1.0
    assert jbracket(3.0) == pytest.approx(math.sqrt(10))
    assert heaviside(0.0) == 1.0 and heaviside(-1e-15) == 0.0


def test_regimes():
    lam = F64.lam
    assert envelope_regime(F64, 0, 0) == SMALL_JK
    assert envelope_regime(F64, 0, lam) == SMALL_JK
    assert envelope_regime(F64, 0, lam + 1) == MID_K
    assert envelope_regime(F64, 0, 1 / F64.theta ** 2) == MID_K
    assert envelope_regime(F64, 8, 0) == OTHER


def test_envelope_at_origin():
    # k=0, t=0, r=0: theta^-1 <0>^-1/2 <1>^-1/2
    val = envelope_eval(F64, 0, 0, SpacetimePoint(0.0, (0.0, 0.0)))
    assert val == pytest.approx(16 * 2 ** -0.25)


def test_envelope_vanishes_inside_light_cone():
    # lam r + 1 < |k|
    assert envelope_eval(F64, 0, 20, SpacetimePoint(0.0, (10 / 64, 0.0))) == 0.0


@pytest.mark.parametrize("k", [0, 1, 16, 32, 64])
def test_linf_scan_bounded_with_no_zero_violation(k):
    res = linf_scan(F64, P64, 0, k)
    assert 0 < res.max_ratio <= 10
    assert res.zero_violations == 0


def test_zero_region_is_really_zero():
    # every grid x with |x| < (k-1)/lam - 1/lam
    for k in (2, 10, 40, 64):
        r = np.arange(0.0, (k - 2) / 64, 1 / 256)
        vals = radial_packet_grid(F64, P64, 0, k, 0.0, r, np.zeros_like(r))
        assert np.all(vals == 0.0)


def test_coarse_grid_is_rejected():
    with pytest.raises(ValueError, match="grid too coarse"):
        linf_scan(F64, P64, 0, 0, grid_spec=PolarGrid(0.0, 0.5, 1.0 / 64))


def test_decay_exponent_at_k_lambda():
    res = linf_scan(F64, P64, 0, 64)
    fit = envelope_decay_fit(F64, 64, res.table)
    assert fit is not None and fit.slope <= -0.4


# ------------------------------------------------------------- disjointness

def test_origin_lies_in_both_tubes():
    assert tubes_intersect(F64, 0, 0, F64.theta)
    res = disjointness_check(F64, 1)
    assert res.K_star > 0


def test_disjointness_precondition():
    with pytest.raises(ValueError):
        disjointness_check(F64, 5)
    with pytest.raises(ValueError):
        disjointness_check(F64, 0)


@pytest.mark.parametrize("lam, eps0", [(64, 0.25), (256, 0.25), (256, 1 / 16), (1024, 1 / 16)])
def test_disjointness_scaling(lam, eps0):
    params = make_frame(lam, eps0)
    previous = None
    for M in (1, 2, 4):
        if M * params.theta > 0.25:
            continue
        res = disjointness_check(params, M)
        assert 1 / 8 <= res.k_scaled <= 8
        assert res.J_star <= 8
        assert boundary_counterexamples(params, res) == 0
        if previous is not None:
            assert res.K_star <= previous
        previous = res.K_star


def test_thresholds_are_least():
    res = disjointness_check(F64, 1)
    phi = F64.theta
    assert any(tubes_intersect(F64, j, res.K_star - 1, phi) for j in range(res.J_star))
    assert tubes_intersect(F64, res.J_star - 1, 0, phi) or res.J_star == 0


@given(st.integers(0, 6), st.integers(-256, 256), st.integers(1, 4))
def test_exact_test_agrees_with_sampling(j, k, M):
    # a sampled common boundary point forces the exact test to report a meeting
    phi = M * F64.theta
    if not tubes_intersect(F64, j, k, phi):
        t = np.linspace(-2, 2, 9)
        for tt in t:
            c = np.array([tt + k / 64, j * F64.delta])
            assert not points_in_tube(F64, j, k, phi, np.array([tt]),
                                      np.array([c[0]]), np.array([c[1]]))[0] or \
                not points_in_tube(F64, j, k, 0.0, np.array([tt]), np.array([c[0]]),
                                   np.array([c[1]]))[0]
