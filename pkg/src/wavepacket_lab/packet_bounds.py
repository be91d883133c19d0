"""Pointwise envelopes for radial packets and tube-disjointness thresholds."""

import math
from dataclasses import dataclass, field

import numpy as np

from .frame import radial_packet_grid
from .overlap import IndexThresholds

SMALL_JK, MID_K, OTHER = "small_jk", "mid_k", "other"

LINF_COLUMNS = ["lambda", "eps0", "j", "k", "max_ratio", "argmax_r", "zero_violations"]


def jbracket(x):
    """Japanese bracket ``sqrt(1 + x^2)``."""
    return np.sqrt(1.0 + np.square(x))


def heaviside(x):
    """Indicator of ``[0, inf)``, so ``H(0) = 1``."""
    return np.where(np.asarray(x) >= 0, 1.0, 0.0)


def envelope_regime(params, j, k, thresholds=None):
    """Regime of (j, k): small ``|j|`` splits by ``|k|`` against lam and theta^-2."""
    thresholds = thresholds or IndexThresholds()
    if abs(j) < thresholds.j_thr:
        if abs(k) <= params.lam:
            return SMALL_JK
        if abs(k) <= 1.0 / params.theta ** 2:
            return MID_K
    return OTHER


def envelope_values(params, j, k, t, r, thresholds=None):
    """Envelope bound at time t and radii r (array)."""
    regime = envelope_regime(params, j, k, thresholds)
    r = np.asarray(r, dtype=float)
    if regime == MID_K:
        return np.full(r.shape, 1.0 / params.eps0)
    if regime == OTHER:
        return np.ones(r.shape)
    lr = params.lam * r
    arg = lr + 1.0 - abs(k + params.lam * t)
    return (jbracket(lr) ** -0.5) * (jbracket(arg) ** -0.5) * heaviside(arg) / params.theta


def envelope_eval(params, j, k, p, thresholds=None):
    """Bound on ``|chi_{j,k}(p)|`` for the regime of (j, k).

    ``theta^-1 <lam|x|>^-1/2 <lam|x| + 1 - |k + lam t|>^-1/2 H(...)`` when
    ``|j|`` is small and ``|k| <= lam``; ``1/eps0`` when ``|j|`` is small and
    ``lam < |k| <= theta^-2``; 1 otherwise.
    """
    return float(envelope_values(params, j, k, p.t, np.array([p.radius]), thresholds)[0])


@dataclass(frozen=True)
class PolarGrid:
    """Polar sample grid ``r in [r_min, r_max]`` step ``dr``.

    ``n_angles`` angles equally spaced in one period ``[0, 2 pi / D)`` of the
    direction grid (radial packets are invariant under that rotation).
    """

    r_min: float
    r_max: float
    dr: float
    n_angles: int = 4

    def radii(self):
        n = int(math.floor((self.r_max - self.r_min) / self.dr + 1e-9)) + 1
        return self.r_min + self.dr * np.arange(n)

    def angles(self, params):
        return params.angular_step * np.arange(self.n_angles) / self.n_angles


def default_linf_grid(params, j, k, t=0.0):
    """Grid covering the support of ``chi_{j,k}(t)``, plus a margin of 2 delta."""
    inv = 1.0 / params.lam
    outer = math.hypot((abs(k + params.lam * t) + 1) * inv, (abs(j) + 1) * params.delta + inv)
    return PolarGrid(0.0, outer + 2.0 * params.delta, inv / 4.0, 4)


def check_resolution(params, grid, points_per_wavelength=4):
    """Raise unless the radial step resolves ``1/lam`` with enough points."""
    need = 1.0 / (points_per_wavelength * params.lam)
    if grid.dr > need * (1.0 + 1e-12):
        raise ValueError(f"grid too coarse: radial step {grid.dr:g} exceeds required "
                         f"{need:g} ({points_per_wavelength} points per 1/lambda)")


@dataclass
class LinfScanResult:
    """Outcome of a radial L-infinity scan.

    ``table`` has columns ``r, max|chi|, envelope, ratio`` (ratio is nan
    where the envelope vanishes).
    """

    max_ratio: float
    argmax: tuple
    table: np.ndarray = field(repr=False)
    zero_violations: int
    skipped: int
    regime: str


def linf_scan(params, profiles, j, k, t=0.0, grid_spec=None, thresholds=None):
    """Max of ``|chi_{j,k}| / envelope`` over a polar grid at time t.

    Also counts zero-region violations: grid points with
    ``lam |x| < |k + lam t| - 2`` (the vanishing region shrunk by 1/lam) where
    the packet is nonzero. Points where the envelope vanishes outside that
    region are skipped and counted.
    """
    grid = grid_spec or default_linf_grid(params, j, k, t)
    check_resolution(params, grid)
    radii = grid.radii()
    phis = grid.angles(params)
    rr, pp = np.meshgrid(radii, phis, indexing="ij")
    vals = np.abs(radial_packet_grid(params, profiles, j, k, t,
                                     (rr * np.cos(pp)).ravel(), (rr * np.sin(pp)).ravel()))
    vals = vals.reshape(rr.shape)
    env = envelope_values(params, j, k, t, radii, thresholds)
    chi_max = vals.max(axis=1)
    zero_zone = params.lam * radii < abs(k + params.lam * t) - 2.0
    zero_violations = int(np.count_nonzero(vals[zero_zone] != 0.0))
    positive = env > 0
    ratio = np.full(radii.shape, np.nan)
    ratio[positive] = chi_max[positive] / env[positive]
    skipped = int(np.count_nonzero(~positive & ~zero_zone)) * phis.size
    if np.any(positive):
        i = int(np.nanargmax(ratio))
        a = int(np.argmax(vals[i]))
        best, arg = float(ratio[i]), (float(radii[i]), float(phis[a]))
    else:
        best, arg = 0.0, (math.nan, math.nan)
    table = np.column_stack([radii, chi_max, env, ratio])
    return LinfScanResult(best, arg, table, zero_violations, skipped,
                          envelope_regime(params, j, k, thresholds))


def envelope_decay_fit(params, k, table, t=0.0):
    """Log-log slope of ``max|chi|`` against ``<lam r + 1 - |k + lam t|>``.

    Uses rows past the inner edge (bracket argument at least 1) where the
    packet is nonzero. Returns None with fewer than 3 such rows.
    """
    from .harness.fitting import loglog_fit

    arg = params.lam * table[:, 0] + 1.0 - abs(k + params.lam * t)
    keep = (arg >= 1.0) & (table[:, 1] > 0)
    if np.count_nonzero(keep) < 3:
        return None
    return loglog_fit(zip(jbracket(arg[keep]), table[keep, 1]))


# ---------------------------------------------------------------- disjointness

def _rect_axes(phi):
    return np.array([math.cos(phi), math.sin(phi)]), np.array([-math.sin(phi), math.cos(phi)])


def _kappa_interval(params, j, phi):
    """Closed interval of ``kappa = k + lam t`` for which the cross-sections
    of ``T_{j,*,0}`` and ``T_{j,*,phi}`` meet, or None.

    Both cross-sections are rectangles of half-sizes ``1/lam`` x ``delta``
    centred at ``R_psi (kappa/lam, j delta)``. Their centre difference is
    linear in kappa, so each separating-axis condition is an interval in
    kappa and the intersection of the four is exact.
    """
    hl, hw = 1.0 / params.lam, params.delta
    e0, f0 = _rect_axes(0.0)
    e1, f1 = _rect_axes(phi)
    # centre difference d(kappa) = kappa * u + v
    u = (e1 - e0) / params.lam
    v = j * params.delta * (f1 - f0)
    lo, hi = -math.inf, math.inf
    for n in (e0, f0, e1, f1):
        reach = hl * (abs(e0 @ n) + abs(e1 @ n)) + hw * (abs(f0 @ n) + abs(f1 @ n))
        a, b = float(u @ n), float(v @ n)
        # need |a kappa + b| <= reach
        if abs(a) < 1e-300:
            if abs(b) > reach:
                return None
            continue
        x1, x2 = (-reach - b) / a, (reach - b) / a
        lo, hi = max(lo, min(x1, x2)), min(hi, max(x1, x2))
    if lo > hi:
        return None
    return lo, hi


def tubes_intersect(params, j, k, phi):
    """Exact test of ``T_{j,k,0} meets T_{j,k,phi}`` (closed tubes, |t| <= 2)."""
    iv = _kappa_interval(params, j, phi)
    if iv is None:
        return False
    return iv[0] <= k + 2.0 * params.lam and iv[1] >= k - 2.0 * params.lam


@dataclass(frozen=True)
class Disjointness:
    """Least thresholds with ``T_{j,k,0}`` and ``T_{j,k,M theta}`` disjoint for
    every ``j >= J_star`` (any k) and every ``k >= K_star`` (any j)."""

    M: int
    J_star: int
    K_star: int
    theta: float

    @property
    def k_scaled(self):
        """``K_star theta^2 M``, of order one."""
        return self.K_star * self.theta ** 2 * self.M


def disjointness_check(params, M):
    """Disjointness thresholds for rotation by ``M theta``.

    Raises
    ------
    ValueError
        If ``M theta > 1/4`` (outside the small-angle regime) or ``M < 1``.
    """
    M = int(M)
    if M < 1:
        raise ValueError("M must be a positive integer")
    phi = M * params.theta
    if phi > 0.25:
        raise ValueError(f"M*theta = {phi:g} exceeds 1/4")
    intervals = {}
    j = 0
    while True:
        iv = _kappa_interval(params, j, phi)
        if iv is None:
            break
        intervals[j] = iv
        j += 1
    j_star = j
    k_star = max(int(math.floor(iv[1] + 2.0 * params.lam)) + 1 for iv in intervals.values()) \
        if intervals else 0
    return Disjointness(M, j_star, max(k_star, 0), params.theta)


def tube_boundary_points(params, j, k, phi, n_t=41, n_edge=41):
    """Sample points on the boundary of the closed tube ``T_{j,k,phi}``.

    Returns arrays (t, x, y): the four lateral faces at ``n_t`` times plus the
    two end caps ``t = +-2``.
    """
    e, f = _rect_axes(phi)
    hl, hw = 1.0 / params.lam, params.delta
    ts = np.linspace(-2.0, 2.0, n_t)
    g = np.linspace(-1.0, 1.0, n_edge)
    # rectangle boundary in (a, s)
    a_b = np.concatenate([np.full(n_edge, hl), np.full(n_edge, -hl), hl * g, hl * g])
    s_b = np.concatenate([hw * g, hw * g, np.full(n_edge, hw), np.full(n_edge, -hw)])
    out_t, out_x, out_y = [], [], []
    for t in ts:
        along = t + k / params.lam + a_b
        across = j * params.delta + s_b
        out_t.append(np.full(a_b.shape, t))
        out_x.append(along * e[0] + across * f[0])
        out_y.append(along * e[1] + across * f[1])
    aa, ss = np.meshgrid(hl * g, hw * g, indexing="ij")
    for t in (-2.0, 2.0):
        along = t + k / params.lam + aa.ravel()
        across = j * params.delta + ss.ravel()
        out_t.append(np.full(along.shape, t))
        out_x.append(along * e[0] + across * f[0])
        out_y.append(along * e[1] + across * f[1])
    return np.concatenate(out_t), np.concatenate(out_x), np.concatenate(out_y)


def points_in_tube(params, j, k, phi, t, x, y, tol=0.0):
    """Closed membership of many points in ``T_{j,k,phi}``."""
    e, f = _rect_axes(phi)
    a = x * e[0] + y * e[1] - t - k / params.lam
    s = x * f[0] + y * f[1] - j * params.delta
    return (np.abs(a) <= 1.0 / params.lam + tol) & (np.abs(s) <= params.delta + tol) & \
        (np.abs(t) <= 2.0)


def boundary_counterexamples(params, result, j_extra=3, k_extra=3, n_t=41, n_edge=41):
    """Count boundary sample points of one tube lying in the other, over
    indices at and just past the thresholds. Zero means no counterexample."""
    phi = result.M * params.theta
    bad = 0
    cases = [(j, k) for j in range(result.J_star, result.J_star + j_extra)
             for k in (-params.k_max, 0, result.K_star)]
    cases += [(j, k) for j in range(0, result.J_star + j_extra)
              for k in range(result.K_star, result.K_star + k_extra)]
    for j, k in cases:
        for src, dst in ((0.0, phi), (phi, 0.0)):
            t, x, y = tube_boundary_points(params, j, k, src, n_t, n_edge)
            bad += int(np.count_nonzero(points_in_tube(params, j, k, dst, t, x, y)))
    return bad

