"""Flat radial wave propagation, Duhamel integration and Picard iteration.

Each Fourier-Bessel mode of ``u_tt - Delta u = F`` is a forced oscillator
``c'' + xi^2 c = F_n``, so the homogeneous flow is an exact rotation in the
``(xi c, c')`` plane and Duhamel's integral reduces to two running sums.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .fields import RadialField, grad_hs_norm_coeffs, hs_norm_coeffs

STRICHARTZ_COLUMNS = ["lambda", "s", "T", "norm", "rhs", "ratio", "equation",
                      "resolution_error"]
PICARD_COLUMNS = ["iteration", "increment", "factor", "s", "T", "equation"]
STABILITY_COLUMNS = ["delta", "s", "T", "lhs", "data_diff", "gronwall_x", "fitted_C",
                     "equation"]


class BoundaryContaminationWarning(UserWarning):
    """The wave may have reached the Dirichlet boundary of the disk."""


class PicardDivergence(RuntimeError):
    """Picard iteration failed to converge; ``trace`` holds the increments."""

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


def support_radius(f, tol=1e-10):
    """Largest collocation radius where ``|f|`` exceeds ``tol`` times its max."""
    vals = np.abs(f.samples)
    top = vals.max()
    if top == 0:
        return 0.0
    idx = np.flatnonzero(vals > tol * top)
    return float(f.basis.nodes[idx[-1]])


@dataclass
class SolverState:
    """Data ``(u, u_t)`` at time ``t`` and the radius containing its support."""

    u: RadialField
    ut: RadialField
    t: float = 0.0
    support: float = None

    def __post_init__(self):
        if self.u.basis is not self.ut.basis:
            raise ValueError("u and u_t must share a basis")
        if self.support is None:
            self.support = max(support_radius(self.u), support_radius(self.ut))

    @property
    def basis(self):
        return self.u.basis

    def energy(self, order=0.0):
        """``||grad u||_{H^order}^2 + ||u_t||_{H^order}^2``."""
        b = self.basis
        return float(grad_hs_norm_coeffs(b, self.u.coeffs, order) ** 2 +
                     hs_norm_coeffs(b, self.ut.coeffs, order) ** 2)


def _check_boundary(state, elapsed):
    if state.support + abs(elapsed) > state.basis.R:
        warnings.warn(f"support radius {state.support:.3g} plus elapsed time {abs(elapsed):.3g} "
                      f"exceeds disk radius {state.basis.R:g}", BoundaryContaminationWarning,
                      stacklevel=3)


def rotate(xi, c, cdot, dt):
    """Exact free flow of every mode over time dt."""
    cs, sn = np.cos(xi * dt), np.sin(xi * dt)
    return cs * c + sn / xi * cdot, -xi * sn * c + cs * cdot


def linear_propagate(state, dt):
    """Advance ``u_tt = Delta u`` by ``dt`` (either sign)."""
    _check_boundary(state, dt)
    b = state.basis
    c, cd = rotate(b.xi, state.u.coeffs, state.ut.coeffs, dt)
    return SolverState(RadialField(b, c), RadialField(b, cd), state.t + dt,
                       state.support + abs(dt))


@dataclass
class Trajectory:
    """Coefficients of u and u_t at ``times``, shape (nt + 1, N)."""

    basis: object
    times: np.ndarray
    c: np.ndarray = field(repr=False)
    cdot: np.ndarray = field(repr=False)

    def state(self, i):
        return SolverState(RadialField(self.basis, self.c[i]), RadialField(self.basis, self.cdot[i]),
                           float(self.times[i]))

    def energy(self, order=0.0):
        b = self.basis
        return grad_hs_norm_coeffs(b, self.c, order) ** 2 + hs_norm_coeffs(b, self.cdot, order) ** 2

    def samples(self, r=None):
        """``u, u_t, u_r`` at radii r (default collocation nodes) for every time."""
        b = self.basis
        return b.evaluate(self.c, r), b.evaluate(self.cdot, r), b.evaluate_dr(self.c, r)

    def derivative_sup(self, r=None):
        """``sup_r |(u_t, u_r)|`` per time."""
        _, ut, ur = self.samples(r)
        return np.sqrt(ut ** 2 + ur ** 2).max(axis=1)

    def derivative_metric(self, order):
        """``(||u_t||_{H^order}^2 + ||grad u||_{H^order}^2)^(1/2)`` per time."""
        return np.sqrt(self.energy(order))


def time_grid(T, nt):
    return np.linspace(0.0, T, int(nt) + 1)


def check_time_step(basis, T, nt, limit=0.5):
    dt = abs(T) / nt
    if basis.xi[-1] * dt > limit:
        need = int(math.ceil(abs(T) * basis.xi[-1] / limit))
        raise ValueError(f"time step too large: xi_max*dt = {basis.xi[-1] * dt:.3g} > {limit}; "
                         f"use nt >= {need}")


def free_trajectory(state, T, nt):
    """Homogeneous flow sampled on ``time_grid(T, nt)``."""
    b = state.basis
    _check_boundary(state, T)
    ts = time_grid(T, nt)
    ph = np.outer(ts, b.xi)
    cs, sn = np.cos(ph), np.sin(ph)
    c = cs * state.u.coeffs + sn / b.xi * state.ut.coeffs
    cd = -b.xi * sn * state.u.coeffs + cs * state.ut.coeffs
    return Trajectory(b, ts + state.t, c, cd)


def duhamel_solve(data, source, T, nt):
    """Solve ``u_tt - Delta u = F`` on ``[0, T]`` from data at time 0.

    Parameters
    ----------
    data : SolverState
    source : None, array of shape (nt + 1, N), or callable
        Source coefficients at the grid times; a callable maps a time to a
        :class:`RadialField` or coefficient array.
    T : float
        Final time; negative values integrate backwards.
    nt : int
        Number of steps; ``xi_max |T| / nt <= 1/2`` is required.

    Returns
    -------
    Trajectory

    Notes
    -----
    With ``A(t) = int_0^t cos(xi s) F ds`` and ``B(t) = int_0^t sin(xi s) F ds``
    the forced part is ``(sin(xi t) A - cos(xi t) B)/xi`` for ``c`` and
    ``cos(xi t) A + sin(xi t) B`` for ``c'``. Both running integrals use the
    composite trapezoid rule.
    """
    b = data.basis
    nt = int(nt)
    check_time_step(b, T, nt)
    traj = free_trajectory(data, T, nt)
    if source is None:
        return traj
    ts = traj.times - data.t
    if callable(source):
        rows = []
        for t in ts:
            v = source(t)
            rows.append(v.coeffs if isinstance(v, RadialField) else np.asarray(v, dtype=float))
        fs = np.array(rows)
    else:
        fs = np.asarray(source, dtype=float)
    if fs.shape != (nt + 1, b.N):
        raise ValueError(f"source must have shape ({nt + 1}, {b.N}), got {fs.shape}")
    ph = np.outer(ts, b.xi)
    cs, sn = np.cos(ph), np.sin(ph)
    h = T / nt
    gc, gs = cs * fs, sn * fs
    a = np.zeros_like(fs)
    bb = np.zeros_like(fs)
    a[1:] = np.cumsum(0.5 * h * (gc[1:] + gc[:-1]), axis=0)
    bb[1:] = np.cumsum(0.5 * h * (gs[1:] + gs[:-1]), axis=0)
    traj.c = traj.c + (sn * a - cs * bb) / b.xi
    traj.cdot = traj.cdot + cs * a + sn * bb
    return traj


# ------------------------------------------------------------------ Strichartz

def sup_grid(basis, r_max, points_per_wavelength=4):
    """Radii in ``[0, r_max]`` with at least 4 points per shortest wavelength."""
    wavelength = 2.0 * math.pi / basis.xi[-1]
    n = int(math.ceil(r_max * points_per_wavelength / wavelength)) + 1
    return np.linspace(0.0, r_max, n)


def l2t_linf(traj, r=None):
    """``||(u_t, u_r)||_{L^2_t L^inf_x}`` by the trapezoid rule in t."""
    sup = traj.derivative_sup(r)
    dt = abs(traj.times[1] - traj.times[0])
    return math.sqrt(float(np.sum(0.5 * dt * (sup[1:] ** 2 + sup[:-1] ** 2))))


def l1t_linf(traj, r=None):
    sup = traj.derivative_sup(r)
    dt = abs(traj.times[1] - traj.times[0])
    return float(np.sum(0.5 * dt * (sup[1:] + sup[:-1])))


@dataclass
class StrichartzResult:
    ratio: float
    norm: float
    rhs: float
    resolution_error: float


def strichartz_ratio(data, s, T=1.0, nt=None, r_max=None, rhs_order=None):
    """``||(u_t, u_r)||_{L^2([0,T]) L^inf} / ||du(0)||_{H^(s-1)}`` for free waves.

    ``rhs_order`` replaces ``s - 1`` in the denominator (control runs). The
    spatial sup runs over radii up to ``r_max`` (default: data support
    plus T) with 4 points per shortest wavelength of the basis. The
    resolution error compares against every other time and radius.

    Raises
    ------
    ValueError
        For zero data or ``s <= 1``.
    """
    if s <= 1:
        raise ValueError("strichartz_ratio needs s > 1")
    b = data.basis
    rhs = math.sqrt(data.energy(s - 1.0 if rhs_order is None else rhs_order))
    if rhs == 0:
        raise ValueError("zero data")
    nt = nt or int(math.ceil(2.0 * abs(T) * b.xi[-1]))
    nt += nt % 2
    r_max = min(b.R, r_max if r_max is not None else data.support + abs(T))
    traj = free_trajectory(data, T, nt)
    r = sup_grid(b, r_max)
    sup = traj.derivative_sup(r)
    dt = abs(T) / nt
    norm = math.sqrt(float(np.sum(0.5 * dt * (sup[1:] ** 2 + sup[:-1] ** 2))))
    coarse_t = sup[::2]
    coarse = math.sqrt(float(np.sum(dt * (coarse_t[1:] ** 2 + coarse_t[:-1] ** 2))))
    return StrichartzResult(norm / rhs, norm, rhs, abs(norm - coarse) / rhs)


def band_state(basis, lam, scale=1.0):
    """Data ``(S_lam delta, 0)`` scaled by ``scale``."""
    from .fields import band_bump

    u0 = band_bump(basis, lam) * scale
    return SolverState(u0, RadialField.zeros(basis), 0.0, support_radius(u0, 1e-8))


def strichartz_basis(lam, R=8.0):
    """Basis resolving ``S_lam`` data, which lives at ``xi <= 2 lam``: modes up
    to about ``2.5 lam``."""
    n = int(math.ceil(2.5 * lam * R / math.pi))
    from .fields import FourierBesselBasis

    return FourierBesselBasis(R, n)


# ---------------------------------------------------------------- Picard

@dataclass(frozen=True)
class Nonlinearity:
    """``N(u, du) = p(u) u_t^2 + q(u) u_r^2`` and an optional metric profile g."""

    p: object = None
    q: object = None
    g: object = None

    @staticmethod
    def _call(fn, u):
        if fn is None:
            return np.zeros_like(u)
        if np.isscalar(fn):
            return np.full_like(u, float(fn))
        return np.asarray(fn(u), dtype=float)

    def __call__(self, u, ut, ur):
        return self._call(self.p, u) * ut ** 2 + self._call(self.q, u) * ur ** 2

    @property
    def is_zero(self):
        return all(f is None or (np.isscalar(f) and float(f) == 0.0) for f in (self.p, self.q))


def source_coefficients(traj, nonlin):
    """Coefficients of ``N(u, du)`` at each trajectory time (collocation)."""
    u, ut, ur = traj.samples()
    return traj.basis.from_samples(nonlin(u, ut, ur))


@dataclass
class PicardResult:
    trajectory: Trajectory
    increments: list
    factors: list
    iterations: int
    residual: float
    l2linf: float

    @property
    def max_factor(self):
        return max(self.factors) if self.factors else 0.0


def picard_metric(basis, c1, cd1, c2, cd2, s):
    """``sup_t (||grad(u - v)||_{H^(s-1)}^2 + ||(u - v)_t||_{H^(s-1)}^2)^(1/2)``."""
    dc, dcd = c1 - c2, cd1 - cd2
    e = grad_hs_norm_coeffs(basis, dc, s - 1.0) ** 2 + hs_norm_coeffs(basis, dcd, s - 1.0) ** 2
    return float(np.sqrt(np.max(e)))


def picard_solve(data, nonlin, s, T, tol=1e-10, max_iter=50, nt=None):
    """Fixed point of ``u -> Pi(u)`` with ``Pi(u)`` solving ``box Pi = N(u, du)``.

    Starts from the free evolution of the data and stops once successive
    iterates differ by less than ``tol`` in ``sup_t ||d.||_{H^(s-1)}``.

    Returns
    -------
    PicardResult
        ``increments[i]`` is the distance between iterates i and i+1,
        ``factors`` their successive ratios, ``residual`` the size of one
        further application of Pi.

    Raises
    ------
    ValueError
        If ``s <= 3/2`` or ``|T| > 1``.
    PicardDivergence
        If ``max_iter`` is reached first.
    """
    if s <= 1.5:
        raise ValueError("picard_solve needs s > 3/2")
    if abs(T) > 1.0:
        raise ValueError("picard_solve needs |T| <= 1")
    b = data.basis
    nt = nt or int(math.ceil(2.0 * abs(T) * b.xi[-1]))
    current = free_trajectory(data, T, nt)
    increments = []
    for it in range(1, max_iter + 1):
        src = None if nonlin.is_zero else source_coefficients(current, nonlin)
        nxt = duhamel_solve(data, src, T, nt)
        inc = picard_metric(b, nxt.c, nxt.cdot, current.c, current.cdot, s)
        increments.append(inc)
        current = nxt
        if inc < tol:
            src = None if nonlin.is_zero else source_coefficients(current, nonlin)
            check = duhamel_solve(data, src, T, nt)
            residual = picard_metric(b, check.c, check.cdot, current.c, current.cdot, s)
            factors = [increments[i + 1] / increments[i]
                       for i in range(len(increments) - 1) if increments[i] > 0]
            return PicardResult(current, increments, factors, it, residual, l2t_linf(current))
    raise PicardDivergence(f"no convergence in {max_iter} iterations "
                           f"(last increment {increments[-1]:.3g}); try a smaller T", increments)


@dataclass
class StabilityResult:
    lhs: float
    data_diff: float
    data_energy: float
    gronwall_x: float
    fitted_C: float


def stability_check(data_u, data_v, nonlin, s, T, tol=1e-12, max_iter=60, nt=None):
    """Quantities of the stability bound for two Picard solutions.

    ``lhs = sup_t ||d(u - v)||_{L^2}``, ``data_diff`` the H^1 x L^2 distance of
    the data, ``gronwall_x = T + ||du||_{L^1 L^inf} + ||dv||_{L^1 L^inf}`` and
    ``fitted_C`` the least ``C >= 0`` with
    ``lhs <= data_diff exp(C gronwall_x)``.
    """
    if s <= 1.0:
        raise ValueError("stability_check needs s > 1")
    b = data_u.basis
    ru = picard_solve(data_u, nonlin, s, T, tol, max_iter, nt)
    rv = picard_solve(data_v, nonlin, s, T, tol, max_iter, nt)
    lhs = picard_metric(b, ru.trajectory.c, ru.trajectory.cdot, rv.trajectory.c,
                        rv.trajectory.cdot, 1.0)
    du = data_u.u.coeffs - data_v.u.coeffs
    dv = data_u.ut.coeffs - data_v.ut.coeffs
    diff = math.sqrt(float(hs_norm_coeffs(b, du, 1.0) ** 2 + hs_norm_coeffs(b, dv, 0.0) ** 2))
    energy = math.sqrt(float(grad_hs_norm_coeffs(b, du, 0.0) ** 2 + hs_norm_coeffs(b, dv, 0.0) ** 2))
    x = abs(T) + l1t_linf(ru.trajectory) + l1t_linf(rv.trajectory)
    # ratios within roundoff of one carry no growth
    if lhs == 0.0 or diff == 0.0 or lhs <= diff * (1.0 + 1e-12):
        c = 0.0
    else:
        c = math.log(lhs / diff) / x
    return StabilityResult(lhs, diff, energy, x, c)
