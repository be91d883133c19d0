"""Frame parameters, tubes and pointwise wave-packet evaluation.

A packet ``chi_{j,k,l}`` travels at unit speed in direction
``w_l = (cos 2 pi l/D, sin 2 pi l/D)``. In its own frame,

    a = x.w_l - t - k/lam,    s = x.w_l_perp - j*delta,    delta = (eps0 lam)^-1/2,

it is the profile ``lam^-1 (psi_lam * (delta_{a=0} W))`` with the mollifier
``psi_lam(x) = lam^2 psi(lam x)`` and the transverse window
``W(s) = w0(s/delta)``. The radial packet ``chi_{j,k}`` sums over all D
directions.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import integrate

from . import _kernels

#: Default number of trapezoid nodes for the profile integral.
DEFAULT_NQ = 128


class FrameParameterError(ValueError):
    """Raised when (lam, eps0) violate a frame precondition."""


@dataclass(frozen=True)
class FrameParams:
    """Scale triple (lam, eps0, theta) and the derived direction grid.

    Attributes
    ----------
    lam : float
        Dyadic frequency scale, at least 64.
    eps0 : float
        Small parameter in (0, 1/4].
    theta : float
        Angular scale ``sqrt(eps0/lam)``.
    dir_count : int
        Number of directions ``D = ceil(2 pi / theta)``.
    c_small : float
        Constant ``c`` of the overlap regimes.
    j_max, k_max : int
        Index window ``|j| <= j_max``, ``|k| <= k_max``.
    """

    lam: float
    eps0: float
    theta: float
    dir_count: int
    c_small: float = 1.0
    j_max: int = 0
    k_max: int = 0

    @property
    def delta(self):
        """Transverse tube width ``(eps0 lam)^-1/2``."""
        return 1.0 / math.sqrt(self.eps0 * self.lam)

    @property
    def angular_step(self):
        return 2.0 * math.pi / self.dir_count

    @cached_property
    def angles(self):
        return self.angular_step * np.arange(self.dir_count)

    @cached_property
    def cos_l(self):
        return np.cos(self.angles)

    @cached_property
    def sin_l(self):
        return np.sin(self.angles)

    @property
    def directions(self):
        """Unit vectors ``w_l`` as a (D, 2) array."""
        return np.column_stack([self.cos_l, self.sin_l])

    @property
    def j_window(self):
        return range(-self.j_max, self.j_max + 1)

    @property
    def k_window(self):
        return range(-self.k_max, self.k_max + 1)

    def to_dict(self):
        return {"lambda": self.lam, "eps0": self.eps0, "c_small": self.c_small,
                "j_max": self.j_max, "k_max": self.k_max}


def make_frame(lam, eps0, c_small=1.0, j_max=None, k_max=None):
    """Build validated frame parameters.

    Parameters
    ----------
    lam : float
        Frequency scale, ``lam >= 64``.
    eps0 : float
        Small parameter, ``0 < eps0 <= 1/4`` and ``eps0 * lam >= 16``.
    c_small : float, optional
        Regime constant ``c``.
    j_max, k_max : int, optional
        Index window. Defaults cover ``|x| <= 4`` for ``|t| <= 2``:
        ``j_max = floor(4 sqrt(eps0 lam))`` and ``k_max = 4 lam``.

    Raises
    ------
    FrameParameterError
        Naming the violated constraint.
    """
    lam = float(lam)
    eps0 = float(eps0)
    if not lam >= 64:
        raise FrameParameterError(f"lambda >= 64 violated: lambda={lam:g}")
    if not 0 < eps0 <= 0.25:
        raise FrameParameterError(f"eps0 in (0, 1/4] violated: eps0={eps0:g}")
    if not eps0 * lam >= 16:
        raise FrameParameterError(
            f"eps0*lambda >= 16 violated: eps0*lambda={eps0 * lam:g}")
    theta = math.sqrt(eps0 / lam)
    dir_count = math.ceil(2.0 * math.pi / theta)
    if j_max is None:
        j_max = int(math.floor(4.0 * math.sqrt(eps0 * lam) + 1e-9))
    if k_max is None:
        k_max = int(round(4 * lam))
    return FrameParams(lam, eps0, theta, dir_count, float(c_small), int(j_max), int(k_max))


@dataclass(frozen=True)
class PacketIndex:
    """Packet label (j, k, l); ``l`` indexes the direction grid."""

    j: int
    k: int
    l: int = 0

    def validate(self, params):
        if not 0 <= self.l < params.dir_count:
            raise ValueError(f"direction index l={self.l} outside [0, {params.dir_count})")
        if abs(self.j) > params.j_max or abs(self.k) > params.k_max:
            raise ValueError(f"index (j={self.j}, k={self.k}) outside the window")
        return self


@dataclass(frozen=True)
class SpacetimePoint:
    """A point (t, x) with x in the plane."""

    t: float
    x: tuple = (0.0, 0.0)

    @property
    def x1(self):
        return float(self.x[0])

    @property
    def x2(self):
        return float(self.x[1])

    @property
    def radius(self):
        return math.hypot(self.x1, self.x2)


def psi(x):
    """Unit-mass mollifier ``c exp(-1/(1-|x|^2))`` on the unit disk.

    ``x`` is an array whose last axis has length 2.
    """
    r2 = np.sum(np.asarray(x, dtype=float) ** 2, axis=-1)
    out = np.zeros_like(r2)
    inside = r2 < 1.0
    out[inside] = PSI_CONST * np.exp(-1.0 / (1.0 - r2[inside]))
    return out


def w0(s):
    """Transverse bump ``exp(-s^2/(1-s^2))`` on (-1, 1), with w0(0) = 1."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    out[inside] = np.exp(-s[inside] ** 2 / (1.0 - s[inside] ** 2))
    return out


def _psi_constant():
    mass, _ = integrate.quad(lambda r: 2.0 * math.pi * r * math.exp(-1.0 / (1.0 - r * r)),
                             0.0, 1.0, epsabs=1e-15, epsrel=1e-13)
    return 1.0 / mass


PSI_CONST = _psi_constant()


@dataclass(frozen=True)
class BumpProfiles:
    """The fixed bump pair (psi, w0) and the packet normalization.

    ``norm_const`` makes the sup of a single packet equal to one; it is the
    reciprocal of the largest raw profile value along the tube's centre line
    (``a = 0``), found on a dense grid.
    """

    lam: float
    delta: float
    nq: int = DEFAULT_NQ
    cpsi: float = PSI_CONST
    norm_const: float = field(default=1.0)

    def raw(self, a, s):
        """Unnormalized profile at frame coordinates (a, s)."""
        return _kernels.profile_raw(float(a), float(s), self.lam, self.delta, self.nq, self.cpsi)

    def value(self, a, s):
        return self.norm_const * self.raw(a, s)


def make_profiles(params, nq=DEFAULT_NQ, n_line=2001):
    """Profiles for a frame, with ``norm_const`` from a centre-line scan."""
    base = BumpProfiles(params.lam, params.delta, int(nq), PSI_CONST, 1.0)
    half = params.delta + 1.0 / params.lam
    line = np.linspace(-half, half, n_line)
    peak = max(base.raw(0.0, s) for s in line)
    return BumpProfiles(params.lam, params.delta, int(nq), PSI_CONST, 1.0 / peak)


def frame_coordinates(params, idx, p):
    """Packet-frame coordinates (a, s) of point p for packet idx."""
    c = params.cos_l[idx.l]
    s_ = params.sin_l[idx.l]
    x_w = p.x1 * c + p.x2 * s_
    x_perp = -p.x1 * s_ + p.x2 * c
    return x_w - p.t - idx.k / params.lam, x_perp - idx.j * params.delta


def tube_contains(params, idx, p):
    """Closed membership test for the tube ``T_{j,k,w}``."""
    a, s = frame_coordinates(params, idx, p)
    return bool(abs(a) <= 1.0 / params.lam and abs(s) <= params.delta and abs(p.t) <= 2.0)


def enlarged_tube_contains(params, idx, p):
    """Membership in the closure of the packet support.

    The support is the tube widened by ``1/lam`` transversely (the mollifier
    radius); longitudinally it already has half-width ``1/lam``.
    """
    a, s = frame_coordinates(params, idx, p)
    inv = 1.0 / params.lam
    return bool(abs(a) <= inv and abs(s) <= params.delta + inv and abs(p.t) <= 2.0)


def packet_eval(params, profiles, idx, p):
    """Value of the single packet ``chi_{j,k,w_l}`` at p (zero for |t| > 2)."""
    if abs(p.t) > 2.0:
        return 0.0
    a, s = frame_coordinates(params, idx, p)
    return profiles.norm_const * _kernels.profile_raw(
        a, s, params.lam, params.delta, profiles.nq, profiles.cpsi)


def _kernel_args(params, profiles):
    return (params.lam, params.delta, params.cos_l, params.sin_l,
            profiles.nq, profiles.cpsi, profiles.norm_const)


def radial_packet_eval(params, profiles, j, k, p):
    """Radial packet ``chi_{j,k} = sum_l chi_{j,k,w_l}`` at p.

    Directions whose support misses p are skipped before any quadrature.
    """
    out = _kernels.radial_sum(np.array([float(p.t)]), np.array([p.x1]), np.array([p.x2]),
                              int(j), int(k), *_kernel_args(params, profiles))
    return float(out[0])


def radial_packet_grid(params, profiles, j, k, t, xs, ys):
    """Vectorized radial packet values at points (t, xs[i], ys[i])."""
    xs = np.ascontiguousarray(xs, dtype=float).ravel()
    ys = np.ascontiguousarray(ys, dtype=float).ravel()
    ts = np.broadcast_to(np.asarray(t, dtype=float), xs.shape).copy()
    return _kernels.radial_sum(ts, xs, ys, int(j), int(k), *_kernel_args(params, profiles))


def directional_terms(params, profiles, j, k, p):
    """Every term ``chi_{j,k,w_l}(p)`` of the radial sum, without pruning."""
    return _kernels.directional_values(float(p.t), p.x1, p.x2, int(j), int(k),
                                       *_kernel_args(params, profiles))
