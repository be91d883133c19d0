"""Superpositions of radial packets: the discrete j = 0 model and the true
L^2_t L^inf_x norm of ``sum a_{jk} chi_{jk}``.

The model replaces ``chi_{0,k}`` by its envelope profile

    f_k(t, m) = <m>^-1/2 <m + 1 - |k + t lam|>^-1/2 H(m + 1 - |k + t lam|)

with ``m = lam |x|`` and measures ``||sum_k a_k f_k||`` with the sup over an
integer m-grid and a Riemann sum over time intervals of length 1/lam.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .frame import make_profiles
from .overlap import IndexThresholds, class_table

DISPERSIVE_COLUMNS = ["lambda", "eps0", "ensemble", "seed", "norm", "rhs", "ratio",
                      "equation", "resolution_error"]
MODEL_COLUMNS = ["lambda", "ensemble", "seed", "norm", "rhs", "ratio", "equation",
                 "resolution_error"]

#: Class right-hand sides as (eps0 exponent, ln(lambda) exponent).
CLASS_RHS = {"full": (-1.75, 1.5), "A1": (-1.75, 0.5), "A2": (-0.5, 1.5), "A3": (-0.5, 1.0)}


def jbracket(x):
    return np.sqrt(1.0 + np.square(x))


def f_k_eval(k, t, m, lam):
    """Model profile ``f_k(t, m)``; broadcasts over array arguments."""
    arg = np.asarray(m, dtype=float) + 1.0 - np.abs(np.asarray(k, dtype=float) + np.asarray(t) * lam)
    val = jbracket(m) ** -0.5 * jbracket(arg) ** -0.5
    return np.where(arg >= 0, val, 0.0)


def split_fk(k, t, m, lam):
    """Split ``f_k = f0 + f1 + fm1`` by the sign and size of ``k + t lam``.

    ``f1 = f H(k + t lam - 2)``, ``fm1 = f H(-(k + t lam) - 2)`` and ``f0`` is
    the rest, supported where ``|k + t lam| < 2``.
    """
    f = f_k_eval(k, t, m, lam)
    kappa = np.asarray(k, dtype=float) + np.asarray(t) * lam
    f1 = np.where(kappa - 2.0 >= 0, f, 0.0)
    fm1 = np.where(-kappa - 2.0 >= 0, f, 0.0)
    f0 = np.where((kappa - 2.0 < 0) & (-kappa - 2.0 < 0), f, 0.0)
    return f0, f1, fm1


@dataclass(frozen=True)
class DiscreteModelGrid:
    """Intervals ``I_i = [i/lam, (i+1)/lam)`` for ``-2 lam <= i < 2 lam`` and an
    integer m-grid on ``[0, 4 lam]``; ``stride`` coarsens both by that factor."""

    lam: int
    stride: int = 1

    @property
    def times(self):
        s = self.stride
        starts = np.arange(-2 * self.lam, 2 * self.lam, s)
        return (starts + 0.5 * s) / self.lam

    @property
    def weight(self):
        return self.stride / self.lam

    @property
    def m_values(self):
        return np.arange(0, 4 * self.lam + 1, self.stride, dtype=float)

    def coarse(self):
        return DiscreteModelGrid(self.lam, 2 * self.stride)


def _as_model_batch(a, lam):
    a = np.asarray(a, dtype=float)
    single = a.ndim == 1
    a2 = a[None, :] if single else a
    if a2.shape[-1] != 2 * lam + 1:
        raise ValueError(f"coefficients must be indexed by |k| <= lambda ({2 * lam + 1} entries), "
                         f"got {a2.shape[-1]}")
    return a2, single


def superposed_model_norm(a, lam, grid=None):
    """``||sum_k a_k f_k||`` on the model grid.

    Parameters
    ----------
    a : array, shape (2 lam + 1,) or (S, 2 lam + 1)
        Coefficients for ``k = -lam .. lam``; a 2-D array is a batch.
    lam : int
    grid : DiscreteModelGrid, optional

    Returns
    -------
    float or ndarray of shape (S,)
    """
    lam = int(lam)
    grid = grid or DiscreteModelGrid(lam)
    a2, single = _as_model_batch(a, lam)
    ks = np.arange(-lam, lam + 1, dtype=float)
    m = grid.m_values
    total = np.zeros(a2.shape[0])
    for t in grid.times:
        # columns are f_k(t, m) over the m-grid
        fk = f_k_eval(ks[:, None], t, m[None, :], lam)
        sup = np.max(np.abs(a2 @ fk), axis=1)
        total += grid.weight * sup ** 2
    out = np.sqrt(total)
    return float(out[0]) if single else out


def model_rhs(a, lam):
    a2, single = _as_model_batch(a, lam)
    rhs = lam ** -0.5 * math.log(lam) * np.sqrt(np.sum(a2 ** 2, axis=1))
    return float(rhs[0]) if single else rhs


def reduceA3_check(a, lam, grid=None):
    """``superposed_model_norm / (lam^-1/2 ln(lam) ||a||)``.

    Raises
    ------
    ValueError
        For a zero coefficient vector.
    """
    rhs = model_rhs(a, lam)
    if np.any(np.asarray(rhs) == 0):
        raise ValueError("zero coefficient vector: ratio undefined")
    return superposed_model_norm(a, lam, grid) / rhs


def model_ratio_with_error(a, lam):
    """Ratios at full and half resolution; the error estimate is their gap."""
    grid = DiscreteModelGrid(int(lam))
    full = reduceA3_check(a, lam, grid)
    half = reduceA3_check(a, lam, grid.coarse())
    return full, np.abs(np.asarray(full) - np.asarray(half))


def gaussian_model_coefficients(lam, seed, count=1):
    """``count`` standard Gaussian vectors over ``|k| <= lam``."""
    rng = np.random.default_rng(seed)
    return rng.standard_normal((count, 2 * int(lam) + 1))


def single_index_coefficients(lam, k0=0):
    a = np.zeros(2 * int(lam) + 1)
    a[int(k0) + int(lam)] = 1.0
    return a


def extremal_model_coefficients(lam, shift=None):
    """``a_k = (k + shift)^-1/2`` where ``k + shift >= 1``, else 0.

    The default shift ``lam + 1`` makes every index active.
    """
    lam = int(lam)
    shift = lam + 1 if shift is None else int(shift)
    ks = np.arange(-lam, lam + 1)
    n = ks + shift
    return np.where(n >= 1, 1.0 / np.sqrt(np.maximum(n, 1)), 0.0)


def slowly_varying_coefficients(lam, s=0.5):
    ks = np.arange(-int(lam), int(lam) + 1)
    return jbracket(ks) ** -s


# ------------------------------------------------------- true packet superposition

@dataclass(frozen=True)
class DispersiveGrid:
    """Spatial grid for the L^inf part of the dispersive norm.

    Radii ``0 .. r_max`` with step ``dr`` (default ``1/(4 lam)``) and
    ``n_angles`` angles per period ``2 pi / D``. Time slices are ``i/lam`` for
    ``|i| <= 2 lam`` with trapezoid weights. ``nq`` is the node count of the
    packet profile quadrature.
    """

    r_max: float = 4.0
    dr: float = None
    n_angles: int = 1
    nq: int = 32

    def step(self, params):
        return self.dr if self.dr is not None else 1.0 / (4.0 * params.lam)

    def angles(self, params):
        return params.angular_step * np.arange(self.n_angles) / self.n_angles

    def radii(self, params):
        h = self.step(params)
        return h * np.arange(int(math.floor(self.r_max / h + 1e-9)) + 1)


def check_dispersive_resolution(params, grid, points_per_wavelength=4):
    need = 1.0 / (points_per_wavelength * params.lam)
    if grid.step(params) > need * (1.0 + 1e-12):
        raise ValueError(f"grid too coarse: radial step {grid.step(params):g} exceeds required "
                         f"{need:g} ({points_per_wavelength} points per 1/lambda)")


def coefficient_shape(params):
    return (2 * params.j_max + 1, 2 * params.k_max + 1)


@dataclass
class DispersiveResult:
    """Norms of a batch of superpositions.

    ``norms[key]`` and ``half[key]`` have shape (S,) for key in
    ``full, A1, A2, A3``; ``half`` uses every other radius and time slice.
    ``coef_norms[key]`` are the l2 norms of the (restricted) coefficients.
    """

    norms: dict
    half: dict
    coef_norms: dict

    def error(self, key):
        return np.abs(self.norms[key] - self.half[key])


def _time_weights(n_shift, lam, stride=1):
    w = np.full(2 * n_shift + 1, 1.0 / lam)
    w[0] = w[-1] = 0.5 / lam
    if stride == 2:
        w = np.zeros(2 * n_shift + 1)
        w[::2] = 2.0 / lam
        w[0] = w[-1] = 1.0 / lam
    return w


def dispersive_batch(params, profiles, coefs, grid=None, thresholds=None):
    """L^2_t L^inf_x norms for a batch of coefficient arrays, full and by class.

    Parameters
    ----------
    params : FrameParams
    profiles : BumpProfiles or None
        If None, or if its node count differs from ``grid.nq``, profiles are
        rebuilt with ``grid.nq`` nodes (normalization included).
    coefs : array, shape (S, 2 j_max + 1, 2 k_max + 1) or a single array
    grid : DispersiveGrid, optional
    thresholds : IndexThresholds, optional

    Returns
    -------
    DispersiveResult
    """
    grid = grid or DispersiveGrid()
    check_dispersive_resolution(params, grid)
    coefs = np.asarray(coefs, dtype=float)
    if coefs.ndim == 2:
        coefs = coefs[None]
    if coefs.shape[1:] != coefficient_shape(params):
        raise ValueError(f"coefficients must have shape (S, {coefficient_shape(params)}), "
                         f"got {coefs.shape}")
    if profiles is None or profiles.nq != grid.nq:
        profiles = make_profiles(params, nq=grid.nq)
    thresholds = thresholds or IndexThresholds()
    cls = np.ascontiguousarray(class_table(params, thresholds), dtype=np.int64)
    n_shift = int(round(2 * params.lam))
    stacked = np.ascontiguousarray(np.moveaxis(coefs, 0, -1))
    sup = _kernels.superposition_sup(
        stacked, cls, -params.j_max, -params.k_max, grid.radii(params),
        grid.angles(params),
        n_shift, params.lam, params.delta, params.cos_l, params.sin_l,
        profiles.nq, profiles.cpsi, profiles.norm_const)
    w_full = _time_weights(n_shift, params.lam)
    w_half = _time_weights(n_shift, params.lam, 2)
    keys = ("full", "A1", "A2", "A3")
    norms, half, coef_norms = {}, {}, {}
    for slot, key in enumerate(keys):
        norms[key] = np.sqrt(np.einsum("t,ts->s", w_full, sup[0, slot] ** 2))
        half[key] = np.sqrt(np.einsum("t,ts->s", w_half, sup[1, slot] ** 2))
        if key == "full":
            coef_norms[key] = np.sqrt(np.sum(coefs ** 2, axis=(1, 2)))
        else:
            mask = cls == (slot - 1)
            coef_norms[key] = np.sqrt(np.sum(coefs ** 2 * mask, axis=(1, 2)))
    return DispersiveResult(norms, half, coef_norms)


def dispersive_norm(params, profiles, a, grid_spec=None):
    """``||sum a_{jk} chi_{jk}||_{L^2_t L^inf_x}`` over ``t in [-2, 2]``."""
    res = dispersive_batch(params, profiles, a, grid_spec)
    return float(res.norms["full"][0])


def dispersive_rhs(params, key, coef_norm):
    """``eps0^p (ln lam)^q ||a||`` with (p, q) from :data:`CLASS_RHS`."""
    p, q = CLASS_RHS[key]
    return params.eps0 ** p * math.log(params.lam) ** q * coef_norm


def classwise_dispersive(params, profiles, a, tag, grid_spec=None, thresholds=None):
    """Norm of ``a`` restricted to class ``tag`` over that class's right side.

    Raises
    ------
    ValueError
        If the restriction of ``a`` to the class is zero.
    """
    thresholds = thresholds or IndexThresholds()
    mask = class_table(params, thresholds) == {"A1": 0, "A2": 1, "A3": 2}[tag]
    restricted = np.where(mask, np.asarray(a, dtype=float), 0.0)
    res = dispersive_batch(params, profiles, restricted, grid_spec, thresholds)
    cn = float(res.coef_norms[tag][0])
    if cn == 0.0:
        raise ValueError(f"coefficients vanish on class {tag}")
    return float(res.norms[tag][0]) / dispersive_rhs(params, tag, cn)


def gaussian_coefficients(params, seed, count=1):
    """Standard Gaussian coefficient arrays over the index window."""
    rng = np.random.default_rng(seed)
    return rng.standard_normal((count,) + coefficient_shape(params))


def directional_l2(a, dir_count):
    """l2 norm over (j, k, w) of coefficients repeated across all directions."""
    a = np.asarray(a, dtype=float)
    return math.sqrt(float(np.sum(np.broadcast_to(a[..., None], a.shape + (dir_count,)) ** 2)))
