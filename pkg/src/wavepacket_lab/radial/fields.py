"""Radial fields on a disk as Fourier-Bessel series.

A field on ``r <= R`` is ``f(r) = sum_n c_n J0(xi_n r)`` with
``xi_n = j_{0,n} / R``. The modes are orthogonal in ``L^2(disk)`` with
weights ``w_n = pi R^2 J1(j_{0,n})^2``, so

    ||f||_{H^s}^2 = sum_n (1 + xi_n^2)^s c_n^2 w_n.

Samples live on the collocation grid ``r_m = j_{0,m} R / j_{0,N+1}`` used by
the discrete Hankel transform; the sample-to-coefficient map is the exact
inverse of evaluation on that grid.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import linalg, special


def bessel_j0_zeros(count):
    """First ``count`` positive zeros of J0.

    McMahon's expansion as the starting guess, then Newton steps with
    ``J0' = -J1``; scipy's ``jn_zeros`` is far slower for thousands of zeros.
    """
    n = np.arange(1, count + 1, dtype=float)
    beta = (n - 0.25) * math.pi
    x = beta + 1.0 / (8.0 * beta) - 31.0 / (384.0 * beta ** 3)
    for _ in range(4):
        x = x + special.j0(x) / special.j1(x)
    return x


@dataclass(frozen=True, eq=False)
class FourierBesselBasis:
    """First ``N`` Dirichlet Bessel modes on the disk of radius ``R``."""

    R: float = 8.0
    N: int = 2048

    @cached_property
    def zeros(self):
        return bessel_j0_zeros(self.N + 1)

    @cached_property
    def xi(self):
        return self.zeros[:-1] / self.R

    @cached_property
    def weights(self):
        return math.pi * self.R ** 2 * special.j1(self.zeros[:-1]) ** 2

    @cached_property
    def nodes(self):
        """Collocation radii ``j_{0,m} R / j_{0,N+1}``."""
        return self.zeros[:-1] * self.R / self.zeros[-1]

    @cached_property
    def _eval_matrix(self):
        return special.j0(np.outer(self.nodes, self.xi))

    @cached_property
    def _lu(self):
        return linalg.lu_factor(self._eval_matrix)

    @cached_property
    def _quadrature(self):
        n = 4 * self.N + 64
        x, w = special.roots_legendre(n)
        r = 0.5 * self.R * (x + 1.0)
        return r, 0.5 * self.R * w

    def evaluate(self, coeffs, r=None):
        """Field values at radii r (default: the collocation nodes).

        ``coeffs`` may carry leading batch axes.
        """
        if r is None:
            return coeffs @ self._eval_matrix.T
        r = np.asarray(r, dtype=float)
        return coeffs @ special.j0(np.outer(r, self.xi)).T

    def evaluate_dr(self, coeffs, r=None):
        """Radial derivative via ``J0' = -J1``."""
        r = self.nodes if r is None else np.asarray(r, dtype=float)
        return -(coeffs * self.xi) @ special.j1(np.outer(r, self.xi)).T

    def from_samples(self, samples):
        """Coefficients interpolating samples on the collocation nodes."""
        samples = np.asarray(samples, dtype=float)
        if samples.ndim == 1:
            return linalg.lu_solve(self._lu, samples)
        return linalg.lu_solve(self._lu, samples.T).T

    def project(self, func):
        """L^2 projection of a callable ``func(r)`` onto the basis."""
        r, w = self._quadrature
        g = np.asarray(func(r), dtype=float) * w * r
        inner = np.empty(self.N)
        for start in range(0, self.N, 256):
            sl = slice(start, start + 256)
            inner[sl] = special.j0(np.outer(self.xi[sl], r)) @ g
        return 2.0 * math.pi * inner / self.weights

    def delta_coefficients(self):
        """Coefficients of the Dirac mass at the origin (divergent series)."""
        return 1.0 / self.weights


@dataclass(eq=False)
class RadialField:
    """A radial function stored by its Fourier-Bessel coefficients."""

    basis: FourierBesselBasis
    coeffs: np.ndarray
    _samples: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (self.basis.N,):
            raise ValueError(f"expected {self.basis.N} coefficients, got {self.coeffs.shape}")

    @classmethod
    def zeros(cls, basis):
        return cls(basis, np.zeros(basis.N))

    @classmethod
    def from_function(cls, basis, func):
        return cls(basis, basis.project(func))

    @classmethod
    def from_samples(cls, basis, samples):
        return cls(basis, basis.from_samples(samples))

    @property
    def samples(self):
        if self._samples is None:
            self._samples = self.basis.evaluate(self.coeffs)
        return self._samples

    def __call__(self, r):
        return self.basis.evaluate(self.coeffs, r)

    def dr(self, r=None):
        return self.basis.evaluate_dr(self.coeffs, r)

    def __add__(self, other):
        return RadialField(self.basis, self.coeffs + other.coeffs)

    def __sub__(self, other):
        return RadialField(self.basis, self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return RadialField(self.basis, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def l2_norm(self):
        return hs_norm(self, 0.0)


def hs_norm_coeffs(basis, coeffs, s):
    """H^s norm for coefficient arrays; leading axes are batch axes."""
    if not -2.0 <= s <= 4.0:
        raise ValueError(f"Sobolev order s={s:g} outside [-2, 4]")
    weight = (1.0 + basis.xi ** 2) ** s * basis.weights
    return np.sqrt(np.sum(weight * np.square(coeffs), axis=-1))


def hs_norm(f, s):
    """``(sum_n (1 + xi_n^2)^s c_n^2 w_n)^(1/2)`` for ``s`` in ``[-2, 4]``."""
    return float(hs_norm_coeffs(f.basis, f.coeffs, s))


def grad_hs_norm_coeffs(basis, coeffs, s):
    """H^s norm of the gradient, ``(sum (1 + xi^2)^s xi^2 c^2 w)^(1/2)``."""
    return hs_norm_coeffs(basis, coeffs * basis.xi, s)


def smooth_step(x):
    """C-infinity step: 1 for ``x <= 1``, 0 for ``x >= 2``."""
    x = np.asarray(x, dtype=float)
    y = np.clip(2.0 - x, 0.0, 1.0)

    def bump(z):
        out = np.zeros_like(z)
        pos = z > 0
        out[pos] = np.exp(-1.0 / z[pos])
        return out

    a, b = bump(y), bump(1.0 - y)
    return a / (a + b)


def lp_multiplier(xi, band):
    """Littlewood-Paley multiplier.

    A scalar ``lam`` gives the dyadic piece ``phi(xi/lam) - phi(2 xi/lam)``,
    supported in ``[lam/2, 2 lam]``; these pieces sum to one over dyadic lam.
    A pair ``(lo, hi)`` gives ``phi(xi/hi) - phi(2 xi/lo)``, equal to one on
    ``[lo, hi]`` and supported in ``[lo/2, 2 hi]``.
    """
    xi = np.asarray(xi, dtype=float)
    if np.ndim(band) == 0:
        lo = hi = float(band)
    else:
        lo, hi = (float(v) for v in band)
    if not 0 < lo <= hi:
        raise ValueError("band needs 0 < lo <= hi")
    return smooth_step(xi / hi) - smooth_step(2.0 * xi / lo)


def low_multiplier(xi, lam):
    """``S_{<lam}``: ``phi(xi/lam)``, one below lam and zero above 2 lam."""
    return smooth_step(np.asarray(xi, dtype=float) / lam)


def lp_project(f, band):
    """Apply the Littlewood-Paley multiplier of :func:`lp_multiplier`."""
    return RadialField(f.basis, f.coeffs * lp_multiplier(f.basis.xi, band))


def band_bump(basis, lam):
    """``S_lam`` applied to the Dirac mass: a radial bump at frequency lam."""
    return RadialField(basis, basis.delta_coefficients() * lp_multiplier(basis.xi, lam))


def gaussian_field(basis, width=0.5, amplitude=1.0):
    return RadialField.from_function(basis, lambda r: amplitude * np.exp(-(r / width) ** 2))
