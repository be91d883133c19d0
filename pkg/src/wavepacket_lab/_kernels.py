"""Compiled inner loops for packet evaluation.

Everything here works on plain floats and arrays so that numba can compile it;
the public, typed API lives in :mod:`wavepacket_lab.frame` and
:mod:`wavepacket_lab.superposition`.

The single-packet profile is written in the packet's own frame. With
``a = x.w - t - k/lam`` and ``s = x.w_perp - j*delta`` the packet equals
``norm * profile_raw(a, s)`` where

    profile_raw(a, s) = lam^-1 * int psi_lam(a, u) w0((s - u)/delta) du.

The mollifier psi_lam has radius 1/lam, so the integral runs over
``|u| < sqrt(lam^-2 - a^2)``; substituting ``u = h v`` turns it into an
integral over ``v`` in (-1, 1) of a smooth, compactly supported integrand,
for which the trapezoid rule converges faster than any power of the step.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def profile_raw(a, s, lam, delta, nq, cpsi):
    big_h = 1.0 - (lam * a) * (lam * a)
    if big_h <= 0.0:
        return 0.0
    if abs(s) >= delta + 1.0 / lam:
        return 0.0
    h = math.sqrt(big_h) / lam
    step = 2.0 / nq
    total = 0.0
    for i in range(1, nq):
        v = -1.0 + i * step
        e = 1.0 - v * v
        z = (s - h * v) / delta
        if abs(z) < 1.0:
            total += math.exp(-1.0 / (big_h * e)) * math.exp(-z * z / (1.0 - z * z))
    return cpsi * math.sqrt(big_h) * total * step


@njit(cache=True)
def radial_sum(ts, xs, ys, j, k, lam, delta, cos_l, sin_l, nq, cpsi, norm):
    """Radial packet chi_{j,k} at many points, skipping directions whose
    support misses the point."""
    n = ts.shape[0]
    out = np.zeros(n)
    inv = 1.0 / lam
    for p in range(n):
        t = ts[p]
        if abs(t) > 2.0:
            continue
        acc = 0.0
        for l in range(cos_l.shape[0]):
            a = xs[p] * cos_l[l] + ys[p] * sin_l[l] - t - k * inv
            if abs(a) >= inv:
                continue
            s = -xs[p] * sin_l[l] + ys[p] * cos_l[l] - j * delta
            if abs(s) >= delta + inv:
                continue
            acc += profile_raw(a, s, lam, delta, nq, cpsi)
        out[p] = norm * acc
    return out


@njit(cache=True)
def directional_values(t, x, y, j, k, lam, delta, cos_l, sin_l, nq, cpsi, norm):
    """chi_{j,k,w_l}(t, x) for every direction, no pruning."""
    d = cos_l.shape[0]
    out = np.zeros(d)
    if abs(t) > 2.0:
        return out
    inv = 1.0 / lam
    for l in range(d):
        a = x * cos_l[l] + y * sin_l[l] - t - k * inv
        s = -x * sin_l[l] + y * cos_l[l] - j * delta
        out[l] = norm * profile_raw(a, s, lam, delta, nq, cpsi)
    return out


@njit(cache=True)
def superposition_sup(coef, cls, j_lo, k_lo, radii, phis, n_shift, lam, delta,
                      cos_l, sin_l, nq, cpsi, norm):
    """Per-time-slice sup over a polar grid of |sum_{j,k} a_{jk} chi_{j,k}|.

    Times are ``t_i = i/lam`` for ``i = -n_shift..n_shift``. Shift covariance
    (chi_{j,k}(t_i, x) = chi_{j,k+i}(0, x)) means each packet value computed at
    t = 0 serves every time slice through the coefficient ``a_{j,k-i}``, so the
    time loop is a plain multiply-add over a coefficient row.

    coef has shape (J, K, S) for S coefficient vectors; cls has shape (J, K)
    with class labels 0, 1, 2. Returns sups of shape (2, 4, nt, S). The first
    axis is resolution: 0 uses every radius, 1 only the even-indexed ones (a
    half-resolution rerun for free). Slot 0 of the second axis is the full
    sum, slots 1..3 the sums restricted to one class each.
    """
    n_j = coef.shape[0]
    n_k = coef.shape[1]
    n_vec = coef.shape[2]
    nt = 2 * n_shift + 1
    inv = 1.0 / lam
    sup = np.zeros((2, 4, nt, n_vec))
    acc = np.zeros((3, nt, n_vec))
    jspan = delta + inv
    for ir in range(radii.shape[0]):
        r = radii[ir]
        for ip in range(phis.shape[0]):
            x = r * math.cos(phis[ip])
            y = r * math.sin(phis[ip])
            acc[:, :, :] = 0.0
            for l in range(cos_l.shape[0]):
                xo = x * cos_l[l] + y * sin_l[l]
                xp = -x * sin_l[l] + y * cos_l[l]
                k_first = int(math.floor(lam * xo - 1.0))
                j_first = int(math.floor((xp - jspan) / delta))
                for kk in range(k_first, k_first + 3):
                    a = xo - kk * inv
                    if abs(a) >= inv:
                        continue
                    # slice i reads column kk - i; keep it inside [0, n_k)
                    it_hi = min(nt - 1, kk + n_shift - k_lo)
                    it_lo = max(0, kk + n_shift - k_lo - n_k + 1)
                    if it_lo > it_hi:
                        continue
                    for jj in range(j_first, j_first + 4):
                        jrow = jj - j_lo
                        if jrow < 0 or jrow >= n_j:
                            continue
                        sv = xp - jj * delta
                        if abs(sv) >= jspan:
                            continue
                        val = norm * profile_raw(a, sv, lam, delta, nq, cpsi)
                        if val == 0.0:
                            continue
                        for it in range(it_lo, it_hi + 1):
                            kcol = kk + n_shift - it - k_lo
                            c = cls[jrow, kcol]
                            for v in range(n_vec):
                                acc[c, it, v] += val * coef[jrow, kcol, v]
            n_res = 2 if ir % 2 == 0 else 1
            for it in range(nt):
                for v in range(n_vec):
                    s0 = abs(acc[0, it, v])
                    s1 = abs(acc[1, it, v])
                    s2 = abs(acc[2, it, v])
                    tot = abs(acc[0, it, v] + acc[1, it, v] + acc[2, it, v])
                    for res in range(n_res):
                        if tot > sup[res, 0, it, v]:
                            sup[res, 0, it, v] = tot
                        if s0 > sup[res, 1, it, v]:
                            sup[res, 1, it, v] = s0
                        if s1 > sup[res, 2, it, v]:
                            sup[res, 2, it, v] = s1
                        if s2 > sup[res, 3, it, v]:
                            sup[res, 3, it, v] = s2
    return sup
