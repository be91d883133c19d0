"""Index classes, tube-overlap counts, angular sets and rotation scans.

Counting uses the closed support proxy of :func:`frame.enlarged_tube_contains`:
a packet ``chi_{j,k,w}`` is "nonzero at P" when ``|a| <= 1/lam`` and
``|s| <= delta + 1/lam`` in its frame. The two conditions separate, the first
involving only k and the second only j, so for each direction the admissible
indices form a rectangle of at most 3 x (few) integers and every count below
is an exact enumeration over directions of such rectangles.
"""

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .frame import SpacetimePoint
from .harness.fitting import loglog_fit
from .harness.report import ScalingReport

A1, A2, A3 = "A1", "A2", "A3"
TAGS = (A1, A2, A3)
TAG_CODE = {A1: 0, A2: 1, A3: 2}

#: Default explicit constant replacing the implicit constants of the regimes.
C0_DEFAULT = 4.0

OVERLAP_COLUMNS = ["lambda", "eps0", "t", "m", "N1", "N2", "N3", "Nlambda", "equation"]


@dataclass(frozen=True)
class IndexThresholds:
    """Concrete cut points for ``q(j,k) = j^2/(eps0 lam) + k^2/lam^2``.

    ``A1``: ``q >= q_hi``, or ``q_lo <= q < q_hi`` with ``|j| < j_thr``.
    ``A2``: ``q < q_hi`` with ``|j| >= j_thr``.
    ``A3``: ``q < q_lo`` with ``|j| < j_thr``.
    """

    q_hi: float = 4.0
    q_lo: float = 1.0 / 16.0
    j_thr: int = 8

    def __post_init__(self):
        if not self.q_hi > self.q_lo > 0:
            raise ValueError("thresholds need q_hi > q_lo > 0")


@dataclass(frozen=True)
class IndexClass:
    tag: str
    thresholds: IndexThresholds


def index_q(params, j, k):
    return np.asarray(j, dtype=float) ** 2 / (params.eps0 * params.lam) + \
        np.asarray(k, dtype=float) ** 2 / params.lam ** 2


def class_codes(params, thresholds, j, k):
    """Vectorized class codes (0 for A1, 1 for A2, 2 for A3)."""
    q = index_q(params, j, k)
    big_j = np.abs(np.asarray(j)) >= thresholds.j_thr
    code = np.zeros(np.broadcast(q, big_j).shape, dtype=np.int64)
    code = np.where(big_j & (q < thresholds.q_hi), 1, code)
    code = np.where(~big_j & (q < thresholds.q_lo), 2, code)
    return code


def classify_index(params, thresholds, j, k):
    """Class tag of a single index (j, k); every index gets exactly one."""
    return TAGS[int(class_codes(params, thresholds, j, k))]


def class_table(params, thresholds=None):
    """Class codes over the whole index window, shape (2 j_max + 1, 2 k_max + 1)."""
    thresholds = thresholds or IndexThresholds()
    jj, kk = np.meshgrid(np.arange(-params.j_max, params.j_max + 1),
                         np.arange(-params.k_max, params.k_max + 1), indexing="ij")
    return class_codes(params, thresholds, jj, kk)


@dataclass(frozen=True)
class OverlapQuery:
    """A pair of spacetime points, ordered so that ``t >= 0``."""

    p1: SpacetimePoint
    p2: SpacetimePoint

    @classmethod
    def ordered(cls, p1, p2):
        return cls(p1, p2) if p2.t >= p1.t else cls(p2, p1)

    @property
    def t(self):
        return self.p2.t - self.p1.t

    @property
    def dx(self):
        return np.array([self.p2.x1 - self.p1.x1, self.p2.x2 - self.p1.x2])

    @property
    def m(self):
        """``|x2 - x1| - t``, the maximum over w of ``(x2 - x1).w - t``."""
        return float(np.hypot(*self.dx)) - self.t


def _index_ranges(params, p):
    """Per-direction integer ranges [k_lo, k_hi], [j_lo, j_hi] meeting p.

    Empty ranges have lo > hi; a point with |t| > 2 meets nothing.
    """
    inv = 1.0 / params.lam
    xo = p.x1 * params.cos_l + p.x2 * params.sin_l
    xp = -p.x1 * params.sin_l + p.x2 * params.cos_l
    u = params.lam * (xo - p.t)
    k_lo = np.ceil(u - 1.0).astype(np.int64)
    k_hi = np.floor(u + 1.0).astype(np.int64)
    half = params.delta + inv
    j_lo = np.ceil((xp - half) / params.delta).astype(np.int64)
    j_hi = np.floor((xp + half) / params.delta).astype(np.int64)
    # the floor/ceil bounds can be one off at exact ties; trim by the
    # defining inequalities so that counts agree with the membership test
    k_lo = np.where(np.abs(xo - p.t - k_lo * inv) > inv, k_lo + 1, k_lo)
    k_hi = np.where(np.abs(xo - p.t - k_hi * inv) > inv, k_hi - 1, k_hi)
    j_lo = np.where(np.abs(xp - j_lo * params.delta) > half, j_lo + 1, j_lo)
    j_hi = np.where(np.abs(xp - j_hi * params.delta) > half, j_hi - 1, j_hi)
    k_lo = np.maximum(k_lo, -params.k_max)
    k_hi = np.minimum(k_hi, params.k_max)
    j_lo = np.maximum(j_lo, -params.j_max)
    j_hi = np.minimum(j_hi, params.j_max)
    if abs(p.t) > 2.0:
        k_hi = k_lo - 1
    return k_lo, k_hi, j_lo, j_hi


def n_lambda(params, profiles, query):
    """Number of packets ``(j, k, w)`` whose supports contain both points.

    ``profiles`` is accepted for interface symmetry; supports do not depend on
    the quadrature.
    """
    a = _index_ranges(params, query.p1)
    b = _index_ranges(params, query.p2)
    nk = np.minimum(a[1], b[1]) - np.maximum(a[0], b[0]) + 1
    nj = np.minimum(a[3], b[3]) - np.maximum(a[2], b[2]) + 1
    return int(np.sum(np.clip(nk, 0, None) * np.clip(nj, 0, None)))


def support_keys(params, p):
    """Sorted unique keys of the (j, k) with ``chi_{j,k}(p) != 0``.

    The key of (j, k) is ``(j + j_max) * (2 k_max + 1) + (k + k_max)``.
    """
    k_lo, k_hi, j_lo, j_hi = _index_ranges(params, p)
    width = 2 * params.k_max + 1
    nk = np.clip(k_hi - k_lo + 1, 0, None)
    nj = np.clip(j_hi - j_lo + 1, 0, None)
    if not np.any(nk * nj):
        return np.zeros(0, dtype=np.int64)
    chunks = []
    for dk in range(int(nk.max())):
        for dj in range(int(nj.max())):
            ok = (dk < nk) & (dj < nj)
            if np.any(ok):
                jj = j_lo[ok] + dj
                kk = k_lo[ok] + dk
                chunks.append((jj + params.j_max) * width + (kk + params.k_max))
    return np.unique(np.concatenate(chunks))


def common_indices(params, query):
    """(j, k) arrays of radial packets nonzero at both points."""
    keys = np.intersect1d(support_keys(params, query.p1), support_keys(params, query.p2),
                          assume_unique=True)
    width = 2 * params.k_max + 1
    return keys // width - params.j_max, keys % width - params.k_max


def class_counts(params, query, thresholds=None):
    """Counts ``(N1, N2, N3)`` of common radial-packet indices per class."""
    thresholds = thresholds or IndexThresholds()
    j, k = common_indices(params, query)
    codes = class_codes(params, thresholds, j, k)
    return tuple(int(np.count_nonzero(codes == c)) for c in range(3))


def count_class(params, profiles, query, tag, thresholds=None):
    """``N_i``: common radial-packet indices of class ``tag``."""
    return class_counts(params, query, thresholds)[TAG_CODE[tag]]


@dataclass(frozen=True)
class ALambdaSet:
    """Grid directions compatible with both points, and their measure."""

    indices: np.ndarray
    measure: float
    alpha: np.ndarray
    t: float
    m: float
    c0: float


def a_lambda_set(params, query, c0=C0_DEFAULT):
    """Directions with ``|d.w - t| <= c0/lam`` and ``|d - t w| <= c0 delta``.

    Here ``d = x2 - x1`` and ``t = t2 - t1``.

    Raises
    ------
    ValueError
        If ``t < 1/lam``.
    """
    t = query.t
    if t < 1.0 / params.lam:
        raise ValueError(f"t = {t:g} below 1/lambda = {1.0 / params.lam:g}")
    d = query.dx
    proj = d[0] * params.cos_l + d[1] * params.sin_l
    dist = np.hypot(d[0] - t * params.cos_l, d[1] - t * params.sin_l)
    ok = (np.abs(proj - t) <= c0 / params.lam) & (dist <= c0 * params.delta)
    idx = np.flatnonzero(ok)
    norm = np.hypot(*d)
    alpha = d / norm if norm > 0 else np.array([1.0, 0.0])
    return ALambdaSet(idx, idx.size * params.angular_step, alpha, t, query.m, c0)


def angular_distances(params, aset):
    """``|w_l - alpha|`` for the directions of an :class:`ALambdaSet`."""
    w = params.directions[aset.indices]
    return np.hypot(w[:, 0] - aset.alpha[0], w[:, 1] - aset.alpha[1])


@dataclass(frozen=True)
class RotationScan:
    """Light-cone offsets ``m_k`` as P2 rotates by ``k theta`` about the origin.

    ``k1`` is the first step with ``m_k >= c/(eps0 lam t)``; ``k2`` the first
    with ``m_k >= max(-4/lam, m_0)``. Either is None when its target lies
    outside ``[m_0, m_kmax]``.
    """

    r1: float
    r2: float
    t: float
    theta: float
    m: np.ndarray
    k1: object
    k2: object
    target1: float
    target2: float

    @property
    def k_diff(self):
        if self.k1 is None or self.k2 is None:
            return None
        return self.k1 - self.k2

    def dm_dalpha(self, k):
        """``d m / d alpha_2 = r1 r2 sin(alpha_2) / r`` at ``alpha_2 = k theta``."""
        a = k * self.theta
        r = self.m[k] + self.t
        return self.r1 * self.r2 * math.sin(a) / r if r > 0 else 0.0


def rotation_offsets(r1, r2, t, angles):
    return np.sqrt((r2 - r1) ** 2 + 2.0 * r1 * r2 * (1.0 - np.cos(angles))) - t


def _first_at_least(m, target):
    if not m[0] <= target <= m[-1]:
        return None
    return int(np.searchsorted(m, target, side="left"))


def rotation_scan(params, r1, r2, t, c=None):
    """Scan ``m_k`` over ``k theta in [0, pi]`` and locate the two crossings.

    Raises
    ------
    ValueError
        Unless ``r2 >= r1 >= 0`` and ``t >= 0``.
    """
    if not (r2 >= r1 >= 0 and t >= 0):
        raise ValueError("rotation_scan needs r2 >= r1 >= 0 and t >= 0")
    c = params.c_small if c is None else c
    k_max = int(math.floor(math.pi / params.theta))
    ks = np.arange(k_max + 1)
    m = rotation_offsets(r1, r2, t, ks * params.theta)
    # the formula is monotone in exact arithmetic; remove roundoff wiggles
    m = np.maximum.accumulate(m)
    target1 = c / (params.eps0 * params.lam * t) if t > 0 else math.inf
    target2 = max(-4.0 / params.lam, float(m[0]))
    return RotationScan(float(r1), float(r2), float(t), params.theta, m,
                        _first_at_least(m, target1), _first_at_least(m, target2),
                        target1, target2)


def light_cone_sampler(params, rng, n):
    """Pairs near the light cone with ``t`` log-uniform in ``[1/lam, 2]``.

    P1 sits at time ``t1`` uniform in ``[-2, 2 - t]`` and radius ``r1`` uniform in
    ``[0, 2]``; P2 lies on the same ray at radius ``r1 + t + m`` with ``m``
    uniform in ``[-4/lam, delta]``. The common angle is uniform.
    """
    lo = 1.0 / params.lam
    ts = np.exp(rng.uniform(math.log(lo), math.log(2.0), n))
    out = []
    for t in ts:
        t1 = rng.uniform(-2.0, 2.0 - t)
        r1 = rng.uniform(0.0, 2.0)
        m = rng.uniform(-4.0 / params.lam, params.delta)
        phi = rng.uniform(0.0, 2.0 * math.pi)
        e = (math.cos(phi), math.sin(phi))
        r2 = max(r1 + t + m, 0.0)
        p1 = SpacetimePoint(t1, (r1 * e[0], r1 * e[1]))
        p2 = SpacetimePoint(t1 + t, (r2 * e[0], r2 * e[1]))
        out.append(OverlapQuery(p1, p2))
    return out


@dataclass
class OverlapCell:
    lam: float
    eps0: float
    t: np.ndarray
    m: np.ndarray
    counts: np.ndarray = field(repr=False)
    n_lambda: np.ndarray = field(repr=False)


def measure_cell(params, queries, thresholds=None):
    """Counts for every query of one (lam, eps0) cell."""
    thresholds = thresholds or IndexThresholds()
    counts = np.array([class_counts(params, q, thresholds) for q in queries], dtype=np.int64)
    nl = np.array([n_lambda(params, None, q) for q in queries], dtype=np.int64)
    return OverlapCell(params.lam, params.eps0, np.array([q.t for q in queries]),
                       np.array([q.m for q in queries]), counts.reshape(-1, 3), nl)


def binned_max(t, values, lo, hi, n_bins):
    """Per-bin maxima of ``values`` over log-spaced bins of ``t``.

    Returns bin centres and maxima for bins holding a positive maximum.
    """
    edges = np.exp(np.linspace(math.log(lo), math.log(hi), n_bins + 1))
    centres = np.sqrt(edges[:-1] * edges[1:])
    which = np.clip(np.searchsorted(edges, t, side="right") - 1, 0, n_bins - 1)
    maxima = np.zeros(n_bins)
    np.maximum.at(maxima, which, values)
    keep = maxima > 0
    return centres[keep], maxima[keep]


def overlap_scaling_experiment(params_list, point_sampler=light_cone_sampler, seed=0,
                               n_pairs=1000, thresholds=None, n_bins=8, map_fn=map):
    """Sample pairs per cell, count overlaps and fit the t-dependence.

    Parameters
    ----------
    params_list : sequence of FrameParams
    point_sampler : callable(params, rng, n) -> list of OverlapQuery
    seed : int
        Each cell draws from ``default_rng([seed, cell_index])``.
    n_pairs : int
        Pairs per cell.
    thresholds : IndexThresholds, optional
    n_bins : int
        Log-spaced t bins for the per-bin maxima that are fitted.
    map_fn : callable
        ``map``-like function used to evaluate cells (e.g. a pool's map).

    Returns
    -------
    ScalingReport
        One row per pair. ``summary`` holds per-cell maxima of
        ``N1 eps0^{3/2} t^{1/2}`` and ``N2 eps0 t``; ``fits`` holds the slope of
        the per-bin max ``N_i`` against t for each cell, plus a pooled fit of
        the normalized maxima against eps0.
    """
    if not params_list:
        raise ValueError("empty parameter grid")
    thresholds = thresholds or IndexThresholds()
    jobs = []
    for i, params in enumerate(params_list):
        rng = np.random.default_rng([seed, i])
        queries = point_sampler(params, rng, n_pairs)
        if not queries:
            raise ValueError("point sampler returned no pairs")
        jobs.append((params, queries))
    cells = list(map_fn(_measure_job, [(p, q, thresholds) for p, q in jobs]))

    report = ScalingReport("overlap-scan", list(OVERLAP_COLUMNS))
    per_cell = []
    for (params, _), cell in zip(jobs, cells):
        for i in range(cell.t.size):
            report.add_row(**{"lambda": params.lam, "eps0": params.eps0, "t": float(cell.t[i]),
                              "m": float(cell.m[i]), "N1": int(cell.counts[i, 0]),
                              "N2": int(cell.counts[i, 1]), "N3": int(cell.counts[i, 2]),
                              "Nlambda": int(cell.n_lambda[i]), "equation": "overlap-count"})
        valid = cell.t >= 1.0 / params.lam
        t = cell.t[valid]
        n1 = cell.counts[valid, 0].astype(float)
        n2 = cell.counts[valid, 1].astype(float)
        stat1 = float(np.max(n1 * params.eps0 ** 1.5 * np.sqrt(t), initial=0.0))
        stat2 = float(np.max(n2 * params.eps0 * t, initial=0.0))
        key = f"lambda={params.lam:g},eps0={params.eps0:g}"
        entry = {"lambda": params.lam, "eps0": params.eps0, "max_N1_norm": stat1,
                 "max_N2_norm": stat2, "n_pairs": int(valid.sum())}
        for name, col in (("N1", n1), ("N2", n2)):
            centres, maxima = binned_max(t, col, 1.0 / params.lam, 2.0, n_bins)
            entry[f"bins_{name}"] = [[float(a), float(b)] for a, b in zip(centres, maxima)]
            if centres.size >= 3:
                report.fits[f"{key}:{name}_vs_t"] = loglog_fit(zip(centres, maxima))
        per_cell.append(entry)
    report.summary["cells"] = per_cell
    for name in ("max_N1_norm", "max_N2_norm"):
        vals = [c[name] for c in per_cell if c[name] > 0]
        report.summary[f"{name}_band"] = (max(vals) / min(vals)) if vals else 0.0
    report.provenance["thresholds"] = asdict(thresholds)
    report.provenance["support_proxy"] = "|a|<=1/lambda, |s|<=delta+1/lambda"
    return report


def _measure_job(job):
    params, queries, thresholds = job
    return measure_cell(params, queries, thresholds)
