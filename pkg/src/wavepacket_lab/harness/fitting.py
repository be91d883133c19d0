"""Least-squares exponent fits on log-log data."""

from dataclasses import asdict, dataclass

import numpy as np


@dataclass(frozen=True)
class FitResult:
    """Fit of ``ln y = slope * ln x + intercept``.

    ``residual`` is the root-mean-square misfit in ``ln y``.
    """

    slope: float
    intercept: float
    residual: float
    n_points: int

    def as_dict(self):
        return asdict(self)


def loglog_fit(points):
    """Least-squares line through ``(ln x, ln y)``.

    Parameters
    ----------
    points : iterable of (x, y)
        At least three pairs with ``x > 0`` and ``y > 0``.

    Returns
    -------
    FitResult

    Raises
    ------
    ValueError
        With fewer than three points or any non-positive coordinate.
    """
    arr = np.asarray(list(points), dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 3 or arr.shape[1] != 2:
        raise ValueError("loglog_fit needs at least 3 (x, y) points")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise ValueError("loglog_fit needs finite positive coordinates")
    lx = np.log(arr[:, 0])
    ly = np.log(arr[:, 1])
    design = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), *_ = np.linalg.lstsq(design, ly, rcond=None)
    resid = ly - (slope * lx + intercept)
    return FitResult(float(slope), float(intercept),
                     float(np.sqrt(np.mean(resid ** 2))), int(arr.shape[0]))
