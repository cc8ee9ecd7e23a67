"""Resolved scale ranges and geometric grids.

Every sup-over-scale functional in the library is evaluated on a finite
geometric grid inside a resolved window tied to the mesh scale and the
diameter: outside that window a finite graph no longer approximates a
continuum and the sup degenerates.
"""
from __future__ import annotations

import numpy as np

POINTS_PER_DECADE = 32


def geometric_grid(lo: float, hi: float, points_per_decade: int = POINTS_PER_DECADE) -> np.ndarray:
    """Geometric grid on [lo, hi] with roughly the requested log density."""
    if not (0 < lo <= hi):
        raise ValueError(f"invalid grid bounds [{lo}, {hi}]")
    if lo == hi:
        return np.array([lo])
    decades = np.log10(hi / lo)
    npts = max(2, int(np.ceil(decades * points_per_decade)) + 1)
    return np.geomspace(lo, hi, npts)


def resolved_time_range(h: float, diameter: float) -> tuple[float, float]:
    """Times over which heat-semigroup functionals are evaluated: [h^2, (diam/2)^2]."""
    return h * h, (diameter / 2.0) ** 2


def resolved_radius_range(h: float, diameter: float) -> tuple[float, float]:
    """Radii over which ball-based functionals are evaluated: [2h, diam/4]."""
    return 2.0 * h, diameter / 4.0


def resolved_time_grid(h: float, diameter: float, points_per_decade: int = POINTS_PER_DECADE) -> np.ndarray:
    lo, hi = resolved_time_range(h, diameter)
    return geometric_grid(lo, max(lo, hi), points_per_decade)


def resolved_radius_grid(h: float, diameter: float, points_per_decade: int = POINTS_PER_DECADE) -> np.ndarray:
    lo, hi = resolved_radius_range(h, diameter)
    return geometric_grid(lo, max(lo, hi), points_per_decade)


def log_slope(scales: np.ndarray, values: np.ndarray) -> tuple[float, float]:
    """Least-squares slope and residual of log(values) against log(scales).

    Nonpositive values are dropped; returns (nan, nan) when fewer than two
    usable points remain.
    """
    scales = np.asarray(scales, dtype=float)
    values = np.asarray(values, dtype=float)
    keep = (scales > 0) & (values > 0)
    if keep.sum() < 2:
        return float("nan"), float("nan")
    x = np.log(scales[keep])
    y = np.log(values[keep])
    A = np.column_stack([x, np.ones_like(x)])
    coef, res, _, _ = np.linalg.lstsq(A, y, rcond=None)
    residual = float(np.sqrt(res[0] / len(y))) if len(res) else 0.0
    return float(coef[0]), residual
