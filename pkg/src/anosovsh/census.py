"""Orbit counts and their asymptotics.

Counts are exact Python integers; the two estimators fit ``log P_T`` against
``T`` (exponential rate, Bowen entropy) and against ``log T`` (polynomial
growth exponent) by least squares over the upper half of the grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import linregress

from .errors import ValidationError
from .models import (
    PERIOD_SLACK,
    ToralSuspension,
    build_census,
    model_from_spec,
    orbit_count,
    scaled_model,
)
from .records import CensusTable, OrbitRecord, classify_all, classify_good_bad

__all__ = [
    "CensusTable",
    "GrowthEstimate",
    "OrbitRecord",
    "classify_all",
    "classify_good_bad",
    "count_p",
    "count_series",
    "entropy_estimate",
    "entropy_squeeze_check",
    "gamma_estimate",
    "scaling_identity_check",
    "squeeze_rate",
]

INFINITE_GROWTH_RATIO = 10.0


def count_p(table):
    """``(P_T, Pg_T)`` of a census."""
    P, Pg = table.counts
    assert P <= 2 * Pg <= 2 * P
    return P, Pg


@dataclass(frozen=True)
class GrowthEstimate:
    points: tuple              # ((T, count), ...) over the whole grid
    rate: float                # slope of log count against T
    rate_stderr: float
    slope: float               # slope of log count against log T
    slope_stderr: float
    exp_residual: float        # rms residual of the exponential fit
    poly_residual: float       # rms residual of the polynomial fit

    @property
    def infinite(self):
        """Growth looks exponential: the exponential fit is 10x tighter."""
        return self.poly_residual >= INFINITE_GROWTH_RATIO * self.exp_residual and self.poly_residual > 0

    @property
    def flag(self):
        return "infinite" if self.infinite else "finite"


def _fit(x, y):
    if len(x) < 2:
        raise ValidationError("need at least two positive counts to fit a rate")
    if np.all(y == y[0]):
        return 0.0, 0.0, 0.0
    res = linregress(x, y)
    resid = y - (res.intercept + res.slope * x)
    return float(res.slope), float(res.stderr), float(np.sqrt(np.mean(resid ** 2)))


def _check_grid(grid):
    grid = [float(t) for t in grid]
    if len(grid) < 2 or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValidationError("grid must be strictly increasing with at least two points")
    if grid[0] <= 0:
        raise ValidationError("grid points must be positive")
    return grid


def _growth(count_fn, grid):
    grid = _check_grid(grid)
    counts = [int(count_fn(T)) for T in grid]
    if any(b < a for a, b in zip(counts, counts[1:])):
        raise ValidationError("counts must be non-decreasing along the grid")
    if not any(counts):
        raise ValidationError("all counts are zero")
    upper = [(T, c) for T, c in zip(grid[len(grid) // 2:], counts[len(grid) // 2:]) if c > 0]
    T = np.array([t for t, _ in upper])
    logc = np.array([math.log(c) for _, c in upper])
    rate, rate_err, exp_res = _fit(T, logc)
    slope, slope_err, poly_res = _fit(np.log(T), logc)
    return GrowthEstimate(tuple(zip(grid, counts)), rate, rate_err, slope, slope_err, exp_res, poly_res)


def entropy_estimate(count_fn, grid):
    """Exponential growth rate of ``count_fn`` (Bowen's ``(1/T) log P_T``)."""
    return _growth(count_fn, grid)


def gamma_estimate(count_fn, grid):
    """Polynomial growth exponent of ``count_fn``; see ``GrowthEstimate.flag``."""
    return _growth(count_fn, grid)


def count_series(model, grid, workers=None):
    """``[(T, P_T, Pg_T), ...]`` over the grid.

    Closed-form counts are used where they exist; otherwise one census is
    built at the largest grid point and filtered.
    """
    grid = _check_grid(grid)
    if not (isinstance(model, ToralSuspension) and not model.roof.is_constant):
        return [(T, *orbit_count(model, T)) for T in grid]
    table = build_census(model, grid[-1], workers=workers)
    periods = np.array([r.period for r in table.records])
    good = np.array([r.good for r in table.records], dtype=bool)
    out = []
    for T in grid:
        inside = periods <= T * (1 + PERIOD_SLACK)
        out.append((T, int(inside.sum()), int((inside & good).sum())))
    return out


def scaling_identity_check(table, c, truncation=None, workers=None):
    """Does multiplying the contact form by ``c`` just rescale the census?

    The census of the scaled model at ``truncation`` (default ``c T``) must
    match ``table`` record by record, with every period multiplied by ``c``.
    """
    if not c > 0:
        raise ValidationError(f"scale must be positive, got {c}")
    model = model_from_spec(table.model)
    truncation = c * table.truncation if truncation is None else truncation
    other = build_census(scaled_model(model, c), truncation, workers=workers)

    def key(r):
        return (r.simple_id, r.iterate, r.class_label, r.cz_parity, r.cz_index, r.good)

    a = sorted(table.records, key=key)
    b = sorted(other.records, key=key)
    if [key(r) for r in a] != [key(r) for r in b]:
        return False
    return all(math.isclose(c * x.period, y.period, rel_tol=1e-9) for x, y in zip(a, b))


def entropy_squeeze_check(model, grid, workers=None):
    """Defects ``(g - h/max r, h/min r - g)`` for the growth rate ``g`` of the roof suspension.

    ``h`` is the entropy of the unit-roof flow.  Both defects are
    non-negative when the growth rate is squeezed as predicted.
    """
    rate = squeeze_rate(model, grid, workers=workers).rate
    h = model.entropy
    return rate - h / model.roof.max, h / model.roof.min - rate


def squeeze_rate(model, grid, workers=None):
    series = count_series(model, grid, workers=workers)
    counts = {T: P for T, P, _ in series}
    return entropy_estimate(counts.__getitem__, [T for T, _, _ in series])
