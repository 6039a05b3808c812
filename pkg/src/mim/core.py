"""Predictive random sets and scalar-pivot plausibility.

The default predictive random set for a Unif(0, 1) auxiliary variable is the
symmetric interval around 1/2 pinned at the realized draw; its contour
1 - |2u - 1| turns any monotone scalar pivot into a marginal plausibility
function.  The elastic variant for the squared-length problem stretches the
set just enough to keep the constrained parameter set nonempty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NonMonotonePivotError
from .regions import Region
from .special import AccuracyPolicy, chisq_cdf, noncentral_chisq_cdf

__all__ = [
    "RandomSetSpec",
    "ScalarPivotIM",
    "Assertion",
    "default_prs_contour",
    "default_prs_miss_prob",
    "pivot_plausibility",
    "invert_pivot",
    "pivot_belief",
    "pivot_region_plausibility",
    "elastic_mnm_plausibility",
]

_RANDOM_SET_KINDS = frozenset({"default_nested", "elastic_default", "singleton"})


@dataclass(frozen=True)
class RandomSetSpec:
    """Which predictive random set an operation should use.

    default_nested is the symmetric interval set used everywhere by default;
    elastic_default is its stretch-to-nonempty variant for constrained
    supports; singleton degrades plausibility to a p-value-like contour and
    is only legal where a consuming operation documents support for it
    (test oracles use it to exercise degenerate behavior).
    """

    kind: str = "default_nested"

    def __post_init__(self):
        if self.kind not in _RANDOM_SET_KINDS:
            raise ValueError(f"unknown random set kind: {self.kind!r}")


@dataclass(frozen=True)
class ScalarPivotIM:
    """A marginal inferential model reduced to a scalar pivot.

    pivot_cdf(psi, statistic) is the sampling CDF of the scalar statistic at
    interest-parameter value psi, so pivot_cdf(psi, observed) plays the role
    of the auxiliary variable.  monotonicity records how that value moves
    with psi; support is the open interval of valid psi; statistic is the
    observed value the model was built from.
    """

    pivot_cdf: Callable
    monotonicity: str
    support: tuple[float, float]
    statistic: float
    label: str = ""

    def __post_init__(self):
        if self.monotonicity not in ("decreasing_in_psi", "nonmonotone"):
            raise ValueError("monotonicity must be 'decreasing_in_psi' or 'nonmonotone'")
        lo, hi = self.support
        if not lo < hi:
            raise ValueError("support must be a nonempty open interval")

    def in_support(self, psi) -> bool:
        lo, hi = self.support
        arr = np.asarray(psi, dtype=float)
        return bool(np.all((arr > lo) & (arr < hi)))


@dataclass(frozen=True)
class Assertion:
    """An assertion about the interest parameter: a region of psi values."""

    region: Region


def default_prs_contour(u):
    """P{S contains u} = 1 - |2u - 1| for the default symmetric random set."""
    arr = np.asarray(u, dtype=float)
    if np.any((arr < 0.0) | (arr > 1.0)) or np.any(np.isnan(arr)):
        raise ValueError("u must lie in [0, 1]")
    out = 1.0 - np.abs(2.0 * arr - 1.0)
    return float(out) if arr.ndim == 0 else out


def default_prs_miss_prob(u):
    """|2u - 1|: the complement of the contour.  Unif(0, 1)-distributed when
    u is, which is exactly the calibration the validity checks verify."""
    arr = np.asarray(u, dtype=float)
    if np.any((arr < 0.0) | (arr > 1.0)) or np.any(np.isnan(arr)):
        raise ValueError("u must lie in [0, 1]")
    out = np.abs(2.0 * arr - 1.0)
    return float(out) if arr.ndim == 0 else out


def pivot_plausibility(im: ScalarPivotIM, statistic, psi):
    """Marginal plausibility of the singleton {psi}: 1 - |2 F_psi(stat) - 1|."""
    if not im.in_support(psi):
        raise ValueError(f"psi outside the model support {im.support}")
    f = np.clip(np.asarray(im.pivot_cdf(psi, statistic), dtype=float), 0.0, 1.0)
    out = 1.0 - np.abs(2.0 * f - 1.0)
    return float(out) if out.ndim == 0 else out


def invert_pivot(im: ScalarPivotIM, statistic, q: float, *, tol: float = 1e-10,
                 max_expand: int = 200) -> float:
    """psi solving pivot_cdf(psi, statistic) = q for a decreasing pivot.

    Returns the support endpoint when the target is unreachable before it
    (the pivot saturates), which is the correct degenerate limit for the
    interval constructions that call this.
    """
    if im.monotonicity != "decreasing_in_psi":
        raise NonMonotonePivotError("pivot inversion requires a decreasing pivot")
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie strictly inside (0, 1)")
    lo, hi = im.support
    if math.isfinite(lo) and math.isfinite(hi):
        anchor = 0.5 * (lo + hi)
    elif math.isfinite(lo):
        anchor = lo + 1.0
    elif math.isfinite(hi):
        anchor = hi - 1.0
    else:
        anchor = float(statistic) if math.isfinite(float(np.max(statistic))) else 0.0

    def f(psi: float) -> float:
        return float(im.pivot_cdf(psi, statistic))

    # F decreasing in psi: walk right while F > q, left while F < q.
    a = b = anchor
    fa = fb = f(anchor)
    step = 1.0 + 0.5 * abs(anchor)
    k = 0
    while fb > q:
        a, fa = b, fb
        b = b + step if math.isinf(hi) else hi - 0.5 * (hi - b)
        if b >= hi:
            return hi
        fb = f(b)
        step *= 2.0
        k += 1
        if k > max_expand:
            return hi
    step = 1.0 + 0.5 * abs(anchor)
    k = 0
    while fa < q:
        b, fb = a, fa
        a = a - step if math.isinf(lo) else lo + 0.5 * (a - lo)
        if a <= lo:
            return lo
        fa = f(a)
        step *= 2.0
        k += 1
        if k > max_expand:
            return lo
    for _ in range(200):
        mid = 0.5 * (a + b)
        if mid == a or mid == b or (b - a) <= tol * max(1.0, abs(a), abs(b)):
            break
        if f(mid) > q:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def _focal_interval(im: ScalarPivotIM, statistic, u: float) -> tuple[float, float]:
    """Parameter interval swept by the default random set at miss level u:
    the psi values whose pivot lies within u/2 of 1/2."""
    hi_q = min(0.5 + 0.5 * u, 1.0 - 1e-16)
    lo_q = max(0.5 - 0.5 * u, 1e-16)
    lo = invert_pivot(im, statistic, hi_q)
    hi = invert_pivot(im, statistic, lo_q)
    return lo, hi


def _midpoint_miss_levels(mc_grid: int) -> np.ndarray:
    w = (np.arange(mc_grid) + 0.5) / mc_grid
    return np.sort(np.abs(2.0 * w - 1.0))


def _quadrature_fraction(levels: np.ndarray, event: Callable[[float], bool],
                         increasing: bool) -> float:
    """Fraction of quadrature nodes whose event holds, for an event monotone
    in the miss level.  Equivalent to evaluating every node, located by
    binary search in O(log grid) event evaluations."""
    m = levels.size
    lo, hi = 0, m - 1
    if increasing:
        if event(float(levels[0])):
            return 1.0
        if not event(float(levels[-1])):
            return 0.0
        # first index where event holds
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if event(float(levels[mid])):
                hi = mid
            else:
                lo = mid
        return (m - hi) / m
    if not event(float(levels[0])):
        return 0.0
    if event(float(levels[-1])):
        return 1.0
    # last index where event holds
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if event(float(levels[mid])):
            lo = mid
        else:
            hi = mid
    return (lo + 1) / m


def pivot_belief(im: ScalarPivotIM, statistic, assertion: Assertion,
                 mc_grid: int = 100000) -> float:
    """Belief in an assertion under the default random set, by deterministic
    midpoint quadrature over the auxiliary variable.

    For each node the random set maps to a parameter interval; belief is the
    fraction of nodes whose interval sits inside the assertion.  The interval
    family is nested in the miss level, so the node count is resolved by
    binary search without changing the quadrature value.
    """
    if im.monotonicity != "decreasing_in_psi":
        raise NonMonotonePivotError(
            "belief via pivot quadrature requires a decreasing pivot; "
            "use the model-specific plausibility for nonmonotone cases"
        )
    if mc_grid < 1:
        raise ValueError("mc_grid must be positive")
    levels = _midpoint_miss_levels(mc_grid)

    def fits(u: float) -> bool:
        lo, hi = _focal_interval(im, statistic, u)
        return assertion.region.contains_interval(lo, hi)

    return _quadrature_fraction(levels, fits, increasing=False)


def pivot_region_plausibility(im: ScalarPivotIM, statistic, region: Region,
                              mc_grid: int = 100000) -> float:
    """Plausibility of a region by the same quadrature as pivot_belief:
    the fraction of nodes whose focal interval meets the region."""
    if im.monotonicity != "decreasing_in_psi":
        raise NonMonotonePivotError("plausibility quadrature requires a decreasing pivot")
    if mc_grid < 1:
        raise ValueError("mc_grid must be positive")
    levels = _midpoint_miss_levels(mc_grid)

    def meets(u: float) -> bool:
        lo, hi = _focal_interval(im, statistic, u)
        return region.intersects_interval(lo, hi)

    return _quadrature_fraction(levels, meets, increasing=True)


def elastic_mnm_plausibility(chisq_stat, n, psi, policy: AccuracyPolicy | None = None):
    """Marginal plausibility of the squared mean length psi**2 <-> psi >= 0
    for an n-vector of unit normals, under the elastic default random set.

    With F0 the central and Fp the noncentral chi-square CDF at the observed
    squared norm: above the median (F0 >= 1/2) the plain contour
    1 - |2 Fp - 1| applies; below it the set must stretch to reach the
    constrained support, giving full plausibility at psi = 0 and
    2 F0 - max(|2 Fp - 1| + 2 F0 - 1, 0) for psi > 0.  The two branches agree
    as F0 -> 1/2, and the elastic branch simplifies to 2 Fp.
    """
    stat_arr = np.asarray(chisq_stat, dtype=float)
    psi_arr = np.asarray(psi, dtype=float)
    if np.any(stat_arr < 0.0) or np.any(np.isnan(stat_arr)):
        raise ValueError("chisq_stat must be nonnegative")
    if np.any(psi_arr < 0.0) or np.any(np.isnan(psi_arr)):
        raise ValueError("psi must be nonnegative")
    stat_b, psi_b = np.broadcast_arrays(stat_arr, psi_arr)
    scalar = stat_b.ndim == 0
    stat_f = np.atleast_1d(stat_b).astype(float)
    psi_f = np.atleast_1d(psi_b).astype(float)

    f0 = np.asarray(chisq_cdf(stat_f, n), dtype=float)
    fp = np.asarray(noncentral_chisq_cdf(stat_f, n, psi_f**2, policy), dtype=float)
    plain = 1.0 - np.abs(2.0 * fp - 1.0)
    stretched = 2.0 * f0 - np.maximum(np.abs(2.0 * fp - 1.0) + 2.0 * f0 - 1.0, 0.0)
    elastic = np.where(psi_f == 0.0, 1.0, stretched)
    out = np.clip(np.where(f0 >= 0.5, plain, elastic), 0.0, 1.0)
    return float(out[0]) if scalar else out.reshape(stat_b.shape)
