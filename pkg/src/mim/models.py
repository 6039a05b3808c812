"""The benchmark-model catalog.

Each model reduces raw data to its minimal sufficient summary and exposes a
marginal plausibility for its interest parameter: a scalar-pivot inferential
model where one exists (normal mean, correlation, Behrens-Fisher difference,
gamma mean), a direct plausibility formula for the ratio of means, and the
elastic construction for the length of a normal mean vector.

Pivot kernels are module-level functions that broadcast over numpy arrays so
the simulation harness can evaluate whole replicate batches through the same
code path the scalar API uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
from scipy import special as sp

from .core import ScalarPivotIM, elastic_mnm_plausibility, invert_pivot, pivot_plausibility
from .errors import DegenerateDataError
from .regions import Piece, PlausibilityCurve, Region
from .special import (
    AccuracyPolicy,
    DEFAULT_POLICY,
    _gamma_z_logx,
    _poisson_log_weights,
    chisq_cdf,
    chisq_median,
    digamma,
    halft_mixture_cdf,
    noncentral_chisq_cdf,
    sample_corr_cdf,
    std_normal_quantile,
    student_t_quantile,
)

__all__ = [
    "NormalSummary",
    "TwoSampleSummary",
    "CorrSummary",
    "VectorSummary",
    "GammaSummary",
    "RatioData",
    "ModelInstance",
    "MODEL_IDS",
    "ratio_plausibility_value",
    "summarize_normal",
    "normal_mean_known_var_im",
    "normal_mean_known_var_curve",
    "normal_mean_known_var_interval",
    "normal_mean_t_im",
    "normal_mean_t_curve",
    "normal_mean_t_interval",
    "bvn_correlation_im",
    "bvn_correlation_curve",
    "mean_ratio_plausibility",
    "mean_ratio_region",
    "mean_ratio_curve",
    "many_normal_means_region",
    "many_normal_means_fiducial_region",
    "many_normal_means_curve",
    "mnm_psi_quantile",
    "behrens_fisher_im",
    "behrens_fisher_curve",
    "behrens_fisher_interval",
    "gamma_kappa",
    "gamma_kappa_star",
    "gamma_mean_im",
    "gamma_mean_curve",
    "load_rat_survival",
    "curve_for",
]

MODEL_IDS = (
    "normal-mean",
    "normal-mean-t",
    "corr",
    "mean-ratio",
    "mnm",
    "behrens-fisher",
    "gamma-mean",
)


# ---------------------------------------------------------------------------
# Sufficient-statistic summaries


@dataclass(frozen=True)
class NormalSummary:
    """Sample size, mean, and (optional) sample standard deviation."""

    n: int
    mean: float
    sd: float | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not math.isfinite(self.mean):
            raise ValueError("mean must be finite")
        if self.sd is not None:
            if self.n < 2:
                raise ValueError("a standard deviation requires n >= 2")
            if not (self.sd >= 0.0):
                raise ValueError("sd must be nonnegative")


def summarize_normal(data) -> NormalSummary:
    """Reduce a sample to (n, mean, sd); sd uses the n-1 divisor and is
    omitted for n = 1."""
    x = np.asarray(data, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise ValueError("data must be a nonempty 1-d sample")
    if not np.all(np.isfinite(x)):
        raise ValueError("data must be finite")
    n = int(x.size)
    mean = float(x.mean())
    sd = float(x.std(ddof=1)) if n >= 2 else None
    return NormalSummary(n=n, mean=mean, sd=sd)


@dataclass(frozen=True)
class TwoSampleSummary:
    """Per-group size, mean, and sample standard deviation."""

    n1: int
    n2: int
    mean1: float
    mean2: float
    sd1: float
    sd2: float

    def __post_init__(self):
        if self.n1 < 2 or self.n2 < 2:
            raise ValueError("both groups need n >= 2")
        for v in (self.mean1, self.mean2):
            if not math.isfinite(v):
                raise ValueError("means must be finite")
        if not (self.sd1 >= 0.0 and self.sd2 >= 0.0):
            raise ValueError("standard deviations must be nonnegative")

    @staticmethod
    def from_samples(x1, x2) -> "TwoSampleSummary":
        a = np.asarray(x1, dtype=float)
        b = np.asarray(x2, dtype=float)
        if a.size < 2 or b.size < 2:
            raise ValueError("both groups need n >= 2")
        return TwoSampleSummary(
            n1=int(a.size), n2=int(b.size),
            mean1=float(a.mean()), mean2=float(b.mean()),
            sd1=float(a.std(ddof=1)), sd2=float(b.std(ddof=1)),
        )


@dataclass(frozen=True)
class CorrSummary:
    """Sample size and sample correlation of bivariate normal pairs."""

    n: int
    r: float

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("n must be at least 3")
        if not -1.0 <= self.r <= 1.0:
            raise ValueError("r must lie in [-1, 1]")

    @staticmethod
    def from_pairs(pairs) -> "CorrSummary":
        xy = np.asarray(pairs, dtype=float)
        if xy.ndim != 2 or xy.shape[1] != 2 or xy.shape[0] < 3:
            raise ValueError("pairs must be an (n, 2) array with n >= 3")
        x = xy[:, 0] - xy[:, 0].mean()
        y = xy[:, 1] - xy[:, 1].mean()
        sx = float(np.sqrt(np.sum(x * x)))
        sy = float(np.sqrt(np.sum(y * y)))
        if sx == 0.0 or sy == 0.0:
            raise DegenerateDataError("a constant column carries no correlation information")
        return CorrSummary(n=int(xy.shape[0]), r=float(np.sum(x * y) / (sx * sy)))


@dataclass(frozen=True)
class VectorSummary:
    """Dimension and squared Euclidean norm of a unit-variance normal vector."""

    n: int
    norm_sq: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not (self.norm_sq >= 0.0):
            raise ValueError("norm_sq must be nonnegative")

    @staticmethod
    def from_vector(x) -> "VectorSummary":
        v = np.asarray(x, dtype=float)
        if v.ndim != 1 or v.size < 1:
            raise ValueError("x must be a nonempty 1-d vector")
        return VectorSummary(n=int(v.size), norm_sq=float(v @ v))


@dataclass(frozen=True)
class GammaSummary:
    """Log of the sample mean and mean of the logs for a positive sample."""

    n: int
    t1: float
    t2: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not (math.isfinite(self.t1) and math.isfinite(self.t2)):
            raise ValueError("t1 and t2 must be finite")

    @property
    def v2(self) -> float:
        return self.t1 - self.t2

    @staticmethod
    def from_data(data) -> "GammaSummary":
        x = np.asarray(data, dtype=float)
        if x.ndim != 1 or x.size < 2:
            raise ValueError("data must be a 1-d sample with n >= 2")
        if np.any(x <= 0.0) or not np.all(np.isfinite(x)):
            raise ValueError("data must be positive and finite")
        return GammaSummary(
            n=int(x.size),
            t1=float(np.log(x.mean())),
            t2=float(np.mean(np.log(x))),
        )


@dataclass(frozen=True)
class RatioData:
    """A single observation of each coordinate mean, unit variances."""

    x1: float
    x2: float

    def __post_init__(self):
        if not (math.isfinite(self.x1) and math.isfinite(self.x2)):
            raise ValueError("x1 and x2 must be finite")


@dataclass(frozen=True)
class ModelInstance:
    """A catalog model identifier plus its sufficient-statistic summary and
    any fixed auxiliary quantities (for example sigma for the known-variance
    normal mean)."""

    model: str
    summary: object
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.model not in MODEL_IDS:
            raise ValueError(f"unknown model {self.model!r}; known: {MODEL_IDS}")


# ---------------------------------------------------------------------------
# Normal mean


def normal_known_pivot(psi, xbar, n, sigma):
    """Sampling CDF of the sample mean at mean value psi, known sigma."""
    return sp.ndtr((np.asarray(xbar, dtype=float) - np.asarray(psi, dtype=float))
                   * math.sqrt(n) / sigma)


def normal_mean_known_var_im(s: NormalSummary, sigma: float) -> ScalarPivotIM:
    """Marginal inferential model for a normal mean with known sigma."""
    if not (sigma > 0.0) or not math.isfinite(sigma):
        raise ValueError("sigma must be positive and finite")
    n = s.n
    return ScalarPivotIM(
        pivot_cdf=lambda psi, stat: normal_known_pivot(psi, stat, n, sigma),
        monotonicity="decreasing_in_psi",
        support=(-math.inf, math.inf),
        statistic=s.mean,
        label="normal-mean",
    )


def normal_mean_known_var_curve(s: NormalSummary, sigma: float) -> PlausibilityCurve:
    im = normal_mean_known_var_im(s, sigma)
    return PlausibilityCurve(
        fn=lambda psi: pivot_plausibility(im, im.statistic, psi),
        support=im.support,
        mode=s.mean,
        label=im.label,
    )


def normal_mean_known_var_interval(s: NormalSummary, sigma: float, alpha: float):
    """Closed form for the level 1-alpha plausibility interval: the z interval."""
    z = std_normal_quantile(1.0 - alpha / 2.0)
    half = z * sigma / math.sqrt(s.n)
    return s.mean - half, s.mean + half


def normal_t_pivot(psi, xbar, sd, n):
    """Sampling CDF of the t statistic centered at psi, sigma unknown."""
    t = (np.asarray(xbar, dtype=float) - np.asarray(psi, dtype=float)) \
        * math.sqrt(n) / np.asarray(sd, dtype=float)
    return sp.stdtr(n - 1, t)


def normal_mean_t_im(s: NormalSummary) -> ScalarPivotIM:
    """Marginal inferential model for a normal mean with sigma unknown;
    the nuisance component of the association is ignorable, leaving the
    t pivot."""
    if s.sd is None or s.n < 2:
        raise ValueError("the t model needs n >= 2 and a sample sd")
    if s.sd == 0.0:
        raise DegenerateDataError("zero sample sd: the t pivot is undefined")
    n, sd = s.n, s.sd
    return ScalarPivotIM(
        pivot_cdf=lambda psi, stat: normal_t_pivot(psi, stat, sd, n),
        monotonicity="decreasing_in_psi",
        support=(-math.inf, math.inf),
        statistic=s.mean,
        label="normal-mean-t",
    )


def normal_mean_t_curve(s: NormalSummary) -> PlausibilityCurve:
    im = normal_mean_t_im(s)
    return PlausibilityCurve(
        fn=lambda psi: pivot_plausibility(im, im.statistic, psi),
        support=im.support,
        mode=s.mean,
        label=im.label,
    )


def normal_mean_t_interval(s: NormalSummary, alpha: float):
    """Closed form: the classical t interval."""
    if s.sd is None:
        raise ValueError("the t interval needs a sample sd")
    t = student_t_quantile(1.0 - alpha / 2.0, s.n - 1)
    half = t * s.sd / math.sqrt(s.n)
    return s.mean - half, s.mean + half


# ---------------------------------------------------------------------------
# Bivariate normal correlation


def bvn_correlation_im(s: CorrSummary, policy: AccuracyPolicy | None = None) -> ScalarPivotIM:
    """Marginal inferential model for the correlation coefficient; the
    sample correlation is the scalar statistic and its exact sampling CDF
    the pivot."""
    if abs(s.r) == 1.0:
        raise DegenerateDataError("|r| = 1 pins the correlation; no pivot exists")
    n = s.n
    pol = policy or DEFAULT_POLICY
    return ScalarPivotIM(
        pivot_cdf=lambda psi, stat: sample_corr_cdf(stat, n, float(psi), pol),
        monotonicity="decreasing_in_psi",
        support=(-1.0, 1.0),
        statistic=s.r,
        label="corr",
    )


def bvn_correlation_curve(s: CorrSummary, policy: AccuracyPolicy | None = None) -> PlausibilityCurve:
    im = bvn_correlation_im(s, policy)
    mode = invert_pivot(im, im.statistic, 0.5)
    return PlausibilityCurve(
        fn=lambda psi: pivot_plausibility(im, im.statistic, psi),
        support=(-1.0, 1.0),
        mode=mode,
        label=im.label,
    )


# ---------------------------------------------------------------------------
# Ratio of independent normal means (unit variances)


def ratio_plausibility_value(psi, x1, x2):
    """1 - |2 Phi((x1 - psi x2) / sqrt(1 + psi^2)) - 1|, broadcasting over
    psi and the observation pair."""
    psi_arr = np.asarray(psi, dtype=float)
    z = (np.asarray(x1, dtype=float) - psi_arr * np.asarray(x2, dtype=float)) \
        / np.sqrt(1.0 + psi_arr**2)
    return 1.0 - np.abs(2.0 * sp.ndtr(z) - 1.0)


def mean_ratio_plausibility(d: RatioData, psi):
    """Marginal plausibility of psi = mean1/mean2 from one observation pair."""
    psi_arr = np.asarray(psi, dtype=float)
    out = ratio_plausibility_value(psi_arr, d.x1, d.x2)
    return float(out) if psi_arr.ndim == 0 else out


def mean_ratio_region(d: RatioData, alpha: float) -> Region:
    """Level 1-alpha plausibility region: solutions of the quadratic
    (x2^2 - z^2) psi^2 - 2 x1 x2 psi + (x1^2 - z^2) < 0.

    Always one of a bounded interval, two rays, or the whole line (plus a
    single-ray hairline case when x2^2 = z^2 exactly).
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must lie strictly inside (0, 1)")
    z = std_normal_quantile(1.0 - alpha / 2.0)
    a = d.x2 * d.x2 - z * z
    b = -2.0 * d.x1 * d.x2
    c = d.x1 * d.x1 - z * z
    disc = b * b - 4.0 * a * c  # equals 4 z^2 (x1^2 + x2^2 - z^2)

    if a == 0.0:
        if b == 0.0:
            # c = -z^2 < 0: every psi satisfies the inequality.
            return Region((Piece(-math.inf, math.inf),))
        root = -c / b
        if b > 0.0:
            return Region((Piece(-math.inf, root),))
        return Region((Piece(root, math.inf),))

    if disc <= 0.0:
        # No real crossings: a < 0 here (a > 0 forces disc > 0), so the
        # parabola is negative everywhere except possibly one touch point.
        return Region((Piece(-math.inf, math.inf),))

    sq = math.sqrt(disc)
    qq = -0.5 * (b + math.copysign(sq, b)) if b != 0.0 else 0.5 * sq
    r1 = qq / a
    r2 = c / qq if qq != 0.0 else -r1
    lo, hi = (r1, r2) if r1 <= r2 else (r2, r1)
    if a > 0.0:
        return Region((Piece(lo, hi),))
    return Region((Piece(-math.inf, lo), Piece(hi, math.inf)))


def mean_ratio_curve(d: RatioData) -> PlausibilityCurve:
    mode = d.x1 / d.x2 if d.x2 != 0.0 else None
    return PlausibilityCurve(
        fn=lambda psi: float(mean_ratio_plausibility(d, psi)),
        support=(-math.inf, math.inf),
        mode=mode,
        region_fn=lambda alpha: mean_ratio_region(d, alpha),
        label="mean-ratio",
    )


# ---------------------------------------------------------------------------
# Length of a normal mean vector (elastic construction)


def mnm_psi_quantile(norm_sq, n: int, target, *, tol: float = 1e-9,
                     policy: AccuracyPolicy | None = None):
    """psi >= 0 solving F(norm_sq; n, psi^2) = target for the noncentral
    chi-square CDF F, elementwise over broadcast inputs.

    F is strictly decreasing in psi, so the solution is unique when it
    exists; entries whose central CDF already sits at or below the target
    (no nonnegative solution) come back as 0.  Bisection runs on the
    noncentrality with a shared precomputed table of central CDF terms.
    """
    pol = policy or DEFAULT_POLICY
    x_arr = np.asarray(norm_sq, dtype=float)
    t_arr = np.asarray(target, dtype=float)
    if np.any(x_arr < 0.0):
        raise ValueError("norm_sq must be nonnegative")
    if np.any((t_arr <= 0.0) | (t_arr >= 1.0)):
        raise ValueError("target must lie strictly inside (0, 1)")
    xb, tb = np.broadcast_arrays(x_arr, t_arr)
    scalar = xb.ndim == 0
    x = np.atleast_1d(xb).astype(float).ravel()
    t = np.atleast_1d(tb).astype(float).ravel()

    out = np.zeros_like(x)
    f0 = np.asarray(chisq_cdf(x, n), dtype=float)
    solvable = f0 > t
    if not np.any(solvable):
        return float(out[0]) if scalar else out.reshape(xb.shape)
    xs = x[solvable]
    ts = t[solvable]

    lam_hi = n + xs + 10.0
    for _ in range(80):
        high_mask = np.asarray(noncentral_chisq_cdf(xs, n, lam_hi, pol)) > ts
        if not np.any(high_mask):
            break
        lam_hi[high_mask] *= 2.0
    dmax = float(lam_hi.max()) / 2.0
    j = np.arange(0, int(math.ceil(dmax + 10.0 * math.sqrt(dmax + 1.0) + 20.0)) + 1,
                  dtype=float)
    table = sp.gammainc(n / 2.0 + j[None, :], xs[:, None] / 2.0)

    lo = np.zeros_like(lam_hi)
    hi = lam_hi
    for _ in range(200):
        if float(np.max(np.sqrt(hi) - np.sqrt(lo))) <= tol:
            break
        mid = 0.5 * (lo + hi)
        w = np.exp(_poisson_log_weights(mid / 2.0, j))
        fmid = (w * table).sum(axis=1)
        go_up = fmid > ts
        lo = np.where(go_up, mid, lo)
        hi = np.where(go_up, hi, mid)
    out[solvable] = np.sqrt(0.5 * (lo + hi))
    return float(out[0]) if scalar else out.reshape(xb.shape)


def many_normal_means_region(s: VectorSummary, alpha: float, *,
                             policy: AccuracyPolicy | None = None,
                             tol: float = 1e-9) -> Region:
    """Level 1-alpha plausibility region for the mean length psi >= 0.

    Above the central median the region is {psi : alpha/2 <= F <= 1-alpha/2}
    with endpoints found by noncentrality inversion and the lower endpoint
    truncated at 0; below it the elastic set yields [0, psi_hat(alpha/2)),
    collapsing to the single point {0} when even psi = 0 is implausible at
    the alpha/2 level.
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must lie strictly inside (0, 1)")
    f0 = float(chisq_cdf(s.norm_sq, s.n))
    hi = float(mnm_psi_quantile(s.norm_sq, s.n, alpha / 2.0, tol=tol, policy=policy))
    if hi == 0.0:
        return Region((Piece(0.0, 0.0, False, False),))
    if f0 > 1.0 - alpha / 2.0:
        lo = float(mnm_psi_quantile(s.norm_sq, s.n, 1.0 - alpha / 2.0, tol=tol,
                                    policy=policy))
        return Region((Piece(lo, hi, True, True),))
    return Region((Piece(0.0, hi, False, True),))


def many_normal_means_fiducial_region(s: VectorSummary, alpha: float, *,
                                      policy: AccuracyPolicy | None = None,
                                      tol: float = 1e-9) -> Region:
    """Comparator region {psi : alpha/2 <= F_psi / F_0 <= 1 - alpha/2} built
    from the fiducial ratio of noncentral to central CDF values.  The ratio
    runs from 1 down to 0, so the region is always a bounded interval that
    excludes psi = 0."""
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must lie strictly inside (0, 1)")
    if s.norm_sq == 0.0:
        raise DegenerateDataError("norm_sq = 0: the fiducial ratio is undefined")
    f0 = float(chisq_cdf(s.norm_sq, s.n))
    lo = float(mnm_psi_quantile(s.norm_sq, s.n, (1.0 - alpha / 2.0) * f0, tol=tol,
                                policy=policy))
    hi = float(mnm_psi_quantile(s.norm_sq, s.n, (alpha / 2.0) * f0, tol=tol,
                                policy=policy))
    return Region((Piece(lo, hi, True, True),))


def many_normal_means_curve(s: VectorSummary,
                            policy: AccuracyPolicy | None = None) -> PlausibilityCurve:
    f0 = float(chisq_cdf(s.norm_sq, s.n))
    if f0 < 0.5:
        mode = 0.0
    else:
        mode = float(mnm_psi_quantile(s.norm_sq, s.n, 0.5, policy=policy))
    return PlausibilityCurve(
        fn=lambda psi: float(elastic_mnm_plausibility(s.norm_sq, s.n, psi, policy)),
        support=(0.0, math.inf),
        lo_closed=True,
        mode=mode,
        label="mnm",
    )


# ---------------------------------------------------------------------------
# Behrens-Fisher


def behrens_fisher_pivot(psi, ybar, f, n1, n2):
    """Bounding sampling CDF of the mean difference: a t CDF with
    min(n1, n2) - 1 degrees of freedom applied to (ybar - psi)/f, where f is
    the plug-in standard error sqrt(s1^2/n1 + s2^2/n2)."""
    t = (np.asarray(ybar, dtype=float) - np.asarray(psi, dtype=float)) \
        / np.asarray(f, dtype=float)
    return sp.stdtr(min(n1, n2) - 1, t)


def _bf_f(s: TwoSampleSummary) -> float:
    return math.sqrt(s.sd1**2 / s.n1 + s.sd2**2 / s.n2)


def behrens_fisher_im(s: TwoSampleSummary) -> ScalarPivotIM:
    """Generalized marginal inferential model for the difference of two
    normal means with unequal, unknown variances.  The auxiliary variable is
    stochastically bounded by a t with min(n1, n2) - 1 degrees of freedom,
    which makes the resulting plausibility conservative for every variance
    ratio."""
    if s.sd1 == 0.0 and s.sd2 == 0.0:
        raise DegenerateDataError("both sample variances are zero")
    f = _bf_f(s)
    n1, n2 = s.n1, s.n2
    return ScalarPivotIM(
        pivot_cdf=lambda psi, stat: behrens_fisher_pivot(psi, stat, f, n1, n2),
        monotonicity="decreasing_in_psi",
        support=(-math.inf, math.inf),
        statistic=s.mean2 - s.mean1,
        label="behrens-fisher",
    )


def behrens_fisher_curve(s: TwoSampleSummary) -> PlausibilityCurve:
    im = behrens_fisher_im(s)
    return PlausibilityCurve(
        fn=lambda psi: pivot_plausibility(im, im.statistic, psi),
        support=im.support,
        mode=im.statistic,
        label=im.label,
    )


def behrens_fisher_interval(s: TwoSampleSummary, alpha: float):
    """Closed form: ybar +- t_{1-alpha/2, min(n1,n2)-1} * f."""
    if s.sd1 == 0.0 and s.sd2 == 0.0:
        raise DegenerateDataError("both sample variances are zero")
    t = student_t_quantile(1.0 - alpha / 2.0, min(s.n1, s.n2) - 1)
    f = _bf_f(s)
    ybar = s.mean2 - s.mean1
    return ybar - t * f, ybar + t * f


# ---------------------------------------------------------------------------
# Gamma mean


def gamma_kappa(v2, n: int, *, max_expand: int = 60):
    """Shape kappa(v2) solving v2 = digamma(n kappa) - digamma(kappa) - log n.

    The right side decreases from +inf (kappa -> 0) to 0 (kappa -> inf), so
    the root exists and is unique for any v2 > 0.  Solved by bracketing
    bisection on log kappa from the large-kappa asymptote
    kappa ~ (1 - 1/n) / (2 v2).
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    v_arr = np.asarray(v2, dtype=float)
    if np.any(v_arr <= 0.0) or np.any(~np.isfinite(v_arr)):
        raise ValueError("v2 must be positive and finite")
    scalar = v_arr.ndim == 0
    v = np.atleast_1d(v_arr).astype(float).ravel()

    def h(log_a: np.ndarray) -> np.ndarray:
        a = np.exp(log_a)
        return digamma(n * a) - digamma(a) - math.log(n) - v

    guess = np.log((1.0 - 1.0 / n) / (2.0 * v))
    span = math.log(1e4)
    lo = guess - span
    hi = guess + span
    for _ in range(max_expand):
        bad = h(lo) <= 0.0
        if not np.any(bad):
            break
        lo = np.where(bad, lo - span, lo)
    for _ in range(max_expand):
        bad = h(hi) >= 0.0
        if not np.any(bad):
            break
        hi = np.where(bad, hi + span, hi)
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        go_up = h(mid) > 0.0
        lo = np.where(go_up, mid, lo)
        hi = np.where(go_up, hi, mid)
    out = np.exp(0.5 * (lo + hi))
    return float(out[0]) if scalar else out.reshape(v_arr.shape)


def gamma_kappa_star(v2, n: int):
    """Median-matched adjustment of kappa(v2).

    The interpolating degrees of freedom 2 n kappa v2 are clamped to the
    Jensen-limit range [n-1, 2(n-1)] and kappa* = median(chi-square(df)) /
    (2 n v2), which centers the auxiliary pivot at zero.
    """
    v_arr = np.asarray(v2, dtype=float)
    kappa = np.asarray(gamma_kappa(v_arr, n), dtype=float)
    nu_hat = np.clip(2.0 * n * kappa * v_arr, n - 1.0, 2.0 * (n - 1.0))
    out = chisq_median(nu_hat) / (2.0 * n * v_arr)
    return float(out) if v_arr.ndim == 0 else out


def gamma_pivot(psi, t1, v2, n: int, policy: AccuracyPolicy | None = None):
    """Sampling CDF of the gamma-mean statistic at mean value psi: the
    half-t mixture bound applied to the normal score of a gamma CDF with
    estimated shape n kappa*(v2).  Broadcasts over psi, t1, v2."""
    psi_arr = np.asarray(psi, dtype=float)
    if np.any(psi_arr <= 0.0):
        raise ValueError("psi must be positive")
    t1_arr = np.asarray(t1, dtype=float)
    v2_arr = np.asarray(v2, dtype=float)
    nk = n * np.asarray(gamma_kappa_star(v2_arr, n), dtype=float)
    log_arg = np.log(nk) + t1_arr - np.log(psi_arr)
    z = np.asarray(_gamma_z_logx(nk, log_arg), dtype=float)
    return halft_mixture_cdf(z, n)


def gamma_mean_im(s: GammaSummary, policy: AccuracyPolicy | None = None) -> ScalarPivotIM:
    """Generalized marginal inferential model for the mean of a gamma sample
    with unknown shape.  The pivot is conservative: its auxiliary variable is
    stochastically bounded by the half-t mixture."""
    v2 = s.v2
    if v2 <= 0.0:
        raise DegenerateDataError(
            "t1 <= t2: a constant sample carries no shape information"
        )
    n, t1 = s.n, s.t1
    return ScalarPivotIM(
        pivot_cdf=lambda psi, stat: gamma_pivot(psi, np.log(stat), v2, n, policy),
        monotonicity="decreasing_in_psi",
        support=(0.0, math.inf),
        statistic=math.exp(t1),
        label="gamma-mean",
    )


def gamma_mean_curve(s: GammaSummary, policy: AccuracyPolicy | None = None) -> PlausibilityCurve:
    im = gamma_mean_im(s, policy)
    nk = s.n * float(gamma_kappa_star(s.v2, s.n))
    # Pivot = 1/2 exactly where the gamma CDF hits its median.
    mode = nk * math.exp(s.t1) / float(sp.gammaincinv(nk, 0.5))
    return PlausibilityCurve(
        fn=lambda psi: pivot_plausibility(im, im.statistic, psi),
        support=(0.0, math.inf),
        mode=mode,
        label=im.label,
    )


def load_rat_survival() -> np.ndarray:
    """Survival times in weeks of 20 irradiated rats; the running example
    for the gamma mean."""
    text = resources.files("mim.data").joinpath("rat_survival.txt").read_text()
    values = [float(line) for line in text.splitlines()
              if line.strip() and not line.lstrip().startswith("#")]
    return np.asarray(values, dtype=float)


# ---------------------------------------------------------------------------
# Dispatch


def curve_for(instance: ModelInstance,
              policy: AccuracyPolicy | None = None) -> PlausibilityCurve:
    """Plausibility curve for a model instance; the single entry point used
    by the command-line layer."""
    m, s, p = instance.model, instance.summary, instance.params
    if m == "normal-mean":
        return normal_mean_known_var_curve(s, p["sigma"])
    if m == "normal-mean-t":
        return normal_mean_t_curve(s)
    if m == "corr":
        return bvn_correlation_curve(s, policy)
    if m == "mean-ratio":
        return mean_ratio_curve(s)
    if m == "mnm":
        return many_normal_means_curve(s, policy)
    if m == "behrens-fisher":
        return behrens_fisher_curve(s)
    if m == "gamma-mean":
        return gamma_mean_curve(s, policy)
    raise ValueError(f"unknown model {m!r}")
