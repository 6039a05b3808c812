"""Distribution functions, quantiles, and special functions behind the model catalog.

Everything here is deterministic and pure.  CDFs are clamped to [0, 1], and
each quantile routine inverts its CDF to the tolerance carried by
``AccuracyPolicy``.  The noncentral chi-square series and the
sample-correlation CDF are implemented locally with explicit truncation and
quadrature error control; the classical functions are thin, contract-checked
wrappers over ``scipy.special``.

All functions broadcast over numpy arrays and return scalars for scalar input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy import special as sp

from .errors import AccuracyError

__all__ = [
    "AccuracyPolicy",
    "DEFAULT_POLICY",
    "std_normal_cdf",
    "std_normal_quantile",
    "student_t_cdf",
    "student_t_quantile",
    "chisq_cdf",
    "chisq_median",
    "noncentral_chisq_cdf",
    "gamma_cdf",
    "digamma",
    "halft_scale",
    "halft_mixture_cdf",
    "halft_mixture_quantile",
    "sample_corr_density",
    "sample_corr_cdf",
]


@dataclass(frozen=True)
class AccuracyPolicy:
    """Evaluation tolerances shared by the series and quantile routines.

    abs_tol bounds the truncation/quadrature error of CDF evaluations,
    max_terms caps series length, and quantile_tol is the tolerance to which
    quantile routines invert their CDFs.
    """

    abs_tol: float = 1e-12
    max_terms: int = 10000
    quantile_tol: float = 1e-10

    def __post_init__(self):
        if not (self.abs_tol > 0.0):
            raise ValueError("abs_tol must be positive")
        if not (self.quantile_tol > 0.0):
            raise ValueError("quantile_tol must be positive")
        if self.max_terms < 100:
            raise ValueError("max_terms must be at least 100")


DEFAULT_POLICY = AccuracyPolicy()


def _as_float_array(x, name: str):
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)):
        raise ValueError(f"{name} must not contain NaN")
    return arr


def _scalar_or_array(result: np.ndarray, scalar: bool):
    return float(result) if scalar else result


def _check_prob(p, name: str = "p"):
    arr = _as_float_array(p, name)
    if np.any((arr <= 0.0) | (arr >= 1.0)):
        raise ValueError(f"{name} must lie strictly inside (0, 1)")
    return arr


def _check_df(nu, name: str = "nu"):
    arr = _as_float_array(nu, name)
    if np.any(arr <= 0.0):
        raise ValueError(f"{name} must be positive")
    return arr


def _check_sample_size(n, minimum: int, name: str = "n") -> int:
    if isinstance(n, float):
        if not n.is_integer():
            raise ValueError(f"{name} must be an integer")
        n = int(n)
    if not isinstance(n, (int, np.integer)):
        raise ValueError(f"{name} must be an integer")
    n = int(n)
    if n < minimum:
        raise ValueError(f"{name} must be at least {minimum}")
    return n


def std_normal_cdf(z):
    """Standard normal CDF."""
    arr = _as_float_array(z, "z")
    return _scalar_or_array(sp.ndtr(arr), arr.ndim == 0)


def std_normal_quantile(p):
    """Inverse of the standard normal CDF on (0, 1)."""
    arr = _check_prob(p)
    return _scalar_or_array(sp.ndtri(arr), arr.ndim == 0)


def student_t_cdf(t, nu):
    """Student-t CDF with nu > 0 degrees of freedom."""
    t_arr = _as_float_array(t, "t")
    nu_arr = _check_df(nu)
    out = sp.stdtr(nu_arr, t_arr)
    return _scalar_or_array(np.clip(out, 0.0, 1.0), np.ndim(out) == 0)


def student_t_quantile(p, nu):
    """Student-t quantile with nu > 0 degrees of freedom."""
    p_arr = _check_prob(p)
    nu_arr = _check_df(nu)
    out = sp.stdtrit(nu_arr, p_arr)
    return _scalar_or_array(out, np.ndim(out) == 0)


def chisq_cdf(x, nu):
    """Chi-square CDF: regularized lower incomplete gamma at (nu/2, x/2)."""
    x_arr = _as_float_array(x, "x")
    if np.any(x_arr < 0.0):
        raise ValueError("x must be nonnegative")
    nu_arr = _check_df(nu)
    out = sp.gammainc(nu_arr / 2.0, x_arr / 2.0)
    return _scalar_or_array(np.clip(out, 0.0, 1.0), np.ndim(out) == 0)


def chisq_median(nu):
    """Median of the chi-square distribution with nu > 0 degrees of freedom."""
    nu_arr = _check_df(nu)
    out = 2.0 * sp.gammaincinv(nu_arr / 2.0, 0.5)
    return _scalar_or_array(out, np.ndim(out) == 0)


def _poisson_log_weights(delta: np.ndarray, j: np.ndarray) -> np.ndarray:
    """log Poisson(delta) pmf at integer points j, elementwise over rows.

    delta has shape (m,), j has shape (k,); result is (m, k).  Rows with
    delta == 0 get all mass at j == 0.
    """
    d = delta[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        logw = -d + j[None, :] * np.log(d) - sp.gammaln(j + 1.0)[None, :]
    zero = delta == 0.0
    if np.any(zero):
        logw[zero, :] = -np.inf
        if j[0] == 0:
            logw[zero, 0] = 0.0
    return logw


def _ncx2_window(dmin: float, dmax: float, widen: float = 1.0) -> tuple[int, int]:
    # Poisson mass outside mode +- w decays like exp(-w^2 / (2(delta+w))),
    # so 10 sd + 20 leaves well under 1e-12 outside the window.
    w_lo = widen * (10.0 * math.sqrt(dmin + 1.0) + 20.0)
    w_hi = widen * (10.0 * math.sqrt(dmax + 1.0) + 20.0)
    j_lo = max(0, int(math.floor(dmin - w_lo)))
    j_hi = int(math.ceil(dmax + w_hi))
    return j_lo, j_hi


def noncentral_chisq_cdf(x, n, lam, policy: AccuracyPolicy | None = None):
    """Noncentral chi-square CDF with integer df n and noncentrality lam >= 0.

    Evaluated as the Poisson(lam/2)-weighted mixture of central chi-square
    CDFs with df n, n+2, n+4, ...  The series is summed over a window around
    the Poisson mode; because every central CDF term lies in [0, 1], the
    truncation error is bounded by the Poisson mass left outside the window,
    and the window is widened until that bound falls below policy.abs_tol.

    Raises AccuracyError (carrying the partial value) if the bound cannot be
    met within policy.max_terms terms.
    """
    pol = policy or DEFAULT_POLICY
    n = _check_sample_size(n, 1, "n")
    x_arr = _as_float_array(x, "x")
    lam_arr = _as_float_array(lam, "lam")
    if np.any(x_arr < 0.0):
        raise ValueError("x must be nonnegative")
    if np.any(lam_arr < 0.0):
        raise ValueError("lam must be nonnegative")
    xb, lb = np.broadcast_arrays(x_arr, lam_arr)
    scalar = xb.ndim == 0
    xf = np.atleast_1d(xb).ravel().astype(float)
    lf = np.atleast_1d(lb).ravel().astype(float)

    delta = lf / 2.0
    dmin = float(delta.min())
    dmax = float(delta.max())

    j = None
    logw = None
    missing = None
    for widen in (1.0, 2.0, 4.0):
        j_lo, j_hi = _ncx2_window(dmin, dmax, widen)
        count = j_hi - j_lo + 1
        if count > pol.max_terms:
            break
        j = np.arange(j_lo, j_hi + 1, dtype=float)
        logw = _poisson_log_weights(delta, j)
        missing = 1.0 - np.exp(logw).sum(axis=1)
        if float(np.max(missing)) <= pol.abs_tol:
            break
    else:
        j = None

    if j is None or float(np.max(missing)) > pol.abs_tol:
        # Best effort inside the term budget, then report failure.
        j_lo, j_hi = _ncx2_window(dmin, dmax, 1.0)
        if j_hi - j_lo + 1 > pol.max_terms:
            mid = int(round((dmin + dmax) / 2.0))
            j_lo = max(0, mid - pol.max_terms // 2)
            j_hi = j_lo + pol.max_terms - 1
        j = np.arange(j_lo, j_hi + 1, dtype=float)
        logw = _poisson_log_weights(delta, j)
        weights = np.exp(logw)
        terms = sp.gammainc(n / 2.0 + j[None, :], xf[:, None] / 2.0)
        partial = np.clip((weights * terms).sum(axis=1), 0.0, 1.0)
        bound = float(np.max(1.0 - weights.sum(axis=1)))
        raise AccuracyError(
            f"noncentral chi-square series needs more than {pol.max_terms} "
            f"terms to reach abs_tol={pol.abs_tol:g}",
            partial=_scalar_or_array(partial.reshape(xb.shape), scalar),
            error_bound=bound,
        )

    weights = np.exp(logw)
    terms = sp.gammainc(n / 2.0 + j[None, :], xf[:, None] / 2.0)
    vals = np.clip((weights * terms).sum(axis=1), 0.0, 1.0)
    return _scalar_or_array(vals.reshape(xb.shape), scalar)


def gamma_cdf(x, shape, mean):
    """Gamma CDF parameterized by shape and mean (rate = shape / mean)."""
    x_arr = _as_float_array(x, "x")
    if np.any(x_arr < 0.0):
        raise ValueError("x must be nonnegative")
    shape_arr = _check_df(shape, "shape")
    mean_arr = _check_df(mean, "mean")
    out = sp.gammainc(shape_arr, x_arr * shape_arr / mean_arr)
    return _scalar_or_array(np.clip(out, 0.0, 1.0), np.ndim(out) == 0)


def _gammainc_logx(shape, log_x):
    """Regularized lower incomplete gamma P(shape, exp(log_x)) that stays
    accurate when exp(log_x) underflows.

    For x below 1e-280 the one-term series x^shape / Gamma(shape+1) is exact
    to within a relative error of x, which is far below double precision.
    """
    shape_arr = np.asarray(shape, dtype=float)
    log_arr = np.asarray(log_x, dtype=float)
    tiny = log_arr < -644.0  # exp(-644) ~ 1e-280
    direct = sp.gammainc(shape_arr, np.exp(np.where(tiny, 0.0, log_arr)))
    series = np.exp(np.where(tiny, shape_arr * log_arr, -np.inf)
                    - sp.gammaln(shape_arr + 1.0))
    out = np.where(tiny, series, direct)
    return _scalar_or_array(np.clip(out, 0.0, 1.0), np.ndim(out) == 0)


def _gamma_z_logx(shape, log_x):
    """Standard-normal score ndtri(P(shape, exp(log_x))) stable in both tails.

    Once P passes 1/2 the score is computed from the complementary tail
    Q = gammaincc, so it saturates only when Q itself underflows (|z| ~ 38)
    instead of when 1 - P is lost to rounding (z ~ 8).  The lower tail
    inherits the underflow escape of _gammainc_logx.
    """
    shape_arr = np.asarray(shape, dtype=float)
    log_arr = np.asarray(log_x, dtype=float)
    p = np.asarray(_gammainc_logx(shape_arr, log_arr), dtype=float)
    q = sp.gammaincc(shape_arr, np.exp(log_arr))
    lower = p <= 0.5
    z = np.where(lower,
                 sp.ndtri(np.where(lower, p, 0.5)),
                 -sp.ndtri(np.where(lower, 0.5, q)))
    return _scalar_or_array(z, np.ndim(z) == 0)


def digamma(x):
    """Digamma function on (0, inf)."""
    arr = _as_float_array(x, "x")
    if np.any(arr <= 0.0):
        raise ValueError("x must be positive")
    return _scalar_or_array(sp.psi(arr), arr.ndim == 0)


def halft_scale(n):
    """Scale c_n = sqrt(2(n-1) / median(chi-square(2n-2))) of the negative
    half of the half-t mixture.  Always > 1 because the chi-square median
    sits below its mean."""
    n = _check_sample_size(n, 2, "n")
    return math.sqrt(2.0 * (n - 1) / chisq_median(2 * n - 2))


def halft_mixture_cdf(z, n, negative_scale: float | None = None):
    """CDF of the equal-weight mixture of a positive half-t(n-1) and a
    negative half-t(n-1) stretched by c_n.

    negative_scale overrides c_n; passing 1.0 collapses the mixture to the
    plain t(n-1) CDF, which is useful as a diagnostic.
    """
    n = _check_sample_size(n, 2, "n")
    c = halft_scale(n) if negative_scale is None else float(negative_scale)
    if c <= 0.0:
        raise ValueError("negative_scale must be positive")
    z_arr = _as_float_array(z, "z")
    nu = n - 1
    out = np.where(z_arr < 0.0, sp.stdtr(nu, z_arr / c), sp.stdtr(nu, z_arr))
    return _scalar_or_array(np.clip(out, 0.0, 1.0), z_arr.ndim == 0)


def halft_mixture_quantile(p, n, negative_scale: float | None = None):
    """Inverse of halft_mixture_cdf on (0, 1)."""
    n = _check_sample_size(n, 2, "n")
    c = halft_scale(n) if negative_scale is None else float(negative_scale)
    if c <= 0.0:
        raise ValueError("negative_scale must be positive")
    p_arr = _check_prob(p)
    nu = n - 1
    base = sp.stdtrit(nu, p_arr)
    out = np.where(p_arr < 0.5, c * base, base)
    return _scalar_or_array(out, p_arr.ndim == 0)


def _corr_log_density_theta(theta, n: int, psi: float, log_const: float) -> float:
    # Integrand of the sample-correlation CDF after substituting r = sin(theta):
    # the (1-r^2)^((n-4)/2) dr factor becomes cos(theta)^(n-3) d(theta), which
    # removes the endpoint singularity for every n >= 3.
    s = math.sin(theta)
    ct = math.cos(theta)
    if ct <= 0.0:
        return 0.0
    hyp = sp.hyp2f1(0.5, 0.5, n - 0.5, (1.0 + psi * s) / 2.0)
    return math.exp(
        log_const + (n - 3) * math.log(ct) - (n - 1.5) * math.log1p(-psi * s)
    ) * hyp


def _corr_log_const(n: int, psi: float) -> float:
    return (
        math.log(n - 2)
        + sp.gammaln(n - 1)
        - 0.5 * math.log(2.0 * math.pi)
        - sp.gammaln(n - 0.5)
        + 0.5 * (n - 1) * math.log1p(-psi * psi)
    )


def sample_corr_density(r, n, psi):
    """Density of the sample correlation from n bivariate normal pairs with
    population correlation psi."""
    n = _check_sample_size(n, 3, "n")
    psi = float(psi)
    if not -1.0 < psi < 1.0:
        raise ValueError("psi must lie strictly inside (-1, 1)")
    r_arr = _as_float_array(r, "r")
    scalar = r_arr.ndim == 0
    rf = np.atleast_1d(r_arr).astype(float)
    out = np.zeros_like(rf)
    log_const = _corr_log_const(n, psi)
    inside = np.abs(rf) < 1.0
    ri = rf[inside]
    with np.errstate(divide="ignore"):
        logd = (
            log_const
            + 0.5 * (n - 4) * np.log1p(-ri * ri)
            - (n - 1.5) * np.log1p(-psi * ri)
        )
    hyp = sp.hyp2f1(0.5, 0.5, n - 0.5, (1.0 + psi * ri) / 2.0)
    out[inside] = np.exp(logd) * hyp
    boundary = np.abs(rf) == 1.0
    if np.any(boundary):
        out[boundary] = np.inf if n == 3 else 0.0
    return _scalar_or_array(out.reshape(r_arr.shape) if not scalar else out[0], scalar)


def _corr_cdf_scalar(r: float, n: int, psi: float, pol: AccuracyPolicy) -> float:
    if r <= -1.0:
        return 0.0
    if r >= 1.0:
        return 1.0
    log_const = _corr_log_const(n, psi)
    upper = math.asin(r)
    eps = max(pol.abs_tol, 1e-13)
    val, abserr = integrate.quad(
        _corr_log_density_theta,
        -math.pi / 2.0,
        upper,
        args=(n, psi, log_const),
        epsabs=eps,
        epsrel=1e-10,
        limit=200,
    )
    if abserr > max(100.0 * eps, 1e-9):
        raise AccuracyError(
            "sample-correlation CDF quadrature did not converge",
            partial=min(max(val, 0.0), 1.0),
            error_bound=abserr,
        )
    return min(max(val, 0.0), 1.0)


def sample_corr_cdf(r, n, psi, policy: AccuracyPolicy | None = None):
    """CDF of the sample correlation from n >= 3 bivariate normal pairs with
    population correlation psi in (-1, 1).

    Computed by adaptive quadrature of the exact density; strictly
    decreasing in psi for fixed r in (-1, 1).
    """
    pol = policy or DEFAULT_POLICY
    n = _check_sample_size(n, 3, "n")
    psi = float(psi)
    if not -1.0 < psi < 1.0:
        raise ValueError("psi must lie strictly inside (-1, 1)")
    r_arr = _as_float_array(r, "r")
    scalar = r_arr.ndim == 0
    rf = np.atleast_1d(r_arr).astype(float).ravel()
    out = np.array([_corr_cdf_scalar(float(v), n, psi, pol) for v in rf])
    return _scalar_or_array(out.reshape(r_arr.shape) if not scalar else out[0], scalar)
