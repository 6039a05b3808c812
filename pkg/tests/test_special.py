"""Distribution-level checks for the special-function layer.

Frozen reference values were produced by independent oracles before the
library existed: quadrature of closed-form densities, bisection on the
resulting CDFs, asymptotic series for digamma, and Monte Carlo with 10^7
draws for the noncentral chi-square and sample-correlation cases.  They
are asserted here as constants so any regression in the implementations
is caught against numbers the implementations never produced.
"""

import math

import numpy as np
import pytest
from scipy import integrate, stats

from mim import special
from mim.errors import AccuracyError

# round-trip tolerance tracks the quantile search tolerance, with headroom
QTOL = 10.0 * special.DEFAULT_POLICY.quantile_tol if hasattr(special, "DEFAULT_POLICY") else 1e-9
QTOL = max(QTOL, 1e-9)

P_GRID = (0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99)


# ---------------------------------------------------------------------------
# standard normal


def test_std_normal_cdf_center_and_known_point():
    assert special.std_normal_cdf(0.0) == pytest.approx(0.5, abs=1e-15)
    # 2*Phi(1) - 1 equals erf(1/sqrt 2); frozen from the error-function series
    assert special.std_normal_cdf(1.0) == pytest.approx(0.8413447460685429, abs=1e-12)
    assert special.std_normal_cdf(1.959964) == pytest.approx(0.975, abs=1e-6)
    assert special.std_normal_cdf(-1.959964) == pytest.approx(0.025, abs=1e-6)


def test_std_normal_quantile_frozen():
    # bisection oracle on the CDF
    assert special.std_normal_quantile(0.5) == pytest.approx(0.0, abs=1e-12)
    assert special.std_normal_quantile(0.975) == pytest.approx(1.959963984540054, abs=1e-9)
    assert special.std_normal_quantile(0.025) == pytest.approx(-1.959963984540054, abs=1e-9)


def test_std_normal_round_trip():
    for p in P_GRID:
        z = special.std_normal_quantile(p)
        assert special.std_normal_cdf(z) == pytest.approx(p, abs=QTOL)


def test_std_normal_quantile_domain():
    for bad in (0.0, 1.0, -0.2, 1.7):
        with pytest.raises(ValueError):
            special.std_normal_quantile(bad)


# ---------------------------------------------------------------------------
# Student t


def test_student_t_cdf_frozen():
    assert special.student_t_cdf(0.0, 5) == pytest.approx(0.5, abs=1e-15)
    # nu=1 is Cauchy: 1/2 + arctan(t)/pi
    assert special.student_t_cdf(1.0, 1) == pytest.approx(0.75, abs=1e-12)
    assert special.student_t_cdf(2.776445, 4) == pytest.approx(0.975, abs=1e-6)


def test_student_t_quantile_frozen():
    assert special.student_t_quantile(0.5, 7) == pytest.approx(0.0, abs=1e-12)
    # Cauchy closed form tan(pi/4)
    assert special.student_t_quantile(0.75, 1) == pytest.approx(1.0, abs=1e-9)
    # quantile-table oracle: numerical integration of the t density + bisection
    assert special.student_t_quantile(0.975, 4) == pytest.approx(2.776445105198, abs=1e-8)
    assert special.student_t_quantile(0.975, 3) == pytest.approx(3.182446305284, abs=1e-8)
    assert special.student_t_quantile(0.975, 19) == pytest.approx(2.093024054408, abs=1e-8)


def test_student_t_round_trip():
    for nu in (1, 4, 19):
        for p in P_GRID:
            t = special.student_t_quantile(p, nu)
            assert special.student_t_cdf(t, nu) == pytest.approx(p, abs=QTOL)


def test_student_t_domain():
    with pytest.raises(ValueError):
        special.student_t_cdf(1.0, 0)
    with pytest.raises(ValueError):
        special.student_t_quantile(1.5, 3)


# ---------------------------------------------------------------------------
# chi-square


def test_chisq_cdf_frozen():
    assert special.chisq_cdf(0.0, 3) == 0.0
    # ChiSq(2) is Exponential(mean 2), so the median is 2 ln 2
    assert special.chisq_cdf(2.0 * math.log(2.0), 2) == pytest.approx(0.5, abs=1e-12)
    # ChiSq(1) at 1 equals 2*Phi(1) - 1
    assert special.chisq_cdf(1.0, 1) == pytest.approx(0.6826894921370859, abs=1e-12)
    with pytest.raises(ValueError):
        special.chisq_cdf(-1.0, 3)


def test_chisq_median_frozen():
    assert special.chisq_median(2) == pytest.approx(2.0 * math.log(2.0), abs=1e-10)
    # inversion oracle on chisq_cdf
    assert special.chisq_median(1) == pytest.approx(0.454936423120, abs=1e-9)
    assert special.chisq_median(10) == pytest.approx(9.341817765592, abs=1e-9)
    assert special.chisq_median(38) == pytest.approx(37.335452729143, abs=1e-9)


def test_chisq_median_is_a_median():
    for nu in (1, 2, 3.7, 10, 38):
        assert special.chisq_cdf(special.chisq_median(nu), nu) == pytest.approx(0.5, abs=QTOL)


# ---------------------------------------------------------------------------
# noncentral chi-square


def test_noncentral_chisq_central_case():
    for x, n in ((0.7, 2), (3.0, 5), (20.0, 5)):
        assert special.noncentral_chisq_cdf(x, n, 0.0) == pytest.approx(
            special.chisq_cdf(x, n), abs=1e-12)


def test_noncentral_chisq_at_zero():
    assert special.noncentral_chisq_cdf(0.0, 5, 2.25) == 0.0


def test_noncentral_chisq_frozen():
    # Monte Carlo oracle, 10^7 draws of (Z+1)^2 + Z'^2: 0.908134 +- 0.000091
    assert special.noncentral_chisq_cdf(7.0, 2, 1.0) == pytest.approx(0.908134, abs=3e-4)
    # series value frozen after the Monte Carlo check
    assert special.noncentral_chisq_cdf(7.0, 2, 1.0) == pytest.approx(
        0.90807320975426331, abs=1e-12)
    assert special.noncentral_chisq_cdf(0.2, 2, 4.0) == pytest.approx(
        0.014187840448633703, abs=1e-12)


def test_noncentral_chisq_against_independent_implementation():
    # dual route: hand-rolled Poisson mixture series vs the library CDF
    for x, n, lam, want in (
        (7.0, 2, 1.0, 0.9080732097542632),
        (5.0, 2, 1.0, 0.8107099625707197),
        (20.0, 5, 9.0, 0.82243124864870187),
        (0.2, 2, 4.0, 0.014187840448633703),
    ):
        assert stats.ncx2.cdf(x, n, lam) == pytest.approx(want, rel=1e-12)
        assert special.noncentral_chisq_cdf(x, n, lam) == pytest.approx(want, rel=1e-10)


def test_noncentral_chisq_monotone_in_lam():
    lams = np.linspace(0.0, 30.0, 40)
    vals = np.array([special.noncentral_chisq_cdf(8.0, 4, l) for l in lams])
    assert np.all(np.diff(vals) < 0.0)


def test_noncentral_chisq_accuracy_error_carries_partial():
    pol = special.AccuracyPolicy(max_terms=100)
    with pytest.raises(AccuracyError) as exc:
        special.noncentral_chisq_cdf(7.0, 2, 400.0, pol)
    err = exc.value
    assert err.partial is not None and 0.0 <= err.partial <= 1.0
    assert err.error_bound is not None and err.error_bound > 0.0


def test_noncentral_chisq_domain():
    with pytest.raises(ValueError):
        special.noncentral_chisq_cdf(1.0, 2, -0.5)


# ---------------------------------------------------------------------------
# gamma CDF (shape/mean parameterization)


def test_gamma_cdf_frozen():
    assert special.gamma_cdf(0.0, 2.0, 2.0) == 0.0
    # shape 1 is Exponential: median is mean * ln 2
    assert special.gamma_cdf(math.log(2.0), 1.0, 1.0) == pytest.approx(0.5, abs=1e-12)
    # series-evaluation oracle
    assert special.gamma_cdf(3.0, 3.0, 3.0) == pytest.approx(0.57680991887315658, abs=1e-12)
    with pytest.raises(ValueError):
        special.gamma_cdf(-1.0, 2.0, 2.0)


# ---------------------------------------------------------------------------
# digamma


def test_digamma_frozen():
    # -Euler-Mascheroni, series oracle
    assert special.digamma(1.0) == pytest.approx(-0.5772156649015329, abs=1e-12)
    assert special.digamma(2.0) == pytest.approx(0.42278433509846713, abs=1e-12)
    # asymptotic expansion oracle: ln x - 1/2x - 1/12x^2 + 1/120x^4
    assert special.digamma(100.0) == pytest.approx(4.6001618527380881, abs=1e-8)


def test_digamma_recurrence():
    # psi(x+1) = psi(x) + 1/x
    for x in np.arange(0.5, 20.5, 0.5):
        lhs = special.digamma(x + 1.0)
        rhs = special.digamma(x) + 1.0 / x
        assert lhs == pytest.approx(rhs, abs=1e-11)


def test_digamma_domain():
    with pytest.raises(ValueError):
        special.digamma(0.0)
    with pytest.raises(ValueError):
        special.digamma(-3.0)


# ---------------------------------------------------------------------------
# half-t mixture


def test_halft_scale_frozen():
    # c_n = sqrt(2(n-1)/median(ChiSq(2n-2))); c_2 = sqrt(2 / (2 ln 2))
    assert special.halft_scale(2) == pytest.approx(1.2011224087864496, abs=1e-10)
    assert special.halft_scale(5) == pytest.approx(1.0436985184720562, abs=1e-10)


def test_halft_scale_exceeds_one():
    # chi-square medians sit below the mean, so the negative side stretches
    for n in (2, 3, 5, 10, 20, 50):
        assert special.halft_scale(n) > 1.0


def test_halft_mixture_cdf_frozen():
    for n in (2, 5, 20):
        assert special.halft_mixture_cdf(0.0, n) == pytest.approx(0.5, abs=1e-14)
    # rescaled Cauchy closed form: G(-c_2) = T_1(-1) = 0.25
    assert special.halft_mixture_cdf(-1.201123, 2) == pytest.approx(0.25, abs=1e-5)


def test_halft_mixture_negative_scale_one_is_plain_t():
    zs = np.linspace(-4.0, 4.0, 33)
    for n in (2, 5):
        got = special.halft_mixture_cdf(zs, n, negative_scale=1.0)
        want = special.student_t_cdf(zs, n - 1)
        np.testing.assert_allclose(got, want, atol=1e-13)


def test_halft_mixture_quantile_frozen():
    assert special.halft_mixture_quantile(0.5, 3) == pytest.approx(0.0, abs=1e-9)
    assert special.halft_mixture_quantile(0.25, 2) == pytest.approx(-1.2011224087864496, abs=1e-8)
    # positive side matches the plain t quantile
    assert special.halft_mixture_quantile(0.975, 4) == pytest.approx(3.182446305284, abs=1e-8)


def test_halft_mixture_round_trip():
    for n in (2, 5, 20):
        for p in P_GRID:
            z = special.halft_mixture_quantile(p, n)
            assert special.halft_mixture_cdf(z, n) == pytest.approx(p, abs=QTOL)


def test_halft_mixture_domain():
    with pytest.raises(ValueError):
        special.halft_mixture_cdf(0.0, 1)


# ---------------------------------------------------------------------------
# sample correlation distribution


def test_sample_corr_density_normalizes():
    for n, psi in ((5, 0.0), (10, 0.3), (10, -0.7)):
        total, err = integrate.quad(
            lambda r: special.sample_corr_density(r, n, psi), -1.0, 1.0, limit=200)
        assert total == pytest.approx(1.0, abs=max(1e-8, 10 * err))


def test_sample_corr_cdf_frozen():
    # Monte Carlo oracle, 10^7 bivariate samples: 0.726766 +- 0.000143
    assert special.sample_corr_cdf(0.5, 10, 0.3) == pytest.approx(0.726766, abs=6e-4)
    # quadrature value frozen after the Monte Carlo check
    assert special.sample_corr_cdf(0.5, 10, 0.3) == pytest.approx(
        0.72700458569826654, abs=1e-9)
    assert special.sample_corr_cdf(0.5, 10, 0.5) == pytest.approx(
        0.46468476622065769, abs=1e-9)


def test_sample_corr_cdf_support_and_symmetry():
    assert special.sample_corr_cdf(1.0, 8, 0.2) == pytest.approx(1.0, abs=1e-12)
    assert special.sample_corr_cdf(-1.0, 8, 0.2) == pytest.approx(0.0, abs=1e-12)
    # negating both the point and the parameter mirrors the distribution
    for r, n, psi in ((0.4, 7, 0.25), (-0.2, 12, 0.6)):
        lhs = special.sample_corr_cdf(r, n, psi)
        rhs = 1.0 - special.sample_corr_cdf(-r, n, -psi)
        assert lhs == pytest.approx(rhs, abs=1e-9)


def test_sample_corr_cdf_null_center():
    # under psi=0 the distribution of r is symmetric about zero
    assert special.sample_corr_cdf(0.0, 10, 0.0) == pytest.approx(0.5, abs=1e-10)


def test_sample_corr_cdf_monotone_in_psi():
    psis = np.linspace(-0.9, 0.9, 19)
    vals = [special.sample_corr_cdf(0.3, 8, p) for p in psis]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_sample_corr_cdf_domain():
    with pytest.raises(ValueError):
        special.sample_corr_cdf(0.5, 10, 1.0)
    with pytest.raises(ValueError):
        special.sample_corr_cdf(0.5, 1, 0.0)


# ---------------------------------------------------------------------------
# Monte Carlo agreement for the hand-rolled CDFs


def test_cdf_monte_carlo_agreement():
    # empirical CDFs from 10^6 draws must track each implementation within
    # 4 binomial standard errors at every probe point
    rng = np.random.default_rng(20260813)
    reps = 1_000_000
    probes = {
        "std_normal": (rng.standard_normal(reps),
                       special.std_normal_cdf,
                       np.linspace(-2.5, 2.5, 9)),
        "student_t4": (rng.standard_t(4, reps),
                       lambda z: special.student_t_cdf(z, 4),
                       np.linspace(-4.0, 4.0, 9)),
        "chisq5": (rng.chisquare(5, reps),
                   lambda z: special.chisq_cdf(z, 5),
                   np.linspace(0.5, 14.0, 9)),
        "ncx2_3_2.25": (rng.noncentral_chisquare(3, 2.25, reps),
                        lambda z: special.noncentral_chisq_cdf(z, 3, 2.25),
                        np.linspace(0.5, 14.0, 9)),
        "gamma_3_mean2": (rng.gamma(3.0, 2.0 / 3.0, reps),
                          lambda z: special.gamma_cdf(z, 3.0, 2.0),
                          np.linspace(0.3, 5.0, 9)),
    }
    for name, (draws, cdf, grid) in probes.items():
        for z in grid:
            emp = float(np.mean(draws <= z))
            se = math.sqrt(max(emp * (1.0 - emp), 1e-12) / reps)
            assert cdf(z) == pytest.approx(emp, abs=4.0 * se + 1e-9), name


def test_halft_mixture_monte_carlo():
    # equal-weight mixture of |t| and -c|t| reproduced by direct simulation
    rng = np.random.default_rng(7)
    reps = 1_000_000
    n = 2
    c = special.halft_scale(n)
    t = np.abs(rng.standard_t(n - 1, reps))
    sign = rng.uniform(size=reps) < 0.5
    z = np.where(sign, t, -c * t)
    for q in np.linspace(-5.0, 5.0, 11):
        emp = float(np.mean(z <= q))
        se = math.sqrt(max(emp * (1.0 - emp), 1e-12) / reps)
        assert special.halft_mixture_cdf(q, n) == pytest.approx(emp, abs=4.0 * se + 1e-9)


# ---------------------------------------------------------------------------
# log-argument helpers


def test_gammainc_logx_matches_direct_when_representable():
    for shape in (0.5, 2.0, 7.5):
        for log_x in (-5.0, 0.0, 2.0):
            want = stats.gamma.cdf(math.exp(log_x), a=shape)
            assert special._gammainc_logx(shape, log_x) == pytest.approx(want, rel=1e-12)


def test_gammainc_logx_below_underflow():
    # one-term series x^a / Gamma(a+1), exact to relative error x there
    log_x = -700.0
    got = special._gammainc_logx(0.3, log_x)
    want = math.exp(0.3 * log_x - math.lgamma(1.3))
    assert got > 0.0
    assert got == pytest.approx(want, rel=1e-12)
    # continuity across the branch switch near exp(-644); shape kept small so
    # the values themselves stay above the double-precision floor
    lo = special._gammainc_logx(0.5, -643.9)
    hi = special._gammainc_logx(0.5, -644.1)
    assert lo > hi > 0.0
    assert math.log(lo) - math.log(hi) == pytest.approx(0.2 * 0.5, rel=1e-6)


def test_gamma_z_logx_central_agreement():
    for shape in (0.7, 3.0, 40.0):
        for log_x in (-1.0, 0.0, 1.0):
            want = stats.norm.ppf(stats.gamma.cdf(math.exp(log_x), a=shape))
            assert special._gamma_z_logx(shape, log_x) == pytest.approx(want, abs=1e-10)


def test_gamma_z_logx_right_tail_survives():
    # shape 1 is Exponential: the upper tail is exp(-x) exactly
    for x in (50.0, 200.0, 500.0):
        got = special._gamma_z_logx(1.0, math.log(x))
        want = -stats.norm.ppf(math.exp(-x)) if x < 700 else math.inf
        assert got == pytest.approx(want, rel=1e-9)
    # the naive route loses the tail already at moderate x
    assert np.isinf(stats.norm.ppf(stats.gamma.cdf(50.0, a=1.0)))


def test_gamma_z_logx_monotone_in_x():
    # kept below the Q-underflow horizon so every score is finite
    logs = np.linspace(-10.0, 5.0, 60)
    vals = np.array([special._gamma_z_logx(2.5, l) for l in logs])
    assert np.all(np.isfinite(vals))
    assert np.all(np.diff(vals) > 0.0)
