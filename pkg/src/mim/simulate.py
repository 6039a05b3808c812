"""Monte Carlo harness: validity, coverage, and stochastic-bound checks.

Replicate r of a run always draws from an independent substream derived from
(seed, r) by a counter-based split, so reports are bit-identical regardless
of how replicates are grouped into chunks.  Sampling uses each model's own
auxiliary-variable representation, and plausibility is evaluated through the
same kernels the scalar API uses.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy import special as sp

from . import models
from .core import elastic_mnm_plausibility
from .errors import DegenerateDataError
from .special import (
    AccuracyPolicy,
    _gamma_z_logx,
    chisq_cdf,
    halft_mixture_cdf,
    halft_mixture_quantile,
    sample_corr_cdf,
    std_normal_quantile,
    student_t_quantile,
)

__all__ = [
    "substream",
    "SimulationModel",
    "SimulationConfig",
    "SimulationReport",
    "simulate_validity",
    "simulate_coverage",
    "bound_curves",
    "prs_miss_uniformity",
]


def substream(seed: int, index: int) -> np.random.Generator:
    """Random stream for replicate `index` of a run with master seed `seed`.

    Philox is counter based: placing each replicate 2**128 counter steps
    apart gives non-overlapping streams that depend only on (seed, index),
    never on execution order or chunking.
    """
    if index < 0:
        raise ValueError("index must be nonnegative")
    key = int(seed) % (1 << 64)
    return np.random.Generator(np.random.Philox(key=key, counter=index << 128))


_REQUIRED_PARAMS = {
    "normal-mean": ("psi", "sigma", "n"),
    "normal-mean-t": ("psi", "sigma", "n"),
    "corr": ("psi", "n"),
    "mean-ratio": ("psi", "xi"),
    "mnm": ("psi", "n"),
    "behrens-fisher": ("psi", "xi", "n1", "n2"),
    "gamma-mean": ("psi", "shape", "n"),
}


@dataclass(frozen=True)
class SimulationModel:
    """A catalog model with its true parameter values: the interest
    parameter psi plus whatever nuisance values the model needs."""

    name: str
    params: Mapping[str, float]

    def __post_init__(self):
        if self.name not in _REQUIRED_PARAMS:
            raise ValueError(f"unknown model {self.name!r}")
        missing = [k for k in _REQUIRED_PARAMS[self.name] if k not in self.params]
        if missing:
            raise ValueError(f"model {self.name!r} is missing parameters {missing}")
        object.__setattr__(self, "params", dict(self.params))


@dataclass(frozen=True)
class SimulationConfig:
    model: SimulationModel
    reps: int
    alpha_grid: tuple[float, ...]
    seed: int
    parallel_chunks: int = 1

    def __post_init__(self):
        if self.reps < 100:
            raise ValueError("reps must be at least 100")
        alphas = tuple(float(a) for a in self.alpha_grid)
        if len(alphas) == 0:
            raise ValueError("alpha_grid must be nonempty")
        if any(not (0.0 < a < 1.0) for a in alphas):
            raise ValueError("alpha_grid values must lie strictly inside (0, 1)")
        if any(b <= a for a, b in zip(alphas, alphas[1:])):
            raise ValueError("alpha_grid must be strictly increasing")
        if self.parallel_chunks < 1:
            raise ValueError("parallel_chunks must be at least 1")
        object.__setattr__(self, "alpha_grid", alphas)


@dataclass(frozen=True)
class SimulationReport:
    """Per-alpha summaries of one run.  Validity runs fill the exceedance
    block, coverage runs fill the coverage block.  wall_time_s is excluded
    from equality and from serialization so identical configurations produce
    byte-identical output."""

    model: str
    params: dict
    method: str
    reps: int
    seed: int
    alphas: tuple[float, ...]
    exceedance: tuple[float, ...] | None = None
    exceedance_se: tuple[float, ...] | None = None
    coverage: tuple[float, ...] | None = None
    coverage_se: tuple[float, ...] | None = None
    mean_length: tuple[float, ...] | None = None
    n_unbounded: tuple[int, ...] | None = None
    wall_time_s: float = field(default=0.0, compare=False)

    def to_json_dict(self) -> dict:
        out: dict = {
            "model": self.model,
            "params": dict(sorted(self.params.items())),
            "method": self.method,
            "reps": self.reps,
            "seed": self.seed,
            "alphas": list(self.alphas),
        }
        if self.exceedance is not None:
            out["exceedance"] = list(self.exceedance)
            out["exceedance_se"] = list(self.exceedance_se)
        if self.coverage is not None:
            out["coverage"] = list(self.coverage)
            out["coverage_se"] = list(self.coverage_se)
            out["mean_length"] = [
                None if math.isnan(v) else v for v in self.mean_length
            ]
            out["n_unbounded"] = list(self.n_unbounded)
        return out

    def to_csv_rows(self) -> tuple[list[str], list[list]]:
        header = ["model", "method", "reps", "seed", "alpha"]
        blocks = []
        if self.exceedance is not None:
            header += ["exceedance", "exceedance_se"]
        if self.coverage is not None:
            header += ["coverage", "coverage_se", "mean_length", "n_unbounded"]
        rows = []
        for i, a in enumerate(self.alphas):
            row: list = [self.model, self.method, self.reps, self.seed, a]
            if self.exceedance is not None:
                row += [self.exceedance[i], self.exceedance_se[i]]
            if self.coverage is not None:
                length = self.mean_length[i]
                row += [
                    self.coverage[i],
                    self.coverage_se[i],
                    "" if math.isnan(length) else length,
                    self.n_unbounded[i],
                ]
            rows.append(row)
        return header, rows


# ---------------------------------------------------------------------------
# Samplers: one replicate per substream, via the auxiliary-variable
# representation of each association.


def _sample_normal_mean(rng, p):
    n, sigma = int(p["n"]), p["sigma"]
    return (p["psi"] + sigma / math.sqrt(n) * rng.standard_normal(),)


def _sample_normal_mean_t(rng, p):
    n, sigma = int(p["n"]), p["sigma"]
    mean = p["psi"] + sigma / math.sqrt(n) * rng.standard_normal()
    sd = sigma * math.sqrt(rng.chisquare(n - 1) / (n - 1))
    return mean, sd


def _sample_corr(rng, p):
    n, psi = int(p["n"]), p["psi"]
    z1 = rng.standard_normal(n)
    z2 = rng.standard_normal(n)
    x = z1
    y = psi * z1 + math.sqrt(1.0 - psi * psi) * z2
    xc = x - x.mean()
    yc = y - y.mean()
    denom = math.sqrt(float(xc @ xc) * float(yc @ yc))
    return (float(xc @ yc) / denom,)


def _sample_mean_ratio(rng, p):
    xi, psi = p["xi"], p["psi"]
    return psi * xi + rng.standard_normal(), xi + rng.standard_normal()


def _sample_mnm(rng, p):
    n, psi = int(p["n"]), p["psi"]
    z = rng.standard_normal(n)
    z[0] += psi
    return (float(z @ z),)


def _bf_sigmas(p):
    # Invert xi = (1 + n1 sigma1^2 / (n2 sigma2^2))^-1 with sigma2 = 1.
    xi, n1, n2 = p["xi"], int(p["n1"]), int(p["n2"])
    if not (0.0 < xi < 1.0):
        raise ValueError("xi must lie strictly inside (0, 1)")
    sigma1 = math.sqrt((n2 / n1) * (1.0 / xi - 1.0))
    return sigma1, 1.0


def _sample_behrens_fisher(rng, p):
    n1, n2, psi = int(p["n1"]), int(p["n2"]), p["psi"]
    sigma1, sigma2 = _bf_sigmas(p)
    mean1 = sigma1 / math.sqrt(n1) * rng.standard_normal()
    mean2 = psi + sigma2 / math.sqrt(n2) * rng.standard_normal()
    s1 = sigma1 * math.sqrt(rng.chisquare(n1 - 1) / (n1 - 1))
    s2 = sigma2 * math.sqrt(rng.chisquare(n2 - 1) / (n2 - 1))
    f = math.sqrt(s1 * s1 / n1 + s2 * s2 / n2)
    return mean2 - mean1, f


def _log_gamma_draws(rng, shape: float, n: int) -> np.ndarray:
    # log Gamma(shape) = log Gamma(shape+1) + log(U)/shape keeps tiny shapes
    # representable where linear-scale draws would underflow to zero.
    return np.log(rng.gamma(shape + 1.0, size=n)) - rng.exponential(size=n) / shape


def _sample_gamma_mean(rng, p):
    n, shape, psi = int(p["n"]), p["shape"], p["psi"]
    logx = _log_gamma_draws(rng, shape, n) + math.log(psi / shape)
    t1 = float(sp.logsumexp(logx) - math.log(n))
    v2 = t1 - float(np.mean(logx))
    return t1, v2


_SAMPLERS = {
    "normal-mean": (_sample_normal_mean, ("mean",)),
    "normal-mean-t": (_sample_normal_mean_t, ("mean", "sd")),
    "corr": (_sample_corr, ("r",)),
    "mean-ratio": (_sample_mean_ratio, ("x1", "x2")),
    "mnm": (_sample_mnm, ("norm_sq",)),
    "behrens-fisher": (_sample_behrens_fisher, ("ybar", "f")),
    "gamma-mean": (_sample_gamma_mean, ("t1", "v2")),
}


def _chunk_ranges(reps: int, chunks: int):
    size = (reps + chunks - 1) // chunks
    for start in range(0, reps, size):
        yield start, min(start + size, reps)


def _sample_stats(model: SimulationModel, reps: int, seed: int, chunks: int) -> dict:
    sampler, names = _SAMPLERS[model.name]
    out = {name: np.empty(reps) for name in names}
    for start, stop in _chunk_ranges(reps, chunks):
        for r in range(start, stop):
            values = sampler(substream(seed, r), model.params)
            for name, v in zip(names, values):
                out[name][r] = v
    return out


# ---------------------------------------------------------------------------
# Vectorized plausibility at the true parameter value


def _mpl_true(model: SimulationModel, stats: dict,
              policy: AccuracyPolicy | None) -> np.ndarray:
    p = model.params
    psi = p["psi"]
    name = model.name
    if name == "normal-mean":
        f = models.normal_known_pivot(psi, stats["mean"], int(p["n"]), p["sigma"])
        return 1.0 - np.abs(2.0 * f - 1.0)
    if name == "normal-mean-t":
        f = models.normal_t_pivot(psi, stats["mean"], stats["sd"], int(p["n"]))
        return 1.0 - np.abs(2.0 * f - 1.0)
    if name == "corr":
        f = sample_corr_cdf(stats["r"], int(p["n"]), psi, policy)
        return 1.0 - np.abs(2.0 * f - 1.0)
    if name == "mean-ratio":
        return models.ratio_plausibility_value(psi, stats["x1"], stats["x2"])
    if name == "mnm":
        return elastic_mnm_plausibility(stats["norm_sq"], int(p["n"]), psi, policy)
    if name == "behrens-fisher":
        f = models.behrens_fisher_pivot(psi, stats["ybar"], stats["f"],
                                        int(p["n1"]), int(p["n2"]))
        return 1.0 - np.abs(2.0 * f - 1.0)
    if name == "gamma-mean":
        f = models.gamma_pivot(psi, stats["t1"], stats["v2"], int(p["n"]), policy)
        return 1.0 - np.abs(2.0 * f - 1.0)
    raise ValueError(f"unknown model {name!r}")


def _binomial_se(p_hat: np.ndarray, reps: int) -> np.ndarray:
    return np.sqrt(p_hat * (1.0 - p_hat) / reps)


def simulate_validity(cfg: SimulationConfig,
                      policy: AccuracyPolicy | None = None) -> SimulationReport:
    """Estimate P{mpl_X(psi_true) <= alpha} on the alpha grid.

    Validity means the estimate stays at or below alpha (up to Monte Carlo
    error); models with an exact auxiliary pivot sit on alpha.
    """
    t0 = time.perf_counter()
    stats = _sample_stats(cfg.model, cfg.reps, cfg.seed, cfg.parallel_chunks)
    mpl = np.asarray(_mpl_true(cfg.model, stats, policy), dtype=float)
    alphas = np.asarray(cfg.alpha_grid)
    counts = (mpl[:, None] <= alphas[None, :]).sum(axis=0)
    rate = counts / cfg.reps
    se = _binomial_se(rate, cfg.reps)
    return SimulationReport(
        model=cfg.model.name,
        params=dict(cfg.model.params),
        method="im",
        reps=cfg.reps,
        seed=cfg.seed,
        alphas=cfg.alpha_grid,
        exceedance=tuple(float(v) for v in rate),
        exceedance_se=tuple(float(v) for v in se),
        wall_time_s=time.perf_counter() - t0,
    )


# ---------------------------------------------------------------------------
# Per-replicate regions, vectorized where a closed form exists


def _region_batch(model: SimulationModel, stats: dict, alpha: float, method: str,
                  policy: AccuracyPolicy | None):
    """(covered, length, bounded) arrays for the level 1-alpha region of
    every replicate."""
    p = model.params
    psi = p["psi"]
    name = model.name
    if method == "fiducial" and name != "mnm":
        raise ValueError("the fiducial comparator is only defined for model 'mnm'")

    if name == "normal-mean":
        half = std_normal_quantile(1.0 - alpha / 2.0) * p["sigma"] / math.sqrt(int(p["n"]))
        covered = np.abs(stats["mean"] - psi) < half
        length = np.full_like(stats["mean"], 2.0 * half)
        return covered, length, np.ones_like(covered, dtype=bool)
    if name == "normal-mean-t":
        t = student_t_quantile(1.0 - alpha / 2.0, int(p["n"]) - 1)
        half = t * stats["sd"] / math.sqrt(int(p["n"]))
        covered = np.abs(stats["mean"] - psi) < half
        return covered, 2.0 * half, np.ones_like(covered, dtype=bool)
    if name == "behrens-fisher":
        t = student_t_quantile(1.0 - alpha / 2.0, min(int(p["n1"]), int(p["n2"])) - 1)
        half = t * stats["f"]
        covered = np.abs(stats["ybar"] - psi) < half
        return covered, 2.0 * half, np.ones_like(covered, dtype=bool)
    if name == "mean-ratio":
        z = std_normal_quantile(1.0 - alpha / 2.0)
        x1, x2 = stats["x1"], stats["x2"]
        a = x2 * x2 - z * z
        b = -2.0 * x1 * x2
        c = x1 * x1 - z * z
        covered = a * psi * psi + b * psi + c < 0.0
        disc = b * b - 4.0 * a * c
        bounded = a > 0.0
        with np.errstate(invalid="ignore", divide="ignore"):
            length = np.where(bounded, np.sqrt(np.maximum(disc, 0.0)) / a, np.inf)
        return covered, length, bounded
    if name == "mnm":
        n = int(p["n"])
        x = stats["norm_sq"]
        f0 = np.asarray(chisq_cdf(x, n), dtype=float)
        if method == "fiducial":
            lo = models.mnm_psi_quantile(x, n, (1.0 - alpha / 2.0) * f0, policy=policy)
            hi = models.mnm_psi_quantile(x, n, (alpha / 2.0) * f0, policy=policy)
            covered = (psi > lo) & (psi < hi)
            return covered, hi - lo, np.ones_like(covered, dtype=bool)
        hi = models.mnm_psi_quantile(x, n, alpha / 2.0, policy=policy)
        lo = np.zeros_like(hi)
        needs_lo = f0 > 1.0 - alpha / 2.0
        if np.any(needs_lo):
            lo[needs_lo] = models.mnm_psi_quantile(
                x[needs_lo], n, 1.0 - alpha / 2.0, policy=policy
            )
        covered = (psi < hi) & ((lo == 0.0) | (psi > lo))
        if psi == 0.0:
            covered = hi >= 0.0  # the elastic region always contains 0
        return covered, hi - lo, np.ones_like(covered, dtype=bool)
    if name == "gamma-mean":
        n = int(p["n"])
        nk = n * np.asarray(models.gamma_kappa_star(stats["v2"], n), dtype=float)
        scale = nk * np.exp(stats["t1"])
        q_hi = sp.ndtr(halft_mixture_quantile(1.0 - alpha / 2.0, n))
        q_lo = sp.ndtr(halft_mixture_quantile(alpha / 2.0, n))
        lo = scale / sp.gammaincinv(nk, q_hi)
        hi = scale / sp.gammaincinv(nk, q_lo)
        covered = (psi > lo) & (psi < hi)
        return covered, hi - lo, np.ones_like(covered, dtype=bool)
    if name == "corr":
        from .regions import extract_region

        n = int(p["n"])
        r_arr = stats["r"]
        covered = np.empty(r_arr.size, dtype=bool)
        length = np.empty(r_arr.size)
        for i, r in enumerate(r_arr):
            curve = models.bvn_correlation_curve(models.CorrSummary(n=n, r=float(r)),
                                                 policy)
            region = extract_region(curve, alpha)
            covered[i] = region.contains(psi)
            length[i] = region.total_length()
        return covered, length, np.ones_like(covered, dtype=bool)
    raise ValueError(f"unknown model {name!r}")


def simulate_coverage(cfg: SimulationConfig, method: str = "im",
                      policy: AccuracyPolicy | None = None) -> SimulationReport:
    """Per-replicate regions: coverage of psi_true, and mean length over the
    replicates whose region is bounded (unbounded ones counted separately)."""
    if method not in ("im", "fiducial"):
        raise ValueError("method must be 'im' or 'fiducial'")
    t0 = time.perf_counter()
    stats = _sample_stats(cfg.model, cfg.reps, cfg.seed, cfg.parallel_chunks)
    coverage = []
    coverage_se = []
    mean_length = []
    n_unbounded = []
    for alpha in cfg.alpha_grid:
        covered, length, bounded = _region_batch(cfg.model, stats, alpha, method, policy)
        rate = float(np.count_nonzero(covered)) / cfg.reps
        coverage.append(rate)
        coverage_se.append(float(_binomial_se(np.asarray(rate), cfg.reps)))
        n_bounded = int(np.count_nonzero(bounded))
        n_unbounded.append(cfg.reps - n_bounded)
        if n_bounded > 0:
            mean_length.append(float(np.where(bounded, length, 0.0).sum()) / n_bounded)
        else:
            mean_length.append(float("nan"))
    return SimulationReport(
        model=cfg.model.name,
        params=dict(cfg.model.params),
        method=method,
        reps=cfg.reps,
        seed=cfg.seed,
        alphas=cfg.alpha_grid,
        coverage=tuple(coverage),
        coverage_se=tuple(coverage_se),
        mean_length=tuple(mean_length),
        n_unbounded=tuple(n_unbounded),
        wall_time_s=time.perf_counter() - t0,
    )


# ---------------------------------------------------------------------------
# Stochastic-bound curves


def _setting_rng(seed: int, i: int, k: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(
        np.random.SeedSequence(entropy=int(seed) % (1 << 64), spawn_key=(i, k))
    ))


def bound_curves(model: str, n_values, param_grid, z_grid, reps: int, seed: int,
                 negative_scale: float | None = None) -> list[dict]:
    """Empirical CDF of the auxiliary variable against its analytic bound.

    For 'gamma-mean' the auxiliary variable is the normal score of the
    estimated-shape gamma CDF and the bound the half-t mixture (pass
    negative_scale=1.0 to see the unscaled t bound fail on the negative
    side).  For 'behrens-fisher' it is U1 / sqrt(xi U21^2 + (1 - xi) U22^2)
    against the t with min(n1, n2) - 1 degrees of freedom.  One row per z.
    """
    if reps < 100:
        raise ValueError("reps must be at least 100")
    z_arr = np.asarray(z_grid, dtype=float)
    rows: list[dict] = []
    if model == "gamma-mean":
        for i, n in enumerate(n_values):
            n = int(n)
            bound = np.asarray(halft_mixture_cdf(z_arr, n, negative_scale), dtype=float)
            for k, shape in enumerate(param_grid):
                shape = float(shape)
                if shape <= 0.0:
                    raise ValueError("shape must be positive")
                rng = _setting_rng(seed, i, k)
                logu = _log_gamma_draws_matrix(rng, shape, reps, n)
                logmean = sp.logsumexp(logu, axis=1) - math.log(n)
                u1 = logmean - math.log(shape)
                v2 = logmean - logu.mean(axis=1)
                nk = n * np.asarray(models.gamma_kappa_star(v2, n), dtype=float)
                z1 = np.asarray(_gamma_z_logx(nk, np.log(nk) + u1), dtype=float)
                emp = (z1[:, None] <= z_arr[None, :]).mean(axis=0)
                se = _binomial_se(emp, reps)
                for z, e, s, b in zip(z_arr, emp, se, bound):
                    rows.append({"model": model, "n": n, "shape": shape,
                                 "z": float(z), "emp_cdf": float(e),
                                 "emp_se": float(s), "bound_cdf": float(b)})
        return rows
    if model == "behrens-fisher":
        for i, pair in enumerate(n_values):
            n1, n2 = int(pair[0]), int(pair[1])
            bound = np.asarray(sp.stdtr(min(n1, n2) - 1, z_arr), dtype=float)
            for k, xi in enumerate(param_grid):
                xi = float(xi)
                if not (0.0 < xi < 1.0):
                    raise ValueError("xi must lie strictly inside (0, 1)")
                rng = _setting_rng(seed, i, k)
                u1 = rng.standard_normal(reps)
                u21sq = rng.chisquare(n1 - 1, reps) / (n1 - 1)
                u22sq = rng.chisquare(n2 - 1, reps) / (n2 - 1)
                z1 = u1 / np.sqrt(xi * u21sq + (1.0 - xi) * u22sq)
                emp = (z1[:, None] <= z_arr[None, :]).mean(axis=0)
                se = _binomial_se(emp, reps)
                for z, e, s, b in zip(z_arr, emp, se, bound):
                    rows.append({"model": model, "n1": n1, "n2": n2, "xi": xi,
                                 "z": float(z), "emp_cdf": float(e),
                                 "emp_se": float(s), "bound_cdf": float(b)})
        return rows
    raise ValueError("model must be 'gamma-mean' or 'behrens-fisher'")


def _log_gamma_draws_matrix(rng, shape: float, reps: int, n: int) -> np.ndarray:
    return (np.log(rng.gamma(shape + 1.0, size=(reps, n)))
            - rng.exponential(size=(reps, n)) / shape)


def prs_miss_uniformity(reps: int = 100000, seed: int = 0,
                        confidence: float = 0.999) -> dict:
    """Check that the miss probability |2U - 1| of the default random set is
    uniform: Kolmogorov-Smirnov distance of the empirical CDF against the
    band from the Dvoretzky-Kiefer-Wolfowitz inequality."""
    if reps < 100:
        raise ValueError("reps must be at least 100")
    rng = substream(seed, 0)
    q = np.sort(np.abs(2.0 * rng.random(reps) - 1.0))
    grid = np.arange(1, reps + 1) / reps
    ks = float(np.max(np.maximum(np.abs(grid - q), np.abs(grid - 1.0 / reps - q))))
    band = math.sqrt(math.log(2.0 / (1.0 - confidence)) / (2.0 * reps))
    return {"reps": reps, "seed": seed, "ks_distance": ks,
            "dkw_band": band, "within_band": ks <= band}
