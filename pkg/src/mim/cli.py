"""Command-line surface.

Subcommands: pl (plausibility curve samples), region (threshold region as
JSON), validity / coverage (Monte Carlo calibration reports), bound-check
(stochastic-bound curves), demo-efficiency (marginalization-geometry plot
data).  Output is JSON by default or flat CSV via --format, with every float
serialized to 17 significant digits so repeated runs are byte-identical.
Argument problems exit 2 and numerical-accuracy failures exit 3, both with a
one-line JSON object on stderr.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys

import numpy as np

from . import models, simulate
from .errors import AccuracyError, DegenerateDataError, SearchError
from .regions import extract_region
from .special import std_normal_quantile

EXIT_OK = 0
EXIT_ARGS = 2
EXIT_ACCURACY = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse prints usage text and exits on its own; route through the
    # JSON error contract instead.
    def error(self, message):
        raise _UsageError(message)


# ---------------------------------------------------------------------------
# Serialization: 17 significant digits, stable key order, trailing newline


def _float_token(v: float) -> str:
    if math.isnan(v):
        return '"nan"'
    if math.isinf(v):
        return '"+inf"' if v > 0 else '"-inf"'
    return format(v, ".17g")


def _emit_json(obj, buf: list) -> None:
    if obj is None:
        buf.append("null")
    elif obj is True:
        buf.append("true")
    elif obj is False:
        buf.append("false")
    elif isinstance(obj, str):
        buf.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        buf.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        buf.append(_float_token(float(obj)))
    elif isinstance(obj, dict):
        buf.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                buf.append(",")
            buf.append(json.dumps(str(k)))
            buf.append(":")
            _emit_json(v, buf)
        buf.append("}")
    elif isinstance(obj, (list, tuple)):
        buf.append("[")
        for i, v in enumerate(obj):
            if i:
                buf.append(",")
            _emit_json(v, buf)
        buf.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    buf: list = []
    _emit_json(obj, buf)
    return "".join(buf) + "\n"


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if v is True:
        return "true"
    if v is False:
        return "false"
    if isinstance(v, (float, np.floating)):
        f = float(v)
        if math.isnan(f):
            return "nan"
        if math.isinf(f):
            return "+inf" if f > 0 else "-inf"
        return format(f, ".17g")
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _csv_text(header: list, rows: list) -> str:
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(_csv_cell(v) for v in row) + "\n")
    return out.getvalue()


def _emit_error(kind: str, message: str, **extra) -> None:
    payload = {"error": kind, "message": message}
    payload.update(extra)
    sys.stderr.write(dumps(payload))


# ---------------------------------------------------------------------------
# Argument helpers


def _parse_float_list(text: str, flag: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise _UsageError(f"{flag} expects a comma-separated list of numbers")
    if not values:
        raise _UsageError(f"{flag} must not be empty")
    return values


def _parse_int_list(text: str, flag: str) -> list[int]:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok == "":
            continue
        try:
            out.append(int(tok))
        except ValueError:
            raise _UsageError(f"{flag} expects a comma-separated list of integers")
    if not out:
        raise _UsageError(f"{flag} must not be empty")
    return out


def _parse_grid(text: str, flag: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != 3:
        raise _UsageError(f"{flag} expects LO,HI,COUNT")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise _UsageError(f"{flag} expects LO,HI,COUNT")
    if count < 2 or hi <= lo:
        raise _UsageError(f"{flag} needs HI > LO and COUNT >= 2")
    return np.linspace(lo, hi, count)


_STATS_KEYS = {
    "normal-mean": {"n": int, "mean": float},
    "normal-mean-t": {"n": int, "mean": float, "sd": float},
    "corr": {"n": int, "r": float},
    "mean-ratio": {"x1": float, "x2": float},
    "mnm": {"n": int, "norm_sq": float},
    "behrens-fisher": {"n1": int, "n2": int, "mean1": float, "mean2": float,
                       "sd1": float, "sd2": float},
    "gamma-mean": {"n": int, "t1": float, "t2": float},
}


def _parse_stats(model: str, text: str) -> dict:
    spec = _STATS_KEYS[model]
    out: dict = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise _UsageError(f"--stats items must look like key=value, got {item!r}")
        key, _, raw = item.partition("=")
        key = key.strip().replace("-", "_")
        if key not in spec:
            known = ",".join(k.replace("_", "-") for k in spec)
            raise _UsageError(f"unknown statistic {key!r} for model {model!r}; expected {known}")
        try:
            out[key] = spec[key](raw.strip())
        except ValueError:
            raise _UsageError(f"statistic {key!r} has a bad value {raw.strip()!r}")
    missing = [k.replace("_", "-") for k in spec if k not in out]
    if missing:
        raise _UsageError(f"--stats for model {model!r} is missing {missing}")
    return out


def _read_columns(path: str) -> list[list[float]]:
    rows: list[list[float]] = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                body = line.split("#", 1)[0].strip()
                if not body:
                    continue
                parts = body.replace(",", " ").split()
                try:
                    rows.append([float(tok) for tok in parts])
                except ValueError:
                    raise _UsageError(f"{path}:{lineno}: non-numeric field")
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc.strerror or exc}")
    if not rows:
        raise _UsageError(f"{path} contains no data")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise _UsageError(f"{path} has ragged rows")
    return rows


def _single_column(rows: list[list[float]], path: str) -> np.ndarray:
    if len(rows[0]) != 1:
        raise _UsageError(f"{path} must contain a single column for this model")
    return np.asarray([r[0] for r in rows])


def _summary_from_data(model: str, path: str, group: int | None):
    rows = _read_columns(path)
    if model in ("normal-mean", "normal-mean-t"):
        return models.summarize_normal(_single_column(rows, path))
    if model == "gamma-mean":
        return models.GammaSummary.from_data(_single_column(rows, path))
    if model == "mnm":
        return models.VectorSummary.from_vector(_single_column(rows, path))
    if model == "corr":
        if len(rows[0]) != 2:
            raise _UsageError(f"{path} must contain two columns of pairs")
        return models.CorrSummary.from_pairs(rows)
    if model == "mean-ratio":
        flat = [v for r in rows for v in r]
        if len(flat) != 2:
            raise _UsageError(f"{path} must contain exactly two values (x1, x2)")
        return models.RatioData(x1=flat[0], x2=flat[1])
    if model == "behrens-fisher":
        if len(rows[0]) != 2:
            raise _UsageError(f"{path} must contain two columns (group and value)")
        if group not in (0, 1):
            raise _UsageError("two-sample data needs --group 0 or --group 1")
        arr = np.asarray(rows)
        labels = arr[:, group]
        values = arr[:, 1 - group]
        uniq = np.unique(labels)
        if uniq.size != 2:
            raise _UsageError(f"{path} must contain exactly two group labels, found {uniq.size}")
        return models.TwoSampleSummary.from_samples(
            values[labels == uniq[0]], values[labels == uniq[1]]
        )
    raise _UsageError(f"unknown model {model!r}")


def _summary_from_stats(model: str, kv: dict):
    if model in ("normal-mean", "normal-mean-t"):
        return models.NormalSummary(n=kv["n"], mean=kv["mean"], sd=kv.get("sd"))
    if model == "corr":
        return models.CorrSummary(n=kv["n"], r=kv["r"])
    if model == "mean-ratio":
        return models.RatioData(x1=kv["x1"], x2=kv["x2"])
    if model == "mnm":
        return models.VectorSummary(n=kv["n"], norm_sq=kv["norm_sq"])
    if model == "behrens-fisher":
        return models.TwoSampleSummary(**kv)
    if model == "gamma-mean":
        return models.GammaSummary(n=kv["n"], t1=kv["t1"], t2=kv["t2"])
    raise _UsageError(f"unknown model {model!r}")


def _instance_from_args(args) -> models.ModelInstance:
    if (args.stats is None) == (args.data is None):
        raise _UsageError("exactly one of --stats or --data is required")
    model = args.model
    if args.stats is not None:
        summary = _summary_from_stats(model, _parse_stats(model, args.stats))
    else:
        summary = _summary_from_data(model, args.data, args.group)
    params = {}
    if model == "normal-mean":
        if args.sigma is None:
            raise _UsageError("model 'normal-mean' requires --sigma")
        params["sigma"] = args.sigma
    return models.ModelInstance(model=model, summary=summary, params=params)


def _psi_values(args) -> np.ndarray:
    if (args.psi is None) == (args.psi_grid is None):
        raise _UsageError("exactly one of --psi or --psi-grid is required")
    if args.psi is not None:
        return np.asarray([args.psi])
    return _parse_grid(args.psi_grid, "--psi-grid")


def _check_support(curve, psi_values: np.ndarray) -> None:
    lo, hi = curve.support
    for v in psi_values:
        ok_lo = v > lo or (v == lo and curve.lo_closed)
        ok_hi = v < hi or (v == hi and curve.hi_closed)
        if not (ok_lo and ok_hi):
            raise _UsageError(
                f"psi = {v:g} lies outside the parameter support of model {curve.label!r}"
            )


def _alpha_list(text: str, flag: str = "--alphas") -> tuple[float, ...]:
    values = sorted(set(_parse_float_list(text, flag)))
    for a in values:
        if not (0.0 < a < 1.0):
            raise _UsageError(f"{flag} values must lie strictly inside (0, 1)")
    return tuple(values)


# ---------------------------------------------------------------------------
# Subcommands


def _run_pl(args) -> str:
    instance = _instance_from_args(args)
    curve = models.curve_for(instance)
    psis = _psi_values(args)
    _check_support(curve, psis)
    points = [{"psi": float(v), "mpl": curve(float(v))} for v in psis]
    if args.format == "csv":
        return _csv_text(["psi", "mpl"], [[p["psi"], p["mpl"]] for p in points])
    return dumps({"model": instance.model, "points": points})


def _run_region(args) -> str:
    if not (0.0 < args.alpha < 1.0):
        raise _UsageError("--alpha must lie strictly inside (0, 1)")
    instance = _instance_from_args(args)
    curve = models.curve_for(instance)
    region = extract_region(curve, args.alpha)
    doc = region.to_json_dict()
    if args.format == "csv":
        header = ["model", "alpha", "shape", "lo", "hi", "lo_open", "hi_open"]
        rows = [
            [instance.model, args.alpha, doc["shape"],
             p["lo"], p["hi"], p["lo_open"], p["hi_open"]]
            for p in doc["pieces"]
        ]
        return _csv_text(header, rows)
    return dumps({"model": instance.model, "alpha": args.alpha, "region": doc})


_SIM_FLAGS = {
    "normal-mean": ("psi", "sigma", "n"),
    "normal-mean-t": ("psi", "sigma", "n"),
    "corr": ("psi", "n"),
    "mean-ratio": ("psi", "xi"),
    "mnm": ("psi", "n"),
    "behrens-fisher": ("psi", "xi", "n1", "n2"),
    "gamma-mean": ("psi", "shape", "n"),
}


def _sim_config(args) -> simulate.SimulationConfig:
    params = {}
    for key in _SIM_FLAGS[args.model]:
        value = getattr(args, key)
        if value is None:
            raise _UsageError(f"model {args.model!r} requires --{key}")
        params[key] = value
    model = simulate.SimulationModel(name=args.model, params=params)
    return simulate.SimulationConfig(
        model=model,
        reps=args.reps,
        alpha_grid=_alpha_list(args.alphas),
        seed=args.seed,
        parallel_chunks=args.chunks,
    )


def _report_text(report: simulate.SimulationReport, fmt: str) -> str:
    if fmt == "csv":
        header, rows = report.to_csv_rows()
        return _csv_text(header, rows)
    return dumps(report.to_json_dict())


def _run_validity(args) -> str:
    report = simulate.simulate_validity(_sim_config(args))
    return _report_text(report, args.format)


def _run_coverage(args) -> str:
    report = simulate.simulate_coverage(_sim_config(args), method=args.method)
    return _report_text(report, args.format)


def _run_bound_check(args) -> str:
    z_grid = _parse_grid(args.z_grid, "--z-grid")
    if args.model == "gamma-mean":
        if args.n is None or args.alphas is None:
            raise _UsageError("bound-check for 'gamma-mean' requires --n and --alphas")
        n_values = _parse_int_list(args.n, "--n")
        shapes = _parse_float_list(args.alphas, "--alphas")
        rows = simulate.bound_curves(
            "gamma-mean", n_values, shapes, z_grid,
            reps=args.reps, seed=args.seed, negative_scale=args.negative_scale,
        )
    else:
        if args.n1 is None or args.n2 is None or args.xis is None:
            raise _UsageError("bound-check for 'behrens-fisher' requires --n1, --n2, --xis")
        n1 = _parse_int_list(args.n1, "--n1")
        n2 = _parse_int_list(args.n2, "--n2")
        if len(n1) != len(n2):
            raise _UsageError("--n1 and --n2 must have the same number of entries")
        xis = _parse_float_list(args.xis, "--xis")
        rows = simulate.bound_curves(
            "behrens-fisher", list(zip(n1, n2)), xis, z_grid,
            reps=args.reps, seed=args.seed,
        )
    if args.format == "csv":
        header = list(rows[0].keys())
        return _csv_text(header, [[row[k] for k in header] for row in rows])
    doc = {"model": args.model, "reps": args.reps, "seed": args.seed, "rows": rows}
    if args.model == "gamma-mean":
        doc["negative_scale"] = args.negative_scale
    return dumps(doc)


def _run_demo_efficiency(args) -> str:
    c = args.coverage
    if not (0.0 < c < 1.0):
        raise _UsageError("--coverage must lie strictly inside (0, 1)")
    if args.points < 8:
        raise _UsageError("--points must be at least 8")
    # Joint predictive random set for two iid N(0,1) draws: a circle whose
    # chi-square(2) radius hits the requested coverage.  Marginalizing first
    # gives a cylinder over the shorter direct interval for the first draw.
    radius = math.sqrt(-2.0 * math.log1p(-c))
    half = float(std_normal_quantile(0.5 * (1.0 + c)))
    theta = np.linspace(0.0, 2.0 * math.pi, args.points + 1)
    circle = [[float(radius * math.cos(t)), float(radius * math.sin(t))] for t in theta]
    if args.format == "csv":
        rows = [
            ["coverage", c, None],
            ["circle_radius", radius, None],
            ["projection_half_width", radius, None],
            ["cylinder_half_width", half, None],
        ]
        rows += [["circle_point", x, y] for x, y in circle]
        return _csv_text(["kind", "x", "y"], rows)
    return dumps({
        "coverage": c,
        "circle_radius": radius,
        "projection_half_width": radius,
        "cylinder_half_width": half,
        "circle": circle,
    })


# ---------------------------------------------------------------------------
# Parser assembly


def _add_data_flags(p: _Parser) -> None:
    p.add_argument("--stats", help="inline summary statistics, e.g. n=4,mean=0")
    p.add_argument("--data", help="path to a data file (see README for layouts)")
    p.add_argument("--group", type=int, default=None,
                   help="column index (0 or 1) holding group labels in two-sample files")
    p.add_argument("--sigma", type=float, default=None,
                   help="known standard deviation (model normal-mean)")


def _add_format_flag(p: _Parser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json")


def _add_sim_flags(p: _Parser) -> None:
    p.add_argument("--psi", type=float, required=True, help="true interest-parameter value")
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--xi", type=float, default=None, help="nuisance parameter")
    p.add_argument("--shape", type=float, default=None, help="true gamma shape")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--n1", type=int, default=None)
    p.add_argument("--n2", type=int, default=None)
    p.add_argument("--reps", type=int, default=10000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--alphas", default="0.01,0.05,0.1,0.25,0.5")
    p.add_argument("--chunks", type=int, default=1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="mim", description=__doc__, add_help=True)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p_pl = sub.add_parser("pl", help="evaluate a marginal plausibility curve")
    p_pl.add_argument("--model", required=True, choices=models.MODEL_IDS)
    _add_data_flags(p_pl)
    p_pl.add_argument("--psi", type=float, default=None)
    p_pl.add_argument("--psi-grid", default=None, help="LO,HI,COUNT")
    _add_format_flag(p_pl)
    p_pl.set_defaults(run=_run_pl)

    p_re = sub.add_parser("region", help="extract a plausibility region")
    p_re.add_argument("--model", required=True, choices=models.MODEL_IDS)
    _add_data_flags(p_re)
    p_re.add_argument("--alpha", type=float, required=True)
    _add_format_flag(p_re)
    p_re.set_defaults(run=_run_region)

    p_va = sub.add_parser("validity", help="exceedance rates of mpl at the truth")
    p_va.add_argument("--model", required=True, choices=models.MODEL_IDS)
    _add_sim_flags(p_va)
    _add_format_flag(p_va)
    p_va.set_defaults(run=_run_validity)

    p_co = sub.add_parser("coverage", help="coverage and length of plausibility regions")
    p_co.add_argument("--model", required=True, choices=models.MODEL_IDS)
    p_co.add_argument("--method", choices=("im", "fiducial"), default="im")
    _add_sim_flags(p_co)
    p_co.set_defaults(alphas="0.05")
    _add_format_flag(p_co)
    p_co.set_defaults(run=_run_coverage)

    p_bc = sub.add_parser("bound-check", help="empirical CDF of the auxiliary variable vs its bound")
    p_bc.add_argument("--model", required=True, choices=("gamma-mean", "behrens-fisher"))
    p_bc.add_argument("--n", default=None, help="comma list of sample sizes (gamma-mean)")
    p_bc.add_argument("--alphas", default=None, help="comma list of gamma shape values")
    p_bc.add_argument("--n1", default=None, help="comma list, paired with --n2 (behrens-fisher)")
    p_bc.add_argument("--n2", default=None)
    p_bc.add_argument("--xis", default=None, help="comma list of variance-split values in (0,1)")
    p_bc.add_argument("--z-grid", default="-3,3,21", help="LO,HI,COUNT")
    p_bc.add_argument("--reps", type=int, default=100000)
    p_bc.add_argument("--seed", type=int, required=True)
    p_bc.add_argument("--negative-scale", type=float, default=None,
                      help="override the negative-side bound scale (diagnostic)")
    _add_format_flag(p_bc)
    p_bc.set_defaults(run=_run_bound_check)

    p_de = sub.add_parser("demo-efficiency", help="marginalization-geometry plot data")
    p_de.add_argument("--coverage", type=float, default=0.5)
    p_de.add_argument("--points", type=int, default=128)
    _add_format_flag(p_de)
    p_de.set_defaults(run=_run_demo_efficiency)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "run", None) is None:
            raise _UsageError("a subcommand is required (pl, region, validity, "
                              "coverage, bound-check, demo-efficiency)")
        text = args.run(args)
    except _UsageError as exc:
        _emit_error("argument", str(exc))
        return EXIT_ARGS
    except AccuracyError as exc:
        _emit_error("accuracy", str(exc), error_bound=exc.error_bound)
        return EXIT_ACCURACY
    except SearchError as exc:
        _emit_error("accuracy", str(exc))
        return EXIT_ACCURACY
    except (ValueError, DegenerateDataError) as exc:
        _emit_error("argument", str(exc))
        return EXIT_ARGS
    sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
