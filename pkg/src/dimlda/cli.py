"""``dimlda`` command-line interface.

Subcommands: theory, simulate, heatmap, select-lambda, classify, verify.
Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 verification failure.
"""

from __future__ import annotations

import argparse
import copy
import hashlib
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, plots, theory
from . import classifiers as clf
from . import simulate as sim
from .errors import (
    ConfigError,
    DimLDAError,
    DomainError,
    NumericalError,
    ValidationError,
)
from .select import _check_grid, default_grid, select_lambda, select_lambda_cv
from .types import (
    FittedLinearClassifier,
    LabeledDataset,
    Method,
    load_json,
    make_spectral_model,
    read_feature_csv,
    spec_from_config,
)
from .verify import run_all

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VERIFY = 0, 2, 3, 4

log = logging.getLogger("dimlda")


# ---------------------------------------------------------------------------
# Output helpers

def config_hash(obj) -> str:
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


class Outputs:
    """Collects output files; refuses to clobber existing ones unless forced."""

    def __init__(self, out_dir, force: bool, cfg_hash: str, seed):
        self.dir = Path(out_dir)
        self.force = force
        self.header = [f"dimlda {__version__}", f"config_sha256={cfg_hash}", f"seed={seed}"]

    def path(self, name: str) -> Path:
        p = self.dir / name
        if p.exists() and not self.force:
            raise ConfigError(f"{p} exists; pass --force to overwrite")
        self.dir.mkdir(parents=True, exist_ok=True)
        return p

    def csv(self, name, rows, columns=None, extra_header=()):
        p = self.path(name)
        sim.write_csv(p, rows, self.header + list(extra_header), columns)
        log.info("wrote %s", p)
        return p

    def svg(self, name, text):
        p = self.path(name)
        comment = "<!-- " + " | ".join(self.header) + " -->\n"
        p.write_text(text.replace("\n", "\n" + comment, 1), encoding="utf-8")
        log.info("wrote %s", p)
        return p

    def check_free(self, names):
        for n in names:
            self.path(n)


def _load(args) -> dict:
    if not args.config:
        raise ConfigError("--config is required for this subcommand")
    return load_json(args.config)


def _number(obj: dict, key: str, where: str, default=None, positive: bool = False) -> float:
    if key not in obj:
        if default is None:
            raise ConfigError(f"{where}: missing field '{key}'")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}: field '{key}' must be a number")
    if positive and not v > 0:
        raise ConfigError(f"{where}: field '{key}' must be positive")
    return float(v)


def parse_lambda_grid(obj, where: str = "lambda") -> np.ndarray:
    """A list of values or {"min", "max", "num", "scale": "log"|"linear"}."""
    if isinstance(obj, list):
        grid = np.asarray(obj, dtype=float)
    elif isinstance(obj, dict):
        sim._check_keys(obj, {"min", "max", "num", "scale"}, where, ("min", "max", "num"))
        lo, hi = _number(obj, "min", where, positive=True), _number(obj, "max", where, positive=True)
        num = int(obj["num"])
        scale = obj.get("scale", "log")
        if scale not in ("log", "linear"):
            raise ConfigError(f"{where}: scale must be 'log' or 'linear'")
        grid = np.geomspace(lo, hi, num) if scale == "log" else np.linspace(lo, hi, num)
    else:
        raise ConfigError(f"{where}: expected a list or a range object")
    return _check_grid(grid)


# ---------------------------------------------------------------------------
# theory

THEORY_KEYS = {"covariance", "mean_structure", "delta", "n1", "n2", "y1", "y2", "lambda"}
THEORY_COLUMNS = ["lambda", "y1", "y2", "delta", "m0", "m0_prime", "r1", "r2", "h1", "h2",
                  "rate_class1", "rate_class2", "rate_total", "rate_corrected", "curve"]


def theory_rows(cfg: dict) -> list[dict]:
    sim._check_keys(cfg, THEORY_KEYS, "theory config", ("covariance", "lambda"))
    delta = _number(cfg, "delta", "theory config", positive=True)
    if "y1" in cfg or "y2" in cfg:
        y1 = _number(cfg, "y1", "theory config", positive=True)
        y2 = _number(cfg, "y2", "theory config", positive=True)
    else:
        n1 = _number(cfg, "n1", "theory config", positive=True)
        n2 = _number(cfg, "n2", "theory config", positive=True)
        y1 = y2 = None
    cov = sim.covariance_from_config(cfg["covariance"])
    grid = parse_lambda_grid(cfg["lambda"])
    if y1 is None:
        y1, y2 = cov.p / n1, cov.p / n2
    structures = cfg.get("mean_structure", {"kind": "isotropic", "case": "iso2"})
    if isinstance(structures, dict):
        structures = [structures]
    cov_arrays = sim.gen_covariance(cov)
    rows = []
    for i, ms in enumerate(structures):
        ms = dict(ms)
        label = str(ms.pop("label", ms.get("kind", f"curve{i}")))
        mgen = sim.means_from_config(ms)
        mu1, mu2 = sim.gen_means(mgen, cov_arrays)
        mu1 = mu1 * (delta / mgen.delta)
        vals, vecs, sigma = cov_arrays
        model = make_spectral_model(sim.ProblemSpec.from_eigh(mu1, mu2, sigma, vals, vecs))
        for lam in grid:
            pt = theory.theory_point(model, y1, y2, float(lam), delta)
            pair = theory._rlda_pair(pt)
            rows.append({"lambda": float(lam), "y1": y1, "y2": y2, "delta": delta,
                         "m0": pt.m0, "m0_prime": pt.m0_prime, "r1": pt.r1, "r2": pt.r2,
                         "h1": pt.h1_at, "h2": pt.h2_at, "rate_class1": pair.class1,
                         "rate_class2": pair.class2, "rate_total": pair.total,
                         "rate_corrected": theory._corrected_rlda(pt), "curve": label})
    return rows


def cmd_theory(args) -> int:
    cfg = _load(args)
    rows = theory_rows(cfg)
    out = Outputs(args.out, args.force, config_hash(cfg), "none")
    out.check_free(["theory.csv"] + (["theory.svg"] if args.plot else []))
    out.csv("theory.csv", rows, THEORY_COLUMNS)
    if args.plot:
        series = {}
        for label in dict.fromkeys(r["curve"] for r in rows):
            sel = [r for r in rows if r["curve"] == label]
            x = [r["lambda"] for r in sel]
            series[f"{label} RLDA"] = (x, [r["rate_total"] for r in sel])
            if any(r["y1"] != r["y2"] for r in sel):
                series[f"{label} corrected"] = (x, [r["rate_corrected"] for r in sel])
        out.svg("theory.svg", plots.line_plot(series, title="Limiting error rate", xlabel="lambda",
                                              ylabel="error", logx=True))
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate

def _set_path(obj: dict, dotted: str, value) -> None:
    keys = dotted.split(".")
    for k in keys[:-1]:
        if not isinstance(obj.get(k), dict):
            raise ConfigError(f"vary: '{dotted}' does not name a nested field")
        obj = obj[k]
    obj[keys[-1]] = value


def expand_scenarios(cfg: dict) -> list[dict]:
    """A single experiment, or {"base": {...}, "vary": [overrides, ...]}."""
    if "base" not in cfg and "vary" not in cfg:
        return [cfg]
    sim._check_keys(cfg, {"base", "vary"}, "simulate config", ("base", "vary"))
    if not isinstance(cfg["vary"], list) or not cfg["vary"]:
        raise ConfigError("vary: expected a nonempty list of override objects")
    out = []
    base_id = cfg["base"].get("scenario_id", "scenario")
    for i, override in enumerate(cfg["vary"]):
        if not isinstance(override, dict):
            raise ConfigError(f"vary[{i}]: expected an object")
        scen = copy.deepcopy(cfg["base"])
        for k, v in override.items():
            _set_path(scen, k, v)
        if "scenario_id" not in override:
            scen["scenario_id"] = base_id + "-" + "-".join(f"{k.split('.')[-1]}{v}" for k, v in override.items())
        out.append(scen)
    return out


def _apply_overrides(scen: dict, args) -> dict:
    scen = copy.deepcopy(scen)
    if args.seed is not None:
        scen["seed"] = args.seed
    if args.replicates is not None:
        scen["replicates"] = args.replicates
    return scen


def _experiment_plot(results: list, varied: list) -> tuple[str, str] | None:
    """One SVG: error vs lambda for a single scenario, else vs the varied field."""
    if len(results) == 1:
        res = results[0]
        rows = res.summary_rows()
        series = {}
        for spec_c, row in zip(res.config.classifiers, rows):
            if spec_c.method not in ("rlda", "corrected_rlda", "oracle"):
                continue
            label = spec_c.label
            pts = series.setdefault(f"{label} empirical", ([], [], "points"))
            pts[0].append(spec_c.lam)
            pts[1].append(row["mean"])
            if row["theory"] != "":
                th = series.setdefault(f"{label} theory", ([], []))
                th[0].append(spec_c.lam)
                th[1].append(row["theory"])
        if not series:
            return None
        return "simulate.svg", plots.line_plot(series, title=res.config.scenario_id, xlabel="lambda",
                                               ylabel="mean error", logx=True)
    if not varied:
        return None
    series = {}
    for x, res in zip(varied, results):
        for row in res.summary_rows():
            s = series.setdefault(f"{row['classifier']}@{row['lambda']}" if row["lambda"] != "" else row["classifier"],
                                  ([], []))
            s[0].append(x)
            s[1].append(row["mean"])
    return "simulate.svg", plots.line_plot(series, title="mean error", xlabel="scenario", ylabel="mean error")


def cmd_simulate(args) -> int:
    cfg = _load(args)
    scenarios = [_apply_overrides(s, args) for s in expand_scenarios(cfg)]
    configs = [sim.experiment_from_config(s) for s in scenarios]
    effective = {"scenarios": scenarios}
    seeds = sorted({c.seed for c in configs})
    out = Outputs(args.out, args.force, config_hash(effective), ",".join(map(str, seeds)))
    out.check_free(["simulate_long.csv", "simulate_summary.csv"] + (["simulate.svg"] if args.plot else []))
    results, long_rows, summary_rows = [], [], []
    for c in configs:
        t0 = time.perf_counter()
        res = sim.run_experiment(c, jobs=args.jobs)
        log.info("%s: %d replicates in %.1fs", c.scenario_id, c.replicates, time.perf_counter() - t0)
        for key, why in res.skipped.items():
            log.warning("%s: %s skipped in some replicates (%s)", c.scenario_id, key, why)
        results.append(res)
        long_rows += res.long_rows()
        summary_rows += [{"scenario_id": c.scenario_id, **r} for r in res.summary_rows()]
    out.csv("simulate_long.csv", long_rows,
            ["scenario_id", "replicate", "classifier", "lambda", "err1", "err2", "err_total"])
    out.csv("simulate_summary.csv", summary_rows,
            ["scenario_id", "classifier", "lambda", "mean", "sd", "theory", "abs_gap",
             "mean_err1", "mean_err2", "replicates"])
    if args.plot:
        varied = []
        if "vary" in cfg:
            firsts = [next(iter(o.values())) for o in cfg["vary"]]
            if all(isinstance(v, (int, float)) for v in firsts):
                varied = firsts
        svg = _experiment_plot(results, varied)
        if svg:
            out.svg(*svg)
    return EXIT_OK


# ---------------------------------------------------------------------------
# heatmap

def cmd_heatmap(args) -> int:
    cfg = _load(args)
    sim._check_keys(cfg, {"base", "p_values", "rho_values", "replicates"}, "heatmap config",
                    ("base", "p_values", "rho_values"))
    base = dict(cfg["base"])
    base.setdefault("covariance", {"kind": "identity", "p": 2})
    base["theory"] = False
    base = _apply_overrides(base, argparse.Namespace(seed=args.seed, replicates=None))
    reps = args.replicates if args.replicates is not None else int(cfg.get("replicates", 20))
    config = sim.experiment_from_config(base)
    effective = {**cfg, "base": base, "replicates": reps}
    out = Outputs(args.out, args.force, config_hash(effective), config.seed)
    keys = [c.key for c in config.classifiers]
    svgs = [f"heatmap_{k.replace('@', '_')}.svg" for k in keys] if args.plot else []
    out.check_free(["heatmap.csv"] + svgs)
    res = sim.run_heatmap(config, cfg["p_values"], cfg["rho_values"], reps, jobs=args.jobs)
    out.csv("heatmap.csv", res.rows(), ["classifier", "rho", "p", "mean", "sd"])
    for key, name in zip(keys, svgs):
        out.svg(name, plots.heatmap(res.means[key], res.rho_values, res.p_values,
                                    title=f"{key} mean error (colour scale 0 to 0.5)"))
    return EXIT_OK


# ---------------------------------------------------------------------------
# select-lambda

def cmd_select_lambda(args) -> int:
    if not args.data:
        raise ConfigError("--data is required for select-lambda")
    data = LabeledDataset.from_csv(args.data)
    st = clf.PooledStats(data)
    if args.grid_min is None and args.grid_max is None:
        grid = default_grid(st.sample_eigenvalues(), args.grid_size)
    else:
        if args.grid_min is None or args.grid_max is None:
            raise ConfigError("--grid-min and --grid-max must be given together")
        if not 0 < args.grid_min <= args.grid_max:
            raise ConfigError("grid bounds must satisfy 0 < min <= max")
        grid = np.geomspace(args.grid_min, args.grid_max, args.grid_size)
    seed = 0 if args.seed is None else args.seed
    est = select_lambda(st, grid)
    cv = select_lambda_cv(data, grid, args.k, seed)
    rows = [{"lambda": lam, "objective": obj, "cv_error": e}
            for lam, obj, e in zip(grid, est.objective, cv.mean_errors)]
    summary = f"lambda_hat={est.lambda_opt!r} lambda_cv={cv.lambda_cv!r} k={args.k} cv_seed={seed}"
    params = {"data": hashlib.sha256(Path(args.data).read_bytes()).hexdigest(), "grid": grid.tolist(),
              "k": args.k}
    out = Outputs(args.out, args.force, config_hash(params), seed)
    out.csv("select_lambda.csv", rows, ["lambda", "objective", "cv_error"], [summary])
    print(summary)
    return EXIT_OK


# ---------------------------------------------------------------------------
# classify

FIT_METHODS = {"lda": clf.fit_lda, "corrected_lda": clf.fit_corrected_lda,
               "naive_bayes": clf.fit_naive_bayes}


def _classifier_from_model(cfg: dict) -> FittedLinearClassifier:
    if "w" in cfg:
        sim._check_keys(cfg, {"w", "alpha", "method", "lambda", "n1", "n2"}, "model", ("w", "alpha"))
        return FittedLinearClassifier(np.asarray(cfg["w"], float), float(cfg["alpha"]),
                                      Method(cfg.get("method", Method.LDA.value)),
                                      float(cfg.get("lambda", 0.0)), int(cfg.get("n1", 0)),
                                      int(cfg.get("n2", 0)))
    return clf.fit_bayes(spec_from_config(cfg))


def _fit_from_training(args) -> FittedLinearClassifier:
    data = LabeledDataset.from_csv(args.train)
    method = args.method
    if method in FIT_METHODS:
        return FIT_METHODS[method](data)
    if method in ("rlda", "corrected_rlda"):
        if args.lam is None:
            lam = select_lambda(data).lambda_opt
            log.info("lambda selected from data: %g", lam)
        else:
            lam = args.lam
        return (clf.fit_rlda if method == "rlda" else clf.fit_corrected_rlda)(data, lam)
    raise ConfigError(f"unknown method {method!r}")


def cmd_classify(args) -> int:
    if not args.input:
        raise ConfigError("--input is required for classify")
    if bool(args.config) == bool(args.train):
        raise ConfigError("give exactly one of --config (model) or --train (labelled CSV)")
    model = _classifier_from_model(load_json(args.config)) if args.config else _fit_from_training(args)
    X = read_feature_csv(args.input)
    labels = np.atleast_1d(clf.predict(model, X))
    params = {"model": model.to_config(), "input": hashlib.sha256(Path(args.input).read_bytes()).hexdigest()}
    out = Outputs(args.out, args.force, config_hash(params), "none")
    names = ["labels.csv"] + (["model.json"] if args.save_model else [])
    out.check_free(names)
    out.csv("labels.csv", [{"label": int(v)} for v in labels], ["label"])
    if args.save_model:
        out.path("model.json").write_text(json.dumps(model.to_config(), indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify

def cmd_verify(args) -> int:
    checks = run_all()
    width = max(len(c.name) for c in checks)
    print(f"{'check'.ljust(width)}  status  {'value':>11}  {'tolerance':>9}  detail")
    for c in checks:
        print(f"{c.name.ljust(width)}  {'PASS' if c.passed else 'FAIL':6}  {c.value:11.3e}  {c.tol:9.1e}  {c.detail}")
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_VERIFY


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON configuration file")
    common.add_argument("--out", metavar="DIR", default=".", help="output directory (created if absent)")
    common.add_argument("--seed", type=int, metavar="N", help="override the master seed")
    common.add_argument("--plot", action="store_true", help="also write SVG plots")
    common.add_argument("--jobs", type=int, default=1, metavar="N", help="worker processes")
    common.add_argument("--force", action="store_true", help="overwrite existing outputs")
    common.add_argument("--replicates", type=int, metavar="N", help="override the replicate count")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="dimlda", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"dimlda {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("theory", parents=[common], help="limiting error rates over a lambda grid")
    sub.add_parser("simulate", parents=[common], help="Monte Carlo experiment(s)")
    sub.add_parser("heatmap", parents=[common], help="AR(1) (rho, p) grid of mean errors")
    p = sub.add_parser("select-lambda", parents=[common], help="choose the RLDA ridge parameter")
    p.add_argument("--data", metavar="CSV", help="labelled CSV (last column 1 or 2)")
    p.add_argument("--grid-min", type=float)
    p.add_argument("--grid-max", type=float)
    p.add_argument("--grid-size", type=int, default=40)
    p.add_argument("--k", type=int, default=5, help="cross-validation folds")
    p = sub.add_parser("classify", parents=[common], help="predict labels for a feature CSV")
    p.add_argument("--input", metavar="CSV", help="features to classify")
    p.add_argument("--train", metavar="CSV", help="labelled training CSV (instead of --config)")
    p.add_argument("--method", default="rlda",
                   choices=sorted(FIT_METHODS) + ["rlda", "corrected_rlda"])
    p.add_argument("--lambda", dest="lam", type=float, help="ridge parameter (default: selected)")
    p.add_argument("--save-model", action="store_true", help="also write model.json")
    sub.add_parser("verify", parents=[common], help="fast self-checks against oracles")
    return parser


COMMANDS = {"theory": cmd_theory, "simulate": cmd_simulate, "heatmap": cmd_heatmap,
            "select-lambda": cmd_select_lambda, "classify": cmd_classify, "verify": cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if args.jobs < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ValidationError, DomainError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, DimLDAError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
