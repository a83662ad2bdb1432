"""Synthetic scenarios and replicated Monte Carlo experiments.

A scenario is a covariance generator plus a mean generator; the mean is
rescaled so the Bayes error hits a target. Each replicate draws a fresh
training set from its own seed stream (``SeedSequence(seed,
spawn_key=(r,))``), fits the configured rules and records their exact
conditional error under the true model.
"""

from __future__ import annotations

import csv
import logging
import math
import time
import weakref
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np
import scipy.linalg
from scipy.special import ndtri
from scipy.stats import spearmanr

from . import classifiers as clf
from . import theory
from .errors import (
    ConfigError,
    DimLDAError,
    DomainError,
    NumericalError,
    ValidationError,
)
from .select import default_grid, select_lambda, select_lambda_cv
from .types import LabeledDataset, ProblemSpec, make_spectral_model

logger = logging.getLogger(__name__)

COVARIANCE_KINDS = ("identity", "ar1", "spectral", "dense")
MEAN_KINDS = ("first_coordinate", "sparse_random", "dense_random", "eigenvector",
              "isotropic", "sparse_direction")


@dataclass(frozen=True)
class CovarianceGenerator:
    kind: str
    p: int
    sigma2: float = 1.0
    rho: float = 0.0
    eigenvalues: tuple | None = None
    matrix: tuple | None = None

    def __post_init__(self):
        if self.kind not in COVARIANCE_KINDS:
            raise ConfigError(f"unknown covariance kind {self.kind!r}; expected one of {COVARIANCE_KINDS}")
        if self.p < 1:
            raise ConfigError("p must be positive")
        if self.kind == "identity" and not self.sigma2 > 0:
            raise ConfigError("sigma2 must be positive")
        if self.kind == "ar1" and not abs(self.rho) < 1:
            raise ConfigError("AR(1) requires |rho| < 1")
        if self.kind == "spectral":
            if self.eigenvalues is None or len(self.eigenvalues) != self.p:
                raise ConfigError("spectral covariance needs p eigenvalues")
            if min(self.eigenvalues) <= 0:
                raise ConfigError("spectral eigenvalues must be positive")
        if self.kind == "dense" and (self.matrix is None or len(self.matrix) != self.p):
            raise ConfigError("dense covariance needs a p x p matrix")

    @classmethod
    def identity(cls, p: int, sigma2: float = 1.0):
        return cls("identity", p, sigma2=sigma2)

    @classmethod
    def ar1(cls, p: int, rho: float):
        return cls("ar1", p, rho=rho)

    def describe(self) -> str:
        if self.kind == "identity":
            return f"identity(p={self.p}, sigma2={self.sigma2:g})"
        if self.kind == "ar1":
            return f"ar1(p={self.p}, rho={self.rho:g})"
        return f"{self.kind}(p={self.p})"


def ar1_matrix(p: int, rho: float) -> np.ndarray:
    return scipy.linalg.toeplitz(rho ** np.arange(p)) if rho else np.eye(p)


def gen_covariance(gen: CovarianceGenerator) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(eigenvalues descending, orthonormal eigenvectors, dense Sigma)."""
    p = gen.p
    if gen.kind == "identity":
        return np.full(p, gen.sigma2), np.eye(p), gen.sigma2 * np.eye(p)
    if gen.kind == "spectral":
        vals = np.sort(np.asarray(gen.eigenvalues, dtype=float))[::-1]
        return vals, np.eye(p), np.diag(vals)
    sigma = ar1_matrix(p, gen.rho) if gen.kind == "ar1" else np.asarray(gen.matrix, dtype=float)
    if gen.kind == "ar1" and gen.rho == 0:
        return np.ones(p), np.eye(p), sigma
    try:
        vals, vecs = scipy.linalg.eigh(sigma)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    return vals[::-1], vecs[:, ::-1], sigma


def szego_eigenvalues(rho: float, p: int) -> np.ndarray:
    """Approximate AR(1) eigenvalues, k = 1..p (largest first for rho > 0)."""
    if not abs(rho) < 1:
        raise DomainError("requires |rho| < 1")
    k = np.arange(1, p + 1)
    return (1 - rho ** 2) / (1 + rho ** 2 - 2 * rho * np.cos(k * np.pi / (p + 1)))


@dataclass(frozen=True)
class MeanGenerator:
    kind: str = "first_coordinate"
    target_bayes_error: float = 0.1
    fraction: float = 0.1
    k: int = 1
    case: str = "iso2"
    s: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.kind not in MEAN_KINDS:
            raise ConfigError(f"unknown mean kind {self.kind!r}; expected one of {MEAN_KINDS}")
        if not 0 < self.target_bayes_error < 0.5:
            raise ConfigError("target_bayes_error must lie in (0, 0.5)")
        if self.case not in ("iso1", "iso2", "iso3"):
            raise ConfigError(f"unknown isotropic case {self.case!r}")
        if not 0 < self.fraction <= 1:
            raise ConfigError("fraction must lie in (0, 1]")

    @property
    def delta(self) -> float:
        return target_delta(self.target_bayes_error)


def target_delta(bayes_error: float) -> float:
    """Separation whose Bayes error Phi(-delta/2) equals ``bayes_error``."""
    return float(-2.0 * ndtri(bayes_error))


def _raw_direction(gen: MeanGenerator, vals, vecs, sigma, rng) -> np.ndarray:
    p = vals.size
    if gen.kind == "first_coordinate":
        d = np.zeros(p)
        d[0] = 1.0
        return d
    if gen.kind == "dense_random":
        return rng.standard_normal(p)
    if gen.kind == "sparse_random":
        size = max(1, int(round(gen.fraction * p)))
        d = np.zeros(p)
        d[rng.choice(p, size, replace=False)] = rng.standard_normal(size)
        return d
    if gen.kind == "eigenvector":
        if not 1 <= gen.k <= p:
            raise ConfigError(f"eigenvector index k={gen.k} outside 1..{p}")
        return np.sqrt(vals[gen.k - 1]) * vecs[:, gen.k - 1]
    if gen.kind == "isotropic":
        power = {"iso1": 0.0, "iso2": 0.5, "iso3": 1.0}[gen.case]
        return vecs @ vals ** power
    # sparse_direction: Sigma^{-1} d has s nonzero leading entries
    s = min(max(gen.s, 1), p)
    beta = np.zeros(p)
    beta[:s] = rng.standard_normal(s)
    return sigma @ beta


def gen_means(gen: MeanGenerator, cov) -> tuple[np.ndarray, np.ndarray]:
    """mu1 (rescaled to the target separation) and mu2 = 0.

    ``cov`` is the triple returned by :func:`gen_covariance`.
    """
    vals, vecs, sigma = cov
    delta = gen.delta
    for attempt in range(100):
        rng = np.random.default_rng(np.random.SeedSequence(gen.seed, spawn_key=(attempt,)))
        d = _raw_direction(gen, vals, vecs, sigma, rng)
        proj = vecs.T @ d
        cur = math.sqrt(float(np.sum(proj ** 2 / vals)))
        if cur > 0:
            return d * (delta / cur), np.zeros(vals.size)
    raise NumericalError("mean generator kept producing a zero vector")


def build_spec(cov_gen: CovarianceGenerator, mean_gen: MeanGenerator) -> ProblemSpec:
    cov = gen_covariance(cov_gen)
    mu1, mu2 = gen_means(mean_gen, cov)
    vals, vecs, sigma = cov
    return ProblemSpec.from_eigh(mu1, mu2, sigma, vals, vecs)


_chol_cache: weakref.WeakKeyDictionary[ProblemSpec, np.ndarray] = weakref.WeakKeyDictionary()


def _cholesky(spec: ProblemSpec) -> np.ndarray:
    L = _chol_cache.get(spec)
    if L is None:
        try:
            L = scipy.linalg.cholesky(spec.sigma, lower=True)
        except np.linalg.LinAlgError as exc:
            raise ValidationError("sigma not positive definite", str(exc)) from exc
        _chol_cache[spec] = L
    return L


def _as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def _child(ss: np.random.SeedSequence, *key: int) -> np.random.SeedSequence:
    # explicit spawn keys keep children independent of spawn() call order
    return np.random.SeedSequence(ss.entropy, spawn_key=tuple(ss.spawn_key) + key)


def sample_dataset(spec: ProblemSpec, n1: int, n2: int, seed) -> LabeledDataset:
    """Draw n1 rows from N(mu1, Sigma) and n2 from N(mu2, Sigma)."""
    ss = _as_seed_sequence(seed)
    L = _cholesky(spec)
    blocks = []
    for k, (mu, n) in enumerate(((spec.mu1, n1), (spec.mu2, n2))):
        z = np.random.default_rng(_child(ss, k)).standard_normal((n, spec.p))
        blocks.append(mu + z @ L.T)
    return LabeledDataset(*blocks)


# ---------------------------------------------------------------------------
# Experiments

METHODS = ("bayes", "lda", "corrected_lda", "rlda", "corrected_rlda", "oracle",
           "naive_bayes", "rlda_select", "rlda_cv")


@dataclass(frozen=True)
class ClassifierSpec:
    method: str
    lam: float = 0.0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"unknown classifier {self.method!r}; expected one of {METHODS}")
        if self.method in ("rlda", "corrected_rlda") and not self.lam > 0:
            raise ConfigError(f"{self.method} needs a positive lambda")
        if self.lam < 0:
            raise ConfigError("lambda must be nonnegative")

    @property
    def label(self) -> str:
        names = {"bayes": "Bayes", "lda": "LDA", "corrected_lda": "C-LDA", "rlda": "RLDA",
                 "corrected_rlda": "C-RLDA", "oracle": "O-RLDA" , "naive_bayes": "NB",
                 "rlda_select": "RLDA-select", "rlda_cv": "RLDA-CV"}
        return names[self.method]

    @property
    def key(self) -> str:
        return f"{self.label}@{self.lam:g}" if self.method in ("rlda", "corrected_rlda", "oracle") else self.label


@dataclass(frozen=True)
class ExperimentConfig:
    covariance: CovarianceGenerator
    means: MeanGenerator
    n1: int
    n2: int
    classifiers: tuple[ClassifierSpec, ...]
    replicates: int = 100
    seed: int = 0
    theory: bool = True
    scenario_id: str = "scenario"
    test_size: int = 0
    cv_folds: int = 5
    select_grid: tuple | None = None

    def __post_init__(self):
        if self.replicates < 1:
            raise ConfigError("replicates must be at least 1")
        if self.n1 < 2 or self.n2 < 2:
            raise ConfigError("each class needs at least 2 training samples")
        if not self.classifiers:
            raise ConfigError("no classifiers configured")

    @property
    def p(self) -> int:
        return self.covariance.p

    def replicate_seed(self, r: int) -> np.random.SeedSequence:
        return np.random.SeedSequence(self.seed, spawn_key=(r,))


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    keys: list[str]
    errors: dict[str, np.ndarray]            # key -> (R, 2) class-wise errors, NaN when skipped
    chosen_lambda: dict[str, np.ndarray]
    theory: dict[str, tuple[float, float, float] | None]
    skipped: dict[str, str]
    delta: float
    wall_time: float = 0.0

    def totals(self, key: str) -> np.ndarray:
        e = self.errors[key]
        return 0.5 * (e[:, 0] + e[:, 1])

    def mean(self, key: str) -> float:
        t = self.totals(key)
        t = t[~np.isnan(t)]
        return math.fsum(t) / t.size if t.size else float("nan")

    def sd(self, key: str) -> float:
        t = self.totals(key)
        t = t[~np.isnan(t)]
        return float(np.std(t, ddof=1)) if t.size > 1 else float("nan")

    def class_means(self, key: str) -> tuple[float, float]:
        e = self.errors[key]
        ok = ~np.isnan(e[:, 0])
        return (math.fsum(e[ok, 0]) / ok.sum(), math.fsum(e[ok, 1]) / ok.sum()) if ok.any() else (np.nan, np.nan)

    def theory_total(self, key: str) -> float | None:
        t = self.theory.get(key)
        return None if t is None else t[2]

    def long_rows(self) -> list[dict]:
        rows = []
        for key, spec in zip(self.keys, self.config.classifiers):
            for r in range(self.config.replicates):
                e1, e2 = self.errors[key][r]
                lam = self.chosen_lambda[key][r]
                rows.append({"scenario_id": self.config.scenario_id, "replicate": r,
                             "classifier": spec.label, "lambda": lam,
                             "err1": e1, "err2": e2, "err_total": 0.5 * (e1 + e2)})
        return rows

    def summary_rows(self) -> list[dict]:
        rows = []
        for key, spec in zip(self.keys, self.config.classifiers):
            th = self.theory_total(key)
            mean = self.mean(key)
            m1, m2 = self.class_means(key)
            varies = spec.method in ("rlda_select", "rlda_cv")
            rows.append({"classifier": spec.label, "lambda": "" if varies else spec.lam,
                         "mean": mean, "sd": self.sd(key),
                         "theory": "" if th is None else th,
                         "abs_gap": "" if th is None else abs(mean - th),
                         "mean_err1": m1, "mean_err2": m2,
                         "replicates": int(np.sum(~np.isnan(self.totals(key))))})
        return rows


def theory_for(spec_c: ClassifierSpec, spec: ProblemSpec, model, n1: int, n2: int):
    """(class1, class2, total) limiting rate mapped to a classifier, or None."""
    y1, y2 = spec.p / n1, spec.p / n2
    delta = spec.delta
    try:
        m = spec_c.method
        if m == "bayes":
            b = theory.bayes_rate(delta)
            return b, b, b
        if m == "lda":
            pair = theory.rate_thm3(delta, y1, y2)
            return pair.class1, pair.class2, pair.total
        if m in ("corrected_lda",) or (m == "oracle" and spec_c.lam == 0):
            c = theory.rate_corrected_lda(delta, y1, y2)
            return c, c, c
        if m == "rlda":
            pair = theory.rate_thm4(model, delta, y1, y2, spec_c.lam)
            return pair.class1, pair.class2, pair.total
        if m in ("corrected_rlda", "oracle"):
            c = theory.rate_corrected_rlda(model, delta, y1, y2, spec_c.lam)
            return c, c, c
        if m == "naive_bayes" and n1 == n2:
            c = theory.rate_naive_bayes(spec, n1 + n2)
            return c, c, c
    except (DomainError, NumericalError) as exc:
        logger.debug("no theory for %s: %s", spec_c.key, exc)
    return None


def _fit_one(spec_c: ClassifierSpec, st: clf.PooledStats, data: LabeledDataset,
             spec: ProblemSpec, config: ExperimentConfig, ss: np.random.SeedSequence):
    m = spec_c.method
    if m == "bayes":
        return clf.fit_bayes(spec), float("nan")
    if m == "lda":
        return clf.fit_lda(st), 0.0
    if m == "corrected_lda":
        return clf.fit_corrected_lda(st), 0.0
    if m == "rlda":
        return clf.fit_rlda(st, spec_c.lam), spec_c.lam
    if m == "corrected_rlda":
        return clf.fit_corrected_rlda(st, spec_c.lam), spec_c.lam
    if m == "oracle":
        return clf.fit_oracle_intercept(st, spec, spec_c.lam), spec_c.lam
    if m == "naive_bayes":
        return clf.fit_naive_bayes(st), 0.0
    grid = (np.asarray(config.select_grid, dtype=float) if config.select_grid is not None
            else default_grid(st.sample_eigenvalues()))
    if m == "rlda_select":
        lam = select_lambda(st, grid).lambda_opt
    else:
        cv_seed = int(_child(ss, 7).generate_state(1)[0])
        lam = select_lambda_cv(data, grid, config.cv_folds, cv_seed).lambda_cv
    return clf.fit_rlda(st, lam), lam


def run_replicate(config: ExperimentConfig, spec: ProblemSpec, r: int):
    """Class-wise errors (and chosen lambdas) of every classifier on replicate r."""
    ss = config.replicate_seed(r)
    data = sample_dataset(spec, config.n1, config.n2, _child(ss, 0))
    st = clf.PooledStats(data)
    # one eigendecomposition serves every ridge fit in this replicate
    if any(c.method not in ("bayes", "lda", "corrected_lda", "naive_bayes") for c in config.classifiers):
        _ = st.eigh
    test = None
    if config.test_size:
        test = sample_dataset(spec, config.test_size, config.test_size, _child(ss, 1))
    out = []
    for spec_c in config.classifiers:
        try:
            fitted, lam = _fit_one(spec_c, st, data, spec, config, ss)
            rep = clf.empirical_error(fitted, test) if test is not None else clf.conditional_error(fitted, spec)
            out.append((rep.err_class1, rep.err_class2, lam, None))
        except DimLDAError as exc:
            out.append((np.nan, np.nan, np.nan, f"{type(exc).__name__}: {exc}"))
    return out


def _worker(args):
    config, spec, r = args
    return run_replicate(config, spec, r)


def run_experiment(config: ExperimentConfig, jobs: int = 1,
                   spec: ProblemSpec | None = None) -> ExperimentResult:
    t0 = time.perf_counter()
    spec = build_spec(config.covariance, config.means) if spec is None else spec
    keys = [c.key for c in config.classifiers]
    if len(set(keys)) != len(keys):
        raise ConfigError(f"duplicate classifier entries: {keys}")
    R = config.replicates
    errors = {k: np.full((R, 2), np.nan) for k in keys}
    lams = {k: np.full(R, np.nan) for k in keys}
    skipped: dict[str, str] = {}

    if jobs > 1 and R > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_worker, [(config, spec, r) for r in range(R)]))
    else:
        results = [run_replicate(config, spec, r) for r in range(R)]
    for r, rep in enumerate(results):
        for key, (e1, e2, lam, err) in zip(keys, rep):
            errors[key][r] = e1, e2
            lams[key][r] = lam
            if err is not None:
                skipped.setdefault(key, err)

    th = {}
    if config.theory:
        model = make_spectral_model(spec)
        for key, c in zip(keys, config.classifiers):
            th[key] = theory_for(c, spec, model, config.n1, config.n2)
    return ExperimentResult(config, keys, errors, lams, th, skipped, spec.delta,
                            time.perf_counter() - t0)


@dataclass
class HeatmapResult:
    p_values: tuple
    rho_values: tuple
    keys: list[str]
    means: dict[str, np.ndarray]   # key -> (len(rho), len(p))
    sds: dict[str, np.ndarray]
    labels: dict[str, str] = field(default_factory=dict)

    def rows(self) -> list[dict]:
        out = []
        for key in self.keys:
            for i, rho in enumerate(self.rho_values):
                for j, p in enumerate(self.p_values):
                    out.append({"classifier": key, "rho": rho, "p": p,
                                "mean": self.means[key][i, j], "sd": self.sds[key][i, j]})
        return out

    def trend_spearman(self, key: str) -> np.ndarray:
        """Per-p Spearman correlation between |rho| and the mean error."""
        absr = np.abs(np.asarray(self.rho_values))
        return np.array([spearmanr(absr, self.means[key][:, j]).statistic
                         for j in range(len(self.p_values))])


def run_heatmap(base: ExperimentConfig, p_values, rho_values, replicates: int = 20,
                jobs: int = 1) -> HeatmapResult:
    """Mean errors over an AR(1) (rho, p) grid; inapplicable cells are NaN."""
    p_values, rho_values = tuple(int(p) for p in p_values), tuple(float(r) for r in rho_values)
    if not p_values or not rho_values:
        raise ConfigError("heatmap grid is empty")
    keys = [c.key for c in base.classifiers]
    means = {k: np.full((len(rho_values), len(p_values)), np.nan) for k in keys}
    sds = {k: np.full_like(means[k], np.nan) for k in keys}
    for i, rho in enumerate(rho_values):
        for j, p in enumerate(p_values):
            cfg = replace(base, covariance=CovarianceGenerator.ar1(p, rho), replicates=replicates,
                          theory=False, scenario_id=f"{base.scenario_id}-rho{rho:g}-p{p}")
            res = run_experiment(cfg, jobs=jobs)
            for k in keys:
                means[k][i, j] = res.mean(k)
                sds[k][i, j] = res.sd(k)
    return HeatmapResult(p_values, rho_values, keys, means, sds)


# ---------------------------------------------------------------------------
# Config parsing and CSV output

def _check_keys(obj: dict, allowed: set, where: str, required: tuple = ()) -> None:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {sorted(unknown)}")
    for key in required:
        if key not in obj:
            raise ConfigError(f"{where}: missing field '{key}'")


def covariance_from_config(obj: dict, p: int | None = None) -> CovarianceGenerator:
    _check_keys(obj, {"kind", "p", "sigma2", "rho", "eigenvalues", "matrix"}, "covariance", ("kind",))
    p = obj.get("p", p)
    if p is None:
        raise ConfigError("covariance: missing field 'p'")
    return CovarianceGenerator(
        obj["kind"], int(p), float(obj.get("sigma2", 1.0)), float(obj.get("rho", 0.0)),
        tuple(obj["eigenvalues"]) if "eigenvalues" in obj else None,
        tuple(tuple(r) for r in obj["matrix"]) if "matrix" in obj else None)


def means_from_config(obj: dict) -> MeanGenerator:
    _check_keys(obj, {"kind", "target_bayes_error", "fraction", "k", "case", "s", "seed"},
                "means", ("kind",))
    return MeanGenerator(**obj)


def classifiers_from_config(items) -> tuple[ClassifierSpec, ...]:
    if not isinstance(items, list) or not items:
        raise ConfigError("classifiers: expected a nonempty list")
    out = []
    for i, item in enumerate(items):
        _check_keys(item, {"method", "lambda"}, f"classifiers[{i}]", ("method",))
        lam = item.get("lambda", 0.0)
        method = item["method"]
        if lam == "select":
            out.append(ClassifierSpec("rlda_select"))
        elif lam == "cv":
            out.append(ClassifierSpec("rlda_cv"))
        elif isinstance(lam, list):
            out.extend(ClassifierSpec(method, float(v)) for v in lam)
        else:
            out.append(ClassifierSpec(method, float(lam)))
    return tuple(out)


EXPERIMENT_KEYS = {"scenario_id", "covariance", "means", "n1", "n2", "classifiers", "replicates",
                   "seed", "theory", "test_size", "cv_folds", "select_grid"}


def experiment_from_config(obj: dict, *, extra: set = frozenset()) -> ExperimentConfig:
    _check_keys(obj, EXPERIMENT_KEYS | set(extra), "experiment",
                ("covariance", "means", "n1", "n2", "classifiers"))
    try:
        return ExperimentConfig(
            covariance=covariance_from_config(obj["covariance"]),
            means=means_from_config(obj["means"]),
            n1=int(obj["n1"]), n2=int(obj["n2"]),
            classifiers=classifiers_from_config(obj["classifiers"]),
            replicates=int(obj.get("replicates", 100)),
            seed=int(obj.get("seed", 0)),
            theory=bool(obj.get("theory", True)),
            scenario_id=str(obj.get("scenario_id", "scenario")),
            test_size=int(obj.get("test_size", 0)),
            cv_folds=int(obj.get("cv_folds", 5)),
            select_grid=tuple(obj["select_grid"]) if "select_grid" in obj else None,
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"experiment: {exc}") from exc


def config_echo(config: ExperimentConfig) -> dict:
    d = asdict(config)
    d["classifiers"] = [asdict(c) for c in config.classifiers]
    return d


def write_csv(path, rows: list[dict], header_lines: list[str] = (), columns=None) -> None:
    columns = list(columns or (rows[0].keys() if rows else []))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.writelines(f"# {line}\n" for line in header_lines)
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(row.get(k, "")) for k in columns})


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return "nan" if np.isnan(v) else repr(float(v))
    return v
