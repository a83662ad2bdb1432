"""Domain types: the two-class Gaussian model, its spectral summary,
labelled samples and fitted linear rules.

All containers are frozen dataclasses holding read-only numpy arrays, so
they can be shared freely between worker processes.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import scipy.linalg

from .errors import ConfigError, NumericalError, ValidationError

SYMMETRY_RTOL = 1e-12
DELTA_RTOL = 1e-10
WEIGHT_ATOL = 1e-12
MERGE_RTOL = 1e-9


def _frozen(a, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


def _symmetric_eigh(sigma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a symmetric matrix, eigenvalues in descending order."""
    try:
        vals, vecs = scipy.linalg.eigh(sigma)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"symmetric eigendecomposition failed: {exc}") from exc
    return vals[::-1], vecs[:, ::-1]


class Method(str, enum.Enum):
    BAYES = "Bayes"
    LDA = "LDA"
    CORRECTED_LDA = "CorrectedLDA"
    RLDA = "RLDA"
    CORRECTED_RLDA = "CorrectedRLDA"
    NAIVE_BAYES = "NaiveBayes"
    ORACLE_INTERCEPT = "OracleIntercept"


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """True parameters (mu1, mu2, Sigma) of the two-class model.

    Sigma is kept both densely and as its eigendecomposition; the
    Mahalanobis separation ``delta`` is cached at construction.
    Build instances with :meth:`from_dense` or :meth:`from_spectral`.
    """

    mu1: np.ndarray
    mu2: np.ndarray
    sigma: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    delta: float

    @classmethod
    def from_dense(cls, mu1, mu2, sigma, *, check: bool = True) -> ProblemSpec:
        mu1 = np.asarray(mu1, dtype=float).ravel()
        mu2 = np.asarray(mu2, dtype=float).ravel()
        sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
        if sigma.shape != (mu1.size, mu1.size) or mu2.size != mu1.size:
            raise ValidationError("dimension mismatch",
                                  f"mu1 {mu1.shape}, mu2 {mu2.shape}, sigma {sigma.shape}")
        scale = max(np.abs(sigma).max(), np.finfo(float).tiny)
        if np.abs(sigma - sigma.T).max() > SYMMETRY_RTOL * scale:
            raise ValidationError("sigma not symmetric")
        sym = 0.5 * (sigma + sigma.T)
        vals, vecs = _symmetric_eigh(sym)
        spec = cls(_frozen(mu1), _frozen(mu2), _frozen(sym), _frozen(vals), _frozen(vecs),
                   _mahalanobis(mu1 - mu2, vals, vecs))
        if check:
            validate(spec)
        return spec

    @classmethod
    def from_spectral(cls, mu1, mu2, eigenvalues, eigenvectors, *,
                      check: bool = True) -> ProblemSpec:
        mu1 = np.asarray(mu1, dtype=float).ravel()
        mu2 = np.asarray(mu2, dtype=float).ravel()
        vals = np.asarray(eigenvalues, dtype=float).ravel()
        vecs = np.atleast_2d(np.asarray(eigenvectors, dtype=float))
        if vecs.shape != (mu1.size, vals.size) or vals.size != mu1.size or mu2.size != mu1.size:
            raise ValidationError("dimension mismatch",
                                  f"mu {mu1.shape}, eigenvalues {vals.shape}, eigenvectors {vecs.shape}")
        order = np.argsort(vals)[::-1]
        vals, vecs = vals[order], vecs[:, order]
        sigma = (vecs * vals) @ vecs.T
        sigma = 0.5 * (sigma + sigma.T)
        spec = cls(_frozen(mu1), _frozen(mu2), _frozen(sigma), _frozen(vals), _frozen(vecs),
                   _mahalanobis(mu1 - mu2, vals, vecs))
        if check:
            validate(spec)
        return spec

    @classmethod
    def from_eigh(cls, mu1, mu2, sigma, eigenvalues, eigenvectors, *,
                  check: bool = True) -> ProblemSpec:
        """Trusting constructor when Sigma and its eigenpairs are both at hand."""
        mu1 = np.asarray(mu1, dtype=float).ravel()
        mu2 = np.asarray(mu2, dtype=float).ravel()
        vals = np.asarray(eigenvalues, dtype=float)
        vecs = np.asarray(eigenvectors, dtype=float)
        order = np.argsort(vals)[::-1]
        vals, vecs = vals[order], vecs[:, order]
        spec = cls(_frozen(mu1), _frozen(mu2), _frozen(sigma), _frozen(vals), _frozen(vecs),
                   _mahalanobis(mu1 - mu2, vals, vecs))
        if check:
            validate(spec)
        return spec

    @property
    def p(self) -> int:
        return self.mu1.size

    @property
    def mean_diff(self) -> np.ndarray:
        return self.mu1 - self.mu2

    def standardized_mean(self) -> np.ndarray:
        """Sigma^{-1/2}(mu1 - mu2)."""
        proj = self.eigenvectors.T @ self.mean_diff
        return self.eigenvectors @ (proj / np.sqrt(self.eigenvalues))

    def bayes_direction(self) -> np.ndarray:
        """Sigma^{-1}(mu1 - mu2), computed from the stored eigenpairs."""
        proj = self.eigenvectors.T @ self.mean_diff
        return self.eigenvectors @ (proj / self.eigenvalues)

    def with_means(self, mu1, mu2) -> ProblemSpec:
        """Same covariance, new means (eigendecomposition is reused)."""
        mu1 = np.asarray(mu1, dtype=float).ravel()
        mu2 = np.asarray(mu2, dtype=float).ravel()
        if mu1.size != self.p or mu2.size != self.p:
            raise ValidationError("dimension mismatch", f"expected length {self.p}")
        return ProblemSpec(_frozen(mu1), _frozen(mu2), self.sigma, self.eigenvalues,
                           self.eigenvectors,
                           _mahalanobis(mu1 - mu2, self.eigenvalues, self.eigenvectors))

    def to_config(self) -> dict:
        return {"mu1": self.mu1.tolist(), "mu2": self.mu2.tolist(),
                "sigma_dense": self.sigma.tolist()}


def _mahalanobis(d: np.ndarray, vals: np.ndarray, vecs: np.ndarray) -> float:
    proj = vecs.T @ d
    with np.errstate(divide="ignore", invalid="ignore"):
        sq = float(np.sum(proj ** 2 / vals))
    return float(np.sqrt(sq)) if sq >= 0 else float("nan")


@dataclass(frozen=True, eq=False)
class SpectralModel:
    """Discrete population spectral distribution with mean projections.

    ``mean_proj_sq[i]`` is the total squared projection of mu1 - mu2 onto
    the eigenspace of atom i, so that sum(mean_proj_sq / eigenvalues)
    equals delta**2.
    """

    eigenvalues: np.ndarray
    weights: np.ndarray
    mean_proj_sq: np.ndarray
    delta: float

    @classmethod
    def from_atoms(cls, eigenvalues, weights, mean_proj_sq, *, check: bool = True) -> SpectralModel:
        vals = _frozen(np.atleast_1d(eigenvalues))
        w = _frozen(np.atleast_1d(weights))
        d2 = _frozen(np.atleast_1d(mean_proj_sq))
        with np.errstate(divide="ignore", invalid="ignore"):
            delta = float(np.sqrt(max(np.sum(d2 / vals), 0.0)))
        model = cls(vals, w, d2, delta)
        if check:
            validate(model)
        return model

    @classmethod
    def point_mass(cls, sigma2: float, delta: float) -> SpectralModel:
        """Sigma = sigma2 * I with separation delta."""
        return cls.from_atoms([sigma2], [1.0], [delta ** 2 * sigma2])

    @property
    def mean_eigenvalue(self) -> float:
        return float(np.dot(self.weights, self.eigenvalues))

    def integrate(self, f) -> float:
        """Integral of f against H, i.e. sum_i w_i f(lambda_i)."""
        return float(np.dot(self.weights, f(self.eigenvalues)))


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Training or test samples, one row per observation."""

    x1: np.ndarray
    x2: np.ndarray

    def __post_init__(self):
        for name in ("x1", "x2"):
            a = np.asarray(getattr(self, name), dtype=float)
            if a.ndim == 1:
                a = a.reshape(-1, 1)
            object.__setattr__(self, name, _frozen(a))

    @property
    def n1(self) -> int:
        return self.x1.shape[0]

    @property
    def n2(self) -> int:
        return self.x2.shape[0]

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    @property
    def p(self) -> int:
        return self.x1.shape[1]

    def stacked(self) -> tuple[np.ndarray, np.ndarray]:
        """Feature matrix and label vector (labels in {1, 2})."""
        X = np.vstack([self.x1, self.x2])
        y = np.concatenate([np.ones(self.n1, dtype=int), np.full(self.n2, 2, dtype=int)])
        return X, y

    @classmethod
    def from_arrays(cls, X, y) -> LabeledDataset:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        y = np.asarray(y).ravel()
        if set(np.unique(y).tolist()) - {1, 2}:
            raise ValidationError("labels must be in {1, 2}")
        return cls(X[y == 1], X[y == 2])

    @classmethod
    def from_csv(cls, path) -> LabeledDataset:
        X, y = read_labeled_csv(path)
        return cls.from_arrays(X, y)

    def to_csv(self, path) -> None:
        X, y = self.stacked()
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow([f"x{j + 1}" for j in range(self.p)] + ["label"])
            for row, lab in zip(X, y):
                writer.writerow([repr(float(v)) for v in row] + [int(lab)])


def _is_numeric_row(row: list[str]) -> bool:
    try:
        [float(v) for v in row]
    except ValueError:
        return False
    return True


def read_feature_csv(path) -> np.ndarray:
    """Read an unlabelled feature matrix (header row optional)."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if rows and not _is_numeric_row(rows[0]):
        rows = rows[1:]
    if not rows:
        raise ValidationError("empty CSV", str(path))
    try:
        return np.array([[float(v) for v in r] for r in rows], dtype=float)
    except ValueError as exc:
        raise ValidationError("non-numeric CSV entry", str(exc)) from exc


def read_labeled_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read features plus a final label column in {1, 2}."""
    data = read_feature_csv(path)
    if data.shape[1] < 2:
        raise ValidationError("CSV needs at least one feature column and a label column")
    labels = data[:, -1]
    if not np.all(np.isin(labels, (1.0, 2.0))):
        raise ValidationError("labels must be in {1, 2}")
    return data[:, :-1], labels.astype(int)


@dataclass(frozen=True, eq=False)
class FittedLinearClassifier:
    """The rule 1{w'x + alpha > 0} -> class 1, otherwise class 2."""

    w: np.ndarray
    alpha: float
    method: Method
    lam: float = 0.0
    n1: int = 0
    n2: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "w", _frozen(np.ravel(self.w)))
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "method", Method(self.method))

    def decision_function(self, X) -> np.ndarray:
        return np.asarray(X, dtype=float) @ self.w + self.alpha

    def scaled(self, c: float) -> FittedLinearClassifier:
        return FittedLinearClassifier(c * self.w, c * self.alpha, self.method, self.lam,
                                      self.n1, self.n2, dict(self.meta))

    def to_config(self) -> dict:
        return {"w": self.w.tolist(), "alpha": self.alpha, "method": self.method.value,
                "lambda": self.lam, "n1": self.n1, "n2": self.n2}


def make_spectral_model(spec: ProblemSpec, merge: bool = True) -> SpectralModel:
    """Spectral distribution of Sigma (weight 1/p per eigenvalue) together
    with the squared projections of mu1 - mu2 on the eigenvectors.

    With ``merge`` eigenvalues equal to within 1e-9 relative tolerance are
    collapsed into one atom, summing weights and projections.
    """
    if np.any(spec.eigenvalues <= 0):
        raise ValidationError("sigma not positive definite",
                              f"min eigenvalue {spec.eigenvalues.min():.3g}")
    vals = np.asarray(spec.eigenvalues)
    d2 = (spec.eigenvectors.T @ spec.mean_diff) ** 2
    w = np.full(vals.size, 1.0 / vals.size)
    if merge and vals.size > 1:
        tol = MERGE_RTOL * vals.max()
        groups, i = [], 0
        while i < vals.size:
            j = i + 1
            while j < vals.size and abs(vals[j] - vals[i]) <= tol:
                j += 1
            groups.append((i, j))
            i = j
        vals = np.array([vals[i:j].mean() for i, j in groups])
        d2 = np.array([d2[i:j].sum() for i, j in groups])
        w = np.array([(j - i) / spec.p for i, j in groups])
    return SpectralModel(_frozen(vals), _frozen(w), _frozen(d2), spec.delta)


def validate(obj: Any) -> None:
    """Raise :class:`ValidationError` naming the first violated invariant."""
    if isinstance(obj, ProblemSpec):
        _validate_spec(obj)
    elif isinstance(obj, SpectralModel):
        _validate_model(obj)
    elif isinstance(obj, LabeledDataset):
        _validate_dataset(obj)
    elif isinstance(obj, FittedLinearClassifier):
        if obj.method in (Method.RLDA, Method.CORRECTED_RLDA) and not obj.lam > 0:
            raise ValidationError("lambda must be positive for regularized methods")
        if not np.all(np.isfinite(obj.w)) or not np.isfinite(obj.alpha):
            raise ValidationError("classifier coefficients must be finite")
    else:
        raise TypeError(f"cannot validate object of type {type(obj).__name__}")


def _validate_spec(spec: ProblemSpec) -> None:
    p = spec.p
    if spec.mu2.shape != (p,) or spec.sigma.shape != (p, p):
        raise ValidationError("dimension mismatch")
    if not (np.all(np.isfinite(spec.sigma)) and np.all(np.isfinite(spec.mu1))
            and np.all(np.isfinite(spec.mu2))):
        raise ValidationError("parameters must be finite")
    scale = max(np.abs(spec.sigma).max(), np.finfo(float).tiny)
    if np.abs(spec.sigma - spec.sigma.T).max() > SYMMETRY_RTOL * scale:
        raise ValidationError("sigma not symmetric")
    if np.any(spec.eigenvalues <= 0):
        raise ValidationError("sigma not positive definite",
                              f"min eigenvalue {spec.eigenvalues.min():.6g}")
    gram = spec.eigenvectors.T @ spec.eigenvectors
    if np.abs(gram - np.eye(p)).max() > 1e-8:
        raise ValidationError("eigenvectors not orthonormal")
    d = spec.mean_diff
    direct = float(d @ scipy.linalg.solve(spec.sigma, d, assume_a="pos"))
    cached = spec.delta ** 2
    if abs(direct - cached) > DELTA_RTOL * max(abs(direct), 1e-300) and abs(direct - cached) > 1e-14:
        raise ValidationError("delta inconsistent with mu1, mu2, sigma",
                              f"cached {cached!r} vs recomputed {direct!r}")


def _validate_model(model: SpectralModel) -> None:
    vals, w, d2 = model.eigenvalues, model.weights, model.mean_proj_sq
    if not (vals.shape == w.shape == d2.shape) or vals.ndim != 1 or vals.size == 0:
        raise ValidationError("atoms, weights and projections must align")
    if not np.all(np.isfinite(vals)):
        raise ValidationError("eigenvalues must be bounded")
    if np.any(vals <= 0):
        raise ValidationError("eigenvalues must be positive")
    if np.any(w <= 0):
        raise ValidationError("weights must be positive")
    if abs(w.sum() - 1.0) > WEIGHT_ATOL:
        raise ValidationError("weights must sum to 1", f"sum={w.sum():.15g}")
    if np.any(d2 < 0):
        raise ValidationError("mean projections must be nonnegative")
    total = float(np.sum(d2 / vals))
    if abs(total - model.delta ** 2) > DELTA_RTOL * max(total, 1e-300):
        raise ValidationError("mean projections inconsistent with delta",
                              f"sum d^2/lambda={total!r}, delta^2={model.delta ** 2!r}")


def _validate_dataset(data: LabeledDataset) -> None:
    if data.x1.ndim != 2 or data.x2.ndim != 2:
        raise ValidationError("samples must be 2-D arrays")
    if data.x1.shape[1] != data.x2.shape[1]:
        raise ValidationError("class blocks must have the same number of columns")
    if data.n1 < 2 or data.n2 < 2:
        raise ValidationError("each class needs at least 2 samples",
                              f"n1={data.n1}, n2={data.n2}")
    if not (np.all(np.isfinite(data.x1)) and np.all(np.isfinite(data.x2))):
        raise ValidationError("samples must be finite")


def load_json(path_or_text) -> dict:
    """Parse JSON from a path (or a raw string), reporting line/column on error."""
    if isinstance(path_or_text, (str, Path)) and Path(str(path_or_text)).exists():
        text = Path(path_or_text).read_text(encoding="utf-8")
        where = str(path_or_text)
    else:
        text, where = str(path_or_text), "<string>"
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{where}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: top level must be an object")
    return obj


def spec_from_config(cfg: dict) -> ProblemSpec:
    """Build a ProblemSpec from ``mu1``/``mu2`` plus ``sigma_dense`` or ``sigma_model``."""
    allowed = {"mu1", "mu2", "sigma_dense", "sigma_model"}
    unknown = set(cfg) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s): {sorted(unknown)}")
    for key in ("mu1", "mu2"):
        if key not in cfg:
            raise ConfigError(f"missing field '{key}'")
    if ("sigma_dense" in cfg) == ("sigma_model" in cfg):
        raise ConfigError("exactly one of 'sigma_dense' or 'sigma_model' is required")
    mu1 = np.asarray(cfg["mu1"], dtype=float)
    mu2 = np.asarray(cfg["mu2"], dtype=float)
    if "sigma_dense" in cfg:
        return ProblemSpec.from_dense(mu1, mu2, np.asarray(cfg["sigma_dense"], dtype=float))
    from .simulate import covariance_from_config, gen_covariance

    vals, vecs, _ = gen_covariance(covariance_from_config(cfg["sigma_model"], p=mu1.size))
    return ProblemSpec.from_spectral(mu1, mu2, vals, vecs)


def dumps_config(obj: dict) -> str:
    buf = io.StringIO()
    json.dump(obj, buf, indent=2, sort_keys=True)
    return buf.getvalue()
