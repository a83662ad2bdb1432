"""Linear two-class rules and their exact error rates under a Gaussian model.

Every fitter returns a :class:`FittedLinearClassifier` for the rule
``1{w'x + alpha > 0}`` (class 1 when true, class 2 otherwise).  Fitters
accept either a :class:`LabeledDataset` or precomputed
:class:`PooledStats`; the latter lets a simulation fit many rules from a
single pass over the data.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg
from scipy.special import ndtr

from .errors import DomainError, NumericalError, SingularityError, ValidationError
from .types import FittedLinearClassifier, LabeledDataset, Method, ProblemSpec, validate


@dataclass(frozen=True)
class ConditionalErrorReport:
    err_class1: float
    err_class2: float

    @property
    def err_total(self) -> float:
        return 0.5 * (self.err_class1 + self.err_class2)


class PooledStats:
    """Sample means and pooled covariance (divisor n - 2) of a dataset.

    The eigendecomposition of the pooled covariance is computed lazily and
    at most once; once available, ridge solves reuse it.
    """

    def __init__(self, data: LabeledDataset):
        validate(data)
        self.n1, self.n2, self.p = data.n1, data.n2, data.p
        self.xbar1 = data.x1.mean(axis=0)
        self.xbar2 = data.x2.mean(axis=0)
        c1 = data.x1 - self.xbar1
        c2 = data.x2 - self.xbar2
        S = (c1.T @ c1 + c2.T @ c2) / (self.n - 2)
        self.S = 0.5 * (S + S.T)

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    @property
    def diff(self) -> np.ndarray:
        return self.xbar1 - self.xbar2

    @property
    def total(self) -> np.ndarray:
        return self.xbar1 + self.xbar2

    @cached_property
    def eigh(self) -> tuple[np.ndarray, np.ndarray]:
        try:
            s, V = scipy.linalg.eigh(self.S)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"eigendecomposition of pooled covariance failed: {exc}") from exc
        return np.clip(s, 0.0, None), V

    @property
    def has_eigh(self) -> bool:
        return "eigh" in self.__dict__

    def sample_eigenvalues(self) -> np.ndarray:
        return self.eigh[0]

    def ridge_solve(self, lam: float, rhs: np.ndarray) -> np.ndarray:
        """(S + lam I)^{-1} rhs without forming an inverse."""
        if self.has_eigh:
            s, V = self.eigh
            return V @ ((V.T @ rhs) / (s + lam))
        A = self.S + lam * np.eye(self.p) if lam else self.S
        try:
            factor = scipy.linalg.cho_factor(A, lower=True, check_finite=False)
        except np.linalg.LinAlgError as exc:
            raise SingularityError("pooled covariance is not positive definite; "
                                   "use a regularized rule (RLDA)") from exc
        return scipy.linalg.cho_solve(factor, rhs, check_finite=False)

    def shrunk_trace(self, lam: float) -> float:
        """tr((S/lam + I)^{-1})."""
        s = self.sample_eigenvalues()
        return float(np.sum(lam / (s + lam)))


def _stats(data) -> PooledStats:
    return data if isinstance(data, PooledStats) else PooledStats(data)


def fit_bayes(spec: ProblemSpec) -> FittedLinearClassifier:
    """Optimal rule with known parameters."""
    if not spec.delta > 0:
        raise DomainError("Bayes rule needs mu1 != mu2")
    w = spec.bayes_direction()
    if not np.all(np.isfinite(w)):
        raise NumericalError("Sigma^{-1}(mu1 - mu2) is not finite")
    alpha = -0.5 * float((spec.mu1 + spec.mu2) @ w)
    return FittedLinearClassifier(w, alpha, Method.BAYES)


def _check_lda_size(st: PooledStats, margin: int) -> None:
    if not st.n - margin > st.p:
        raise SingularityError(
            f"pooled covariance needs n - {margin} > p (n={st.n}, p={st.p}); "
            "use fit_rlda for high-dimensional data")


def fit_lda(data) -> FittedLinearClassifier:
    st = _stats(data)
    _check_lda_size(st, 2)
    w = st.ridge_solve(0.0, st.diff)
    alpha = -0.5 * float(st.total @ w)
    return FittedLinearClassifier(w, alpha, Method.LDA, 0.0, st.n1, st.n2)


def lda_correction(n1: int, n2: int, p: int) -> float:
    """Intercept shift of the bias-corrected LDA rule."""
    n = n1 + n2
    if n - p - 3 <= 0:
        raise DomainError(f"bias correction requires n - p - 3 > 0 (n={n}, p={p})")
    return (n - 2) / (n - p - 3) * (p / (2 * n1) - p / (2 * n2))


def fit_corrected_lda(data) -> FittedLinearClassifier:
    st = _stats(data)
    corr = lda_correction(st.n1, st.n2, st.p)
    base = fit_lda(st)
    return FittedLinearClassifier(base.w, base.alpha + corr, Method.CORRECTED_LDA, 0.0,
                                  st.n1, st.n2, {"correction": corr})


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam!r}")
    return lam


def fit_rlda(data, lam: float) -> FittedLinearClassifier:
    lam = _check_lambda(lam)
    st = _stats(data)
    w = st.ridge_solve(lam, st.diff)
    alpha = -0.5 * float(st.total @ w)
    return FittedLinearClassifier(w, alpha, Method.RLDA, lam, st.n1, st.n2)


def rlda_correction(n1: int, n2: int, p: int, shrunk_trace: float) -> float:
    """Intercept shift of the bias-corrected RLDA rule given tr((S/lam+I)^{-1})."""
    n = n1 + n2
    denom = 1.0 - p / (n - 2) + shrunk_trace / (n - 2)
    if abs(denom) < 1e-12:
        raise NumericalError("bias-correction denominator vanishes", denom)
    return (p / (2 * n1) - p / (2 * n2)) * (1.0 - shrunk_trace / p) / denom


def fit_corrected_rlda(data, lam: float) -> FittedLinearClassifier:
    lam = _check_lambda(lam)
    st = _stats(data)
    corr = rlda_correction(st.n1, st.n2, st.p, st.shrunk_trace(lam))
    base = fit_rlda(st, lam)
    return FittedLinearClassifier(base.w, base.alpha + corr, Method.CORRECTED_RLDA, lam,
                                  st.n1, st.n2, {"correction": corr})


def fit_naive_bayes(data) -> FittedLinearClassifier:
    """Mean-difference direction with identity weighting."""
    st = _stats(data)
    w = st.diff.copy()
    return FittedLinearClassifier(w, -0.5 * float(st.total @ w), Method.NAIVE_BAYES, 0.0,
                                  st.n1, st.n2)


def fit_oracle_intercept(data, spec: ProblemSpec, lam: float = 0.0) -> FittedLinearClassifier:
    """LDA (lam = 0) or RLDA direction with the intercept computed from the true means."""
    st = _stats(data)
    base = fit_lda(st) if lam == 0 else fit_rlda(st, lam)
    alpha = -0.5 * float((spec.mu1 + spec.mu2) @ base.w)
    return FittedLinearClassifier(base.w, alpha, Method.ORACLE_INTERCEPT, float(lam),
                                  st.n1, st.n2)


def predict(clf: FittedLinearClassifier, x):
    """Class label(s) in {1, 2}; a score of exactly zero goes to class 2."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != clf.w.size:
        raise ValidationError("dimension mismatch", f"x has {x.shape[-1]} features, w has {clf.w.size}")
    score = x @ clf.w + clf.alpha
    labels = np.where(score > 0, 1, 2)
    return int(labels) if labels.ndim == 0 else labels


def conditional_error(clf: FittedLinearClassifier, spec: ProblemSpec) -> ConditionalErrorReport:
    """Exact misclassification probabilities of a fixed rule under N(mu_k, Sigma)."""
    w = clf.w
    if w.size != spec.p:
        raise ValidationError("dimension mismatch", f"w has {w.size} entries, p={spec.p}")
    var = float(w @ spec.sigma @ w)
    if not var > 0:
        raise NumericalError("w' Sigma w must be positive", var)
    sd = np.sqrt(var)
    e1 = float(ndtr(-(w @ spec.mu1 + clf.alpha) / sd))
    e2 = float(ndtr((w @ spec.mu2 + clf.alpha) / sd))
    return ConditionalErrorReport(e1, e2)


def empirical_error(clf: FittedLinearClassifier, test: LabeledDataset) -> ConditionalErrorReport:
    """Fraction of misclassified rows per class."""
    if test.n1 == 0 or test.n2 == 0:
        raise ValidationError("test set needs samples from both classes")
    e1 = float(np.mean(predict(clf, test.x1) != 1))
    e2 = float(np.mean(predict(clf, test.x2) != 2))
    return ConditionalErrorReport(e1, e2)
