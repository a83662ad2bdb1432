"""Choosing the ridge parameter of RLDA.

``select_lambda`` minimises a plug-in estimate of 1 - R1^2/R2 computed
from the eigenvalues of the pooled covariance, which targets the optimal
lambda when the standardized mean difference is spread isotropically over
the eigenvectors. ``select_lambda_cv`` is the general-purpose fallback.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classifiers import PooledStats, _stats
from .errors import ConfigError, DomainError, NumericalError
from .types import LabeledDataset

DEFAULT_GRID_SIZE = 40
DEFAULT_GRID_SPAN = (1e-3, 1e2)


def estimate_functionals(sample_eigs, n: int, lam: float) -> tuple[float, float, float, float]:
    """Plug-in (a1, a2, R1_hat, R2_hat) at one lambda from sample eigenvalues."""
    s = np.clip(np.asarray(sample_eigs, dtype=float), 0.0, None)
    if n <= 2:
        raise DomainError(f"n must exceed 2, got {n}")
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam!r}")
    p = s.size
    t = lam / (s + lam)                   # eigenvalues of (S/lam + I)^{-1}
    a1 = 1.0 - float(np.mean(t))
    a2 = float(np.mean(t - t * t))
    g = 1.0 - p / (n - 2) * a1
    if not g > 0:
        raise NumericalError("1 - y_hat * a1 must be positive", g)
    return a1, a2, a1 / g, a1 / g ** 3 - a2 / g ** 4


def default_grid(sample_eigs, size: int = DEFAULT_GRID_SIZE,
                 span: tuple[float, float] = DEFAULT_GRID_SPAN) -> np.ndarray:
    """Log-spaced grid anchored at the mean sample eigenvalue."""
    sbar = float(np.mean(sample_eigs))
    if not sbar > 0:
        raise DomainError("sample covariance is identically zero")
    return np.geomspace(span[0] * sbar, span[1] * sbar, size)


def _check_grid(grid) -> np.ndarray:
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise ConfigError("lambda grid is empty")
    if np.any(grid <= 0):
        raise ConfigError("lambda grid must be positive")
    if np.any(np.diff(grid) < 0):
        raise ConfigError("lambda grid must be ascending")
    return grid


@dataclass(frozen=True)
class LambdaEstimates:
    lambda_grid: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    r1_hat: np.ndarray
    r2_hat: np.ndarray
    objective: np.ndarray
    y_hat: float
    lambda_opt: float

    @property
    def index_opt(self) -> int:
        return int(np.nanargmin(self.objective))


def select_lambda(data, grid=None) -> LambdaEstimates:
    """Minimise 1 - R1_hat^2/R2_hat over ``grid`` (ties go to the smaller lambda).

    The pooled covariance is eigendecomposed once; every grid point reuses
    its eigenvalues.
    """
    st = _stats(data)
    s = st.sample_eigenvalues()
    grid = default_grid(s) if grid is None else _check_grid(grid)
    cols = np.full((5, grid.size), np.nan)
    for i, lam in enumerate(grid):
        try:
            a1, a2, r1, r2 = estimate_functionals(s, st.n, lam)
        except NumericalError:
            continue
        cols[:4, i] = a1, a2, r1, r2
        if r2 > 0:
            cols[4, i] = 1.0 - r1 * r1 / r2
    if np.all(np.isnan(cols[4])):
        raise NumericalError("objective undefined at every grid point")
    best = int(np.nanargmin(cols[4]))
    return LambdaEstimates(grid, *cols, y_hat=st.p / (st.n - 2), lambda_opt=float(grid[best]))


@dataclass(frozen=True)
class CVResult:
    lambda_cv: float
    grid: np.ndarray
    fold_errors: np.ndarray  # shape (k, len(grid))
    seed: int
    fold_sizes: np.ndarray

    @property
    def mean_errors(self) -> np.ndarray:
        # pooled over all held-out rows, so unequal folds weigh by size
        return self.fold_sizes @ self.fold_errors / self.fold_sizes.sum()


def stratified_folds(n1: int, n2: int, k: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Fold index for every row of each class.

    Each class is shuffled, then rows are dealt round-robin; class 2
    continues where class 1 stopped so fold sizes differ by at most one.
    """
    rng = np.random.default_rng(seed)
    f1 = np.empty(n1, dtype=int)
    f2 = np.empty(n2, dtype=int)
    f1[rng.permutation(n1)] = np.arange(n1) % k
    f2[rng.permutation(n2)] = (n1 + np.arange(n2)) % k
    return f1, f2


def select_lambda_cv(data: LabeledDataset, grid, k: int = 5, seed: int = 0) -> CVResult:
    """k-fold cross-validated RLDA error over ``grid``; argmin with ties to smaller lambda."""
    grid = _check_grid(grid)
    if k < 2:
        raise ConfigError(f"need at least 2 folds, got {k}")
    if k > data.n:
        raise ConfigError(f"{k} folds but only {data.n} samples")
    f1, f2 = stratified_folds(data.n1, data.n2, k, seed)
    errors = np.empty((k, grid.size))
    sizes = np.array([(f1 == j).sum() + (f2 == j).sum() for j in range(k)], dtype=float)
    for fold in range(k):
        tr1, tr2 = data.x1[f1 != fold], data.x2[f2 != fold]
        if len(tr1) < 2 or len(tr2) < 2:
            raise ConfigError(f"fold {fold} leaves fewer than 2 training samples in a class")
        st = PooledStats(LabeledDataset(tr1, tr2))
        s, V = st.eigh
        va = np.vstack([data.x1[f1 == fold], data.x2[f2 == fold]])
        truth = np.concatenate([np.ones((f1 == fold).sum(), int), np.full((f2 == fold).sum(), 2)])
        proj_d = V.T @ st.diff
        proj_m = V.T @ st.total
        proj_x = va @ V
        for j, lam in enumerate(grid):
            coef = proj_d / (s + lam)
            score = proj_x @ coef - 0.5 * float(proj_m @ coef)
            errors[fold, j] = np.mean(np.where(score > 0, 1, 2) != truth)
    res = CVResult(0.0, grid, errors, seed, sizes)
    return CVResult(float(grid[int(np.argmin(res.mean_errors))]), grid, errors, seed, sizes)
