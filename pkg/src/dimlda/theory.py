"""Limiting misclassification rates of LDA-type rules when p/n -> y.

The regularized formulas are driven by the Stieltjes transform m0(-lam)
of the limiting sample-covariance spectrum, which solves

    m = sum_i w_i / (lambda_i (1 - y + y lam m) + lam)

for a discrete population spectrum {(lambda_i, w_i)}.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr

from .errors import DomainError, NumericalError
from .types import ProblemSpec, SpectralModel

logger = logging.getLogger(__name__)

MP_TOL = 1e-13
MP_MAX_ITER = 100_000
MP_DAMPING = 0.5


def combined_ratio(y1: float, y2: float) -> float:
    """y = y1 y2 / (y1 + y2), i.e. p/n when y_k = p/n_k."""
    if y1 == 0 or y2 == 0:
        return 0.0
    return y1 * y2 / (y1 + y2)


# ---------------------------------------------------------------------------
# Marcenko-Pastur fixed point

def _mp_map(m: float, vals, w, y: float, lam: float) -> float:
    with np.errstate(divide="ignore", invalid="ignore"):
        return float(np.sum(w / (vals * (1.0 - y + y * lam * m) + lam)))


def _mp_derivative(u: float, m: float, vals, w, y: float, lam: float) -> float:
    # implicit differentiation of the fixed point in z = -lam; u = 1 - y + y lam m
    den = vals * u + lam
    num = float(np.sum(w * (1.0 + vals * y * m) / den ** 2))
    return num / (1.0 + y * lam * float(np.sum(w * vals / den ** 2)))


def _gamma_residual(u: float, vals, w, y: float, lam: float) -> float:
    # fixed point rewritten for u = 1 - y + y lam m; increasing on [0, 1]
    return u - 1.0 + y * float(np.sum(w * vals * u / (vals * u + lam)))


def solve_mp(model: SpectralModel, y: float, lam: float, *,
             tol: float = MP_TOL, max_iter: int = MP_MAX_ITER) -> tuple[float, float]:
    """Return (m0(-lam), m0'(-lam)) for spectrum ``model`` and ratio ``y``.

    Damped fixed-point iteration first. If it stalls or leaves the
    admissible branch (1 - y + y lam m >= 0), the equation is rewritten in
    u = 1 - y + y lam m, whose residual is increasing on [0, 1], and the
    root is bracketed there with Brent's method. The reparametrization
    stays well conditioned when y > 1 and lam is small, where m ~ 1/lam.
    """
    lam = float(lam)
    y = float(y)
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam!r}")
    if y < 0:
        raise DomainError(f"y must be nonnegative, got {y!r}")
    vals = np.asarray(model.eigenvalues, dtype=float)
    w = np.asarray(model.weights, dtype=float)
    lower = max(0.0, (y - 1.0) / (y * lam)) if y > 0 else 0.0

    m = 1.0 / (lam + float(np.dot(w, vals)))
    converged = False
    for _ in range(max_iter):
        m_new = (1.0 - MP_DAMPING) * m + MP_DAMPING * _mp_map(m, vals, w, y, lam)
        if not np.isfinite(m_new) or m_new < lower:
            break
        if abs(m_new - m) <= tol * max(1.0, abs(m_new)):
            m = m_new
            converged = abs(m - _mp_map(m, vals, w, y, lam)) < 1e-12 * max(1.0, m)
            break
        m = m_new

    if converged:
        for _ in range(2):
            # Newton polish: the damped step stops at ~tol/(1 - contraction)
            den = vals * (1.0 - y + y * lam * m) + lam
            slope = 1.0 + y * lam * float(np.sum(w * vals / den ** 2))
            m -= (m - float(np.sum(w / den))) / slope
        u = 1.0 - y + y * lam * m
    else:
        logger.debug("damped MP iteration stalled (y=%g, lam=%g); bracketing", y, lam)
        f_hi = _gamma_residual(1.0, vals, w, y, lam)
        if f_hi == 0.0:
            u = 1.0
        elif not f_hi > 0:
            raise NumericalError("Marcenko-Pastur residual does not change sign", f_hi)
        else:
            u = brentq(_gamma_residual, 0.0, 1.0, args=(vals, w, y, lam),
                       xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
        r = abs(_gamma_residual(u, vals, w, y, lam))
        if r > 1e-12:
            raise NumericalError("Marcenko-Pastur solve did not reach tolerance", r)
        m = float(np.sum(w / (vals * u + lam)))
    return m, _mp_derivative(u, m, vals, w, y, lam)


def mp_residual(model: SpectralModel, y: float, lam: float, m: float) -> float:
    return m - _mp_map(m, np.asarray(model.eigenvalues), np.asarray(model.weights), y, lam)


def mp_closed_form_sigma2(sigma2: float, y: float, lam: float) -> tuple[float, float]:
    """Closed-form m0(-lam) and m0'(-lam) when Sigma = sigma2 * I."""
    if not (sigma2 > 0 and y > 0 and lam > 0):
        raise DomainError("sigma2, y and lambda must all be positive")
    b = sigma2 - y * sigma2 + lam
    root = np.sqrt(b * b + 4.0 * y * lam * sigma2)
    # (root - b) cancels badly when b >> 0; use the conjugate form
    m0 = (root - b) / (2 * y * lam * sigma2) if b <= 0 else 2.0 / (root + b)
    m0p = (lam * (1 + y) + sigma2 * (1 - y) ** 2) / (2 * y * lam ** 2 * root) - (1 - y) / (2 * y * lam ** 2)
    return float(m0), float(m0p)


# ---------------------------------------------------------------------------
# Spectral functionals

def r_functionals(model: SpectralModel, y: float, lam: float,
                  mp: tuple[float, float] | None = None) -> tuple[float, float]:
    """Limits R1, R2 of tr B_n/p and tr B_n^2/p, B_n = Sigma^{1/2}(S_n + lam I)^{-1}Sigma^{1/2}."""
    m0, m0p = mp if mp is not None else solve_mp(model, y, lam)
    a = 1.0 - lam * m0
    g = 1.0 - y * a
    r1 = a / g
    r2 = a / g ** 3 - (lam * m0 - lam ** 2 * m0p) / g ** 4
    return r1, r2


def h_functionals(model: SpectralModel, t: float) -> tuple[float, float]:
    """Normalised quadratic forms of the standardized mean difference at shift t."""
    if t < 0:
        raise DomainError(f"t must be nonnegative, got {t!r}")
    if not model.delta > 0:
        raise DomainError("h-functionals need delta > 0")
    vals, d2 = np.asarray(model.eigenvalues), np.asarray(model.mean_proj_sq)
    d2n = d2 / model.delta ** 2
    h1 = float(np.sum(d2n / (vals + t)))
    h2 = float(np.sum(vals * d2n / (vals + t) ** 2))
    return h1, h2


@dataclass(frozen=True)
class TheoryPoint:
    """All limiting quantities at one (delta, y1, y2, lambda)."""

    delta: float
    y1: float
    y2: float
    lam: float
    m0: float
    m0_prime: float
    r1: float
    r2: float
    gamma: float
    epsilon: float
    h1_at: float
    h2_at: float
    big_h1: float
    big_h2: float

    @property
    def y(self) -> float:
        return combined_ratio(self.y1, self.y2)


def theory_point(model: SpectralModel, y1: float, y2: float, lam: float,
                 delta: float | None = None) -> TheoryPoint:
    y = combined_ratio(y1, y2)
    m0, m0p = solve_mp(model, y, lam)
    r1, r2 = r_functionals(model, y, lam, (m0, m0p))
    gamma = 1.0 - y * (1.0 - lam * m0)
    if not gamma > 0:
        raise NumericalError("gamma = 1 - y(1 - lam m0) must be positive", gamma)
    h1, h2 = h_functionals(model, lam / gamma)
    big_h1 = h1 / gamma
    big_h2 = ((1.0 + y * r1) ** 2 + y * r2) * h2
    eps = y * r2 / (1.0 + y * r1) ** 2
    return TheoryPoint(model.delta if delta is None else delta, y1, y2, lam,
                       m0, m0p, r1, r2, gamma, eps, h1, h2, big_h1, big_h2)


def big_h_functionals(model: SpectralModel, y: float, lam: float) -> tuple[float, float]:
    """H1(lam), H2(lam) for the combined ratio y."""
    # y1 = y2 = 2y gives combined ratio y
    pt = theory_point(model, 2 * y, 2 * y, lam)
    return pt.big_h1, pt.big_h2


# ---------------------------------------------------------------------------
# Limiting rates

@dataclass(frozen=True)
class RatePair:
    class1: float
    class2: float

    @property
    def total(self) -> float:
        return 0.5 * (self.class1 + self.class2)


def bayes_rate(delta: float) -> float:
    return float(ndtr(-delta / 2.0))


def rate_thm1(delta: float, y1: float, y2: float) -> float:
    """Known Sigma, estimated means."""
    if not delta > 0:
        raise DomainError("delta must be positive")
    if y1 < 0 or y2 < 0:
        raise DomainError("y1, y2 must be nonnegative")
    d2 = delta ** 2
    s = 2.0 * np.sqrt(d2 + y1 + y2)
    return float(0.5 * ndtr(-(d2 + y2 - y1) / s) + 0.5 * ndtr(-(d2 + y1 - y2) / s))


def rate_thm2(delta: float, y: float) -> float:
    """Known means, estimated Sigma."""
    if not 0 <= y < 1:
        raise DomainError(f"requires 0 <= y < 1, got {y!r}")
    return float(ndtr(-0.5 * delta * np.sqrt(1.0 - y)))


def rate_thm3(delta: float, y1: float, y2: float) -> RatePair:
    """Plug-in LDA; class-wise limits and their average via ``.total``."""
    y = combined_ratio(y1, y2)
    if not y < 1:
        raise DomainError(f"LDA limit requires y = y1 y2/(y1+y2) < 1, got {y!r}")
    d2 = delta ** 2
    s = 2.0 * np.sqrt(d2 + y1 + y2)
    k = np.sqrt(1.0 - y)
    # class 1 (j = 1): numerator delta^2 - (y1 - y2)
    return RatePair(float(ndtr(-(d2 - (y1 - y2)) / s * k)),
                    float(ndtr(-(d2 + (y1 - y2)) / s * k)))


def rate_corrected_lda(delta: float, y1: float, y2: float) -> float:
    y = combined_ratio(y1, y2)
    if not y < 1:
        raise DomainError(f"LDA limit requires y < 1, got {y!r}")
    d2 = delta ** 2
    return float(ndtr(-d2 * np.sqrt(1.0 - y) / (2.0 * np.sqrt(d2 + y1 + y2))))


def _check_model_delta(model: SpectralModel, delta: float | None) -> float:
    if delta is None:
        return model.delta
    if abs(delta - model.delta) > 1e-8 * max(delta, 1.0):
        raise DomainError(f"delta={delta!r} inconsistent with model delta={model.delta!r}")
    return float(delta)


def rate_thm4(model: SpectralModel, delta: float | None, y1: float, y2: float,
              lam: float) -> RatePair:
    """Regularized LDA with ridge ``lam``."""
    delta = _check_model_delta(model, delta)
    pt = theory_point(model, y1, y2, lam, delta)
    return _rlda_pair(pt)


def _rlda_pair(pt: TheoryPoint) -> RatePair:
    d2 = pt.delta ** 2
    s = 2.0 * np.sqrt(pt.big_h2 * d2 + (pt.y1 + pt.y2) * pt.r2)
    shift = (pt.y1 - pt.y2) * pt.r1
    return RatePair(float(ndtr(-(pt.big_h1 * d2 - shift) / s)),
                    float(ndtr(-(pt.big_h1 * d2 + shift) / s)))


def _corrected_rlda(pt: TheoryPoint) -> float:
    d2 = pt.delta ** 2
    return float(ndtr(-pt.big_h1 * d2 / (2.0 * np.sqrt(pt.big_h2 * d2 + (pt.y1 + pt.y2) * pt.r2))))


def rate_corrected_rlda(model: SpectralModel, delta: float | None, y1: float, y2: float,
                        lam: float) -> float:
    delta = _check_model_delta(model, delta)
    return _corrected_rlda(theory_point(model, y1, y2, lam, delta))


ISO2_RTOL = 1e-6


def iso2_deviation(model: SpectralModel) -> float:
    """Max relative deviation of d_i^2 / (lambda_i w_i) from its mean."""
    ratio = np.asarray(model.mean_proj_sq) / (np.asarray(model.eigenvalues) * np.asarray(model.weights))
    c = float(np.mean(ratio))
    return float(np.max(np.abs(ratio / c - 1.0))) if c > 0 else float("inf")


def rate_prop2(delta: float | None, y1: float, y2: float, lam: float,
               model: SpectralModel) -> RatePair:
    """Simplified regularized rate, valid when the mean spreads like sqrt(lambda_i)."""
    dev = iso2_deviation(model)
    if dev > ISO2_RTOL:
        raise DomainError(f"model mean structure is not isotropic after standardization "
                          f"(max relative deviation {dev:.3g} > {ISO2_RTOL})")
    delta = _check_model_delta(model, delta)
    y = combined_ratio(y1, y2)
    r1, r2 = r_functionals(model, y, lam)
    d2 = delta ** 2
    s = 2.0 * np.sqrt(d2 + y1 + y2)
    k = r1 / np.sqrt(r2)
    return RatePair(float(ndtr(-(d2 - (y1 - y2)) / s * k)),
                    float(ndtr(-(d2 + (y1 - y2)) / s * k)))


def rate_naive_bayes(spec: ProblemSpec, n: int) -> float:
    """Mean-difference rule with n1 = n2 = n/2 training samples."""
    if n <= 0 or n % 2:
        raise DomainError(f"n must be a positive even integer, got {n!r}")
    d = spec.mean_diff
    tr_s2 = float(np.sum(spec.eigenvalues ** 2))
    return float(ndtr(-(d @ d) / (2.0 * np.sqrt(d @ spec.sigma @ d + 4.0 / n * tr_s2))))


def sigma2_corrected_rate(sigma2: float, delta: float, y1: float, y2: float, lam: float) -> float:
    """Closed-form corrected-RLDA limit for Sigma = sigma2 * I."""
    y = combined_ratio(y1, y2)
    b = 1.0 + y + lam / sigma2
    q = np.sqrt(b * b - 4.0 * y)
    d2 = delta ** 2
    return float(ndtr(-d2 / (2.0 * np.sqrt(d2 + y1 + y2)) * np.sqrt(2.0 * q / (q + b))))
