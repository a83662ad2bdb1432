"""Fast self-checks against independent oracles.

Used by ``dimlda verify`` and by the test-suite. Each check returns a
:class:`Check` carrying the measured discrepancy, so a report can show
how close a passing check was.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import theory
from .types import SpectralModel

# Added to every solve_mp result inside verify when set; lets the test-suite
# confirm that a corrupted m0 is actually caught.
PERTURB_ENV = "DIMLDA_VERIFY_PERTURB_M0"


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    tol: float
    detail: str = ""


def wishart_inverse_moments(m: int, p: int) -> tuple[float, float, float]:
    """E(e'W^-1 e), E(e'W^-2 e), E((e'W^-1 e)^2) for W ~ Wishart_p(m, I), unit e."""
    if m - p - 3 <= 0:
        raise ValueError("moments need m > p + 3")
    a = 1.0 / (m - p - 1)
    b = (m - 1) / ((m - p) * (m - p - 1) * (m - p - 3))
    c = 1.0 / ((m - p - 1) * (m - p - 3))
    return a, b, c


def wishart_monte_carlo(m: int, p: int, draws: int, seed: int = 0):
    """Monte Carlo means and standard errors of the three moments above (e = e_1)."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(m, p)))
    e = np.zeros(p)
    e[0] = 1.0
    q1 = np.empty(draws)
    q2 = np.empty(draws)
    chunk = 2000
    for start in range(0, draws, chunk):
        k = min(chunk, draws - start)
        Z = rng.standard_normal((k, m, p))
        W = np.einsum("kmi,kmj->kij", Z, Z)
        v = np.linalg.solve(W, np.broadcast_to(e, (k, p))[..., None])[..., 0]
        q1[start:start + k] = v[:, 0]
        q2[start:start + k] = np.einsum("ki,ki->k", v, v)
    samples = (q1, q2, q1 ** 2)
    means = np.array([s.mean() for s in samples])
    ses = np.array([s.std(ddof=1) / np.sqrt(draws) for s in samples])
    return means, ses


def _perturbation() -> float:
    return float(os.environ.get(PERTURB_ENV, "0") or 0)


MP_GRID = [(s2, y, lam) for s2 in (0.5, 1.0, 2.0) for y in (0.25, 1.0, 4.0) for lam in (0.1, 1.0, 10.0)]


def check_mp_closed_form(tol: float = 1e-10) -> list[Check]:
    eps = _perturbation()
    worst_gap = worst_res = 0.0
    for s2, y, lam in MP_GRID:
        model = SpectralModel.point_mass(s2, 1.0)
        m, _ = theory.solve_mp(model, y, lam)
        m += eps
        m_ref, _ = theory.mp_closed_form_sigma2(s2, y, lam)
        worst_gap = max(worst_gap, abs(m - m_ref) / abs(m_ref))
        worst_res = max(worst_res, abs(theory.mp_residual(model, y, lam, m)))
    return [Check("MP fixed point vs closed form (27 points)", worst_gap <= tol, worst_gap, tol,
                  "max relative gap"),
            Check("MP residual at solution", worst_res <= tol, worst_res, tol, "max |residual|")]


def check_mp_derivative(tol: float = 1e-6) -> Check:
    model = SpectralModel.from_atoms([3.0, 1.0, 0.4], [0.2, 0.5, 0.3], [0.3, 1.0, 0.2])
    worst = 0.0
    for y in (0.3, 1.5):
        for lam in (0.2, 2.0):
            _, mp = theory.solve_mp(model, y, lam)
            h = 1e-5 * lam
            fd = (theory.solve_mp(model, y, lam + h)[0] - theory.solve_mp(model, y, lam - h)[0]) / (2 * h)
            # m0'(-lam) = d m0 / dz = -d m0(-lam) / d lam
            worst = max(worst, abs(mp + fd) / abs(mp))
    return Check("m0' implicit vs central difference", worst <= tol, worst, tol, "max relative gap")


def check_wishart(m: int = 30, p: int = 5, draws: int = 20_000, seed: int = 0,
                  n_se: float = 4.0) -> Check:
    means, ses = wishart_monte_carlo(m, p, draws, seed)
    exact = np.array(wishart_inverse_moments(m, p))
    z = float(np.max(np.abs(means - exact) / ses))
    return Check(f"Wishart inverse moments (m={m}, p={p})", z <= n_se, z, n_se,
                 "max |MC - exact| in standard errors")


def iso2_model(vals, weights, delta: float) -> SpectralModel:
    vals = np.asarray(vals, float)
    w = np.asarray(weights, float)
    d2 = vals * w
    d2 *= delta ** 2 / np.sum(d2 / vals)
    return SpectralModel.from_atoms(vals, w, d2)


def check_prop2(tol: float = 1e-8) -> Check:
    delta = 2.5631031310892007
    model = iso2_model([4.0, 1.5, 0.5, 0.2], [0.1, 0.4, 0.3, 0.2], delta)
    worst = 0.0
    for y1, y2 in ((0.5, 0.5), (0.4, 1.2), (2.0, 1.0)):
        for lam in np.geomspace(0.05, 20, 9):
            a = theory.rate_thm4(model, delta, y1, y2, lam)
            b = theory.rate_prop2(delta, y1, y2, lam, model)
            worst = max(worst, abs(a.class1 - b.class1), abs(a.class2 - b.class2))
    return Check("RLDA rate equals simplified isotropic rate", worst <= tol, worst, tol,
                 "max absolute gap")


def check_lambda_zero(tol: float = 2e-3) -> Check:
    delta = 2.5631031310892007
    model = SpectralModel.from_atoms([2.0, 1.0, 0.5], [0.3, 0.4, 0.3], [0.5, 1.0, 0.4])
    model = SpectralModel.from_atoms(model.eigenvalues, model.weights,
                                     np.asarray(model.mean_proj_sq) * (delta / model.delta) ** 2)
    worst = 0.0
    for y1, y2 in ((0.5, 0.5), (0.2, 0.6), (0.8, 0.9)):
        a = theory.rate_thm4(model, delta, y1, y2, 1e-8).total
        b = theory.rate_thm3(delta, y1, y2).total
        worst = max(worst, abs(a - b))
    return Check("RLDA rate as lambda -> 0 matches LDA rate", worst < tol, worst, tol,
                 "max absolute gap at lambda = 1e-8")


def run_all(wishart_draws: int = 20_000) -> list[Check]:
    checks = check_mp_closed_form()
    checks.append(check_mp_derivative())
    checks.append(check_wishart(30, 5, wishart_draws))
    checks.append(check_prop2())
    checks.append(check_lambda_zero())
    return checks
