"""Acceptance criteria 1-10, one PASS/FAIL line each.

Run alone with ``pytest tests/test_acceptance.py -v``; the lines are also
collected into an "acceptance criteria" section of the pytest summary.
Experiments reuse the JSON files in ``configs/`` so the checked numbers
are the ones the CLI would produce.
"""

import json
from pathlib import Path

import numpy as np
import pytest

from dimlda import theory as T
from dimlda import verify
from dimlda.classifiers import conditional_error, fit_bayes
from dimlda.cli import expand_scenarios
from dimlda.simulate import (
    ClassifierSpec,
    CovarianceGenerator,
    ExperimentConfig,
    MeanGenerator,
    build_spec,
    experiment_from_config,
    gen_covariance,
    gen_means,
    run_experiment,
    run_heatmap,
    target_delta,
)
from dimlda.types import SpectralModel, make_spectral_model

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
DELTA = target_delta(0.1)


def _scenarios(name):
    return [experiment_from_config(s) for s in expand_scenarios(json.loads((CONFIGS / name).read_text()))]


def test_c01_bayes_rate_anchor(report):
    worst = 0.0
    covs = [CovarianceGenerator.identity(50), CovarianceGenerator.identity(40, 2.5),
            CovarianceGenerator.ar1(60, 0.5), CovarianceGenerator.ar1(60, -0.9),
            CovarianceGenerator("spectral", 30, eigenvalues=tuple(np.linspace(0.2, 5, 30)))]
    kinds = ["first_coordinate", "sparse_random", "dense_random", "eigenvector", "isotropic",
             "sparse_direction"]
    for cov in covs:
        for kind in kinds:
            for seed in range(3):
                spec = build_spec(cov, MeanGenerator(kind, k=3, seed=seed))
                worst = max(worst, abs(conditional_error(fit_bayes(spec), spec).err_total - 0.1))
    ok = worst <= 1e-4
    report(1, ok, f"max |Bayes error - 0.1| = {worst:.2e} over 90 scenarios (tol 1e-4)")
    assert ok


def test_c02_mp_solver(report):
    closed, residual = verify.check_mp_closed_form(1e-10)
    deriv = verify.check_mp_derivative(1e-6)
    ok = closed.passed and residual.passed and deriv.passed
    report(2, ok, f"27-point closed-form gap {closed.value:.1e} (tol 1e-10); "
                  f"m0' vs finite difference {deriv.value:.1e} relative (tol 1e-6)")
    assert ok


def test_c03_wishart_oracle(report):
    checks = [verify.check_wishart(m, p, draws=20_000, n_se=4.0) for m, p in ((30, 5), (60, 20))]
    ok = all(c.passed for c in checks)
    report(3, ok, "; ".join(f"{c.name}: {c.value:.2f} SE" for c in checks) + " (tol 4 SE)")
    assert ok


def test_c04_lda_rate_at_scale(report):
    # LDA is affine equivariant, so Sigma = I loses no generality for this check
    cfg = ExperimentConfig(CovarianceGenerator.identity(1000), MeanGenerator(), 1000, 1000,
                           (ClassifierSpec("lda"),), replicates=50, seed=20240100)
    res = run_experiment(cfg)
    th = T.rate_thm3(res.delta, 1.0, 1.0).total
    gap = abs(res.mean("LDA") - th)
    ok = gap <= 0.01 and round(th, 4) == 0.2138
    report(4, ok, f"mean LDA error {res.mean('LDA'):.4f} (sd {res.sd('LDA'):.4f}) vs limit {th:.4f}, "
                  f"gap {gap:.4f} (tol 0.01)")
    assert ok


def _worst_rlda_gap(results):
    worst, where = 0.0, ""
    for res in results:
        for row in res.summary_rows():
            if row["theory"] == "":
                raise AssertionError(f"no limiting rate for {row['classifier']} in {res.config.scenario_id}")
            if row["abs_gap"] > worst:
                worst, where = row["abs_gap"], f"{res.config.scenario_id} lambda={row['lambda']:g}"
    return worst, where


def test_c05_identity_covariance_curves(report):
    results = [run_experiment(c) for c in _scenarios("identity_lambda_sweep.json")]
    assert [r.config.p for r in results] == [100, 200, 400]
    assert all(len(r.keys) == 20 and r.config.replicates == 100 for r in results)
    worst, where = _worst_rlda_gap(results)
    ok = worst <= 0.015
    report(5, ok, f"max |mean RLDA error - limit| = {worst:.4f} at {where}, 3 x 20 points (tol 0.015)")
    assert ok


def test_c06_eigenvector_means(report):
    cov = gen_covariance(CovarianceGenerator.ar1(100, 0.5))
    norms = [round(float(np.linalg.norm(gen_means(MeanGenerator("eigenvector", k=k), cov)[0])), 3)
             for k in (1, 50, 100)]
    results = [run_experiment(c) for c in _scenarios("ar1_eigenvector_sweep.json")]
    worst, where = _worst_rlda_gap(results)
    ok = norms == [4.435, 2.005, 1.480] and worst <= 0.015
    report(6, ok, f"mean-difference norms {norms} (want [4.435, 2.005, 1.48]); "
                  f"max theory gap {worst:.4f} at {where} (tol 0.015)")
    assert ok


def test_c07_bias_correction_dominance(report):
    base = make_spectral_model(build_spec(CovarianceGenerator.ar1(100, 0.5),
                                          MeanGenerator("isotropic", case="iso2")))
    viol = 0
    eq_gap = 0.0
    min_strict = np.inf
    count = 0
    for d in np.linspace(1.0, 4.0, 5):
        model = SpectralModel.from_atoms(base.eigenvalues, base.weights,
                                         np.asarray(base.mean_proj_sq) * (d / base.delta) ** 2)
        for y1 in (0.1, 0.5, 1.0, 2.0, 4.0):
            for y2 in (0.1, 0.5, 1.0, 2.0, 4.0):
                for lam in np.geomspace(0.01, 100, 8):
                    count += 1
                    c = T.rate_corrected_rlda(model, d, y1, y2, lam)
                    u = T.rate_thm4(model, d, y1, y2, lam).total
                    viol += c > u + 1e-12
                    if y1 == y2:
                        eq_gap = max(eq_gap, abs(c - u))
                    else:
                        min_strict = min(min_strict, u - c)
    analytic_ok = count == 1000 and viol == 0 and eq_gap <= 1e-12 and min_strict > 1e-12

    worst_excess, at = -np.inf, None
    for cfg in _scenarios("unequal_sizes.json"):
        if cfg.p != 200:
            continue
        keep = tuple(c for c in cfg.classifiers if c.method in ("rlda", "corrected_rlda") and c.lam == 0.5)
        res = run_experiment(ExperimentConfig(**{**cfg.__dict__, "classifiers": keep}))
        excess = res.mean("C-RLDA@0.5") - res.mean("RLDA@0.5")
        if excess > worst_excess:
            worst_excess, at = excess, cfg.n1
    empirical_ok = worst_excess <= 0.005
    ok = analytic_ok and empirical_ok
    report(7, ok, f"{count} grid points: {viol} violations, equal-size gap {eq_gap:.1e}, "
                  f"smallest unequal-size gain {min_strict:.1e}; p=200 lambda=0.5 worst "
                  f"C-RLDA - RLDA = {worst_excess:+.4f} at n1={at} (tol 0.005)")
    assert ok


def test_c08_isotropic_simplification(report):
    chk = verify.check_prop2(1e-8)
    model = make_spectral_model(build_spec(CovarianceGenerator.ar1(100, 0.5),
                                           MeanGenerator("isotropic", case="iso2")))
    worst = 0.0
    for y1, y2 in ((1.0, 1.0), (0.5, 2.0), (2.0, 4.0)):
        for lam in np.geomspace(0.01, 100, 40):
            a = T.rate_thm4(model, None, y1, y2, lam)
            b = T.rate_prop2(None, y1, y2, lam, model)
            worst = max(worst, abs(a.class1 - b.class1), abs(a.class2 - b.class2))
    ok = chk.passed and worst <= 1e-8
    report(8, ok, f"max class-wise gap {max(worst, chk.value):.1e} on discrete and AR(1) iso2 models (tol 1e-8)")
    assert ok


def test_c09_lambda_selection(report):
    lines, ok = [], True
    for cfg in _scenarios("identity_lambda_sweep.json"):
        grid = tuple(c.lam for c in cfg.classifiers)
        run = ExperimentConfig(**{**cfg.__dict__, "replicates": 50, "select_grid": grid, "theory": False,
                                  "classifiers": cfg.classifiers + (ClassifierSpec("rlda_select"),
                                                                    ClassifierSpec("rlda_cv"))})
        res = run_experiment(run)
        per_grid = np.column_stack([res.totals(c.key) for c in cfg.classifiers])
        best = float(per_grid.min(axis=1).mean())
        sel = res.mean("RLDA-select")
        cv = res.mean("RLDA-CV")
        ok &= sel - best <= 0.01 and abs(sel - cv) <= 0.02
        lines.append(f"p={cfg.p}: select {sel:.4f} vs grid-best {best:.4f}, CV {cv:.4f}")
    report(9, ok, "; ".join(lines) + " (tol 0.01 / 0.02)")
    assert ok


def test_c10_heatmap_trends(report):
    cfg = json.loads((CONFIGS / "heatmap_first_coordinate.json").read_text())
    base = experiment_from_config({**cfg["base"], "covariance": {"kind": "identity", "p": 2},
                                   "theory": False})
    hm = run_heatmap(base, cfg["p_values"], cfg["rho_values"], replicates=cfg["replicates"])
    # LDA needs p < n - 2; larger p columns are skipped replicates (NaN)
    finite = ~np.all(np.isnan(hm.means["LDA"]), axis=0)
    lda = hm.means["LDA"][:, finite]
    lda_range = np.full(finite.size, np.nan)
    lda_range[finite] = lda.max(axis=0) - lda.min(axis=0)
    rho_nb = hm.trend_spearman("NB")
    ok = bool(np.all(lda_range[finite] < 0.02)) and bool(np.all(rho_nb > 0.9))
    report(10, ok, f"LDA range across rho max {lda_range[finite].max():.4f} over {finite.sum()} p values "
                   f"(tol 0.02); NB Spearman(|rho|, error) min {rho_nb.min():.3f} (tol > 0.9)")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
