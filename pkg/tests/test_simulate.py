import math

import numpy as np
import pytest
from scipy import stats

from dimlda import theory as T
from dimlda.errors import ConfigError
from dimlda.simulate import (
    ClassifierSpec,
    CovarianceGenerator,
    ExperimentConfig,
    MeanGenerator,
    ar1_matrix,
    build_spec,
    experiment_from_config,
    gen_covariance,
    gen_means,
    run_experiment,
    run_heatmap,
    run_replicate,
    sample_dataset,
    szego_eigenvalues,
    target_delta,
    write_csv,
)

DELTA = target_delta(0.1)


def test_target_delta():
    assert DELTA == pytest.approx(2 * stats.norm.ppf(0.9), rel=1e-14)
    assert T.bayes_rate(DELTA) == pytest.approx(0.1, abs=1e-15)


def test_ar1_structure():
    assert np.array_equal(ar1_matrix(5, 0.0), np.eye(5))
    A = ar1_matrix(6, 0.3)
    assert A[0, 5] == pytest.approx(0.3 ** 5) and np.allclose(A, A.T)
    pos = gen_covariance(CovarianceGenerator.ar1(50, 0.6))[0]
    neg = gen_covariance(CovarianceGenerator.ar1(50, -0.6))[0]
    # AR1 with -rho is similar to +rho via diag(+-1), so the spectra agree
    np.testing.assert_allclose(np.sort(pos), np.sort(neg), rtol=1e-10)
    assert np.all(np.diff(pos) <= 0)


def test_szego_approximation():
    exact = np.sort(np.linalg.eigvalsh(ar1_matrix(100, 0.5)))[::-1]
    approx = szego_eigenvalues(0.5, 100)
    assert np.max(np.abs(exact - approx)) < 0.021  # measured 0.0209
    assert approx[49] == pytest.approx(0.6076, abs=1e-4)
    assert approx[0] < 3 and approx[-1] > 1 / 3


@pytest.mark.parametrize("kind", ["first_coordinate", "sparse_random", "dense_random", "eigenvector",
                                  "isotropic", "sparse_direction"])
def test_gen_means_hits_target(kind):
    cov = gen_covariance(CovarianceGenerator.ar1(60, 0.4))
    mu1, mu2 = gen_means(MeanGenerator(kind, k=7, seed=3), cov)
    d = mu1 - mu2
    assert math.sqrt(d @ np.linalg.solve(cov[2], d)) == pytest.approx(DELTA, rel=1e-10)


def test_eigenvector_mean_norms():
    cov = gen_covariance(CovarianceGenerator.ar1(100, 0.5))
    norms = [np.linalg.norm(gen_means(MeanGenerator("eigenvector", k=k), cov)[0]) for k in (1, 50, 100)]
    assert [round(v, 3) for v in norms] == [4.435, 2.005, 1.480]


def test_sparse_direction_support():
    cov = gen_covariance(CovarianceGenerator.ar1(40, 0.5))
    mu1, _ = gen_means(MeanGenerator("sparse_direction", s=5, seed=1), cov)
    beta = np.linalg.solve(cov[2], mu1)
    assert np.count_nonzero(np.abs(beta) > 1e-9) == 5 and np.all(np.abs(beta[5:]) < 1e-9)


def test_iso2_with_identity_is_uniform():
    cov = gen_covariance(CovarianceGenerator.identity(16))
    mu1, _ = gen_means(MeanGenerator("isotropic", case="iso2"), cov)
    assert np.allclose(np.abs(mu1), DELTA / 4)


def test_sample_moments():
    # oracle: the known population moments with CLT-scale tolerances
    spec = build_spec(CovarianceGenerator.ar1(5, 0.5), MeanGenerator("dense_random"))
    data = sample_dataset(spec, 40_000, 40_000, 0)
    se = np.sqrt(np.diag(spec.sigma) / 40_000)
    assert np.all(np.abs(data.x1.mean(0) - spec.mu1) < 5 * se)
    assert np.all(np.abs(data.x2.mean(0) - spec.mu2) < 5 * se)
    emp = np.cov(data.x2, rowvar=False)
    assert np.max(np.abs(emp - spec.sigma)) < 5 * math.sqrt(2 / 40_000) * 2


def test_sampling_deterministic():
    spec = build_spec(CovarianceGenerator.ar1(8, 0.2), MeanGenerator())
    a = sample_dataset(spec, 5, 7, 42)
    b = sample_dataset(spec, 5, 7, 42)
    c = sample_dataset(spec, 5, 7, 43)
    assert np.array_equal(a.x1, b.x1) and np.array_equal(a.x2, b.x2)
    assert not np.array_equal(a.x1, c.x1)


def _config(**kw):
    base = dict(covariance=CovarianceGenerator.ar1(30, 0.5), means=MeanGenerator(), n1=20, n2=25,
                classifiers=(ClassifierSpec("lda"), ClassifierSpec("rlda", 0.5),
                             ClassifierSpec("corrected_rlda", 0.5), ClassifierSpec("bayes")),
                replicates=6, seed=7)
    base.update(kw)
    return ExperimentConfig(**base)


def test_replicate_reproducible_in_isolation():
    cfg = _config()
    res = run_experiment(cfg)
    spec = build_spec(cfg.covariance, cfg.means)
    again = run_replicate(cfg, spec, 4)
    for key, (e1, e2, _, _) in zip(res.keys, again):
        assert tuple(res.errors[key][4]) == (e1, e2)


def test_bayes_rule_error_is_exact():
    res = run_experiment(_config(replicates=2))
    assert np.allclose(res.totals("Bayes"), 0.1, atol=1e-14)


def test_skip_recorded_when_lda_singular():
    res = run_experiment(_config(covariance=CovarianceGenerator.ar1(60, 0.5), replicates=2))
    assert "LDA" in res.skipped and np.all(np.isnan(res.totals("LDA")))
    assert not np.any(np.isnan(res.totals("RLDA@0.5")))
    assert res.theory["LDA"] is None


def test_single_replicate_and_fsum_mean():
    res = run_experiment(_config(replicates=1))
    assert math.isnan(res.sd("RLDA@0.5"))
    res = run_experiment(_config(replicates=5))
    t = res.totals("RLDA@0.5")
    assert res.mean("RLDA@0.5") == math.fsum(t) / 5
    assert res.sd("RLDA@0.5") == pytest.approx(np.std(t, ddof=1))


def test_summary_has_theory_for_every_rule():
    res = run_experiment(_config(replicates=2))
    rows = {r["classifier"]: r for r in res.summary_rows()}
    assert rows["LDA"]["theory"] == pytest.approx(T.rate_thm3(res.delta, 1.5, 1.2).total)
    assert rows["C-RLDA"]["theory"] != ""
    assert rows["Bayes"]["theory"] == pytest.approx(0.1)


def test_test_set_mode_close_to_conditional():
    cond = run_experiment(_config(replicates=3))
    emp = run_experiment(_config(replicates=3, test_size=20_000))
    d = np.abs(cond.totals("RLDA@0.5") - emp.totals("RLDA@0.5"))
    assert np.all(d < 0.015)


def test_parallel_matches_serial():
    cfg = _config(replicates=4)
    a = run_experiment(cfg, jobs=1)
    b = run_experiment(cfg, jobs=2)
    for k in a.keys:
        np.testing.assert_array_equal(a.errors[k], b.errors[k])


def test_select_and_cv_record_lambda():
    cfg = _config(classifiers=(ClassifierSpec("rlda_select"), ClassifierSpec("rlda_cv")), replicates=2,
                  select_grid=tuple(np.geomspace(0.05, 5, 8)))
    res = run_experiment(cfg)
    for k in res.keys:
        assert np.all(np.isin(res.chosen_lambda[k], cfg.select_grid))


def test_config_validation():
    good = {"covariance": {"kind": "ar1", "p": 10, "rho": 0.3}, "means": {"kind": "first_coordinate"},
            "n1": 10, "n2": 10, "classifiers": [{"method": "rlda", "lambda": [0.1, 1]},
                                                {"method": "rlda", "lambda": "select"}]}
    cfg = experiment_from_config(good)
    assert [c.key for c in cfg.classifiers] == ["RLDA@0.1", "RLDA@1", "RLDA-select"]
    with pytest.raises(ConfigError, match="unknown key"):
        experiment_from_config({**good, "replicate": 3})
    with pytest.raises(ConfigError, match="missing field 'n2'"):
        experiment_from_config({k: v for k, v in good.items() if k != "n2"})
    with pytest.raises(ConfigError):
        experiment_from_config({**good, "means": {"kind": "nope"}})


def test_heatmap_shape_and_lda_invariance():
    base = _config(covariance=CovarianceGenerator.ar1(10, 0.0), classifiers=(ClassifierSpec("lda"),
                   ClassifierSpec("naive_bayes")), n1=30, n2=30)
    hm = run_heatmap(base, (10, 20), (-0.5, 0.0, 0.5), replicates=3)
    assert hm.means["LDA"].shape == (3, 2)
    # LDA is affine equivariant: with shared seeds its errors do not depend on rho
    assert np.ptp(hm.means["LDA"], axis=0).max() < 0.03
    assert len(hm.rows()) == 2 * 3 * 2


def test_write_csv(tmp_path):
    path = tmp_path / "o.csv"
    write_csv(path, [{"a": 0.1, "b": "x"}, {"a": float("nan"), "b": "y"}], ["seed=1"])
    assert path.read_text() == "# seed=1\na,b\n0.1,x\nnan,y\n"
