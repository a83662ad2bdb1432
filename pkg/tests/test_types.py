import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import ortho_group

from dimlda.errors import ConfigError, ValidationError
from dimlda.simulate import ar1_matrix
from dimlda.types import (
    FittedLinearClassifier,
    LabeledDataset,
    Method,
    ProblemSpec,
    SpectralModel,
    dumps_config,
    load_json,
    make_spectral_model,
    read_feature_csv,
    spec_from_config,
    validate,
)


def test_spectral_model_identity_merges_to_one_atom():
    spec = ProblemSpec.from_dense([2.56, 0, 0], [0, 0, 0], np.eye(3))
    model = make_spectral_model(spec)
    assert model.eigenvalues.tolist() == [1.0]
    assert model.weights.tolist() == [1.0]
    assert model.mean_proj_sq[0] == pytest.approx(6.5536, rel=1e-14)
    assert model.delta ** 2 == pytest.approx(6.5536, rel=1e-14)


def test_spectral_model_zero_separation():
    spec = ProblemSpec.from_dense([1.0], [1.0], [[2.0]])
    model = make_spectral_model(spec)
    assert (model.eigenvalues[0], model.weights[0], model.mean_proj_sq[0], model.delta) == (2.0, 1.0, 0.0, 0.0)


def test_ar1_extreme_atoms_match_exact_eigensolve():
    # oracle: numpy's LAPACK eigvalsh on the explicit Toeplitz matrix
    sigma = ar1_matrix(100, 0.5)
    exact = np.linalg.eigvalsh(sigma)
    model = make_spectral_model(ProblemSpec.from_dense(np.zeros(100), np.zeros(100), sigma))
    assert model.eigenvalues.max() == pytest.approx(exact[-1], rel=1e-10)
    assert model.eigenvalues.min() == pytest.approx(exact[0], rel=1e-10)
    # values to 4 decimals, within the (1 + rho)/(1 - rho) and (1 - rho)/(1 + rho) limits
    assert round(model.eigenvalues.max(), 4) == 2.9944
    assert round(model.eigenvalues.min(), 4) == 0.3334
    assert model.eigenvalues.max() < 3 and model.eigenvalues.min() > 1 / 3


def test_validate_messages():
    sigma = np.diag([1.0, -0.1])
    with pytest.raises(ValidationError, match="sigma not positive definite"):
        ProblemSpec.from_dense([1, 0], [0, 0], sigma)
    bad = SpectralModel.from_atoms([1.0, 2.0], [0.5, 0.47], [0.1, 0.2], check=False)
    with pytest.raises(ValidationError, match="weights must sum to 1"):
        validate(bad)
    validate(ProblemSpec.from_dense([1, 0], [0, 0], np.eye(2)))
    with pytest.raises(ValidationError, match="sigma not symmetric"):
        ProblemSpec.from_dense([1, 0], [0, 0], [[1.0, 0.2], [0.1, 1.0]])


def test_validation_error_names_invariant():
    try:
        validate(LabeledDataset(np.zeros((1, 3)), np.zeros((4, 3))))
    except ValidationError as exc:
        assert exc.invariant == "each class needs at least 2 samples"
    else:
        pytest.fail("expected ValidationError")


def test_delta_consistency_is_checked():
    spec = ProblemSpec.from_dense([1, 2], [0, 0], [[2.0, 0.5], [0.5, 1.0]])
    forged = ProblemSpec(spec.mu1, spec.mu2, spec.sigma, spec.eigenvalues, spec.eigenvectors, spec.delta * 1.01)
    with pytest.raises(ValidationError, match="delta inconsistent"):
        validate(forged)


def test_spec_is_immutable():
    spec = ProblemSpec.from_dense([1, 0], [0, 0], np.eye(2))
    with pytest.raises(ValueError):
        spec.mu1[0] = 5.0
    with pytest.raises(AttributeError):
        spec.delta = 3.0


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 8), st.integers(0, 10_000))
def test_round_trip_from_spectral(p, seed):
    rng = np.random.default_rng(seed)
    vals = rng.uniform(0.2, 5.0, p)
    vecs = ortho_group.rvs(p, random_state=seed)
    mu1 = rng.standard_normal(p)
    spec = ProblemSpec.from_spectral(mu1, np.zeros(p), vals, vecs)
    model = make_spectral_model(spec, merge=False)
    np.testing.assert_allclose(np.sort(model.eigenvalues), np.sort(vals), rtol=1e-8)
    assert np.sum(model.mean_proj_sq / model.eigenvalues) == pytest.approx(spec.delta ** 2, rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 8), st.integers(0, 10_000))
def test_rotation_invariance(p, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((p, p))
    sigma = A @ A.T + 0.5 * np.eye(p)
    mu1, mu2 = rng.standard_normal(p), rng.standard_normal(p)
    Q = ortho_group.rvs(p, random_state=seed + 1)
    a = make_spectral_model(ProblemSpec.from_dense(mu1, mu2, sigma), merge=False)
    rotated = Q @ sigma @ Q.T
    b = make_spectral_model(ProblemSpec.from_dense(Q @ mu1, Q @ mu2, 0.5 * (rotated + rotated.T)), merge=False)
    np.testing.assert_allclose(a.eigenvalues, b.eigenvalues, rtol=1e-8)
    assert a.delta == pytest.approx(b.delta, rel=1e-8)
    np.testing.assert_allclose(a.mean_proj_sq, b.mean_proj_sq, rtol=1e-6, atol=1e-8)


def test_dataset_csv_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    data = LabeledDataset(rng.standard_normal((4, 3)), rng.standard_normal((5, 3)))
    path = tmp_path / "d.csv"
    data.to_csv(path)
    text = path.read_bytes()
    assert b"\r\n" not in text and text.startswith(b"x1,x2,x3,label\n")
    back = LabeledDataset.from_csv(path)
    np.testing.assert_array_equal(back.x1, data.x1)
    np.testing.assert_array_equal(back.x2, data.x2)


def test_csv_header_is_optional(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("1.5,2\n3,4\n")
    np.testing.assert_array_equal(read_feature_csv(path), [[1.5, 2], [3, 4]])


def test_bad_labels_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,label\n1,1\n2,3\n")
    with pytest.raises(ValidationError, match="labels"):
        LabeledDataset.from_csv(path)


def test_spec_config_round_trip():
    spec = ProblemSpec.from_dense([1, 0.5], [0, 0], [[2.0, 0.3], [0.3, 1.0]])
    back = spec_from_config(load_json(dumps_config(spec.to_config())))
    np.testing.assert_allclose(back.sigma, spec.sigma)
    assert back.delta == pytest.approx(spec.delta, rel=1e-12)


def test_spec_config_with_generator():
    spec = spec_from_config({"mu1": [1, 0, 0], "mu2": [0, 0, 0],
                             "sigma_model": {"kind": "ar1", "rho": 0.3}})
    np.testing.assert_allclose(spec.sigma, ar1_matrix(3, 0.3), atol=1e-12)


def test_spec_config_errors():
    with pytest.raises(ConfigError, match="unknown key"):
        spec_from_config({"mu1": [1], "mu2": [0], "sigma_dense": [[1]], "sigmaa": 1})
    with pytest.raises(ConfigError, match="missing field 'mu2'"):
        spec_from_config({"mu1": [1], "sigma_dense": [[1]]})
    with pytest.raises(ConfigError, match="line 1, column"):
        load_json('{"mu1": [1,}')


def test_classifier_record_validates_lambda():
    with pytest.raises(ValidationError):
        validate(FittedLinearClassifier([1.0], 0.0, Method.RLDA, lam=0.0))
    validate(FittedLinearClassifier([1.0], 0.0, Method.RLDA, lam=0.5))
