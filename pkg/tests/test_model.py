import numpy as np
import pytest

from bayes_stepdown.linalg import write_matrix
from bayes_stepdown.model import (
    CovarianceFamily,
    MixtureParams,
    build_covariance,
    noise_transform,
    sample_dataset,
)


def test_mixture_params_validation():
    with pytest.raises(ValueError):
        MixtureParams(0.0, 1.0)
    with pytest.raises(ValueError):
        MixtureParams(0.5, 0.0)
    with pytest.raises(ValueError):
        MixtureParams(0.5, 1.0, delta=0.0)
    assert MixtureParams(0.2, 1.0).log_prior_odds == pytest.approx(np.log(0.25))


def test_build_covariance_examples(tmp_path):
    np.testing.assert_array_equal(build_covariance(CovarianceFamily("intraclass", 4, 0.0)), np.eye(4))
    ar = build_covariance(CovarianceFamily("ar1", 3, 0.5))
    assert (ar[0, 1], ar[0, 2], ar[1, 2]) == (0.5, 0.25, 0.5)
    path = tmp_path / "cov.txt"
    write_matrix(path, [[4.0, 3.0], [3.0, 9.0]])
    custom = build_covariance(CovarianceFamily("custom", 2, path=str(path)))
    assert custom[0, 1] == pytest.approx(0.5)


def test_block_covariance():
    s = build_covariance(CovarianceFamily("block", 7, 0.4, block_size=3))
    assert s[0, 2] == 0.4 and s[2, 3] == 0.0 and s[6, 5] == 0.0
    assert np.all(np.diag(s) == 1.0)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(kind="intraclass", m=4, rho=-0.5),
        dict(kind="ar1", m=4, rho=1.0),
        dict(kind="block", m=6, rho=1.2, block_size=3),
        dict(kind="custom", m=3),
        dict(kind="wishart", m=3),
    ],
)
def test_family_validation(kwargs):
    with pytest.raises(ValueError):
        CovarianceFamily(**kwargs)


@pytest.mark.parametrize(
    "fam",
    [
        CovarianceFamily("ar1", 6, 0.7),
        CovarianceFamily("ar1", 5, -0.4),
        CovarianceFamily("block", 7, 0.3, block_size=3),
        CovarianceFamily("intraclass", 5, 0.2),
        CovarianceFamily("intraclass", 5, -0.2),
    ],
)
def test_noise_transform_is_cholesky(fam):
    # L applied to the identity gives L, and L L^T must reproduce Sigma
    t = noise_transform(fam)
    L = np.column_stack([t(e) for e in np.eye(fam.m)])
    np.testing.assert_allclose(L @ L.T, build_covariance(fam), atol=1e-12)
    np.testing.assert_allclose(L, np.tril(L), atol=1e-12)


def test_sample_is_deterministic():
    fam = CovarianceFamily("ar1", 10, 0.5)
    params = MixtureParams(0.3, 4.0)
    g1, x1 = sample_dataset(fam, params, seed=7, replicate=3)
    g2, x2 = sample_dataset(fam, params, seed=7, replicate=3)
    np.testing.assert_array_equal(x1, x2)
    np.testing.assert_array_equal(g1.nu, g2.nu)
    _, x3 = sample_dataset(fam, params, seed=7, replicate=4)
    assert not np.array_equal(x1, x3)


def test_null_means_are_exactly_zero():
    truth, _ = sample_dataset(CovarianceFamily("identity", 500), MixtureParams(0.3, 4.0), seed=1)
    assert np.all(truth.mu[truth.nu == 0] == 0.0)
    assert np.all(truth.mu[truth.nu == 1] != 0.0)


def _draws(fam, params, reps):
    t = noise_transform(fam)
    out = [sample_dataset(fam, params, seed=11, replicate=r, transform=t) for r in range(reps)]
    return np.array([g.nu for g, _ in out]), np.array([x for _, x in out])


def test_tiny_p_gives_null_data():
    nu, x = _draws(CovarianceFamily("identity", 5), MixtureParams(1e-12, 4.0), 10_000)
    assert nu.sum() == 0
    assert np.all(np.abs(x.var(axis=0) - 1.0) < 0.05)


@pytest.mark.slow
def test_mixture_moments():
    fam = CovarianceFamily("intraclass", 2, 0.5)
    p, v = 0.3, 4.0
    nu, x = _draws(fam, MixtureParams(p, v), 100_000)
    sq = x**2
    # E(X_i^2) = 1 + pV
    for i in range(2):
        se = sq[:, i].std(ddof=1) / np.sqrt(len(sq))
        assert abs(sq[:, i].mean() - (1 + p * v)) < 3 * se
    # cov(X_1^2, X_2^2) = 2 sigma_12^2
    prod = (sq[:, 0] - sq[:, 0].mean()) * (sq[:, 1] - sq[:, 1].mean())
    se = prod.std(ddof=1) / np.sqrt(len(prod))
    assert abs(prod.mean() - 2 * 0.5**2) < 3 * se
    # indicator frequency
    n = nu.size
    assert abs(nu.mean() - p) < 3 * np.sqrt(p * (1 - p) / n)
