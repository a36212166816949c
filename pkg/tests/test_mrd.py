import numpy as np
import pytest

from bayes_stepdown.bsd import ActiveSet
from bayes_stepdown.linalg import to_correlation
from bayes_stepdown.model import CovarianceFamily, build_covariance
from bayes_stepdown.mrd import (
    default_critical_sequence,
    mrd_residual,
    mrd_residuals,
    mrd_step_down,
    read_critical_sequence,
    validate_critical_sequence,
)

from conftest import random_correlation, random_spd
from oracles import regression_residual


def test_identity_residuals_are_coordinates():
    x = np.array([1.5, -2.0, 0.3])
    a = ActiveSet(np.eye(3)).remove(1)
    for j in (0, 2):
        assert mrd_residual(a, j, x) == (x[j], 1.0)


def test_two_dim_hand_example():
    u, sc = mrd_residual(ActiveSet([[1.0, 0.5], [0.5, 1.0]]), 0, [1.0, 1.0])
    assert u == pytest.approx(0.5 / np.sqrt(0.75))
    assert sc == pytest.approx(0.75)


def test_residual_matches_explicit_regression(rng):
    for _ in range(50):
        m = int(rng.integers(1, 9))
        sigma = random_correlation(rng, m)
        x = rng.normal(0, 2, m)
        removed = [int(k) for k in rng.permutation(m)[: rng.integers(0, m)]]
        a = ActiveSet(sigma)
        for k in removed:
            a = a.remove(k)
        us, scs = mrd_residuals(a, x)
        for pos, j in enumerate(a.surviving):
            u_ref, sc_ref = regression_residual(sigma, removed, int(j), x)
            assert abs(us[pos] - u_ref) < 1e-8
            assert abs(scs[pos] - sc_ref) < 1e-8


def test_shift_identity(rng):
    for _ in range(50):
        m = int(rng.integers(2, 9))
        sigma = random_correlation(rng, m)
        x = rng.normal(0, 2, m)
        r = rng.normal(0, 4)
        g = sigma[:, 0]
        removed = [int(k) for k in rng.permutation(np.arange(1, m))[: rng.integers(0, m - 1)]]
        a = ActiveSet(sigma, removed)
        u0, sc0 = mrd_residuals(a, x)
        u1, _ = mrd_residuals(a, x + r * g)
        assert a.surviving[0] == 0
        assert abs(u1[0] - (u0[0] + r * np.sqrt(sc0[0]))) < 1e-8
        np.testing.assert_allclose(u1[1:], u0[1:], atol=1e-8)


def test_scale_free(rng):
    s = random_spd(rng, 6)
    d = np.sqrt(np.diag(s))
    x = rng.normal(0, 3, 6)
    u_cov, _ = mrd_residuals(ActiveSet(s, [2]), x)
    u_cor, _ = mrd_residuals(ActiveSet(to_correlation(s), [2]), x / d)
    np.testing.assert_allclose(u_cov, u_cor, atol=1e-8)


@pytest.mark.slow
def test_null_residual_is_standard_normal():
    rng = np.random.default_rng(17)
    sigma = random_correlation(rng, 5)
    a = ActiveSet(sigma, [3])
    x = rng.multivariate_normal(np.zeros(5), sigma, size=100_000)
    u = (a.inv @ x[:, a.surviving].T)[1] / np.sqrt(a.inv[1, 1])
    se = 1 / np.sqrt(u.size)
    assert abs(u.mean()) < 3 * se
    # var of sample variance of N(0,1) is 2/n
    assert abs(u.var(ddof=1) - 1) < 3 * np.sqrt(2 / u.size)


def test_step_down_examples():
    dec, trace = mrd_step_down(np.zeros(4), np.eye(4), [1.0, 0.5, 0.4, 0.1])
    assert not dec.any() and trace.stop_stage == 1
    dec, trace = mrd_step_down([3.0, 1.0], np.eye(2), [2.0, 2.0])
    assert dec.tolist() == [True, False]
    assert [s.statistic for s in trace.stages] == [3.0, 1.0]
    dec, _ = mrd_step_down([30.0, -40.0], np.eye(2), [1e300, 1e300])
    assert not dec.any()


def test_intraclass_path_matches_dense():
    rng = np.random.default_rng(8)
    fam = CovarianceFamily("intraclass", 10, 0.4)
    sigma = build_covariance(fam)
    c = default_critical_sequence(10, 0.1)
    for _ in range(30):
        x = rng.normal(0, 3, 10)
        d1, t1 = mrd_step_down(x, fam, c)
        d2, t2 = mrd_step_down(x, sigma, c)
        np.testing.assert_array_equal(d1, d2)
        np.testing.assert_allclose([s.statistic for s in t1.stages], [s.statistic for s in t2.stages], atol=1e-9)


def test_default_critical_sequence():
    c = default_critical_sequence(3, 0.05)
    from scipy.stats import norm

    np.testing.assert_allclose(c, norm.ppf([1 - 0.05 / 6, 1 - 0.05 / 4, 1 - 0.05 / 2]))
    assert np.all(np.diff(c) <= 0)


def test_critical_sequence_validation(tmp_path):
    with pytest.raises(ValueError):
        validate_critical_sequence([1.0, 2.0], 2)
    with pytest.raises(ValueError):
        validate_critical_sequence([1.0, 0.0], 2)
    with pytest.raises(ValueError):
        validate_critical_sequence([1.0], 2)
    path = tmp_path / "c.txt"
    path.write_text("2.5\n2.0\n\n1.5\n")
    np.testing.assert_array_equal(read_critical_sequence(path, 3), [2.5, 2.0, 1.5])
    path.write_text("2.5\nabc\n")
    with pytest.raises(ValueError):
        read_critical_sequence(path, 2)
