import numpy as np
import pytest

from bayes_stepdown.linalg import (
    NotPositiveDefiniteError,
    block_inverse_entries,
    cholesky,
    determinant_ratio,
    intraclass_inverse_entries,
    inverse_downdate,
    rank_one_inverse_update,
    read_matrix,
    spd_inverse,
    to_correlation,
    write_matrix,
)

from conftest import random_spd


def test_to_correlation_examples():
    np.testing.assert_array_equal(to_correlation(np.eye(3)), np.eye(3))
    r = to_correlation([[4.0, 3.0], [3.0, 9.0]])
    np.testing.assert_allclose(r, [[1.0, 0.5], [0.5, 1.0]])


def test_to_correlation_unit_diagonal(rng):
    r = to_correlation(random_spd(rng, 6))
    assert np.all(np.diag(r) == 1.0)
    cholesky(r)


def test_to_correlation_rejects_nonpositive_diagonal():
    with pytest.raises(ValueError):
        to_correlation([[0.0, 0.0], [0.0, 1.0]])


def test_cholesky_rejects_singular():
    with pytest.raises(NotPositiveDefiniteError):
        cholesky(np.ones((3, 3)))
    with pytest.raises(NotPositiveDefiniteError):
        spd_inverse([[1.0, 2.0], [2.0, 1.0]])


def test_rank_one_update_examples(rng):
    np.testing.assert_allclose(rank_one_inverse_update(np.eye(2), 0, 3.0), np.diag([0.25, 1.0]))
    np.testing.assert_allclose(rank_one_inverse_update(np.eye(3), 1, 0.0), np.eye(3))
    s = random_spd(rng, 4)
    e = np.zeros(4)
    e[2] = 1
    direct = np.linalg.inv(s + 10 * np.outer(e, e))
    got = rank_one_inverse_update(np.linalg.inv(s), 2, 10.0)
    assert np.max(np.abs(got - direct)) <= 1e-10 * np.max(np.abs(direct))


@pytest.mark.parametrize("v", [0.1, 1.0, 100.0])
def test_smw_identity(rng, v):
    for _ in range(20):
        m = rng.integers(2, 9)
        s = random_spd(rng, m)
        i = rng.integers(m)
        upd = rank_one_inverse_update(np.linalg.inv(s), i, v)
        s1 = s.copy()
        s1[i, i] += v
        assert np.max(np.abs(upd @ s1 - np.eye(m))) <= 1e-8


def test_determinant_ratio(rng):
    assert determinant_ratio(np.eye(3), 2, 3.0) == 4.0
    assert determinant_ratio(np.eye(3), 0, 0.0) == 1.0
    s = random_spd(rng, 5)
    s1 = s.copy()
    s1[3, 3] += 7.0
    brute = np.linalg.det(s1) / np.linalg.det(s)
    assert determinant_ratio(np.linalg.inv(s), 3, 7.0) == pytest.approx(brute, rel=1e-10)


def test_block_inverse_entries(rng):
    np.testing.assert_array_equal(block_inverse_entries(np.eye(3), 1), [0.0, 1.0, 0.0])
    col = block_inverse_entries([[1.0, 0.5], [0.5, 1.0]], 0)
    np.testing.assert_allclose(col, [4 / 3, -2 / 3])
    s = random_spd(rng, 6)
    full = np.linalg.inv(s)
    for i in range(6):
        np.testing.assert_allclose(block_inverse_entries(s, i), full[:, i], atol=1e-10 * np.abs(full).max())


def test_block_inverse_entries_detects_non_pd():
    with pytest.raises(np.linalg.LinAlgError):
        block_inverse_entries([[1.0, 2.0], [2.0, 1.0]], 0)


def test_inverse_downdate_examples(rng):
    np.testing.assert_allclose(inverse_downdate(np.eye(3), 1), np.eye(2))
    a = random_spd(rng, 5)
    got = inverse_downdate(np.linalg.inv(a), 0)
    np.testing.assert_allclose(got, np.linalg.inv(a[1:, 1:]), atol=1e-10)
    b = random_spd(rng, 2)
    assert inverse_downdate(np.linalg.inv(b), 0)[0, 0] == pytest.approx(1 / b[1, 1], rel=1e-12)
    with pytest.raises(ValueError):
        inverse_downdate(np.eye(1), 0)


def test_downdate_order_independent(rng):
    m = 8
    a = random_spd(rng, m)
    target = [1, 4, 6]
    direct = np.linalg.inv(np.delete(np.delete(a, target, 0), target, 1))
    for order in ([1, 4, 6], [6, 1, 4], [4, 6, 1]):
        inv, alive = np.linalg.inv(a), list(range(m))
        for k in order:
            pos = alive.index(k)
            inv = inverse_downdate(inv, pos)
            alive.pop(pos)
        assert np.max(np.abs(inv - direct)) <= 1e-8


def test_intraclass_entries():
    assert intraclass_inverse_entries(5, 0.0) == (1.0, 0.0)
    d, o = intraclass_inverse_entries(2, 0.5)
    assert (d, o) == (pytest.approx(4 / 3), pytest.approx(-2 / 3))
    with pytest.raises(ValueError):
        intraclass_inverse_entries(3, -0.6)
    with pytest.raises(ValueError):
        intraclass_inverse_entries(3, 1.0)


@pytest.mark.parametrize("rho", [-0.01, 0.0, 0.3, 0.9])
@pytest.mark.parametrize("k", [1, 2, 3, 10, 50])
def test_intraclass_matches_dense(k, rho):
    a = np.full((k, k), rho)
    np.fill_diagonal(a, 1.0)
    d, o = intraclass_inverse_entries(k, rho)
    closed = np.full((k, k), o)
    np.fill_diagonal(closed, d)
    np.testing.assert_allclose(closed, np.linalg.inv(a), atol=1e-12 * max(1.0, abs(d)), rtol=1e-10)


def test_matrix_text_roundtrip(tmp_path, rng):
    a = random_spd(rng, 4)
    path = tmp_path / "s.txt"
    write_matrix(path, a)
    np.testing.assert_array_equal(read_matrix(path), a)


def test_matrix_text_malformed(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("3\n1 0 0\n0 1 0\n")
    with pytest.raises(ValueError):
        read_matrix(path)
    path.write_text("2\n1 x\n0 1\n")
    with pytest.raises(ValueError):
        read_matrix(path)
