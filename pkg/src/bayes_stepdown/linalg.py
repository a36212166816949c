"""Dense symmetric linear algebra used by the step-down procedures.

All matrices are plain ``numpy`` arrays. Inverses of positive definite
matrices go through a Cholesky factorization so that indefinite input is
detected rather than silently inverted.
"""
from __future__ import annotations

import os
from pathlib import Path

import numpy as np
from scipy.linalg import lapack

__all__ = [
    "NotPositiveDefiniteError",
    "PD_TOLERANCE",
    "cholesky",
    "spd_inverse",
    "to_correlation",
    "rank_one_inverse_update",
    "determinant_ratio",
    "block_inverse_entries",
    "inverse_downdate",
    "intraclass_inverse_entries",
    "read_matrix",
    "write_matrix",
]

#: Relative Cholesky pivot size below which a matrix is treated as singular.
PD_TOLERANCE = 1e-12


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    """Raised when a matrix that must be positive definite is not."""


def _as_square(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def cholesky(a) -> np.ndarray:
    """Lower Cholesky factor of ``a``.

    Raises NotPositiveDefiniteError if any pivot ``L[i, i]**2`` falls below
    ``PD_TOLERANCE * max(diag(a))``.
    """
    a = _as_square(a)
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-12):
        raise ValueError("matrix is not symmetric")
    try:
        L = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from None
    scale = float(np.max(np.diag(a))) if a.size else 1.0
    if a.size and np.min(np.diag(L)) ** 2 < PD_TOLERANCE * scale:
        raise NotPositiveDefiniteError("matrix is numerically singular")
    return L


def spd_inverse(a) -> np.ndarray:
    """Inverse of a symmetric positive definite matrix via LAPACK potrf/potri."""
    a = _as_square(a)
    if a.shape[0] == 0:
        return a.copy()
    L = cholesky(a)
    inv, info = lapack.dpotri(L, lower=1)
    if info != 0:
        raise NotPositiveDefiniteError(f"potri failed (info={info})")
    inv = np.tril(inv)
    return inv + np.tril(inv, -1).T


def to_correlation(s) -> np.ndarray:
    """Rescale a covariance matrix to unit diagonal, ``D^-1/2 S D^-1/2``."""
    s = _as_square(s)
    d = np.diag(s)
    if np.any(d <= 0):
        raise ValueError("covariance matrix has a non-positive diagonal entry")
    scale = 1.0 / np.sqrt(d)
    r = s * np.outer(scale, scale)
    np.fill_diagonal(r, 1.0)
    return r


def rank_one_inverse_update(binv, i: int, v: float) -> np.ndarray:
    """Inverse after adding ``v`` to diagonal entry ``i`` of the original matrix.

    Given ``binv = B^{-1}``, returns ``(B + v e_i e_i^T)^{-1}`` as
    ``binv - v/(1 + v*b_ii) * b_i b_i^T`` with ``b_i`` column ``i`` of ``binv``.
    """
    binv = _as_square(binv)
    b = binv[:, i]
    denom = 1.0 + v * b[i]
    if denom <= 0:
        raise ValueError("1 + v*b_ii must be positive")
    return binv - (v / denom) * np.outer(b, b)


def determinant_ratio(binv, i: int, v: float) -> float:
    """``|B + v e_i e_i^T| / |B|`` computed as ``1 + v * binv[i, i]``."""
    binv = _as_square(binv)
    return 1.0 + v * float(binv[i, i])


def block_inverse_entries(m, i: int) -> np.ndarray:
    """Column ``i`` of ``m^{-1}`` from the Schur complement of entry ``(i, i)``.

    Only the ``(n-1) x (n-1)`` block with row and column ``i`` removed is
    inverted.
    """
    m = _as_square(m)
    n = m.shape[0]
    rest = np.delete(np.arange(n), i)
    sigma = m[rest, i]
    if n > 1:
        sub_inv = spd_inverse(m[np.ix_(rest, rest)])
        proj = sub_inv @ sigma
        schur = m[i, i] - sigma @ proj
    else:
        proj = np.empty(0)
        schur = m[i, i]
    if not schur > 0:
        raise NotPositiveDefiniteError("non-positive Schur complement")
    b_ii = 1.0 / schur
    col = np.empty(n)
    col[i] = b_ii
    col[rest] = -b_ii * proj
    return col


def inverse_downdate(ainv, k: int) -> np.ndarray:
    """Inverse of ``A`` with row and column ``k`` deleted, given ``ainv = A^{-1}``.

    Costs O(n^2): ``ainv[-k,-k] - c c^T / d`` where ``d = ainv[k, k]`` and
    ``c`` is column ``k`` of ``ainv`` without entry ``k``.
    """
    ainv = _as_square(ainv)
    n = ainv.shape[0]
    if n < 2:
        raise ValueError("need a matrix of dimension at least 2")
    d = ainv[k, k]
    if not d > 0:
        raise NotPositiveDefiniteError("non-positive diagonal entry in inverse")
    keep = np.delete(np.arange(n), k)
    c = ainv[keep, k]
    out = ainv[np.ix_(keep, keep)] - np.outer(c, c) / d
    return 0.5 * (out + out.T)


def intraclass_inverse_entries(k: int, rho: float) -> tuple[float, float]:
    """Diagonal and off-diagonal entries of the inverse of ``(1-rho) I + rho J``."""
    if k < 1:
        raise ValueError("dimension must be positive")
    lower = -1.0 / (k - 1) if k > 1 else -np.inf
    if not lower < rho < 1.0:
        raise ValueError(f"rho={rho} outside the positive definite range for k={k}")
    denom = (1.0 - rho) * (1.0 + (k - 1) * rho)
    return (1.0 + (k - 2) * rho) / denom, -rho / denom


def read_matrix(path: str | os.PathLike) -> np.ndarray:
    """Read the dense text format: a line with ``m`` then ``m`` rows of ``m`` reals."""
    path = Path(path)
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty matrix file")
    try:
        m = int(lines[0].split()[0])
        rows = [[float(tok) for tok in ln.split()] for ln in lines[1:]]
    except (ValueError, IndexError) as exc:
        raise ValueError(f"{path}: {exc}") from None
    if m < 1 or len(rows) != m or any(len(r) != m for r in rows):
        raise ValueError(f"{path}: expected {m} rows of {m} values")
    return np.array(rows)


def write_matrix(path: str | os.PathLike, a) -> None:
    a = _as_square(a)
    with open(path, "w") as fh:
        fh.write(f"{a.shape[0]}\n")
        for row in a:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")
