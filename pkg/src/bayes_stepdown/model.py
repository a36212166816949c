"""Two-groups (spike-and-slab) generative model with dependent noise.

Each mean is zero with probability ``1 - p`` and ``N(0, V)`` otherwise; the
observations are ``x = mu + z`` with ``z ~ N(0, Sigma)`` for a correlation
matrix ``Sigma``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.signal import lfilter

from .linalg import cholesky, read_matrix, to_correlation

__all__ = [
    "COVARIANCE_KINDS",
    "MixtureParams",
    "CovarianceFamily",
    "GroundTruth",
    "build_covariance",
    "replicate_rng",
    "noise_transform",
    "sample_dataset",
]

COVARIANCE_KINDS = ("identity", "intraclass", "ar1", "block", "custom")


@dataclass(frozen=True)
class MixtureParams:
    """Sparsity ``p``, slab variance ``v`` and the rejection threshold ``delta``."""

    p: float
    v: float
    delta: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {self.p}")
        if not self.v > 0.0:
            raise ValueError(f"v must be positive, got {self.v}")
        if not self.delta > 0.0:
            raise ValueError(f"delta must be positive, got {self.delta}")

    @property
    def log_prior_odds(self) -> float:
        return float(np.log(self.p) - np.log1p(-self.p))


@dataclass(frozen=True)
class CovarianceFamily:
    """A named correlation structure of dimension ``m``.

    ``rho`` is the common correlation (intraclass), the lag-one correlation
    (ar1) or the within-block correlation (block). ``path`` points at a dense
    matrix file for ``kind="custom"``.
    """

    kind: str
    m: int
    rho: float = 0.0
    block_size: int = 1
    path: Optional[str] = None

    def __post_init__(self):
        if self.kind not in COVARIANCE_KINDS:
            raise ValueError(f"unknown covariance family {self.kind!r}")
        if self.m < 1:
            raise ValueError("m must be a positive integer")
        if self.kind == "intraclass":
            _check_intraclass(self.m, self.rho)
        elif self.kind == "ar1" and not abs(self.rho) < 1.0:
            raise ValueError(f"ar1 requires |rho| < 1, got {self.rho}")
        elif self.kind == "block":
            if self.block_size < 1:
                raise ValueError("block_size must be positive")
            _check_intraclass(min(self.block_size, self.m), self.rho)
        elif self.kind == "custom" and not self.path:
            raise ValueError("custom covariance needs a matrix file path")

    @property
    def is_intraclass(self) -> bool:
        """True when every principal submatrix is intraclass (identity included)."""
        return self.kind == "identity" or self.kind == "intraclass" or (
            self.kind == "block" and self.block_size >= self.m
        )


def _check_intraclass(k: int, rho: float) -> None:
    lower = -1.0 / (k - 1) if k > 1 else -np.inf
    if not lower < rho < 1.0:
        raise ValueError(f"rho={rho} outside ({lower:.6g}, 1) for dimension {k}")


@dataclass
class GroundTruth:
    nu: np.ndarray  # 0/1 indicator of a true alternative
    mu: np.ndarray

    @property
    def n_signals(self) -> int:
        return int(self.nu.sum())


def _intraclass(k: int, rho: float) -> np.ndarray:
    a = np.full((k, k), float(rho))
    np.fill_diagonal(a, 1.0)
    return a


def build_covariance(family: CovarianceFamily) -> np.ndarray:
    m, rho = family.m, family.rho
    if family.kind == "identity":
        return np.eye(m)
    if family.kind == "intraclass":
        return _intraclass(m, rho)
    if family.kind == "ar1":
        lags = np.abs(np.subtract.outer(np.arange(m), np.arange(m)))
        return np.power(float(rho), lags)
    if family.kind == "block":
        out = np.zeros((m, m))
        for start in range(0, m, family.block_size):
            stop = min(start + family.block_size, m)
            out[start:stop, start:stop] = _intraclass(stop - start, rho)
        return out
    sigma = to_correlation(read_matrix(family.path))
    if sigma.shape[0] != m:
        raise ValueError(f"{family.path}: matrix has dimension {sigma.shape[0]}, expected {m}")
    cholesky(sigma)
    return sigma


def replicate_rng(seed: int, replicate: int = 0) -> np.random.Generator:
    """Independent Philox stream keyed by ``(seed, replicate)`` through SeedSequence."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, replicate])))


def noise_transform(family: CovarianceFamily) -> Callable[[np.ndarray], np.ndarray]:
    """Map iid standard normals ``e`` to ``L e`` with ``L`` the Cholesky factor of Sigma.

    Identity, ar1 and block families apply the factor without forming an
    ``m x m`` matrix; the others factor the dense matrix once.
    """
    m = family.m
    if family.kind == "identity":
        return lambda e: e
    if family.kind == "ar1":
        rho = family.rho
        s = np.sqrt(1.0 - rho * rho)

        def ar1(e):
            e = np.array(e, dtype=float)
            if s == 0.0:
                return np.full_like(e, e[0])
            e[0] /= s
            return lfilter([s], [1.0, -rho], e)

        return ar1
    if family.kind == "block":
        k = min(family.block_size, m)
        full = (m // k) * k
        L = cholesky(_intraclass(k, family.rho))
        tail = cholesky(_intraclass(m - full, family.rho)) if m > full else None

        def block(e):
            e = np.asarray(e, dtype=float)
            out = np.empty_like(e)
            out[:full] = (e[:full].reshape(-1, k) @ L.T).ravel()
            if tail is not None:
                out[full:] = tail @ e[full:]
            return out

        return block
    L = cholesky(build_covariance(family))
    return lambda e: L @ e


def sample_dataset(
    family: CovarianceFamily,
    params: MixtureParams,
    seed: int,
    replicate: int = 0,
    transform: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> tuple[GroundTruth, np.ndarray]:
    """Draw ``(nu, mu)`` from the spike-and-slab prior and ``x ~ N_m(mu, Sigma)``.

    Pass a precomputed ``transform`` (from :func:`noise_transform`) to reuse one
    Cholesky factor across replicates.
    """
    if transform is None:
        transform = noise_transform(family)
    rng = replicate_rng(seed, replicate)
    m = family.m
    nu = (rng.random(m) < params.p).astype(np.int8)
    slab = rng.standard_normal(m) * np.sqrt(params.v)
    mu = np.where(nu == 1, slab, 0.0)
    x = mu + transform(rng.standard_normal(m))
    return GroundTruth(nu=nu, mu=mu), x
