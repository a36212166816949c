"""Bayesian step-down (BSD) statistics and procedure.

At stage ``t`` with hypotheses ``i_1, ..., i_{t-1}`` already rejected, the
statistic for a surviving ``j`` is the posterior odds of "only ``j`` is
non-null among the survivors" against "all survivors are null", given the
surviving coordinates of ``x``. Everything is computed on the log scale.
"""
from __future__ import annotations

from typing import Iterable, Union

import numpy as np
from scipy.stats import multivariate_normal

from ._stepdown import Stage, StepTrace, make_state, run_step_down
from .linalg import NotPositiveDefiniteError, inverse_downdate, spd_inverse
from .model import CovarianceFamily, MixtureParams

__all__ = [
    "ActiveSet",
    "Stage",
    "StepTrace",
    "bsd_log_stats",
    "bsd_stat_fast",
    "bsd_stat_naive",
    "bsd_stat_via_mrd",
    "bsd_step_down",
    "NAIVE_MAX_DIM",
]

NAIVE_MAX_DIM = 20


class ActiveSet:
    """Surviving hypotheses after a removal prefix, with the inverse of their submatrix.

    ``inv`` is ordered like ``surviving`` (ascending original index), so the
    column for hypothesis ``j`` sits at ``position(j)``.
    """

    def __init__(self, sigma, removed: Iterable[int] = (), _inv=None):
        self.sigma = np.asarray(sigma, dtype=float)
        m = self.sigma.shape[0]
        self.removed = tuple(int(i) for i in removed)
        if len(set(self.removed)) != len(self.removed) or any(not 0 <= i < m for i in self.removed):
            raise ValueError(f"invalid removal prefix {self.removed}")
        gone = set(self.removed)
        self.surviving = np.array([i for i in range(m) if i not in gone], dtype=int)
        if _inv is None:
            _inv = spd_inverse(self.sigma[np.ix_(self.surviving, self.surviving)])
        self.inv = _inv
        self._pos = {int(j): k for k, j in enumerate(self.surviving)}

    def position(self, j: int) -> int:
        try:
            return self._pos[j]
        except KeyError:
            raise ValueError(f"hypothesis {j} is not surviving") from None

    def column(self, j: int) -> np.ndarray:
        return self.inv[:, self.position(j)]

    def remove(self, j: int) -> "ActiveSet":
        """New active set with ``j`` removed, inverse obtained by an O(n^2) downdate."""
        inv = inverse_downdate(self.inv, self.position(j))
        return ActiveSet(self.sigma, self.removed + (j,), _inv=inv)

    def weights(self, x) -> np.ndarray:
        """``w = inv @ x_surviving``; ``w[position(j)]`` is the numerator sum for ``j``."""
        return self.inv @ np.asarray(x, dtype=float)[self.surviving]


def _fast_score(params: MixtureParams):
    lo = params.log_prior_odds
    v = params.v

    def score(w, b):
        g = 1.0 + v * b
        return lo - 0.5 * np.log(g) + v * w * w / (2.0 * g)

    return score


def bsd_log_stats(active: ActiveSet, x, params: MixtureParams) -> np.ndarray:
    """Log statistics for every surviving hypothesis, ordered like ``active.surviving``."""
    return _fast_score(params)(active.weights(x), np.diag(active.inv))


def bsd_stat_fast(active: ActiveSet, j: int, x, params: MixtureParams) -> float:
    """Log BSD statistic from column ``j`` of the surviving inverse.

    ``log(p/(1-p)) - log(1 + V b_jj)/2 + V w^2 / (2 (1 + V b_jj))`` with
    ``w = sum_k b_kj x_k`` over surviving coordinates.
    """
    col = active.column(j)
    w = float(col @ np.asarray(x, dtype=float)[active.surviving])
    b = float(col[active.position(j)])
    return float(_fast_score(params)(w, b))


def bsd_stat_naive(active: ActiveSet, j: int, x, params: MixtureParams) -> float:
    """Log BSD statistic as a ratio of two dense Gaussian densities.

    Reference implementation: evaluates ``N(x_s; 0, Sigma_s + V e_j e_j^T)``
    and ``N(x_s; 0, Sigma_s)`` directly. Refuses more than ``NAIVE_MAX_DIM``
    survivors.
    """
    n = active.surviving.size
    if n > NAIVE_MAX_DIM:
        raise ValueError(f"naive statistic limited to {NAIVE_MAX_DIM} survivors, got {n}")
    sub = active.sigma[np.ix_(active.surviving, active.surviving)]
    xs = np.asarray(x, dtype=float)[active.surviving]
    alt = sub.copy()
    pos = active.position(j)
    alt[pos, pos] += params.v
    num = multivariate_normal(mean=np.zeros(n), cov=alt).logpdf(xs)
    den = multivariate_normal(mean=np.zeros(n), cov=sub).logpdf(xs)
    return float(params.log_prior_odds + num - den)


def bsd_stat_via_mrd(u: float, sigma_cond: float, params: MixtureParams) -> float:
    """Log BSD statistic from the MRD residual ``u`` and its conditional variance."""
    if not sigma_cond > 0:
        raise NotPositiveDefiniteError("conditional variance must be positive")
    v = params.v
    return float(
        params.log_prior_odds
        + 0.5 * np.log(sigma_cond / (v + sigma_cond))
        + v * u * u / (2.0 * (v + sigma_cond))
    )


def bsd_step_down(
    x, sigma: Union[np.ndarray, CovarianceFamily], params: MixtureParams
) -> tuple[np.ndarray, StepTrace]:
    """Run the BSD procedure.

    ``sigma`` is either a dense correlation matrix or a
    :class:`CovarianceFamily`; intraclass families (and the identity) run
    without storing any matrix. Returns boolean rejections and the trace.
    """
    x = np.asarray(x, dtype=float)
    state = make_state(x, sigma)
    thresholds = np.full(x.shape[0], np.log(params.delta))
    return run_step_down(x, state, _fast_score(params), thresholds)
