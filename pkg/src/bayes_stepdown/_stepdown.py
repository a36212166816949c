"""Shared state and driver for step-down procedures driven by the surviving inverse.

At every stage both BSD and MRD need, for each surviving ``j``, the diagonal
entry ``b_jj`` of the inverse of the surviving submatrix and the inner
product ``w_j = sum_k b_kj x_k``. The states below keep exactly that.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import blas

from .linalg import NotPositiveDefiniteError, intraclass_inverse_entries, spd_inverse
from .model import CovarianceFamily, build_covariance

Score = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Stage:
    stage: int  # 1-based stage number
    index: int  # 0-based index of the chosen hypothesis
    statistic: float
    rejected: bool


@dataclass
class StepTrace:
    """Per-stage record of a step-down run.

    ``stop_stage`` is the stage at which the remaining hypotheses were
    accepted, or ``m + 1`` if every hypothesis was rejected.
    """

    stages: list[Stage] = field(default_factory=list)
    stop_stage: int = 0

    @property
    def rejected(self) -> list[int]:
        return [s.index for s in self.stages if s.rejected]

    def to_dict(self) -> dict:
        return {
            "stop_stage": self.stop_stage,
            "stages": [
                {"stage": s.stage, "index": s.index, "statistic": s.statistic, "rejected": s.rejected}
                for s in self.stages
            ],
        }


class DenseState:
    """Copy of the surviving inverse with removed rows/columns zeroed.

    Removed rows stay in place, so ``inv @ x`` ignores removed coordinates
    automatically and a removal is one in-place rank-one update. Once half
    the rows are dead the matrix is compacted, so the total cost stays near
    ``m^3 / 3`` instead of ``m^3``.
    """

    def __init__(self, sigma: np.ndarray):
        self.m = sigma.shape[0]
        # Fortran order so BLAS dger can update in place
        self.inv = np.asfortranarray(spd_inverse(sigma))
        self.ids = np.arange(self.m)  # original index of each row of inv
        self.alive = np.ones(self.m, dtype=bool)

    def best(self, x: np.ndarray, score: Score) -> tuple[int, float]:
        w = self.inv @ x[self.ids]
        b = np.diagonal(self.inv)
        s = np.full(self.ids.size, -np.inf)
        s[self.alive] = score(w[self.alive], b[self.alive])
        # ids stay ascending, so the first maximum is the smallest original index
        k = int(np.argmax(s))
        return int(self.ids[k]), float(s[k])

    def remove(self, j: int, x: np.ndarray) -> None:
        k = int(np.searchsorted(self.ids, j))
        d = self.inv[k, k]
        if not d > 0:
            raise NotPositiveDefiniteError("non-positive diagonal entry in inverse")
        c = self.inv[:, k].copy()
        blas.dger(-1.0 / d, c, c, a=self.inv, overwrite_a=True)
        self.inv[k, :] = 0.0
        self.inv[:, k] = 0.0
        self.alive[k] = False
        n_alive = int(self.alive.sum())
        if n_alive and 2 * n_alive <= self.ids.size:
            keep = np.flatnonzero(self.alive)
            self.inv = np.asfortranarray(self.inv[np.ix_(keep, keep)])
            self.ids = self.ids[keep]
            self.alive = np.ones(keep.size, dtype=bool)


class IntraclassState:
    """Matrix-free state for an intraclass correlation ``(1-rho) I + rho J``.

    With ``k`` survivors every ``b_jj`` equals the same constant ``a`` and
    ``w_j = (a - c) x_j + c * S`` with ``S`` the surviving sum, which is
    increasing in ``x_j``. The most extreme statistic is therefore attained at
    the largest or the smallest surviving ``x_j``; two sorted cursors find both
    in amortized O(1) per stage.
    """

    def __init__(self, x: np.ndarray, rho: float):
        self.m = x.shape[0]
        self.rho = float(rho)
        self.alive = np.ones(self.m, dtype=bool)
        idx = np.arange(self.m)
        self._up = np.lexsort((idx, x))  # ascending x, ties by index
        self._down = np.lexsort((idx, -x))  # descending x, ties by index
        self._lo = 0
        self._hi = 0
        self._sum = float(np.sum(x))
        self._k = self.m

    def _advance(self):
        while not self.alive[self._up[self._lo]]:
            self._lo += 1
        while not self.alive[self._down[self._hi]]:
            self._hi += 1

    def best(self, x: np.ndarray, score: Score) -> tuple[int, float]:
        self._advance()
        a, c = intraclass_inverse_entries(self._k, self.rho)
        cand = np.array([self._down[self._hi], self._up[self._lo]])
        w = (a - c) * x[cand] + c * self._sum
        s = score(w, np.array([a, a]))
        if s[0] > s[1] or (s[0] == s[1] and cand[0] <= cand[1]):
            return int(cand[0]), float(s[0])
        return int(cand[1]), float(s[1])

    def remove(self, k: int, x: np.ndarray) -> None:
        self.alive[k] = False
        self._sum -= float(x[k])
        self._k -= 1


def run_step_down(
    x: np.ndarray, state, score: Score, thresholds: Sequence[float]
) -> tuple[np.ndarray, StepTrace]:
    """Reject the best-scoring survivor while its score exceeds the stage threshold."""
    m = x.shape[0]
    decisions = np.zeros(m, dtype=bool)
    trace = StepTrace()
    for t in range(m):
        j, s = state.best(x, score)
        if not s > thresholds[t]:
            trace.stages.append(Stage(t + 1, j, s, False))
            trace.stop_stage = t + 1
            return decisions, trace
        decisions[j] = True
        trace.stages.append(Stage(t + 1, j, s, True))
        if t < m - 1:
            state.remove(j, x)
    trace.stop_stage = m + 1
    return decisions, trace


def make_state(x: np.ndarray, sigma):
    """Dense state for a matrix, matrix-free state for intraclass families."""
    if isinstance(sigma, CovarianceFamily):
        if sigma.m != x.shape[0]:
            raise ValueError(f"family dimension {sigma.m} does not match x ({x.shape[0]})")
        if sigma.is_intraclass:
            return IntraclassState(x, 0.0 if sigma.kind == "identity" else sigma.rho)
        sigma = build_covariance(sigma)
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (x.shape[0], x.shape[0]):
        raise ValueError(f"Sigma has shape {sigma.shape}, x has length {x.shape[0]}")
    return DenseState(sigma)
