"""Marginal p-value procedures used as comparison baselines."""
from __future__ import annotations

import numpy as np
from scipy.special import erfc

__all__ = [
    "two_sided_pvalues",
    "bonferroni",
    "bh_step_up",
    "by_step_up",
    "adaptive_bh",
    "step_up",
]


def two_sided_pvalues(x) -> np.ndarray:
    """``2 Phi(-|x|)``, evaluated as ``erfc(|x| / sqrt(2))`` to keep tail accuracy."""
    return erfc(np.abs(np.asarray(x, dtype=float)) / np.sqrt(2.0))


def _check_alpha(alpha):
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")


def step_up(pv, thresholds) -> np.ndarray:
    """Reject the ``k*`` smallest p-values, ``k* = max{k : p_(k) <= thresholds[k-1]}``."""
    pv = np.asarray(pv, dtype=float)
    order = np.argsort(pv, kind="stable")
    ok = np.nonzero(pv[order] <= np.asarray(thresholds))[0]
    reject = np.zeros(pv.size, dtype=bool)
    if ok.size:
        reject[order[: ok[-1] + 1]] = True
    return reject


def bonferroni(pv, alpha: float = 0.05) -> np.ndarray:
    _check_alpha(alpha)
    pv = np.asarray(pv, dtype=float)
    return pv <= alpha / pv.size


def bh_step_up(pv, alpha: float = 0.05) -> np.ndarray:
    """Benjamini-Hochberg step-up at level ``alpha``."""
    _check_alpha(alpha)
    m = np.size(pv)
    return step_up(pv, alpha * np.arange(1, m + 1) / m)


def by_step_up(pv, alpha: float = 0.05) -> np.ndarray:
    """Benjamini-Yekutieli: BH at ``alpha / H_m``, valid under arbitrary dependence."""
    _check_alpha(alpha)
    m = np.size(pv)
    harmonic = float(np.sum(1.0 / np.arange(1, m + 1)))
    return bh_step_up(pv, alpha / harmonic)


def adaptive_bh(pv, alpha: float, p_hat: float) -> np.ndarray:
    """BH with thresholds ``k alpha / (m (1 - p_hat))``."""
    _check_alpha(alpha)
    if not 0.0 <= p_hat < 1.0:
        raise ValueError(f"p_hat must lie in [0, 1), got {p_hat}")
    m = np.size(pv)
    return step_up(pv, alpha * np.arange(1, m + 1) / (m * (1.0 - p_hat)))
