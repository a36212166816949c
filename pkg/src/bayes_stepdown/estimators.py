"""Empirical-Bayes estimates of the non-null proportion ``p`` and slab variance ``V``."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .model import CovarianceFamily, build_covariance

__all__ = [
    "EstimatorConfig",
    "estimate_p",
    "estimate_v",
    "estimate_params",
    "cosine_moment",
    "expected_cosine",
    "weak_dependence_sum",
]


@dataclass(frozen=True)
class EstimatorConfig:
    """Tuning and clamping policy.

    ``None`` bounds resolve to ``1/m`` and ``1 - 1/m``; at ``m = 1`` both become
    ``1/2`` so the clamped value is still a usable prior probability.
    """

    gamma: float = 0.25
    p_floor: Optional[float] = None
    p_ceiling: Optional[float] = None
    v_floor: float = 1e-6

    def __post_init__(self):
        if not 0.0 < self.gamma < 0.5:
            raise ValueError(f"gamma must lie in (0, 1/2), got {self.gamma}")
        if not self.v_floor > 0:
            raise ValueError("v_floor must be positive")
        for name in ("p_floor", "p_ceiling"):
            val = getattr(self, name)
            if val is not None and not 0.0 < val < 1.0:
                raise ValueError(f"{name} must lie in (0, 1)")

    def p_bounds(self, m: int) -> tuple[float, float]:
        lo = self.p_floor if self.p_floor is not None else min(1.0 / m, 0.5)
        hi = self.p_ceiling if self.p_ceiling is not None else max(1.0 - 1.0 / m, 0.5)
        return lo, hi


def _frequency(m: int, gamma: float) -> float:
    return np.sqrt(2.0 * gamma * np.log(m))


def estimate_p(x, gamma: float = 0.25, config: Optional[EstimatorConfig] = None) -> tuple[float, float]:
    """Fourier-type estimate ``1 - m^(gamma-1) sum_j cos(sqrt(2 gamma log m) x_j)``.

    Returns ``(raw, clamped)``; the clamped value lies in the configured bounds.
    """
    x = np.asarray(x, dtype=float)
    m = x.size
    if m < 1:
        raise ValueError("need at least one observation")
    if config is None:
        config = EstimatorConfig(gamma=gamma)
    g = config.gamma
    raw = 1.0 - m ** (g - 1.0) * float(np.sum(np.cos(_frequency(m, g) * x)))
    lo, hi = config.p_bounds(m)
    return raw, min(max(raw, lo), hi)


def estimate_v(x, p_hat: float, v_floor: float = 1e-6) -> tuple[float, float]:
    """Moment estimate ``(mean(x^2) - 1) / p_hat``, returned as ``(raw, clamped)``."""
    if not p_hat > 0:
        raise ValueError(f"p_hat must be positive, got {p_hat}")
    x = np.asarray(x, dtype=float)
    raw = (float(np.mean(x * x)) - 1.0) / p_hat
    return raw, max(raw, v_floor)


def estimate_params(x, config: Optional[EstimatorConfig] = None) -> dict:
    """Both estimates; ``V`` is computed from the clamped ``p``."""
    config = config or EstimatorConfig()
    p_raw, p_hat = estimate_p(x, config=config)
    v_raw, v_hat = estimate_v(x, p_hat, config.v_floor)
    return {"p_raw": p_raw, "p": p_hat, "v_raw": v_raw, "v": v_hat}


def cosine_moment(s1: float, s2: float, rho: float, m: int, gamma: float) -> float:
    """``E[cos(t Z1) cos(t Z2)]`` for a centred bivariate normal, ``t = sqrt(2 gamma log m)``.

    ``s1, s2`` are the standard deviations and ``rho`` the correlation.
    """
    lm = gamma * np.log(m)
    q = s1 * s1 + s2 * s2
    cross = 2.0 * rho * s1 * s2
    return 0.5 * (np.exp(-(q + cross) * lm) + np.exp(-(q - cross) * lm))


def expected_cosine(p: float, v: float, m: int, gamma: float) -> float:
    """``E[cos(t X_j)]`` under the mixture marginal ``(1-p) N(0,1) + p N(0,1+V)``."""
    lm = gamma * np.log(m)
    return (1.0 - p) * np.exp(-lm) + p * np.exp(-(1.0 + v) * lm)


def _pair_term(sig, gamma: float, m: int):
    e = gamma * np.asarray(sig, dtype=float) * np.log(m)
    return (np.exp(-e) - np.exp(e)) ** 2


def weak_dependence_sum(sigma: Union[np.ndarray, CovarianceFamily], gamma: float, p: float) -> float:
    """Weak-dependence quantity that must vanish for the ``p`` estimate to be consistent.

    ``(1 / (m^2 p^2)) * sum_{j != j'} (m^(-gamma s_jj') - m^(gamma s_jj'))^2``.
    Structured families are summed in closed form without building the matrix.
    """
    if isinstance(sigma, CovarianceFamily):
        fam = sigma
        m = fam.m
        if fam.kind == "identity":
            total = 0.0
        elif fam.kind == "intraclass":
            total = m * (m - 1) * float(_pair_term(fam.rho, gamma, m))
        elif fam.kind == "block":
            k = fam.block_size
            sizes = [k] * (m // k) + ([m % k] if m % k else [])
            total = sum(n * (n - 1) for n in sizes) * float(_pair_term(fam.rho, gamma, m))
        elif fam.kind == "ar1":
            lags = np.arange(1, m)
            total = float(np.sum(2.0 * (m - lags) * _pair_term(fam.rho ** lags, gamma, m)))
        else:
            return weak_dependence_sum(build_covariance(fam), gamma, p)
    else:
        sigma = np.asarray(sigma, dtype=float)
        m = sigma.shape[0]
        off = sigma[~np.eye(m, dtype=bool)]
        total = float(np.sum(_pair_term(off, gamma, m)))
    return total / (m * m * p * p)
