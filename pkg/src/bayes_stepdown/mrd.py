"""Maximum residual down (MRD) procedure.

The statistic for a surviving ``j`` is the standardized residual of ``x_j``
after regressing on the other survivors under the null covariance. Both the
residual and its conditional variance are read off the surviving inverse:
``sigma_cond = 1 / b_jj`` and ``u = w_j / sqrt(b_jj)``.
"""
from __future__ import annotations

import os
from pathlib import Path
from typing import Optional, Union

import numpy as np
from scipy.special import ndtri

from ._stepdown import StepTrace, make_state, run_step_down
from .bsd import ActiveSet
from .linalg import NotPositiveDefiniteError
from .model import CovarianceFamily

__all__ = [
    "mrd_residual",
    "mrd_residuals",
    "mrd_step_down",
    "default_critical_sequence",
    "validate_critical_sequence",
    "read_critical_sequence",
]


def mrd_residual(active: ActiveSet, j: int, x) -> tuple[float, float]:
    """Residual ``u`` and conditional variance ``sigma_cond`` for hypothesis ``j``."""
    col = active.column(j)
    b = float(col[active.position(j)])
    if not b > 0:
        raise NotPositiveDefiniteError("non-positive diagonal entry in inverse")
    w = float(col @ np.asarray(x, dtype=float)[active.surviving])
    return w / np.sqrt(b), 1.0 / b


def mrd_residuals(active: ActiveSet, x) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`mrd_residual` over all survivors (ordered like ``active.surviving``)."""
    b = np.diag(active.inv)
    if np.any(b <= 0):
        raise NotPositiveDefiniteError("non-positive diagonal entry in inverse")
    return active.weights(x) / np.sqrt(b), 1.0 / b


def default_critical_sequence(m: int, alpha: float = 0.05) -> np.ndarray:
    """``C_t = Phi^{-1}(1 - alpha / (2 (m - t + 1)))`` for ``t = 1..m``."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    remaining = m - np.arange(m)
    return ndtri(1.0 - alpha / (2.0 * remaining))


def validate_critical_sequence(c, m: int) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    if c.shape != (m,):
        raise ValueError(f"critical sequence needs {m} values, got {c.size}")
    if np.any(~(c > 0)):
        raise ValueError("critical constants must be positive")
    if np.any(np.diff(c) > 0):
        raise ValueError("critical constants must be non-increasing")
    return c


def read_critical_sequence(path: Union[str, os.PathLike], m: int) -> np.ndarray:
    """One positive real per line, ``m`` lines, non-increasing."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    try:
        c = [float(ln) for ln in lines]
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
    return validate_critical_sequence(c, m)


def _abs_residual(w, b):
    return np.abs(w) / np.sqrt(b)


def mrd_step_down(
    x, sigma: Union[np.ndarray, CovarianceFamily], c: Optional[np.ndarray] = None, alpha: float = 0.05
) -> tuple[np.ndarray, StepTrace]:
    """Run MRD; the trace records ``|U|`` for each stage's chosen hypothesis.

    When ``c`` is omitted, :func:`default_critical_sequence` at ``alpha`` is used.
    """
    x = np.asarray(x, dtype=float)
    m = x.shape[0]
    c = default_critical_sequence(m, alpha) if c is None else validate_critical_sequence(c, m)
    return run_step_down(x, make_state(x, sigma), _abs_residual, c)
