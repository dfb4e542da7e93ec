"""Hodrick-Prescott trend/cycle decomposition."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solveh_banded

from .errors import TooShort

__all__ = ["HpDecomposition", "hp_filter", "hp_banded_system"]


@dataclass(frozen=True)
class HpDecomposition:
    trend: np.ndarray
    cycle: np.ndarray
    lamb: float


def hp_banded_system(n: int, lamb: float) -> np.ndarray:
    """Upper banded storage of ``I + lamb D'D`` (D = second differences).

    Row 2 holds the diagonal, rows 1 and 0 the first and second
    super-diagonals, as expected by :func:`scipy.linalg.solveh_banded`.
    """
    ab = np.zeros((3, n))
    diag = np.full(n, 6.0)
    diag[[0, -1]] = 1.0
    diag[[1, -2]] = 5.0
    off1 = np.full(n - 1, -4.0)
    off1[[0, -1]] = -2.0
    ab[2] = 1.0 + lamb * diag
    ab[1, 1:] = lamb * off1
    ab[0, 2:] = lamb
    return ab


def hp_filter(series, lamb: float = 1600.0) -> HpDecomposition:
    """Trend minimising ``sum (y - tau)^2 + lamb * sum (second diff tau)^2``."""
    y = np.asarray(series, dtype=float)
    if y.ndim != 1:
        raise ValueError("hp_filter takes a single column")
    if y.shape[0] < 4:
        raise TooShort(f"need at least 4 observations, got {y.shape[0]}")
    if not np.all(np.isfinite(y)):
        raise ValueError("series contains non-finite values")
    if not lamb > 0:
        raise ValueError("lambda must be positive")
    trend = solveh_banded(hp_banded_system(y.shape[0], lamb), y)
    return HpDecomposition(trend, y - trend, float(lamb))
