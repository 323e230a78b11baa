"""DoF slope estimation from rates sampled on an SNR grid."""

from __future__ import annotations

from typing import Sequence

import numpy as np


def check_power_grid(p_grid: Sequence[float], min_points: int = 2) -> np.ndarray:
    grid = np.asarray(p_grid, dtype=float)
    if grid.ndim != 1 or grid.size < min_points:
        raise ValueError(f"P grid needs at least {min_points} points")
    if np.any(grid <= 1):
        raise ValueError("P grid values must exceed 1")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("P grid must be strictly increasing")
    return grid


def consecutive_slopes(p_grid: Sequence[float], rates: Sequence[float]) -> list[float]:
    """(R_k - R_{k-1}) / (log2 P_k - log2 P_{k-1}) for each consecutive pair."""
    logp = np.log2(np.asarray(p_grid, dtype=float))
    r = np.asarray(rates, dtype=float)
    return list(np.diff(r) / np.diff(logp))


def headline_slope(p_grid: Sequence[float], rates: Sequence[float]) -> float:
    """Slope between the two largest grid points; O(1) offsets cancel exactly."""
    return float(consecutive_slopes(p_grid, rates)[-1])


def loglog_exponent(p_grid: Sequence[float], powers: Sequence[float]) -> float:
    """Least-squares exponent e in ``power ~ P^e``."""
    x = np.log(np.asarray(p_grid, dtype=float))
    y = np.log(np.asarray(powers, dtype=float))
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)
