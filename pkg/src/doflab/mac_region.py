"""DoF region of a MAC whose receive dimensions carry elevated noise floors.

A receiver with ``M`` antennas hears ``K`` single-antenna users at power P and
noise whose m-th generic component has power ``P^alpha_m``. The tuple ``d`` is
achievable when, for every k, the k largest loads plus the min(k, M) smallest
floors fit in min(k, M) dimensions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .channel import complex_gaussian
from .slopes import check_power_grid, headline_slope

CONTAIN_TOL = 1e-12
ORACLE_FLOOR = 1e-6


@dataclass(frozen=True)
class MacInstance:
    d: tuple[float, ...]
    alpha: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "d", tuple(float(x) for x in self.d))
        object.__setattr__(self, "alpha", tuple(float(x) for x in self.alpha))
        if not self.d:
            raise ValueError("K must be at least 1")
        if not self.alpha:
            raise ValueError("M must be at least 1")
        if any(x < 0 for x in self.d):
            raise ValueError("DoF loads must be nonnegative")
        if any(not 0 <= a <= 1 for a in self.alpha):
            raise ValueError("noise-floor exponents must lie in [0, 1]")

    @property
    def K(self) -> int:
        return len(self.d)

    @property
    def M(self) -> int:
        return len(self.alpha)


@dataclass(frozen=True)
class MacCheck:
    contained: bool
    slack: tuple[float, ...]
    binding_k: int

    def to_dict(self) -> dict:
        return {"contained": self.contained, "binding_k": self.binding_k,
                "slack": list(self.slack)}


def subset_dof_bound(alpha: Sequence[float], size: int) -> float:
    """Asymptotic MI slope of any ``size``-user subset."""
    r = min(size, len(alpha))
    return r - sum(sorted(alpha)[:r])


def mac_region_contains(inst: MacInstance, tol: float = CONTAIN_TOL) -> MacCheck:
    d_desc = sorted(inst.d, reverse=True)
    slack = []
    for k in range(1, inst.K + 1):
        slack.append(subset_dof_bound(inst.alpha, k) - sum(d_desc[:k]))
    binding = int(np.argmin(slack)) + 1
    return MacCheck(min(slack) >= -tol, tuple(slack), binding)


def mac_region_contains_bruteforce(inst: MacInstance, tol: float = CONTAIN_TOL) -> bool:
    """Direct check of every subset constraint (exponential in K)."""
    for r in range(1, inst.K + 1):
        bound = subset_dof_bound(inst.alpha, r)
        for subset in itertools.combinations(range(inst.K), r):
            if sum(inst.d[i] for i in subset) > bound + tol:
                return False
    return True


def scaled_instance(d: Sequence[float], alpha: Sequence[float], signal_exp: float) -> MacInstance | None:
    """Rescale a stage whose users arrive at ``P^signal_exp`` rather than P.

    With P' = P^gamma the loads become d/gamma and the floors alpha/gamma;
    floors above the signal level use up their dimension, so they cap at 1.
    Returns None when gamma == 0 (only all-zero loads are then achievable).
    """
    if signal_exp <= 0:
        return None
    return MacInstance(tuple(x / signal_exp for x in d),
                       tuple(min(a / signal_exp, 1.0) for a in alpha))


def all_masks(k: int) -> np.ndarray:
    return np.arange(1 << k, dtype=np.int64)


def mac_mi_slope_oracle(K: int, M: int, alpha: Sequence[float], p_grid: Sequence[float],
                        trials: int = 50, seed: int = 0) -> dict[tuple[int, ...], float]:
    """Numerical MI slope of ``I(X_U; Y | X_{U^c})`` for every nonempty U.

    MI is averaged over ``trials`` generic draws of the user signatures and
    noise directions; the same draws are reused across the P grid.
    """
    if not (1 <= K <= 8 and 1 <= M <= 8):
        raise ValueError("oracle supports 1 <= K, M <= 8")
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (M,):
        raise ValueError("alpha must have M entries")
    grid = check_power_grid(p_grid)
    masks = all_masks(K)
    mi = np.zeros((grid.size, 1 << K))
    for t in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), t]))
        h = complex_gaussian(rng, (M, K))
        g = complex_gaussian(rng, (M, M))
        for pi, p in enumerate(grid):
            noise = (g * p ** alpha) @ g.conj().T + ORACLE_FLOOR * np.eye(M)
            # with U^c known: I(U; Y | U^c) = log det(I + Gram[U, U]) after whitening N
            gram = _kernels.whitened_gram(noise, np.sqrt(p) * h)
            mi[pi] += _kernels.subset_gram_log2dets(gram, masks)
    mi /= trials
    out = {}
    for mask in range(1, 1 << K):
        users = tuple(i for i in range(K) if mask >> i & 1)
        out[users] = headline_slope(grid, mi[:, mask])
    return out


def oracle_agreement(K: int, M: int, alpha: Sequence[float], p_grid: Sequence[float],
                     trials: int = 50, seed: int = 0) -> dict[tuple[int, ...], tuple[float, float]]:
    """Map each subset to ``(numerical slope, predicted slope)``."""
    slopes = mac_mi_slope_oracle(K, M, alpha, p_grid, trials, seed)
    return {u: (s, subset_dof_bound(alpha, len(u))) for u, s in slopes.items()}
