"""Finite-SNR Gaussian mutual-information evaluation of realized schemes.

Rates are in bits per complex channel use. Stage MI values are averaged over
channel trials (ergodic rates) before margins are formed; trials reuse the
same draws across the P grid so slope estimates are not swamped by fading.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from . import _kernels
from .channel import (ChannelSet, RealizedPrecoders, null_basis, realize_precoders,
                      received_columns, sample_channels, trial_seeds, complex_gaussian)
from .core import PRIVATE, SchemeSpec, avoided_receiver, validate
from .scheme_builder import build_scheme
from .slopes import check_power_grid, loglog_exponent

FEASIBILITY_TOL = 0.1
SLOPE_TOL = 0.1
INFEASIBLE_MARGIN = -0.25
FLOOR_EXPONENT_TOL = 0.05


def gaussian_mi(signal_cov, noise_cov) -> float:
    """log2 det(I + N^-1 S) via Cholesky whitening of the noise."""
    s = np.atleast_2d(np.asarray(signal_cov, dtype=np.complex128))
    n = np.atleast_2d(np.asarray(noise_cov, dtype=np.complex128))
    if s.shape != n.shape:
        raise ValueError("signal and noise covariances must have the same shape")
    try:
        chol = scipy.linalg.cholesky(n, lower=True)
    except np.linalg.LinAlgError as exc:
        raise ValueError("noise covariance is not positive definite") from exc
    w = scipy.linalg.solve_triangular(chol, s, lower=True)
    w = scipy.linalg.solve_triangular(chol, w.conj().T, lower=True).conj().T
    w = 0.5 * (w + w.conj().T)
    return _kernels.log2det(np.eye(s.shape[0]) + w)


@dataclass(frozen=True)
class SubsetMargin:
    streams: tuple[int, ...]
    mi_bits: float
    target_bits: float
    dof_margin: float

    def to_dict(self) -> dict:
        return {"streams": list(self.streams), "mi_bits": self.mi_bits,
                "target_bits": self.target_bits, "dof_margin": self.dof_margin}


@dataclass(frozen=True)
class StageMargin:
    receiver: int
    stage: int
    subsets: tuple[SubsetMargin, ...]

    @property
    def min_margin(self) -> float:
        return min((s.dof_margin for s in self.subsets), default=math.inf)

    def feasible(self, tol: float = FEASIBILITY_TOL) -> bool:
        return self.min_margin >= -tol

    def credit(self, accept: bool | None = None) -> float:
        """Fraction of the stage targets credited as achieved.

        An accepted stage (by default: one within tolerance) earns full credit;
        otherwise every load is scaled by the worst MI/target ratio, the largest
        factor that keeps the stage inside its MAC region.
        """
        if accept is None:
            accept = self.feasible()
        if accept:
            return 1.0
        ratios = [min(max(s.mi_bits / s.target_bits, 0.0), 1.0)
                  for s in self.subsets if s.target_bits > 0]
        return min(ratios, default=1.0)

    def to_dict(self) -> dict:
        return {"receiver": self.receiver, "stage": self.stage, "min_margin": self.min_margin,
                "subsets": [s.to_dict() for s in self.subsets]}


def _subset_members(decoded: Sequence[int], mask: int) -> tuple[int, ...]:
    return tuple(s for b, s in enumerate(decoded) if mask >> b & 1)


def _complement_basis(cols: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of span(cols)."""
    n_rx, k = cols.shape
    if k > n_rx:
        raise ValueError(f"cannot zero-force {k} streams with {n_rx} receive dimensions")
    norms = np.linalg.norm(cols, axis=0)
    unit = cols / np.where(norms > 0, norms, 1.0)
    return null_basis(unit.conj().T, n_rx - k)


def stage_mutual_info(scheme: SchemeSpec, channels: ChannelSet, precoders: RealizedPrecoders,
                      project: bool = True, power_offsets=None) -> list[np.ndarray]:
    """MI(S; Y | D \\ S) in bits for every subset mask S of each stage's decode set D.

    Entry 0 of each array (the empty set) is 0. With ``project=False`` the
    zero-forced streams are left in the noise instead of being projected out.
    """
    out = []
    for plan in scheme.plans:
        cols = received_columns(scheme, channels, precoders, plan.receiver, power_offsets)
        for stage in plan.stages:
            noise_ids = list(stage.treat_as_noise)
            if stage.zero_force and project:
                q = _complement_basis(cols[:, list(stage.zero_force)])
                proj = q.conj().T @ cols
            else:
                proj = cols
                if stage.zero_force:
                    noise_ids += list(stage.zero_force)
            dims = proj.shape[0]
            nz = proj[:, noise_ids]
            noise = np.eye(dims, dtype=np.complex128) + nz @ nz.conj().T
            k = len(stage.decode_jointly)
            if dims == 0:
                out.append(np.zeros(1 << k))
                continue
            gram = _kernels.whitened_gram(noise, proj[:, list(stage.decode_jointly)])
            out.append(_kernels.subset_gram_log2dets(gram, np.arange(1 << k, dtype=np.int64)))
    return out


def margins_from_mi(scheme: SchemeSpec, stage_mi: Sequence[np.ndarray], power: float) -> list[StageMargin]:
    logp = math.log2(power)
    margins = []
    i = 0
    for plan in scheme.plans:
        for idx, stage in enumerate(plan.stages):
            mi = stage_mi[i]
            i += 1
            subsets = []
            for mask in range(1, len(mi)):
                members = _subset_members(stage.decode_jointly, mask)
                target = sum(scheme.streams[s].dof_load for s in members) * logp
                subsets.append(SubsetMargin(members, float(mi[mask]), target,
                                            (float(mi[mask]) - target) / logp))
            margins.append(StageMargin(plan.receiver, idx, tuple(subsets)))
    return margins


def stage_margins(scheme: SchemeSpec, channels: ChannelSet, precoders: RealizedPrecoders,
                  power: float | None = None) -> list[StageMargin]:
    """Per-stage decoding margins for one realization."""
    if power is not None:
        channels = channels.at_power(power)
    return margins_from_mi(scheme, stage_mutual_info(scheme, channels, precoders), channels.power)


def certified_rates(scheme: SchemeSpec, margins: Sequence[StageMargin], power: float,
                    accept: Sequence[bool] | None = None) -> tuple[float, float]:
    """Per-user rate: each stream's target scaled by the smallest credit among
    the stages that decode it.

    ``accept`` overrides the per-stage full-credit decision (one flag per
    stage, in plan order); by default each stage decides from its own margins.
    """
    logp = math.log2(power)
    credit = [1.0] * len(scheme.streams)
    i = 0
    for plan in scheme.plans:
        for stage in plan.stages:
            c = margins[i].credit(None if accept is None else accept[i])
            i += 1
            for s in stage.decode_jointly:
                credit[s] = min(credit[s], c)
    rates = [0.0, 0.0]
    for s, spec in enumerate(scheme.streams):
        rates[spec.owner - 1] += spec.dof_load * logp * credit[s]
    return rates[0], rates[1]


@dataclass
class SlopeReport:
    config: tuple[int, int, int, int]
    csit: dict
    case: str
    p_grid: list[float]
    rate_user1: list[float]
    rate_user2: list[float]
    min_margin: list[float]
    slopes_user1: list[float]
    slopes_user2: list[float]
    predicted: tuple[float, float]
    trials: int
    seed: int
    stage_margins: list[dict] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)

    @property
    def slope(self) -> tuple[float, float]:
        return (self.slopes_user1[-1], self.slopes_user2[-1])

    def slope_errors(self) -> tuple[float, float]:
        return tuple(abs(s - d) for s, d in zip(self.slope, self.predicted))

    def passed(self, tol: float = SLOPE_TOL) -> bool:
        return "scheme-infeasible" not in self.flags and max(self.slope_errors()) <= tol

    def to_dict(self) -> dict:
        return {
            "config": dict(zip(("m1", "m2", "n1", "n2"), self.config)),
            "csit": self.csit,
            "case": self.case,
            "p_grid": self.p_grid,
            "rate_user1": self.rate_user1,
            "rate_user2": self.rate_user2,
            "min_margin": self.min_margin,
            "slopes_user1": self.slopes_user1,
            "slopes_user2": self.slopes_user2,
            "slope": list(self.slope),
            "predicted": list(self.predicted),
            "trials": self.trials,
            "seed": self.seed,
            "flags": self.flags,
            "stage_margins": self.stage_margins,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["P", "rate_user1", "rate_user2", "min_margin"])
        for row in zip(self.p_grid, self.rate_user1, self.rate_user2, self.min_margin):
            w.writerow([f"{v:.6g}" for v in row])
        return buf.getvalue()


def _trial_stage_mi(scheme: SchemeSpec, seed: int, trial: int, grid: np.ndarray) -> list[list[np.ndarray]]:
    chan_seed, prec_seed = trial_seeds(seed, trial)
    base = sample_channels(scheme.config, scheme.csit, grid[0], chan_seed)
    precoders = realize_precoders(scheme, base, prec_seed)
    return [stage_mutual_info(scheme, base.at_power(p), precoders) for p in grid]


def averaged_stage_mi(scheme: SchemeSpec, p_grid, trials: int, seed: int,
                      workers: int = 1) -> list[list[np.ndarray]]:
    """Trial-averaged stage MI per P. Summation runs in trial-index order, so
    the result does not depend on ``workers``."""
    grid = check_power_grid(p_grid, 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            per_trial = list(ex.map(lambda t: _trial_stage_mi(scheme, seed, t, grid), range(trials)))
    else:
        per_trial = [_trial_stage_mi(scheme, seed, t, grid) for t in range(trials)]
    total = [[arr.copy() for arr in per_p] for per_p in per_trial[0]]
    for res in per_trial[1:]:
        for pi, per_p in enumerate(res):
            for si, arr in enumerate(per_p):
                total[pi][si] += arr
    return [[arr / trials for arr in per_p] for per_p in total]


def _pair_slopes(scheme: SchemeSpec, grid, per_p) -> tuple[list[float], list[float]]:
    """Finite-difference slopes where both ends of each pair use the full-credit
    decisions made at the pair's larger P.

    Mixing decisions across a pair would turn a stage crossing the tolerance
    threshold into a spurious rate step of order tol * log2 P.
    """
    s1, s2 = [], []
    for k in range(1, len(grid)):
        accept = [m.feasible() for m in per_p[k]]
        lo = certified_rates(scheme, per_p[k - 1], float(grid[k - 1]), accept)
        hi = certified_rates(scheme, per_p[k], float(grid[k]), accept)
        dl = math.log2(grid[k]) - math.log2(grid[k - 1])
        s1.append((hi[0] - lo[0]) / dl)
        s2.append((hi[1] - lo[1]) / dl)
    return s1, s2


def estimate_dof_slopes(config, csit=None, p_grid=(1e6, 1e8, 1e10), trials: int = 50,
                        seed: int = 0, workers: int = 1, scheme: SchemeSpec | None = None) -> SlopeReport:
    cfg, csit = validate(config, csit)
    grid = check_power_grid(p_grid, 3)
    if grid[-1] < 1e8:
        raise ValueError("largest P must be at least 1e8")
    if trials < 10:
        raise ValueError("trials must be at least 10")
    if scheme is None:
        scheme = build_scheme(cfg, csit)
    avg = averaged_stage_mi(scheme, grid, trials, seed, workers)
    per_p = [margins_from_mi(scheme, stage_mi, float(p)) for p, stage_mi in zip(grid, avg)]
    r1, r2, mins = [], [], []
    for p, margins in zip(grid, per_p):
        a, b = certified_rates(scheme, margins, float(p))
        r1.append(a)
        r2.append(b)
        mins.append(min((m.min_margin for m in margins), default=math.inf))
    s1, s2 = _pair_slopes(scheme, grid, per_p)
    report = SlopeReport(
        config=cfg.as_tuple(),
        csit={"beta12": csit.beta12, "beta21": csit.beta21, "beta11": csit.beta11, "beta22": csit.beta22},
        case=scheme.case.value,
        p_grid=[float(p) for p in grid],
        rate_user1=r1, rate_user2=r2, min_margin=mins,
        slopes_user1=s1, slopes_user2=s2,
        predicted=(scheme.predicted.d1, scheme.predicted.d2),
        trials=trials, seed=seed,
        stage_margins=[m.to_dict() for m in per_p[-1]],
    )
    if mins[-1] < INFEASIBLE_MARGIN:
        report.flags.append("scheme-infeasible")
    elif max(report.slope_errors()) > SLOPE_TOL:
        report.flags.append("slope-mismatch: larger P may be needed")
    return report


@dataclass(frozen=True)
class FloorProbe:
    owner: int
    group: str
    receiver: int
    exponent: float
    powers: tuple[float, ...]

    @property
    def key(self) -> str:
        return f"tx{self.owner}:{self.group}->rx{self.receiver}"

    def to_dict(self) -> dict:
        return {"owner": self.owner, "group": self.group, "receiver": self.receiver,
                "exponent": self.exponent, "powers": list(self.powers)}


def interference_floor_probe(scheme: SchemeSpec, p_grid=(1e4, 1e6, 1e8, 1e10), trials: int = 50,
                             seed: int = 0, inflate: float = 0.0) -> list[FloorProbe]:
    """Fit the P-exponent of the interference each private group leaks into
    the receiver it avoids. ``inflate`` raises every private stream's power
    exponent (negative-control hook)."""
    grid = check_power_grid(p_grid)
    groups: dict = {}
    for idx, s in enumerate(scheme.streams):
        if s.msg_class == PRIVATE:
            groups.setdefault((s.owner, s.group), []).append(idx)
    if not groups:
        raise ValueError("scheme has no private streams")
    offsets = [inflate if s.msg_class == PRIVATE else 0.0 for s in scheme.streams]
    totals = {key: np.zeros(grid.size) for key in groups}
    for t in range(trials):
        chan_seed, prec_seed = trial_seeds(seed, t)
        base = sample_channels(scheme.config, scheme.csit, grid[0], chan_seed)
        precoders = realize_precoders(scheme, base, prec_seed)
        for pi, p in enumerate(grid):
            chans = base.at_power(p)
            cache = {}
            for (owner, group), ids in groups.items():
                rx = avoided_receiver(scheme.streams[ids[0]].precoder)
                if rx not in cache:
                    cache[rx] = received_columns(scheme, chans, precoders, rx, offsets)
                totals[(owner, group)][pi] += float(np.sum(np.abs(cache[rx][:, ids]) ** 2))
    probes = []
    for (owner, group), ids in groups.items():
        powers = totals[(owner, group)] / trials
        rx = avoided_receiver(scheme.streams[ids[0]].precoder)
        probes.append(FloorProbe(owner, group, rx, loglog_exponent(grid, powers), tuple(powers)))
    return probes


def single_user_mimo_rates(m: int, n: int, p_grid, trials: int = 50, seed: int = 0) -> np.ndarray:
    """Ergodic log2 det(I + P/m H H^H) on the grid; calibration for slope fitting."""
    grid = check_power_grid(p_grid)
    rates = np.zeros(grid.size)
    for t in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), t]))
        h = complex_gaussian(rng, (n, m))
        for pi, p in enumerate(grid):
            rates[pi] += gaussian_mi(p / m * h @ h.conj().T, np.eye(n))
    return rates / trials
