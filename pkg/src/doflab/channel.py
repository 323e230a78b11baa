"""Partial-CSIT channel realizations and concrete precoders.

Each true channel is ``H_ji = Ĥ_ji + P^(-beta_ji/2) H̃_ji`` with Ĥ and H̃
drawn i.i.d. CN(0, 1). The draws do not depend on P, so one realization can be
re-evaluated across an SNR grid (common random numbers).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .core import GENERIC, NULL_12, NULL_21, AntennaConfig, CsitProfile, SchemeSpec, validate

LINKS = ((1, 1), (1, 2), (2, 1), (2, 2))
RANK_RTOL = 1e-10


class KernelDimensionError(ValueError):
    pass


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """i.i.d. circularly-symmetric CN(0, 1) entries."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def trial_seeds(seed: int, trial: int) -> tuple[np.random.SeedSequence, np.random.SeedSequence]:
    """Independent (channel, precoder) seed streams for one trial."""
    ss = np.random.SeedSequence([int(seed), int(trial)])
    chan, prec = ss.spawn(2)
    return chan, prec


@dataclass(frozen=True)
class ChannelSet:
    config: AntennaConfig
    csit: CsitProfile
    power: float
    estimate: dict
    error: dict

    def true(self, j: int, i: int) -> np.ndarray:
        scale = self.power ** (-self.csit.beta(j, i) / 2.0)
        return self.estimate[(j, i)] + scale * self.error[(j, i)]

    def at_power(self, power: float) -> "ChannelSet":
        if not power > 1:
            raise ValueError("P must exceed 1")
        return ChannelSet(self.config, self.csit, float(power), self.estimate, self.error)


def sample_channels(config, csit, power: float, seed) -> ChannelSet:
    """Draw Ĥ_ji and H̃_ji for all four links; deterministic in ``seed``."""
    cfg, csit = validate(config, csit)
    if not power > 1:
        raise ValueError("P must exceed 1")
    rng = np.random.default_rng(seed)
    estimate, error = {}, {}
    for j, i in LINKS:
        estimate[(j, i)] = complex_gaussian(rng, (cfg.rx(j), cfg.tx(i)))
    for j, i in LINKS:
        error[(j, i)] = complex_gaussian(rng, (cfg.rx(j), cfg.tx(i)))
    return ChannelSet(cfg, csit, float(power), estimate, error)


def null_basis(matrix: np.ndarray, k: int) -> np.ndarray:
    """``k`` orthonormal columns spanning part of the kernel of ``matrix``.

    Uses a column-pivoted QR of ``matrix^H``: the trailing columns of the full
    Q are orthogonal to the row space. Diagonal entries of R below
    ``RANK_RTOL * |R_00|`` count as zero.
    """
    a = np.atleast_2d(np.asarray(matrix, dtype=np.complex128))
    n_cols = a.shape[1]
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return np.zeros((n_cols, 0), dtype=np.complex128)
    q, r, _ = scipy.linalg.qr(a.conj().T, pivoting=True, mode="full")
    diag = np.abs(np.diag(r))
    rank = int(np.sum(diag > RANK_RTOL * diag[0])) if diag.size and diag[0] > 0 else 0
    kernel_dim = n_cols - rank
    if k > kernel_dim:
        raise KernelDimensionError(f"requested {k} kernel vectors but kernel dimension is {kernel_dim}")
    return q[:, rank:rank + k]


def random_unit_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    while True:
        v = complex_gaussian(rng, n)
        norm = np.linalg.norm(v)
        if norm >= 1e-6:
            return v / norm


def random_unit_frame(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    """k Haar-distributed orthonormal columns in C^n (k <= n).

    Each column is marginally an isotropic unit vector; orthogonality avoids
    the O(1) Gram-determinant loss of independently drawn directions.
    """
    if k > n:
        raise ValueError(f"cannot draw {k} orthonormal vectors in dimension {n}")
    if k == 0:
        return np.zeros((n, 0), dtype=np.complex128)
    q, r = np.linalg.qr(complex_gaussian(rng, (n, k)))
    d = np.diag(r)
    return q * (d / np.where(np.abs(d) > 0, np.abs(d), 1.0))


@dataclass(frozen=True)
class RealizedPrecoders:
    # vectors[s] is the unit-norm precoder of stream s (length M_owner).
    vectors: tuple[np.ndarray, ...]
    # scale[s] is the O(1) constant c: 1/sqrt(2 * size of the stream's power class).
    scale: tuple[float, ...]

    def for_owner(self, scheme: SchemeSpec, owner: int) -> list[np.ndarray]:
        return [self.vectors[i] for i in scheme.owned_by(owner)]


def power_class_scales(scheme: SchemeSpec) -> tuple[float, ...]:
    sizes: dict = {}
    for s in scheme.streams:
        sizes[(s.owner, s.group)] = sizes.get((s.owner, s.group), 0) + 1
    return tuple(1.0 / np.sqrt(2.0 * sizes[(s.owner, s.group)]) for s in scheme.streams)


def realize_precoders(scheme: SchemeSpec, channels: ChannelSet, seed) -> RealizedPrecoders:
    """Generic streams of each transmitter get a random orthonormal frame
    (independent isotropic vectors if they outnumber the antennas); null-space
    streams get an orthonormal basis of the estimated cross channel's kernel,
    assigned in stream order."""
    rng = np.random.default_rng(seed)
    cfg = scheme.config
    pools = {}
    for kind, link in ((NULL_12, (1, 2)), (NULL_21, (2, 1))):
        count = sum(s.precoder == kind for s in scheme.streams)
        pools[kind] = iter(null_basis(channels.estimate[link], count).T)
    for owner in (1, 2):
        count = sum(s.precoder == GENERIC and s.owner == owner for s in scheme.streams)
        m = cfg.tx(owner)
        if count <= m:
            pools[owner] = iter(random_unit_frame(rng, m, count).T)
        else:
            pools[owner] = iter([random_unit_vector(rng, m) for _ in range(count)])
    vectors = []
    for s in scheme.streams:
        key = s.owner if s.precoder == GENERIC else s.precoder
        vectors.append(np.ascontiguousarray(next(pools[key])))
    return RealizedPrecoders(tuple(vectors), power_class_scales(scheme))


def received_columns(scheme: SchemeSpec, channels: ChannelSet, precoders: RealizedPrecoders,
                     receiver: int, power_offsets: Sequence[float] | None = None) -> np.ndarray:
    """Matrix whose column s is stream s's received signature at ``receiver``:
    ``c_s * sqrt(P^gamma_s) * H_{receiver, owner} v_s``."""
    n_rx = scheme.config.rx(receiver)
    cols = np.zeros((n_rx, len(scheme.streams)), dtype=np.complex128)
    true = {i: channels.true(receiver, i) for i in (1, 2)}
    for idx, s in enumerate(scheme.streams):
        gamma = s.power_exp + (power_offsets[idx] if power_offsets is not None else 0.0)
        amp = precoders.scale[idx] * channels.power ** (gamma / 2.0)
        cols[:, idx] = amp * (true[s.owner] @ precoders.vectors[idx])
    return cols
