"""Hot log-determinant kernels.

After whitening the noise, every subset mutual information is
``log2 det(I + Gram[S, S])`` for the Gram matrix ``W^H W`` of the whitened
signatures. The simulation evaluates this for every subset of every stage,
trial and power level, so the loop is compiled with numba when it is
available. Set ``DOF_LAB_NUMBA=0`` to force the pure-numpy path.
"""

from __future__ import annotations

import logging
import math
import os

import numpy as np
import scipy.linalg

logger = logging.getLogger(__name__)

_LN2 = math.log(2.0)


def _env_enabled() -> bool:
    return os.environ.get("DOF_LAB_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")


try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None
    HAVE_NUMBA = False
    logger.warning("numba not importable; using the numpy kernels")

USE_NUMBA = HAVE_NUMBA and _env_enabled()


class NotPositiveDefinite(np.linalg.LinAlgError):
    pass


# -- numpy reference path ---------------------------------------------------

def subset_log2dets_numpy(noise: np.ndarray, cols: np.ndarray, masks: np.ndarray) -> np.ndarray:
    """log2 det(noise + cols[:, S] cols[:, S]^H) for each bitmask S in ``masks``."""
    noise = np.asarray(noise, dtype=np.complex128)
    cols = np.asarray(cols, dtype=np.complex128)
    masks = np.asarray(masks, dtype=np.int64)
    k = cols.shape[1]
    sel = ((masks[:, None] >> np.arange(k)) & 1).astype(np.float64)
    weighted = cols[None, :, :] * sel[:, None, :]
    mats = noise[None] + weighted @ cols.conj().T[None]
    try:
        chol = np.linalg.cholesky(mats)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("matrix is not positive definite") from exc
    diag = np.abs(np.diagonal(chol, axis1=1, axis2=2))
    return 2.0 * np.log(diag).sum(axis=1) / _LN2


def subset_gram_log2dets_numpy(gram: np.ndarray, masks: np.ndarray) -> np.ndarray:
    """log2 det(I + gram[S, S]) for each bitmask S in ``masks``."""
    gram = np.asarray(gram, dtype=np.complex128)
    masks = np.asarray(masks, dtype=np.int64)
    k = gram.shape[0]
    sel = ((masks[:, None] >> np.arange(k)) & 1).astype(np.float64)
    # Zeroing unselected rows and columns leaves identity there, so the
    # determinant equals that of the principal submatrix.
    mats = np.eye(k)[None] + sel[:, :, None] * gram[None] * sel[:, None, :]
    try:
        chol = np.linalg.cholesky(mats)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("matrix is not positive definite") from exc
    diag = np.abs(np.diagonal(chol, axis1=1, axis2=2))
    return 2.0 * np.log(diag).sum(axis=1) / _LN2


def log2det_numpy(a: np.ndarray) -> float:
    try:
        chol = np.linalg.cholesky(np.asarray(a, dtype=np.complex128))
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("matrix is not positive definite") from exc
    return float(2.0 * np.log(np.abs(np.diag(chol))).sum() / _LN2)


# -- numba path ---------------------------------------------------------------

if HAVE_NUMBA:

    @numba.njit(cache=True, nogil=True)
    def _chol_log2det_inplace(a):
        # Lower Cholesky on a Hermitian matrix; returns nan if not PD.
        n = a.shape[0]
        acc = 0.0
        for j in range(n):
            s = a[j, j].real
            for k in range(j):
                v = a[j, k]
                s -= v.real * v.real + v.imag * v.imag
            if not s > 0.0:
                return np.nan
            d = math.sqrt(s)
            a[j, j] = d
            acc += math.log(d)
            for i in range(j + 1, n):
                t = a[i, j]
                for k in range(j):
                    t -= a[i, k] * np.conj(a[j, k])
                a[i, j] = t / d
        return 2.0 * acc / _LN2

    @numba.njit(cache=True, nogil=True)
    def _subset_log2dets_jit(noise, cols, masks):
        n = noise.shape[0]
        k = cols.shape[1]
        out = np.empty(masks.shape[0])
        work = np.empty((n, n), dtype=np.complex128)
        for m in range(masks.shape[0]):
            for i in range(n):
                for j in range(i + 1):
                    work[i, j] = noise[i, j]
            bits = masks[m]
            for c in range(k):
                if (bits >> c) & 1:
                    for i in range(n):
                        ci = cols[i, c]
                        for j in range(i + 1):
                            work[i, j] += ci * np.conj(cols[j, c])
            out[m] = _chol_log2det_inplace(work)
        return out

    @numba.njit(cache=True, nogil=True)
    def _subset_gram_log2dets_jit(gram, masks):
        k = gram.shape[0]
        out = np.empty(masks.shape[0])
        idx = np.empty(k, dtype=np.int64)
        work = np.empty((k, k), dtype=np.complex128)
        for m in range(masks.shape[0]):
            bits = masks[m]
            r = 0
            for c in range(k):
                if (bits >> c) & 1:
                    idx[r] = c
                    r += 1
            if r == 0:
                out[m] = 0.0
                continue
            sub = work[:r, :r]
            for i in range(r):
                for j in range(i + 1):
                    sub[i, j] = gram[idx[i], idx[j]]
                sub[i, i] += 1.0
            out[m] = _chol_log2det_inplace(sub)
        return out

    def subset_gram_log2dets_numba(gram: np.ndarray, masks: np.ndarray) -> np.ndarray:
        out = _subset_gram_log2dets_jit(np.ascontiguousarray(gram, dtype=np.complex128),
                                        np.ascontiguousarray(masks, dtype=np.int64))
        if np.isnan(out).any():
            raise NotPositiveDefinite("matrix is not positive definite")
        return out

    def subset_log2dets_numba(noise: np.ndarray, cols: np.ndarray, masks: np.ndarray) -> np.ndarray:
        out = _subset_log2dets_jit(np.ascontiguousarray(noise, dtype=np.complex128),
                                   np.ascontiguousarray(cols, dtype=np.complex128),
                                   np.ascontiguousarray(masks, dtype=np.int64))
        if np.isnan(out).any():
            raise NotPositiveDefinite("matrix is not positive definite")
        return out

    def log2det_numba(a: np.ndarray) -> float:
        work = np.array(a, dtype=np.complex128, order="C")
        value = _chol_log2det_inplace(work)
        if math.isnan(value):
            raise NotPositiveDefinite("matrix is not positive definite")
        return value

else:  # pragma: no cover
    subset_log2dets_numba = subset_log2dets_numpy
    subset_gram_log2dets_numba = subset_gram_log2dets_numpy
    log2det_numba = log2det_numpy


def subset_log2dets(noise, cols, masks) -> np.ndarray:
    if USE_NUMBA:
        return subset_log2dets_numba(noise, cols, masks)
    return subset_log2dets_numpy(noise, cols, masks)


def subset_gram_log2dets(gram, masks) -> np.ndarray:
    if USE_NUMBA:
        return subset_gram_log2dets_numba(gram, masks)
    return subset_gram_log2dets_numpy(gram, masks)


def whitened_gram(noise, cols) -> np.ndarray:
    """``W^H W`` with ``W = L^-1 cols`` and ``noise = L L^H``."""
    try:
        chol = np.linalg.cholesky(np.asarray(noise, dtype=np.complex128))
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("noise covariance is not positive definite") from exc
    w = scipy.linalg.solve_triangular(chol, np.asarray(cols, dtype=np.complex128), lower=True)
    gram = w.conj().T @ w
    return 0.5 * (gram + gram.conj().T)


def log2det(a) -> float:
    if USE_NUMBA:
        return log2det_numba(a)
    return log2det_numpy(a)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
