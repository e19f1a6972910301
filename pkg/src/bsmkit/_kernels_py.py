"""Numpy fallback for the compiled kernels in ``_kernels.pyx``."""
from __future__ import annotations

import numpy as np

# cap on (strings x masks) elements materialized per chunk
_CHUNK_ELEMS = 1 << 22


def spectrum(bits: np.ndarray, shift: int) -> np.ndarray:
    k, n = bits.shape
    K = n**k
    t = np.arange(K, dtype=np.int64)
    parity = np.zeros(K, dtype=np.uint8)
    for j in range(k):
        digit = (t // n**j) % n
        parity ^= bits[j, (digit + shift) % n]
    return (1 - 2 * parity.astype(np.int8)).astype(np.int8)


def _chunks(na: int, nm: int):
    step = max(1, _CHUNK_ELEMS // max(nm, 1))
    for start in range(0, na, step):
        yield start, min(na, start + step)


def parity_sums(alphas: np.ndarray, masks: np.ndarray, weights=None) -> np.ndarray:
    alphas = np.asarray(alphas, dtype=np.uint64)
    masks = np.asarray(masks, dtype=np.uint64)
    if weights is not None:
        weights = np.asarray(weights, dtype=np.int64)
        if weights.shape[0] != masks.shape[0]:
            raise ValueError("weights and masks differ in length")
    out = np.empty(alphas.shape[0], dtype=np.int64)
    for lo, hi in _chunks(alphas.shape[0], masks.shape[0]):
        odd = np.bitwise_count(alphas[lo:hi, None] & masks[None, :]) & 1
        signs = 1 - 2 * odd.astype(np.int64)
        out[lo:hi] = signs.sum(axis=1) if weights is None else signs @ weights
    return out


def parity_signs(alphas: np.ndarray, masks: np.ndarray) -> np.ndarray:
    alphas = np.asarray(alphas, dtype=np.uint64)
    masks = np.asarray(masks, dtype=np.uint64)
    odd = np.bitwise_count(alphas[:, None] & masks[None, :]) & 1
    return (1 - 2 * odd.astype(np.int8)).astype(np.int8)
