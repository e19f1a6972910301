"""Backend selection for the enumeration kernels.

The Cython module is used when it was built; setting ``BSMKIT_PURE_PYTHON=1``
forces the numpy fallback. Both expose:

``spectrum(bits, shift)``
    +-1 keystream value of one k x n string for every key (canonical order).
``parity_sums(alphas, masks, weights=None)``
    per string, sum over masks of ``w * (-1)^popcount(alpha & mask)``.
``parity_signs(alphas, masks)``
    the full +-1 matrix behind ``parity_sums``.

Strings are packed into uint64 (bit ``j*n + c`` is row j, column c), so the
packed forms need ``n * k <= 64``.
"""
from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py
if os.environ.get("BSMKIT_PURE_PYTHON") != "1":
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"


def use_backend(name: str):
    """Switch backends at runtime (``"cython"`` or ``"python"``); used by the benchmark."""
    global _impl, BACKEND
    if name == "python":
        _impl = _kernels_py
    elif name == "cython":
        from . import _kernels as compiled

        _impl = compiled
    else:
        raise ValueError(f"unknown backend {name!r}")
    BACKEND = name


def compiled_available() -> bool:
    try:
        from . import _kernels  # noqa: F401
    except ImportError:
        return False
    return True


def spectrum(bits: np.ndarray, shift: int = 0) -> np.ndarray:
    return _impl.spectrum(np.ascontiguousarray(bits, dtype=np.uint8), int(shift))


def parity_sums(alphas, masks, weights=None) -> np.ndarray:
    return _impl.parity_sums(
        np.ascontiguousarray(alphas, dtype=np.uint64),
        np.ascontiguousarray(masks, dtype=np.uint64),
        None if weights is None else np.ascontiguousarray(weights, dtype=np.int64),
    )


def parity_signs(alphas, masks) -> np.ndarray:
    return _impl.parity_signs(
        np.ascontiguousarray(alphas, dtype=np.uint64),
        np.ascontiguousarray(masks, dtype=np.uint64),
    )


def key_masks(n: int, k: int, shift: int = 0) -> np.ndarray:
    """Bit mask of the k string positions read by each key, canonical key order."""
    if n * k > 64:
        raise ValueError("packed masks need n * k <= 64")
    t = np.arange(n**k, dtype=np.int64)
    masks = np.zeros(n**k, dtype=np.uint64)
    for j in range(k):
        col = ((t // n**j) + shift) % n
        masks |= np.left_shift(np.uint64(1), (j * n + col).astype(np.uint64))
    return masks


def subkey_masks(z, n: int, m: int) -> np.ndarray:
    """Mask of the positions feeding each of the m final-key bits of one key."""
    if n * len(z) > 64:
        raise ValueError("packed masks need n * k <= 64")
    masks = np.zeros(m, dtype=np.uint64)
    for i in range(m):
        mask = 0
        for j, v in enumerate(z):
            mask |= 1 << (j * n + (v + i) % n)
        masks[i] = mask
    return masks


def all_strings(nk: int) -> np.ndarray:
    return np.arange(1 << nk, dtype=np.uint64)
