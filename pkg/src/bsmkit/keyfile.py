"""Secret-key generation and the BSMK key file format.

Layout (little-endian): magic ``BSMK``, u16 version (1), u64 n, u32 k, then k
u64 key components.
"""
from __future__ import annotations

import hashlib
import os
import struct
from pathlib import Path

from .errors import FormatError, IoError, ParameterError
from .protocol import SecretKey

MAGIC = b"BSMK"
VERSION = 1
_HEADER = struct.Struct("<4sHQI")


def generate_key(n: int, k: int, seed: bytes | None = None) -> SecretKey:
    """Uniform key over Z_n^k; deterministic when ``seed`` is given."""
    if n < 1 or k < 1:
        raise ParameterError(f"n and k must be positive, got n={n}, k={k}")
    if seed is None:
        seed = os.urandom(32)
    xof = hashlib.shake_256(b"bsmkit-key-v1" + seed + struct.pack("<QI", n, k))
    # rejection sampling on 64-bit words keeps every component exactly uniform
    limit = (1 << 64) - (1 << 64) % n
    z = []
    need = 8 * k
    while len(z) < k:
        stream = xof.digest(need)
        z.clear()
        for off in range(0, need, 8):
            word = int.from_bytes(stream[off : off + 8], "little")
            if word < limit:
                z.append(word % n)
                if len(z) == k:
                    break
        need *= 2
    return SecretKey(tuple(z), n)


def save_key(key: SecretKey, path) -> None:
    data = _HEADER.pack(MAGIC, VERSION, key.n, key.k) + b"".join(struct.pack("<Q", v) for v in key.z)
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise IoError(str(exc)) from exc


def load_key(path) -> SecretKey:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise IoError(str(exc)) from exc
    if len(data) < _HEADER.size:
        raise FormatError("key file shorter than the header")
    magic, version, n, k = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    body = data[_HEADER.size :]
    if k < 1 or len(body) != 8 * k:
        raise FormatError(f"expected {8 * k} key bytes, found {len(body)}")
    z = struct.unpack(f"<{k}Q", body)
    try:
        return SecretKey(z, n)
    except ParameterError as exc:
        raise FormatError(str(exc)) from exc
