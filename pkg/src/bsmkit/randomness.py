"""Generation, simulated broadcast, persistence and statistics of the public string."""
from __future__ import annotations

import enum
import hashlib
import os
import struct
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import FormatError, IoError, ParameterError
from .protocol import Params, RandomString

MAGIC = b"BSMA"
VERSION = 1
_HEADER = struct.Struct("<4sHQI")


class GeneratorKind(enum.Enum):
    DETERMINISTIC_TEST = "deterministic-test"
    CRYPTOGRAPHIC = "cryptographic"


@dataclass(frozen=True)
class StreamConfig:
    seed: bytes
    block_size: int = 4096
    generator_kind: GeneratorKind = GeneratorKind.DETERMINISTIC_TEST

    def __post_init__(self):
        if not isinstance(self.seed, (bytes, bytearray)) or len(self.seed) != 32:
            raise ParameterError("seed must be exactly 32 bytes")
        object.__setattr__(self, "seed", bytes(self.seed))
        if self.block_size < 1:
            raise ParameterError("block_size must be positive")
        object.__setattr__(self, "generator_kind", GeneratorKind(self.generator_kind))

    @classmethod
    def fresh(cls, block_size: int = 4096) -> "StreamConfig":
        return cls(os.urandom(32), block_size, GeneratorKind.CRYPTOGRAPHIC)


def seed_from_text(text: str | int) -> bytes:
    """Stretch a short human seed (``--seed 7``) into the 32-byte form."""
    return hashlib.sha256(b"bsmkit-seed:" + str(text).encode()).digest()


def _shake_bytes(seed: bytes, n: int, k: int, nbytes: int) -> bytes:
    h = hashlib.shake_256(b"bsmkit-alpha-v1" + seed + struct.pack("<QI", n, k))
    return h.digest(nbytes)


def _blake_ctr_bytes(seed: bytes, n: int, k: int, nbytes: int) -> bytes:
    out = bytearray()
    nonce = struct.pack("<QI", n, k)
    counter = 0
    while len(out) < nbytes:
        out += hashlib.blake2b(nonce + counter.to_bytes(8, "little"), key=seed, digest_size=64).digest()
        counter += 1
    return bytes(out[:nbytes])


def generate(cfg: StreamConfig, p: Params) -> RandomString:
    nbytes = (p.nk + 7) // 8
    if cfg.generator_kind is GeneratorKind.DETERMINISTIC_TEST:
        raw = _shake_bytes(cfg.seed, p.n, p.k, nbytes)
    else:
        raw = _blake_ctr_bytes(cfg.seed, p.n, p.k, nbytes)
    flat = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[: p.nk]
    return RandomString.from_flat(flat, p.n, p.k)


def broadcast(alpha: RandomString, cfg: StreamConfig) -> Iterator[np.ndarray]:
    """Yield the string in row-major order, ``cfg.block_size`` bits per block."""
    flat = alpha.flat()
    for start in range(0, flat.size, cfg.block_size):
        block = flat[start : start + cfg.block_size]
        yield block


def save(alpha: RandomString, path) -> None:
    payload = np.packbits(alpha.flat(), bitorder="little").tobytes()
    try:
        Path(path).write_bytes(_HEADER.pack(MAGIC, VERSION, alpha.n, alpha.k) + payload)
    except OSError as exc:
        raise IoError(str(exc)) from exc


def load(path) -> RandomString:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise IoError(str(exc)) from exc
    return decode(data)


def decode(data: bytes) -> RandomString:
    if len(data) < _HEADER.size:
        raise FormatError("file shorter than the header")
    magic, version, n, k = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    if n < 1 or k < 1:
        raise FormatError(f"invalid dimensions n={n}, k={k}")
    nbits = n * k
    payload = data[_HEADER.size :]
    if len(payload) != (nbits + 7) // 8:
        raise FormatError(f"payload is {len(payload)} bytes, expected {(nbits + 7) // 8}")
    flat = np.unpackbits(np.frombuffer(payload, dtype=np.uint8), bitorder="little")
    if flat[nbits:].any():
        raise FormatError("non-zero padding bits")
    return RandomString.from_flat(flat[:nbits], n, k)


@dataclass(frozen=True)
class RowStats:
    per_row_ones_fraction: tuple[Fraction, ...]
    global_ones_fraction: Fraction
    ones_count: int


def row_stats(alpha: RandomString) -> RowStats:
    counts = alpha.bits.sum(axis=1, dtype=np.int64).tolist()
    total = sum(counts)
    return RowStats(
        tuple(Fraction(c, alpha.n) for c in counts),
        Fraction(total, alpha.n * alpha.k),
        total,
    )
