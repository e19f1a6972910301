"""Key expansion from a public random string and XOR encryption.

The secret key ``z`` is a k-tuple over Z_n. Message bit ``i`` (1-based) is
padded with the XOR of one bit per row, taken at column ``(z_j + i - 1) mod n``.
Only ``m * k`` bits of the ``k * n`` bit string are ever used, and the column
sets for different ``i`` never overlap while ``m <= n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    LengthMismatch,
    ParameterError,
    StreamTruncated,
)

DEFAULT_GAMMA = Fraction(45, 100)


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        # 0.45 should mean 45/100, not its binary expansion
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class Params:
    """Protocol dimensions.

    ``n`` bits per row, ``k`` rows, ``m`` message bits, adversary storage
    fraction ``gamma``. ``beta``, ``K`` and ``N`` are derived on access; ``N``
    is astronomically large for realistic ``n`` so use ``log2_N`` there.
    """

    n: int
    k: int
    m: int
    gamma: Fraction = DEFAULT_GAMMA

    def __post_init__(self):
        object.__setattr__(self, "gamma", _as_fraction(self.gamma))
        for name in ("n", "k", "m"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ParameterError(f"{name} must be an integer, got {value!r}")
            if value < 1:
                raise ParameterError(f"{name} must be positive, got {value}")
        if self.m > self.n:
            raise ParameterError(f"message length m={self.m} exceeds row length n={self.n}")
        if not 0 < self.gamma < 1:
            raise ParameterError(f"gamma must lie in (0, 1), got {self.gamma}")

    @property
    def nk(self) -> int:
        return self.n * self.k

    @property
    def beta(self) -> int:
        """Adversary storage budget in bits, floor(gamma * k * n)."""
        return math.floor(self.gamma * self.k * self.n)

    @property
    def K(self) -> int:
        return self.n**self.k

    @property
    def N(self) -> int:
        return 1 << (self.n * self.k)

    @property
    def log2_K(self) -> float:
        return self.k * math.log2(self.n)

    @property
    def log2_N(self) -> int:
        return self.n * self.k

    def as_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "m": self.m, "gamma": float(self.gamma)}


class RandomString:
    """The public string as a read-only k x n bit matrix.

    Row ``j`` (0-based) is the string's row j + 1; ``bits[j, c]`` is its
    bit at column ``c``. Broadcast order is row-major, so bit ``j * n + c`` of
    :meth:`to_int` is ``bits[j, c]``.
    """

    __slots__ = ("_bits",)

    def __init__(self, rows):
        arr = np.array(rows, dtype=np.uint8, copy=True)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionMismatch(f"expected a non-empty k x n bit matrix, got shape {arr.shape}")
        if arr.size and arr.max() > 1:
            raise ValueError("random string entries must be 0 or 1")
        arr.setflags(write=False)
        self._bits = arr

    @classmethod
    def from_flat(cls, flat, n: int, k: int) -> "RandomString":
        arr = np.asarray(flat, dtype=np.uint8)
        if arr.size != n * k:
            raise DimensionMismatch(f"expected {n * k} bits, got {arr.size}")
        return cls(arr.reshape(k, n))

    @classmethod
    def from_int(cls, value: int, n: int, k: int) -> "RandomString":
        if value < 0 or value >> (n * k):
            raise DimensionMismatch(f"{value} does not fit in {n * k} bits")
        raw = value.to_bytes((n * k + 7) // 8 or 1, "little")
        flat = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[: n * k]
        return cls.from_flat(flat, n, k)

    @classmethod
    def zeros(cls, n: int, k: int) -> "RandomString":
        return cls(np.zeros((k, n), dtype=np.uint8))

    @classmethod
    def ones(cls, n: int, k: int) -> "RandomString":
        return cls(np.ones((k, n), dtype=np.uint8))

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def k(self) -> int:
        return self._bits.shape[0]

    @property
    def n(self) -> int:
        return self._bits.shape[1]

    def flat(self) -> np.ndarray:
        return self._bits.reshape(-1)

    def to_int(self) -> int:
        return int.from_bytes(np.packbits(self.flat(), bitorder="little").tobytes(), "little")

    def ones_count(self) -> int:
        return int(self._bits.sum(dtype=np.int64))

    def __xor__(self, other: "RandomString") -> "RandomString":
        if self._bits.shape != other._bits.shape:
            raise DimensionMismatch("cannot XOR random strings of different shapes")
        return RandomString(self._bits ^ other._bits)

    def __eq__(self, other):
        if not isinstance(other, RandomString):
            return NotImplemented
        return self._bits.shape == other._bits.shape and bool(np.array_equal(self._bits, other._bits))

    def __hash__(self):
        return hash((self._bits.shape, self._bits.tobytes()))

    def __repr__(self):
        rows = " ".join("".join(map(str, row)) for row in self._bits.tolist())
        return f"RandomString(n={self.n}, k={self.k}, rows={rows})"


@dataclass(frozen=True)
class SecretKey:
    z: tuple[int, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "z", tuple(int(v) for v in self.z))
        if not self.z:
            raise ParameterError("secret key must have at least one component")
        if any(not 0 <= v < self.n for v in self.z):
            raise ParameterError(f"key components must lie in Z_{self.n}: {self.z}")

    @property
    def k(self) -> int:
        return len(self.z)

    def index(self) -> int:
        """Position in the canonical enumeration (mixed radix, z_1 varies fastest)."""
        t = 0
        for v in reversed(self.z):
            t = t * self.n + v
        return t

    @classmethod
    def from_index(cls, t: int, n: int, k: int) -> "SecretKey":
        if not 0 <= t < n**k:
            raise IndexOutOfRange(f"key index {t} outside [0, {n**k})")
        z = []
        for _ in range(k):
            t, r = divmod(t, n)
            z.append(r)
        return cls(tuple(z), n)

    def shifted(self, delta: int) -> "SecretKey":
        return SecretKey(tuple((v + delta) % self.n for v in self.z), self.n)


def all_keys(n: int, k: int) -> Iterator[SecretKey]:
    """Every key of Z_n^k in canonical order."""
    for t in range(n**k):
        yield SecretKey.from_index(t, n, k)


@dataclass(frozen=True)
class SubKey:
    s: tuple[int, ...]
    index_i: int


@dataclass(frozen=True)
class BitVector:
    bits: tuple[int, ...] = field(default=())

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise ValueError("bit vector entries must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    def __len__(self):
        return len(self.bits)

    def __iter__(self):
        return iter(self.bits)

    def __getitem__(self, idx):
        return self.bits[idx]


class FinalKey(BitVector):
    pass


class Message(BitVector):
    pass


class Ciphertext(BitVector):
    pass


def _check_key(z: SecretKey, p: Params):
    if z.n != p.n or z.k != p.k:
        raise DimensionMismatch(f"key over Z_{z.n}^{z.k} does not match n={p.n}, k={p.k}")


def derive_subkey(z: SecretKey, i: int, p: Params) -> SubKey:
    """Sub-key for message bit ``i`` (1-based): every component shifted by i - 1."""
    _check_key(z, p)
    if not 1 <= i <= p.m:
        raise IndexOutOfRange(f"message bit index {i} outside [1, {p.m}]")
    return SubKey(tuple((v + i - 1) % p.n for v in z.z), i)


def keystream_bit(alpha: RandomString, s: SubKey) -> int:
    if len(s.s) != alpha.k:
        raise DimensionMismatch(f"sub-key has {len(s.s)} components, string has {alpha.k} rows")
    if any(not 0 <= c < alpha.n for c in s.s):
        raise DimensionMismatch(f"sub-key {s.s} addresses columns outside [0, {alpha.n})")
    bits = alpha.bits
    out = 0
    for j, c in enumerate(s.s):
        out ^= int(bits[j, c])
    return out


def final_key(alpha: RandomString, z: SecretKey, p: Params) -> FinalKey:
    """Batch key expansion over a materialized string."""
    return FinalKey(tuple(keystream_bit(alpha, derive_subkey(z, i, p)) for i in range(1, p.m + 1)))


def key_positions(z: SecretKey, p: Params) -> frozenset[tuple[int, int]]:
    """(row, column) pairs read by the protocol; rows 1-based, columns 0-based."""
    _check_key(z, p)
    return frozenset(
        (j + 1, (v + i - 1) % p.n) for j, v in enumerate(z.z) for i in range(1, p.m + 1)
    )


AlphaSource = Union[RandomString, Iterable[Sequence[int]]]


def expand_key(alpha_stream: AlphaSource, z: SecretKey, p: Params) -> FinalKey:
    """Derive the final key while reading the broadcast once, in order.

    ``alpha_stream`` is a :class:`RandomString` or an iterable of bit blocks in
    row-major broadcast order. Only the ``m * k`` selected bits are folded into
    an ``m``-bit accumulator; everything else is dropped as it passes.
    """
    _check_key(z, p)
    if isinstance(alpha_stream, RandomString):
        if (alpha_stream.n, alpha_stream.k) != (p.n, p.k):
            raise DimensionMismatch("random string dimensions do not match params")
        alpha_stream = (alpha_stream.flat(),)

    # global stream offset of each selected bit, and the key bit it feeds
    positions = np.array(
        [j * p.n + (v + i) % p.n for j, v in enumerate(z.z) for i in range(p.m)], dtype=np.int64
    )
    targets = np.tile(np.arange(p.m, dtype=np.int64), p.k)
    order = np.argsort(positions, kind="stable")
    positions, targets = positions[order], targets[order]

    acc = np.zeros(p.m, dtype=np.uint8)
    total = p.nk
    offset = 0
    for block in alpha_stream:
        block = np.asarray(block, dtype=np.uint8).reshape(-1)
        end = offset + block.size
        if end > total:
            raise DimensionMismatch(f"stream is longer than k*n = {total} bits")
        lo, hi = np.searchsorted(positions, (offset, end))
        if hi > lo:
            np.bitwise_xor.at(acc, targets[lo:hi], block[positions[lo:hi] - offset])
        offset = end
    if offset < total:
        raise StreamTruncated(f"stream ended after {offset} of {total} bits")
    return FinalKey(tuple(int(b) for b in acc))


def _xor(a: BitVector, b: BitVector) -> tuple[int, ...]:
    if len(a) != len(b):
        raise LengthMismatch(f"length {len(a)} vs {len(b)}")
    return tuple(x ^ y for x, y in zip(a.bits, b.bits))


def encrypt(msg: Message, x: FinalKey) -> Ciphertext:
    return Ciphertext(_xor(msg, x))


def decrypt(c: Ciphertext, x: FinalKey) -> Message:
    return Message(_xor(c, x))
