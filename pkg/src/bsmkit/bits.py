"""Bit <-> byte conversion. Everything on disk is LSB-first within each byte."""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import LengthMismatch


def unpack(data: bytes, nbits: int) -> np.ndarray:
    """Return the first ``nbits`` bits of ``data`` as a uint8 array."""
    if nbits > 8 * len(data):
        raise LengthMismatch(f"{nbits} bits requested from {len(data)} bytes")
    arr = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")
    return arr[:nbits].copy()


def pack(bits: Sequence[int] | np.ndarray) -> bytes:
    """Pack bits LSB-first; the last partial byte is zero-padded in its high bits."""
    arr = np.asarray(bits, dtype=np.uint8)
    return np.packbits(arr, bitorder="little").tobytes()


def parse_bitstring(text: str) -> tuple[int, ...]:
    """``"1011"`` -> ``(1, 0, 1, 1)``."""
    text = text.strip()
    if not text or set(text) - {"0", "1"}:
        raise ValueError(f"not a bit string: {text!r}")
    return tuple(int(c) for c in text)


def format_bits(bits: Iterable[int]) -> str:
    return "".join(str(int(b)) for b in bits)
