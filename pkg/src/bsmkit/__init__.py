"""Bounded-storage key expansion: protocol, adversary games and exact analysis."""
from .errors import BSMError
from .kernels import BACKEND
from .protocol import (
    Ciphertext,
    FinalKey,
    Message,
    Params,
    RandomString,
    SecretKey,
    decrypt,
    derive_subkey,
    encrypt,
    expand_key,
    final_key,
    key_positions,
    keystream_bit,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BSMError",
    "Ciphertext",
    "FinalKey",
    "Message",
    "Params",
    "RandomString",
    "SecretKey",
    "decrypt",
    "derive_subkey",
    "encrypt",
    "expand_key",
    "final_key",
    "key_positions",
    "keystream_bit",
]
