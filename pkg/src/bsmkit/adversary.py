"""Two-phase adversary games against the key expansion.

Phase I: a recorder sees the whole broadcast and keeps at most ``budget``
bits. Phase II: a decoder (bit game) or distinguisher (semantic game) gets the
stored bits, the secret key and either the other final-key bits or a
ciphertext. Everything here is deterministic; randomized adversaries are
modelled by fixing their help string.

Monte Carlo trials draw (alpha, Z) from SHAKE-256 keyed by (seed, trial), so a
run can be split into arbitrary trial ranges and the per-range sums add up to
the single-run result.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels
from .errors import (
    EmptyPreimage,
    IdenticalMessages,
    IndexOutOfRange,
    LengthMismatch,
    StorageExceeded,
    TooLargeToEnumerate,
)
from .protocol import Message, Params, RandomString, SecretKey, expand_key

DEFAULT_ENUM_LIMIT = 1 << 22


# --------------------------------------------------------------------------
# Phase I


@dataclass(frozen=True)
class StoredState:
    bits: tuple[int, ...] = ()

    def __len__(self):
        return len(self.bits)


class Recorder:
    """Deterministic map from the broadcast string to at most ``declared_budget`` bits.

    Subclasses implement :meth:`record` on the flat (row-major) bit array.
    :meth:`record_batch` may be overridden with a vectorized version; it is
    only used by exhaustive enumeration.
    """

    declared_budget: int = 0

    def record(self, bits: np.ndarray) -> Sequence[int]:
        raise NotImplementedError

    def record_batch(self, flats: np.ndarray):
        return [self.record(row) for row in flats]

    def __call__(self, bits):
        return self.record(bits)


class ZeroRecorder(Recorder):
    declared_budget = 0

    def record(self, bits):
        return ()

    def record_batch(self, flats):
        return np.zeros((flats.shape[0], 0), dtype=np.uint8)


class PrefixRecorder(Recorder):
    """Keeps the first ``length`` broadcast bits."""

    def __init__(self, length: int):
        self.declared_budget = length

    def record(self, bits):
        return tuple(int(b) for b in bits[: self.declared_budget])

    def record_batch(self, flats):
        return np.ascontiguousarray(flats[:, : self.declared_budget])


class ParitySketchRecorder(Recorder):
    """Stores ``length`` parities over a fixed partition of the string.

    With ``length <= n``, output bit t is the parity of column t (the XOR of
    the t-th bit of every row). Larger sketches bucket by broadcast position
    mod ``length``.
    """

    def __init__(self, length: int, n: int, k: int):
        self.declared_budget = length
        self.n, self.k = n, k
        pos = np.arange(n * k)
        if length == 0:
            self._bucket = np.full(n * k, -1)
        elif length <= n:
            col = pos % n
            self._bucket = np.where(col < length, col, -1)
        else:
            self._bucket = pos % length

    def record(self, bits):
        return tuple(self.record_batch(np.asarray(bits, dtype=np.uint8)[None, :])[0].tolist())

    def record_batch(self, flats):
        out = np.zeros((flats.shape[0], self.declared_budget), dtype=np.uint8)
        for t in range(self.declared_budget):
            cols = self._bucket == t
            if cols.any():
                out[:, t] = np.bitwise_xor.reduce(flats[:, cols], axis=1)
        return out


class IdentityRecorder(Recorder):
    """Stores the whole string; only usable with an unsafe test-override budget."""

    def __init__(self, n: int, k: int):
        self.declared_budget = n * k

    def record(self, bits):
        return tuple(int(b) for b in bits)

    def record_batch(self, flats):
        return np.ascontiguousarray(flats)


class TableRecorder(Recorder):
    """Arbitrary fixed-length recorder given by a lookup table over all strings."""

    def __init__(self, table: np.ndarray):
        self.table = np.asarray(table, dtype=np.uint8)
        self.declared_budget = self.table.shape[1]

    @classmethod
    def random(cls, p: Params, length: int, seed: int) -> "TableRecorder":
        if p.nk > 24:
            raise TooLargeToEnumerate("table recorders need n*k <= 24")
        rng = np.random.default_rng(seed)
        return cls(rng.integers(0, 2, size=(p.N, length), dtype=np.uint8))

    def _index(self, flats):
        w = np.left_shift(np.uint64(1), np.arange(flats.shape[1], dtype=np.uint64))
        return (flats.astype(np.uint64) * w).sum(axis=1)

    def record(self, bits):
        idx = int(self._index(np.asarray(bits, dtype=np.uint8)[None, :])[0])
        return tuple(self.table[idx].tolist())

    def record_batch(self, flats):
        return self.table[self._index(flats).astype(np.int64)]


class FunctionRecorder(Recorder):
    def __init__(self, fn: Callable[[np.ndarray], Iterable[int]], declared_budget: int):
        self.fn = fn
        self.declared_budget = declared_budget

    def record(self, bits):
        return self.fn(bits)


def _collect_bits(stream) -> np.ndarray:
    if isinstance(stream, RandomString):
        return stream.flat()
    if isinstance(stream, np.ndarray):
        return stream.reshape(-1).astype(np.uint8)
    blocks = [np.asarray(b, dtype=np.uint8).reshape(-1) for b in stream]
    return np.concatenate(blocks) if blocks else np.zeros(0, dtype=np.uint8)


def _bounded(output, budget: int, declared: int | None = None) -> tuple[int, ...]:
    limit = budget if declared is None else min(budget, declared)
    taken = tuple(int(b) for b in itertools.islice(iter(output), limit + 1))
    if len(taken) > limit:
        raise StorageExceeded(f"recorder emitted more than {limit} bits (budget {budget})")
    if any(b not in (0, 1) for b in taken):
        raise ValueError("recorder output must be bits")
    return taken


def run_phase1(rec: Recorder, alpha_stream, budget: int) -> StoredState:
    """Feed the broadcast to ``rec`` and enforce the storage budget."""
    bits = _collect_bits(alpha_stream)
    bits.setflags(write=False)
    return StoredState(_bounded(rec.record(bits), budget, rec.declared_budget))


def _budget(p: Params, unsafe_test_override_budget: int | None) -> int:
    return p.beta if unsafe_test_override_budget is None else int(unsafe_test_override_budget)


# --------------------------------------------------------------------------
# Phase II adversaries


class BitDecoder:
    """Guesses X_i from (stored bits, key, the other m-1 key bits)."""

    def decode(self, eta: tuple, z: SecretKey, x_rest: tuple, i: int) -> int:
        raise NotImplementedError

    def __call__(self, eta, z, x_rest, i):
        return self.decode(eta, z, x_rest, i)


class Distinguisher:
    """Outputs a bit from (stored bits, key, ciphertext bits)."""

    def distinguish(self, zeta: tuple, z: SecretKey, c: tuple) -> int:
        raise NotImplementedError

    def __call__(self, zeta, z, c):
        return self.distinguish(zeta, z, c)


def _hash_bit(seed, *parts) -> int:
    h = hashlib.blake2b(repr((seed,) + parts).encode(), digest_size=8)
    return h.digest()[0] & 1


class ConstantDecoder(BitDecoder):
    def __init__(self, bit: int = 0):
        self.bit = bit

    def decode(self, eta, z, x_rest, i):
        return self.bit


class HashDecoder(BitDecoder):
    """A fixed but arbitrary function of its inputs ("random-guess" decoder)."""

    def __init__(self, seed=0):
        self.seed = seed

    def decode(self, eta, z, x_rest, i):
        return _hash_bit(self.seed, tuple(eta), z.z, tuple(x_rest), i)


class FullInformationDecoder(BitDecoder):
    """Recomputes X_i from a stored copy of the entire string."""

    def __init__(self, p: Params):
        self.p = p

    def decode(self, eta, z, x_rest, i):
        alpha = RandomString.from_flat(np.asarray(eta, dtype=np.uint8), self.p.n, self.p.k)
        return expand_key(alpha, z, self.p)[i - 1]


class FunctionDecoder(BitDecoder):
    def __init__(self, fn):
        self.fn = fn

    def decode(self, eta, z, x_rest, i):
        return int(self.fn(eta, z, x_rest, i))


class ConstantDistinguisher(Distinguisher):
    def __init__(self, bit: int = 0):
        self.bit = bit

    def distinguish(self, zeta, z, c):
        return self.bit


class HashDistinguisher(Distinguisher):
    def __init__(self, seed=0):
        self.seed = seed

    def distinguish(self, zeta, z, c):
        return _hash_bit(self.seed, tuple(zeta), z.z, tuple(c))


class TableDistinguisher(Distinguisher):
    """Random truth table over (stored bits, key index, ciphertext)."""

    def __init__(self, seed: int):
        self.seed = seed

    def distinguish(self, zeta, z, c):
        return _hash_bit(("table", self.seed), tuple(zeta), z.index(), tuple(c))


class FullInformationDistinguisher(Distinguisher):
    """Outputs 1 iff the ciphertext decrypts to ``m1`` under the stored string."""

    def __init__(self, p: Params, m1: Message):
        self.p = p
        self.m1 = tuple(m1)

    def distinguish(self, zeta, z, c):
        alpha = RandomString.from_flat(np.asarray(zeta, dtype=np.uint8), self.p.n, self.p.k)
        x = expand_key(alpha, z, self.p)
        return int(tuple(a ^ b for a, b in zip(c, x)) == self.m1)


class FunctionDistinguisher(Distinguisher):
    def __init__(self, fn):
        self.fn = fn

    def distinguish(self, zeta, z, c):
        return int(self.fn(zeta, z, c))


# --------------------------------------------------------------------------
# Exhaustive enumeration helpers


def _check_enumerable(p: Params, enum_limit: int = DEFAULT_ENUM_LIMIT, with_keys: bool = True):
    if p.nk > 24:
        raise TooLargeToEnumerate(f"n*k = {p.nk} > 24")
    if p.K > (1 << 20):
        raise TooLargeToEnumerate(f"n^k = {p.K} > 2^20")
    work = p.N * p.K if with_keys else p.N
    if work > enum_limit:
        raise TooLargeToEnumerate(f"{work} (string, key) pairs exceed the limit {enum_limit}")


def all_flats(p: Params) -> np.ndarray:
    """Every string of the given size as rows of flat bits, index order."""
    idx = kernels.all_strings(p.nk)
    return ((idx[:, None] >> np.arange(p.nk, dtype=np.uint64)) & np.uint64(1)).astype(np.uint8)


def enumerate_outputs(rec: Recorder, p: Params, budget: int | None = None):
    """Recorder output class of every string.

    Returns ``(class_ids, outputs)``: ``class_ids[a]`` indexes ``outputs`` for
    string index ``a``. Raises :class:`StorageExceeded` if any output is
    longer than ``budget`` (default beta).
    """
    budget = p.beta if budget is None else budget
    flats = all_flats(p)
    flats.setflags(write=False)
    raw = rec.record_batch(flats)
    if isinstance(raw, np.ndarray) and raw.ndim == 2:
        if raw.shape[1] > min(budget, rec.declared_budget):
            raise StorageExceeded(f"recorder emitted {raw.shape[1]} bits (budget {budget})")
        uniq, ids = np.unique(raw, axis=0, return_inverse=True)
        return ids.reshape(-1).astype(np.int64), [tuple(int(b) for b in row) for row in uniq]
    lookup: dict[tuple, int] = {}
    ids = np.empty(p.N, dtype=np.int64)
    for a, out in enumerate(raw):
        key = _bounded(out, budget, rec.declared_budget)
        ids[a] = lookup.setdefault(key, len(lookup))
    outputs = [None] * len(lookup)
    for key, c in lookup.items():
        outputs[c] = key
    return ids, outputs


def final_key_table(z: SecretKey, p: Params) -> np.ndarray:
    """X bits for every string under key ``z``: shape (N, m), uint8."""
    signs = kernels.parity_signs(kernels.all_strings(p.nk), kernels.subkey_masks(z.z, p.n, p.m))
    return ((1 - signs) // 2).astype(np.uint8)


def _codes(bits: np.ndarray) -> np.ndarray:
    """Row bit vectors -> integers (column 0 least significant)."""
    if bits.shape[1] == 0:
        return np.zeros(bits.shape[0], dtype=np.int64)
    return (bits.astype(np.int64) << np.arange(bits.shape[1], dtype=np.int64)).sum(axis=1)


def _decode_code(code: int, width: int) -> tuple[int, ...]:
    return tuple((code >> t) & 1 for t in range(width))


# --------------------------------------------------------------------------
# Results


@dataclass(frozen=True)
class GameResult:
    game: str
    params: Params
    trials: int
    successes: int
    estimate: Fraction
    std_error: float
    exact: Fraction | None
    bound: float
    seed: str

    def to_dict(self) -> dict:
        return {
            "game": self.game,
            "params": self.params.as_dict(),
            "trials": self.trials,
            "successes": self.successes,
            "estimate": float(self.estimate),
            "std_error": self.std_error,
            "exact": None if self.exact is None else f"{self.exact.numerator}/{self.exact.denominator}",
            "bound": self.bound,
            "seed": self.seed,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def bit_game_bound(p: Params) -> float:
    """1/2 + 2^(-k/6) + 2^(-0.002kn + 1)."""
    return 0.5 + 2.0 ** (-p.k / 6) + 2.0 ** (-0.002 * p.nk + 1)


def semantic_game_bound(p: Params) -> float:
    """m (2^(-k/6 + 1) + 2^(-0.002kn + 2))."""
    return p.m * (2.0 ** (-p.k / 6 + 1) + 2.0 ** (-0.002 * p.nk + 2))


# --------------------------------------------------------------------------
# Monte Carlo


def _seed_bytes(seed) -> bytes:
    if isinstance(seed, bytes):
        return seed
    return str(seed).encode()


def sample_trial(seed, trial: int, p: Params) -> tuple[RandomString, SecretKey]:
    """Uniform (alpha, Z) for one trial, from its own SHAKE-256 substream."""
    nbytes = (p.nk + 7) // 8
    raw = hashlib.shake_256(b"bsmkit-trial" + _seed_bytes(seed) + b"|" + trial.to_bytes(8, "little")).digest(
        nbytes + 8 * p.k
    )
    flat = np.unpackbits(np.frombuffer(raw[:nbytes], dtype=np.uint8), bitorder="little")[: p.nk]
    # 64-bit draws reduced mod n: bias below n / 2^64
    z = tuple(int.from_bytes(raw[nbytes + 8 * j : nbytes + 8 * j + 8], "little") % p.n for j in range(p.k))
    return RandomString.from_flat(flat, p.n, p.k), SecretKey(z, p.n)


def _bit_trials(rec, dec, p, i, seed, budget, start, stop) -> int:
    wins = 0
    for trial in range(start, stop):
        alpha, z = sample_trial(seed, trial, p)
        eta = run_phase1(rec, (alpha.flat(),), budget)
        x = expand_key(alpha, z, p).bits
        guess = dec(eta.bits, z, x[: i - 1] + x[i:], i)
        wins += int(guess) == x[i - 1]
    return wins


def _semantic_trials(rec, dist, m0, m1, p, seed, budget, start, stop) -> tuple[int, int]:
    """Returns (sum of d1 - d0, sum of (d1 - d0)^2)."""
    total = sq = 0
    for trial in range(start, stop):
        alpha, z = sample_trial(seed, trial, p)
        zeta = run_phase1(rec, (alpha.flat(),), budget)
        x = expand_key(alpha, z, p).bits
        d1 = int(dist(zeta.bits, z, tuple(a ^ b for a, b in zip(m1, x))))
        d0 = int(dist(zeta.bits, z, tuple(a ^ b for a, b in zip(m0, x))))
        total += d1 - d0
        sq += (d1 - d0) ** 2
    return total, sq


def _partition(trials: int, workers: int):
    step = -(-trials // workers)
    return [(s, min(trials, s + step)) for s in range(0, trials, step)]


def _run(fn, args, trials, workers):
    if workers <= 1:
        return [fn(*args, 0, trials)]
    with ProcessPoolExecutor(workers) as pool:
        futures = [pool.submit(fn, *args, lo, hi) for lo, hi in _partition(trials, workers)]
        return [f.result() for f in futures]


def bit_security_game(
    rec: Recorder,
    dec: BitDecoder,
    p: Params,
    i: int,
    trials: int,
    seed,
    *,
    unsafe_test_override_budget: int | None = None,
    with_exact: bool = False,
    workers: int = 1,
) -> GameResult:
    """Empirical Pr[dec(eta, Z, X^-i) = X_i] over uniform (alpha, Z)."""
    if not 1 <= i <= p.m:
        raise IndexOutOfRange(f"bit index {i} outside [1, {p.m}]")
    if trials < 1:
        raise ValueError("trials must be positive")
    budget = _budget(p, unsafe_test_override_budget)
    wins = sum(_run(_bit_trials, (rec, dec, p, i, seed, budget), trials, workers))
    est = Fraction(wins, trials)
    exact = None
    if with_exact:
        exact = exact_bit_advantage(rec, dec, p, i, unsafe_test_override_budget=unsafe_test_override_budget)
    return GameResult(
        "bit",
        p,
        trials,
        wins,
        est,
        math.sqrt(float(est * (1 - est)) / trials),
        exact,
        bit_game_bound(p),
        str(seed),
    )


def _check_messages(m0, m1, p: Params) -> tuple[tuple[int, ...], tuple[int, ...]]:
    m0, m1 = tuple(m0), tuple(m1)
    if len(m0) != p.m or len(m1) != p.m:
        raise LengthMismatch(f"messages must have m = {p.m} bits")
    return m0, m1


def semantic_security_game(
    rec: Recorder,
    dist: Distinguisher,
    m0,
    m1,
    p: Params,
    trials: int,
    seed,
    *,
    unsafe_test_override_budget: int | None = None,
    with_exact: bool = False,
    workers: int = 1,
) -> GameResult:
    """Paired estimate of |Pr[dist(M1 ^ X) = 1] - Pr[dist(M0 ^ X) = 1]|.

    Both ciphertexts are built from the same (alpha, Z) in every trial, so
    ``successes`` is |sum(d1 - d0)| and ``estimate`` is that over ``trials``.
    """
    m0, m1 = _check_messages(m0, m1, p)
    if trials < 1:
        raise ValueError("trials must be positive")
    budget = _budget(p, unsafe_test_override_budget)
    parts = _run(_semantic_trials, (rec, dist, m0, m1, p, seed, budget), trials, workers)
    total = sum(t for t, _ in parts)
    sq = sum(s for _, s in parts)
    mean = total / trials
    var = max(sq / trials - mean * mean, 0.0)
    exact = None
    if with_exact:
        exact = exact_distinguishing_advantage(
            rec, dist, m0, m1, p, unsafe_test_override_budget=unsafe_test_override_budget
        )
    return GameResult(
        "semantic",
        p,
        trials,
        abs(total),
        Fraction(abs(total), trials),
        math.sqrt(var / trials),
        exact,
        semantic_game_bound(p),
        str(seed),
    )


# --------------------------------------------------------------------------
# Exact enumeration


def exact_bit_advantage(
    rec: Recorder,
    dec: BitDecoder,
    p: Params,
    i: int,
    *,
    unsafe_test_override_budget: int | None = None,
    enum_limit: int = DEFAULT_ENUM_LIMIT,
) -> Fraction:
    """Exact Pr[dec(eta, Z, X^-i) = X_i] over all 2^(nk) strings and n^k keys.

    The decoder is called once per distinct (eta, Z, X^-i) view.
    """
    if not 1 <= i <= p.m:
        raise IndexOutOfRange(f"bit index {i} outside [1, {p.m}]")
    _check_enumerable(p, enum_limit)
    ids, outputs = enumerate_outputs(rec, p, _budget(p, unsafe_test_override_budget))
    rest_cols = [c for c in range(p.m) if c != i - 1]
    wins = 0
    for zt in range(p.K):
        z = SecretKey.from_index(zt, p.n, p.k)
        x = final_key_table(z, p)
        rest = _codes(x[:, rest_cols])
        view = ids * (1 << (p.m - 1)) + rest
        uniq, inv = np.unique(view, return_inverse=True)
        guesses = np.fromiter(
            (
                int(dec(outputs[v >> (p.m - 1)], z, _decode_code(int(v) & ((1 << (p.m - 1)) - 1), p.m - 1), i))
                for v in uniq.tolist()
            ),
            dtype=np.uint8,
            count=uniq.size,
        )
        wins += int((guesses[inv.reshape(-1)] == x[:, i - 1]).sum())
    return Fraction(wins, p.N * p.K)


def exact_distinguishing_advantage(
    rec: Recorder,
    dist: Distinguisher,
    m0,
    m1,
    p: Params,
    *,
    unsafe_test_override_budget: int | None = None,
    enum_limit: int = DEFAULT_ENUM_LIMIT,
) -> Fraction:
    m0, m1 = _check_messages(m0, m1, p)
    _check_enumerable(p, enum_limit)
    ids, outputs = enumerate_outputs(rec, p, _budget(p, unsafe_test_override_budget))
    code0 = sum(b << t for t, b in enumerate(m0))
    code1 = sum(b << t for t, b in enumerate(m1))
    ones = [0, 0]
    cache: dict[tuple[int, int, int], int] = {}
    for zt in range(p.K):
        z = SecretKey.from_index(zt, p.n, p.k)
        xcode = _codes(final_key_table(z, p))
        for side, mcode in ((0, code0), (1, code1)):
            view = ids * (1 << p.m) + (xcode ^ mcode)
            uniq, counts = np.unique(view, return_counts=True)
            for v, cnt in zip(uniq.tolist(), counts.tolist()):
                key = (v, zt)
                if key not in cache:
                    c = _decode_code(v & ((1 << p.m) - 1), p.m)
                    cache[key] = int(dist(outputs[v >> p.m], z, c))
                ones[side] += cache[key] * cnt
    return abs(Fraction(ones[1] - ones[0], p.N * p.K))


class BayesOptimalDecoder(BitDecoder):
    """Majority vote of X_i over every string consistent with the decoder's view.

    Consistent means: the recorder maps it to ``eta`` and, under key ``z``, it
    yields the observed ``x_rest``. Ties go to 0. Tables are built per (z, i)
    on first use.
    """

    def __init__(self, rec: Recorder, p: Params, *, unsafe_test_override_budget: int | None = None,
                 enum_limit: int = DEFAULT_ENUM_LIMIT):
        _check_enumerable(p, enum_limit, with_keys=False)
        if p.K > (1 << 20):
            raise TooLargeToEnumerate(f"n^k = {p.K} > 2^20")
        self.p = p
        self.ids, outputs = enumerate_outputs(rec, p, _budget(p, unsafe_test_override_budget))
        self.class_of = {out: c for c, out in enumerate(outputs)}
        self.n_classes = len(outputs)
        self._tables: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}

    def _table(self, zt: int, i: int):
        key = (zt, i)
        if key not in self._tables:
            p = self.p
            x = final_key_table(SecretKey.from_index(zt, p.n, p.k), p)
            rest = _codes(x[:, [c for c in range(p.m) if c != i - 1]])
            cell = self.ids * (1 << (p.m - 1)) + rest
            size = self.n_classes << (p.m - 1)
            total = np.bincount(cell, minlength=size)
            ones = np.bincount(cell, weights=x[:, i - 1], minlength=size).astype(np.int64)
            self._tables[key] = (total, ones)
        return self._tables[key]

    def counts(self, eta, z: SecretKey, x_rest, i: int) -> tuple[int, int]:
        """(#consistent strings with X_i = 0, with X_i = 1)."""
        c = self.class_of.get(tuple(eta))
        if c is None:
            raise EmptyPreimage(f"no string records to {tuple(eta)}")
        total, ones = self._table(z.index(), i)
        cell = (c << (self.p.m - 1)) + sum(int(b) << t for t, b in enumerate(x_rest))
        n1 = int(ones[cell])
        n0 = int(total[cell]) - n1
        if n0 + n1 == 0:
            raise EmptyPreimage("view cannot occur under honest play")
        return n0, n1

    def decode(self, eta, z, x_rest, i):
        n0, n1 = self.counts(eta, z, x_rest, i)
        return int(n1 > n0)

    def exact_success(self, i: int) -> Fraction:
        """Sum over views of max(n0, n1) / (N K), straight from the tables."""
        p = self.p
        best = 0
        for zt in range(p.K):
            total, ones = self._table(zt, i)
            best += int(np.maximum(ones, total - ones).sum())
        return Fraction(best, p.N * p.K)


def bayes_optimal_decoder(rec: Recorder, p: Params, **kw) -> BayesOptimalDecoder:
    return BayesOptimalDecoder(rec, p, **kw)


# --------------------------------------------------------------------------
# Reduction from distinguishing to bit prediction


def hybrid(m0, m1, level: int) -> tuple[int, ...]:
    """H^(level): the first ``level`` bits from m1, the rest from m0."""
    return tuple(m1[:level]) + tuple(m0[level:])


class HybridPredictor(BitDecoder):
    """Bit predictor built from a distinguisher by the hybrid argument.

    For target position i, ciphertext position j != i carries H^(i-1)_j ^ X_j
    and position i carries the help bit b. If the distinguisher answers 1 the
    guess is b ^ M1_i (it saw H^(i)), otherwise b ^ M0_i (it saw H^(i-1)).
    """

    def __init__(self, dist: Distinguisher, m0, m1, i: int, help_bit: int):
        self.dist = dist
        self.m0, self.m1 = tuple(m0), tuple(m1)
        self.i = i
        self.help_bit = help_bit
        self._h = hybrid(self.m0, self.m1, i - 1)

    def decode(self, eta, z, x_rest, i):
        if i != self.i:
            raise IndexOutOfRange(f"predictor built for bit {self.i}, asked for {i}")
        x_rest = tuple(x_rest)
        x_full = x_rest[: i - 1] + (0,) + x_rest[i - 1 :]
        c = tuple(h ^ x for h, x in zip(self._h, x_full))
        c = c[: i - 1] + (self.help_bit,) + c[i:]
        out = int(self.dist(eta, z, c))
        return self.help_bit ^ (self.m1[i - 1] if out else self.m0[i - 1])


def reduction_bit_predictor(dist: Distinguisher, m0, m1, i: int, hybrid_seed=0, *,
                            help_bit: int | None = None) -> HybridPredictor:
    m0, m1 = tuple(m0), tuple(m1)
    if len(m0) != len(m1):
        raise LengthMismatch("messages differ in length")
    if m0 == m1:
        raise IdenticalMessages("the hybrid argument needs M0 != M1")
    if not 1 <= i <= len(m0):
        raise IndexOutOfRange(f"bit index {i} outside [1, {len(m0)}]")
    if m0[i - 1] == m1[i - 1]:
        raise IndexOutOfRange(f"hybrids H^({i - 1}) and H^({i}) coincide; pick a position where M0, M1 differ")
    if help_bit is None:
        help_bit = hashlib.sha256(b"bsmkit-hybrid" + _seed_bytes(hybrid_seed)).digest()[0] & 1
    return HybridPredictor(dist, m0, m1, i, help_bit)


@dataclass(frozen=True)
class ReductionReport:
    epsilon: Fraction
    # (i, help_bit) -> exact success probability of the predictor
    success: dict
    best_i: int
    best_help_bit: int
    best_advantage: Fraction
    required: Fraction

    @property
    def holds(self) -> bool:
        return self.best_advantage >= self.required


def reduction_check(rec: Recorder, dist: Distinguisher, m0, m1, p: Params, **kw) -> ReductionReport:
    """Exact distinguisher advantage vs the best hybrid predictor over (i, help bit)."""
    m0, m1 = _check_messages(m0, m1, p)
    eps = exact_distinguishing_advantage(rec, dist, m0, m1, p, **kw)
    success = {}
    for i in range(1, p.m + 1):
        if m0[i - 1] == m1[i - 1]:
            continue
        for b in (0, 1):
            pred = reduction_bit_predictor(dist, m0, m1, i, help_bit=b)
            success[(i, b)] = exact_bit_advantage(rec, pred, p, i, **kw)
    (bi, bb), best = max(success.items(), key=lambda kv: abs(kv[1] - Fraction(1, 2)))
    return ReductionReport(eps, success, bi, bb, abs(best - Fraction(1, 2)), eps / (2 * p.m))
