"""Exact small-scale evaluation of the quantities behind the security argument.

Counts and probabilities coming from enumeration are exact (Python ints and
:class:`~fractions.Fraction`). Threshold tests against irrational values such
as ``K * 2^(-k/3)`` are decided in integer arithmetic by raising both sides to
a common power. Closed-form bounds are reported as base-2 logarithms in double
precision.

Keys are enumerated in mixed radix with z_1 varying fastest; strings by their
integer value with bit ``j*n + c`` holding row j, column c.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .adversary import Recorder, enumerate_outputs, final_key_table
from .errors import DimensionMismatch, IndexOutOfRange, ParameterError, TooLargeToEnumerate
from .protocol import Params, RandomString, SecretKey

MAX_KEYS = 1 << 20
MAX_ENUM_NK = 20
# the Grammian is a dense N x N matrix: 2^12 strings is already 128 MiB
MAX_GRAMMIAN_NK = 12
# row-fraction band used by the per-row discrepancy bound (tuned for gamma = 0.45)
BAND = Fraction(1, 8)


def binary_entropy(x: float) -> float:
    if x in (0, 1):
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


H_EIGHTH = binary_entropy(1 / 8)


def _log2_sum(*exps: float) -> float:
    """log2(sum of 2^e) without overflow or underflow."""
    top = max(exps)
    return top + math.log2(sum(2.0 ** (e - top) for e in exps))


# --------------------------------------------------------------------------
# integer-exact threshold comparisons


def exceeds_discrepancy_threshold(d: int, K: int, k: int) -> bool:
    """d > K * 2^(-k/3), i.e. d^3 2^k > K^3."""
    return d**3 << k > K**3


def meets_goodness_threshold(ip: int, K: int, k: int) -> bool:
    """|ip| >= 2K / 2^(k/6), i.e. ip^6 2^k >= (2K)^6."""
    return ip**6 << k >= (2 * K) ** 6


def _check_i(i: int, p: Params | None, n: int):
    upper = p.m if p is not None else n
    if not 1 <= i <= upper:
        raise IndexOutOfRange(f"bit index {i} outside [1, {upper}]")


def _check_alpha(alpha: RandomString, p: Params | None):
    if p is not None and (alpha.n, alpha.k) != (p.n, p.k):
        raise DimensionMismatch("random string dimensions do not match params")


# --------------------------------------------------------------------------
# spectrum and discrepancy


@dataclass(frozen=True)
class SpectrumVector:
    """(-1)^X_i under every key for one string; ``entries`` is None when K is too large."""

    n: int
    k: int
    i: int
    entries: np.ndarray | None

    @property
    def K(self) -> int:
        return self.n**self.k

    def total(self) -> int:
        if self.entries is None:
            raise TooLargeToEnumerate("spectrum not materialized")
        return int(self.entries.sum(dtype=np.int64))

    def dot(self, other: "SpectrumVector") -> int:
        if self.entries is None or other.entries is None:
            raise TooLargeToEnumerate("spectrum not materialized")
        if self.entries.shape != other.entries.shape:
            raise DimensionMismatch("spectra of different sizes")
        return int(np.dot(self.entries.astype(np.int64), other.entries.astype(np.int64)))


def spectrum_vector(alpha: RandomString, i: int = 1, p: Params | None = None, *, materialize: bool = True) -> SpectrumVector:
    _check_alpha(alpha, p)
    _check_i(i, p, alpha.n)
    K = alpha.n**alpha.k
    if not materialize:
        return SpectrumVector(alpha.n, alpha.k, i, None)
    if K > MAX_KEYS:
        raise TooLargeToEnumerate(f"n^k = {K} > 2^20 keys")
    entries = kernels.spectrum(alpha.bits, i - 1)
    entries.setflags(write=False)
    return SpectrumVector(alpha.n, alpha.k, i, entries)


@dataclass(frozen=True)
class DiscrepancyResult:
    value: int
    method: str
    row_fractions_in_band: bool
    threshold: float
    # K |1 - 2p|^k with the global ones fraction p, for comparison only
    global_fraction_form: Fraction | None = None
    # value > K 2^(-k/3), decided exactly
    exceeds_threshold: bool = False


def row_fractions_in_band(alpha: RandomString, band: Fraction = BAND) -> bool:
    ones = alpha.bits.sum(axis=1, dtype=np.int64)
    n = alpha.n
    return bool(all(band * n <= o <= (1 - band) * n for o in ones.tolist()))


def _result(value: int, method: str, alpha: RandomString, band: Fraction = BAND) -> DiscrepancyResult:
    K = alpha.n**alpha.k
    p_glob = Fraction(alpha.ones_count(), alpha.n * alpha.k)
    return DiscrepancyResult(
        value,
        method,
        row_fractions_in_band(alpha, band),
        K * 2.0 ** (-alpha.k / 3),
        K * abs(1 - 2 * p_glob) ** alpha.k,
        exceeds_discrepancy_threshold(value, K, alpha.k),
    )


def discrepancy_bruteforce(alpha: RandomString, i: int = 1, p: Params | None = None) -> DiscrepancyResult:
    """|sum over all n^k keys of (-1)^X_i|, by visiting every key."""
    nu = spectrum_vector(alpha, i, p)
    return _result(abs(nu.total()), "brute-force", alpha)


def discrepancy_closed_form(alpha: RandomString) -> DiscrepancyResult:
    """prod_j |n - 2 o_j| = K prod_j |1 - 2 p_j|; exact at any size.

    The key components are independent and uniform, so the key sum factorizes
    row by row.
    """
    value = 1
    for o in alpha.bits.sum(axis=1, dtype=np.int64).tolist():
        value *= abs(alpha.n - 2 * o)
    return _result(value, "closed-form-product", alpha)


def discrepancy_i_invariance_check(alpha: RandomString, p: Params) -> bool:
    if p.m < 2:
        raise ParameterError("i-invariance needs m >= 2")
    values = {discrepancy_bruteforce(alpha, i, p).value for i in range(1, p.m + 1)}
    return len(values) == 1


def _require_strings(p: Params, limit: int = MAX_ENUM_NK):
    if p.nk > min(limit, 64):
        raise TooLargeToEnumerate(f"n*k = {p.nk} > {limit}")
    if p.K > MAX_KEYS:
        raise TooLargeToEnumerate(f"n^k = {p.K} > 2^20 keys")


def discrepancy_table(p: Params, i: int = 1, limit: int = MAX_ENUM_NK) -> np.ndarray:
    """Brute-force discrepancy of every string, indexed by string value."""
    _require_strings(p, limit)
    return np.abs(kernels.parity_sums(kernels.all_strings(p.nk), kernels.key_masks(p.n, p.k, i - 1)))


def tail_count(nk: int) -> int:
    """#strings whose ones count o satisfies o < nk/8 or o > 7nk/8."""
    return sum(math.comb(nk, o) for o in range(nk + 1) if 8 * o < nk or 8 * o > 7 * nk)


@dataclass(frozen=True)
class DCensus:
    params: Params
    size_of_D: int
    tail_count: int
    total: int
    high_discrepancy_count_log2: float
    stirling_tail_log2: float
    # members of D whose global ones fraction is inside [1/8, 7/8]
    outside_tail: int

    def to_json(self) -> dict:
        return census_json("D", self.params, self.size_of_D, self.high_discrepancy_count_log2, "exhaustive",
                           extra={"tail_count": str(self.tail_count), "total": str(self.total),
                                  "outside_tail": self.outside_tail,
                                  "stirling_tail_log2": self.stirling_tail_log2})


def enumerate_D(p: Params, i: int = 1) -> DCensus:
    """|{alpha : d(nu(i, alpha)) > K 2^(-k/3)}| by exhaustive enumeration."""
    d = discrepancy_table(p, i)
    K, k = p.K, p.k
    # exact threshold: d^3 2^k > K^3; d <= K so d^3 fits easily in Python ints
    values, counts = np.unique(d, return_counts=True)
    size = 0
    in_D = set()
    for v, c in zip(values.tolist(), counts.tolist()):
        if exceeds_discrepancy_threshold(v, K, k):
            size += c
            in_D.add(v)
    members = np.isin(d, list(in_D)) if in_D else np.zeros(d.size, dtype=bool)
    ones = np.bitwise_count(kernels.all_strings(p.nk)).astype(np.int64)
    inside = (8 * ones >= p.nk) & (8 * ones <= 7 * p.nk)
    return DCensus(
        p,
        size,
        tail_count(p.nk),
        p.N,
        0.544 * p.nk,
        -p.nk * (1 - H_EIGHTH) + 1,
        int((members & inside).sum()),
    )


# --------------------------------------------------------------------------
# Grammian


@dataclass(frozen=True)
class GrammianEntry:
    j: int
    j_prime: int
    delta: int


def grammian_entry(alpha_a: RandomString, alpha_b: RandomString, i: int = 1, p: Params | None = None) -> GrammianEntry:
    """Inner product of the two spectra."""
    nu_a = spectrum_vector(alpha_a, i, p)
    nu_b = spectrum_vector(alpha_b, i, p)
    return GrammianEntry(alpha_a.to_int(), alpha_b.to_int(), nu_a.dot(nu_b))


def grammian_matrix(p: Params, i: int = 1, limit: int = 12) -> np.ndarray:
    """Full Delta = V^T V over all strings (N x N); needs n*k <= ``limit``."""
    _require_strings(p, min(limit, MAX_GRAMMIAN_NK))
    V = kernels.parity_signs(kernels.all_strings(p.nk), kernels.key_masks(p.n, p.k, i - 1)).astype(np.int64)
    return V @ V.T


@dataclass(frozen=True)
class GrammianReport:
    diagonal_ok: bool
    symmetric: bool
    xor_identity: bool
    row_counts_equal_D: bool
    size_of_D: int

    @property
    def passed(self) -> bool:
        return self.diagonal_ok and self.symmetric and self.xor_identity and self.row_counts_equal_D


def grammian_check(p: Params, i: int = 1, limit: int = 12) -> GrammianReport:
    """Check diagonal = K, symmetry, |delta_ab| = d(a ^ b) and the per-row over-threshold count."""
    delta = grammian_matrix(p, i, limit)
    d = discrepancy_table(p, i, limit)
    idx = np.arange(p.N)
    xor_d = d[idx[:, None] ^ idx[None, :]]
    over = np.vectorize(lambda v: exceeds_discrepancy_threshold(int(v), p.K, p.k))(np.arange(p.K + 1))
    row_counts = over[np.abs(delta)].sum(axis=1)
    size_D = int(over[d].sum())
    return GrammianReport(
        bool((np.diag(delta) == p.K).all()),
        bool((delta == delta.T).all()),
        bool((np.abs(delta) == xor_d).all()),
        bool((row_counts == size_D).all()),
        size_D,
    )


# --------------------------------------------------------------------------
# goodness


@dataclass(frozen=True)
class GoodnessRecord:
    H: tuple[int, ...]
    inner_product: int
    threshold: float
    is_good: bool
    success_probability: Fraction


def goodness(H: Sequence[int], nu: SpectrumVector, p: Params | None = None) -> GoodnessRecord:
    """Correlation of a per-key guess vector with the spectrum.

    A decoder answering ``H[t]`` under key t is right with probability
    1/2 + (H-bar . nu) / 2K over a uniform key.
    """
    H = tuple(int(h) for h in H)
    K = nu.K
    if nu.entries is None or len(H) != K:
        raise DimensionMismatch(f"guess vector has {len(H)} entries, expected K = {K}")
    hbar = 1 - 2 * np.asarray(H, dtype=np.int64)
    ip = int(np.dot(hbar, nu.entries.astype(np.int64)))
    k = nu.k
    return GoodnessRecord(
        H,
        ip,
        2 * K / 2 ** (k / 6),
        meets_goodness_threshold(ip, K, k),
        Fraction(1, 2) + Fraction(ip, 2 * K),
    )


@dataclass(frozen=True)
class LHCensus:
    params: Params
    size: int
    plus: int
    minus: int
    threshold: float
    good_strings_count_log2: float

    def to_json(self) -> dict:
        return census_json("L_H", self.params, self.size, self.good_strings_count_log2, "exhaustive",
                           extra={"plus": str(self.plus), "minus": str(self.minus)})


def enumerate_LH(H: Sequence[int], p: Params, i: int = 1) -> LHCensus:
    """Strings for which the guess vector H is good, split by sign."""
    if p.nk > MAX_ENUM_NK or p.K > (1 << 12):
        raise TooLargeToEnumerate("L_H enumeration needs n*k <= 20 and n^k <= 2^12")
    if len(H) != p.K:
        raise DimensionMismatch(f"guess vector has {len(H)} entries, expected K = {p.K}")
    hbar = 1 - 2 * np.asarray(H, dtype=np.int64)
    ips = kernels.parity_sums(kernels.all_strings(p.nk), kernels.key_masks(p.n, p.k, i - 1), hbar)
    values, counts = np.unique(ips, return_counts=True)
    plus = minus = 0
    for v, c in zip(values.tolist(), counts.tolist()):
        if meets_goodness_threshold(v, p.K, p.k):
            if v > 0:
                plus += c
            else:
                minus += c
    return LHCensus(p, plus + minus, plus, minus, 2 * p.K / 2 ** (p.k / 6), 0.544 * p.nk + p.k / 3)


# --------------------------------------------------------------------------
# pre-images of the recording function


@dataclass(frozen=True)
class PreimageCensus:
    params: Params
    budget: int
    # pre-image size -> number of stored states with that many pre-images
    histogram: dict
    classes: int
    prob_small: Fraction
    threshold_log2: float
    small_preimage_mass_log2: float

    @property
    def holds(self) -> bool:
        """prob_small <= 2^(-0.002 kn), decided exactly: S^500 <= 2^(499 kn)."""
        small_count = self.prob_small * self.params.N
        return int(small_count) ** 500 <= 1 << (499 * self.params.nk)

    def to_json(self) -> dict:
        return census_json("preimage", self.params, self.prob_small, self.small_preimage_mass_log2, "exhaustive",
                           extra={"histogram": {str(s): c for s, c in sorted(self.histogram.items())},
                                  "classes": self.classes, "budget": self.budget, "holds": self.holds})


def _below_preimage_threshold(size: int, nk: int) -> bool:
    """size < 2^(0.548 nk), i.e. size^250 < 2^(137 nk)."""
    return size**250 < 1 << (137 * nk)


def preimage_census(rec: Recorder, p: Params, *, budget: int | None = None) -> PreimageCensus:
    """Partition every string by recorder output and measure the small classes."""
    if p.nk > MAX_ENUM_NK:
        raise TooLargeToEnumerate(f"n*k = {p.nk} > {MAX_ENUM_NK}")
    budget = p.beta if budget is None else budget
    ids, outputs = enumerate_outputs(rec, p, budget)
    sizes = np.bincount(ids, minlength=len(outputs))
    hist = Counter(sizes.tolist())
    small = sum(s * c for s, c in hist.items() if _below_preimage_threshold(s, p.nk))
    return PreimageCensus(
        p, budget, dict(hist), len(outputs), Fraction(small, p.N), 0.548 * p.nk, -0.002 * p.nk
    )


# --------------------------------------------------------------------------
# closed-form bounds


@dataclass(frozen=True)
class BoundsReport:
    params: Params
    distinguishing_bound_log2: float
    bit_guess_bound_log2: float
    high_discrepancy_count_log2: float
    good_strings_count_log2: float
    small_preimage_mass_log2: float
    stirling_tail_log2: float
    h_eighth: float

    @property
    def vacuous(self) -> bool:
        """The distinguishing bound says nothing once it reaches 1."""
        return self.distinguishing_bound_log2 >= 0

    def to_json(self) -> dict:
        out = census_json("distinguishing_bound", self.params, None, self.distinguishing_bound_log2, "closed-form-log2")
        fields = asdict(self)
        fields.pop("params")
        out.update(fields)
        out["vacuous"] = self.vacuous
        return out


def security_bounds(p: Params) -> BoundsReport:
    kn = p.nk
    return BoundsReport(
        p,
        math.log2(p.m) + _log2_sum(-p.k / 6 + 1, -0.002 * kn + 2),
        _log2_sum(-p.k / 6, -0.002 * kn + 1),
        0.544 * kn,
        0.544 * kn + p.k / 3,
        -0.002 * kn,
        -kn * (1 - H_EIGHTH) + 1,
        H_EIGHTH,
    )


# --------------------------------------------------------------------------
# independence of the final-key bits


@dataclass(frozen=True)
class IndependenceReport:
    params: Params
    product_form: bool
    z_invariant: bool

    @property
    def passed(self) -> bool:
        return self.product_form and self.z_invariant


def independence_check(p: Params) -> IndependenceReport:
    """Exhaustively check that X_1..X_m are independent for every key and that
    the law of X^-i does not depend on the key."""
    if p.nk > 16:
        raise TooLargeToEnumerate(f"n*k = {p.nk} > 16")
    N, m = p.N, p.m
    product = True
    rest_laws: dict[int, np.ndarray] = {}
    invariant = True
    for zt in range(p.K):
        x = final_key_table(SecretKey.from_index(zt, p.n, p.k), p).astype(np.int64)
        codes = (x << np.arange(m, dtype=np.int64)).sum(axis=1)
        joint = np.bincount(codes, minlength=1 << m)
        ones = x.sum(axis=0).tolist()
        for code in range(1 << m):
            expected = 1
            for t in range(m):
                expected *= ones[t] if (code >> t) & 1 else N - ones[t]
            if int(joint[code]) * N ** (m - 1) != expected:
                product = False
        for i in range(m):
            rest = np.delete(x, i, axis=1)
            law = np.bincount((rest << np.arange(m - 1, dtype=np.int64)).sum(axis=1), minlength=1 << (m - 1))
            if i not in rest_laws:
                rest_laws[i] = law
            elif not np.array_equal(rest_laws[i], law):
                invariant = False
    return IndependenceReport(p, product, invariant)


# --------------------------------------------------------------------------
# reports


def census_json(quantity: str, p: Params, exact, bound_log2: float | None, method: str, extra: dict | None = None) -> dict:
    if isinstance(exact, Fraction):
        exact = f"{exact.numerator}/{exact.denominator}"
    elif exact is not None:
        exact = str(exact)
    out = {"quantity": quantity, "params": p.as_dict(), "exact": exact, "bound_log2": bound_log2, "method": method}
    if extra:
        out.update(extra)
    return out


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)
