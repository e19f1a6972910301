"""Named verification suites run by ``bsmkit verify``.

Each suite returns a list of :class:`Check` records; a suite passes when every
check does. Sizes default to the ones exercised by the test-suite and can be
narrowed to a single ``(n, k, m)``.
"""
from __future__ import annotations

import inspect
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import analysis, kernels
from .adversary import ParitySketchRecorder, PrefixRecorder, TableRecorder
from .errors import TooLargeToEnumerate
from .protocol import Params, RandomString, SecretKey, expand_key


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"suite": self.suite, "check": self.name, "passed": self.passed, "detail": self.detail}


def closed_form_table(n: int, k: int) -> np.ndarray:
    """prod_j |n - 2 o_j| for every string, from per-row popcounts."""
    idx = kernels.all_strings(n * k)
    row_mask = np.uint64((1 << n) - 1)
    out = np.ones(idx.size, dtype=np.int64)
    for j in range(k):
        ones = np.bitwise_count((idx >> np.uint64(j * n)) & row_mask).astype(np.int64)
        out *= np.abs(n - 2 * ones)
    return out


def _sizes(max_nk: int, n=None, k=None):
    if n is not None and k is not None:
        return [(n, k)]
    return [(a, b) for a in range(1, max_nk + 1) for b in range(1, max_nk + 1) if a * b <= max_nk and a >= 2]


def discrepancy_suite(max_nk=12, n=None, k=None, samples=1000, seed=0):
    checks = []
    for a, b in _sizes(max_nk, n, k):
        p = Params(a, b, 1)
        brute = analysis.discrepancy_table(p, limit=max_nk)
        mism = int((brute != closed_form_table(a, b)).sum())
        checks.append(Check("discrepancy", f"exhaustive n={a} k={b}", mism == 0, f"{mism} mismatches of {p.N}"))
    if n is None:
        rng = np.random.default_rng(seed)
        mism = 0
        for _ in range(samples):
            alpha = RandomString(rng.integers(0, 2, size=(3, 16), dtype=np.uint8))
            if analysis.discrepancy_bruteforce(alpha).value != analysis.discrepancy_closed_form(alpha).value:
                mism += 1
        checks.append(Check("discrepancy", f"{samples} random n=16 k=3", mism == 0, f"{mism} mismatches"))
    return checks


def invariance_suite(max_nk=12, n=None, k=None):
    checks = []
    for a, b in _sizes(max_nk, n, k):
        p = Params(a, b, a)
        tables = [analysis.discrepancy_table(p, i, limit=max_nk) for i in range(1, a + 1)]
        bad = int(sum((t != tables[0]).sum() for t in tables[1:]))
        checks.append(Check("invariance", f"n={a} k={b} i=1..{a}", bad == 0, f"{bad} strings vary with i"))
    return checks


def band_suite(samples=1000, n=32, k=6, seed=0):
    rng = np.random.default_rng(seed)
    fails = drawn = 0
    while drawn < samples:
        alpha = RandomString(rng.integers(0, 2, size=(k, n), dtype=np.uint8))
        if not analysis.row_fractions_in_band(alpha):
            continue
        drawn += 1
        res = analysis.discrepancy_closed_form(alpha)
        fails += res.exceeds_threshold
    return [Check("band", f"{samples} in-band strings n={n} k={k}", fails == 0, f"{fails} exceed K 2^(-k/3)")]


def counted_success(alpha: RandomString, H, i: int, p: Params) -> Fraction:
    """Fraction of keys under which guess H[t] equals X_i, by running the protocol."""
    hits = 0
    for t in range(p.K):
        z = SecretKey.from_index(t, p.n, p.k)
        hits += int(H[t]) == expand_key(alpha, z, p)[i - 1]
    return Fraction(hits, p.K)


def goodness_suite(samples=200, seed=0, sizes=((2, 2), (3, 2))):
    rng = np.random.default_rng(seed)
    checks = []
    for n, k in sizes:
        p = Params(n, k, 1)
        bad = 0
        for _ in range(samples):
            alpha = RandomString(rng.integers(0, 2, size=(k, n), dtype=np.uint8))
            H = rng.integers(0, 2, size=p.K).tolist()
            rec = analysis.goodness(H, analysis.spectrum_vector(alpha, 1, p), p)
            bad += rec.success_probability != counted_success(alpha, H, 1, p)
        checks.append(Check("goodness", f"{samples} random H n={n} k={k}", bad == 0, f"{bad} mismatches"))
    return checks


def grammian_suite(max_nk=10, n=None, k=None):
    checks = []
    for a, b in _sizes(max_nk, n, k):
        rep = analysis.grammian_check(Params(a, b, 1), limit=max_nk)
        checks.append(Check("grammian", f"n={a} k={b}", rep.passed, str(rep)))
    return checks


def preimage_suite(sizes=((2, 2), (4, 2), (4, 3), (4, 4)), random_recorders=20, seed=0):
    checks = []
    rng = np.random.default_rng(seed)
    for n, k in sizes:
        p = Params(n, k, 1)
        prefix = analysis.preimage_census(PrefixRecorder(p.beta), p)
        uniform = prefix.histogram == {1 << (p.nk - p.beta): 1 << p.beta}
        checks.append(Check("preimage", f"prefix n={n} k={k}", prefix.holds and uniform, str(prefix.histogram)))
        parity = analysis.preimage_census(ParitySketchRecorder(p.beta, n, k), p)
        checks.append(Check("preimage", f"parity-sketch n={n} k={k}", parity.holds, str(parity.prob_small)))
    for r in range(random_recorders):
        n, k = sizes[r % len(sizes)]
        p = Params(n, k, 1)
        rec = TableRecorder.random(p, p.beta, int(rng.integers(1 << 31)))
        census = analysis.preimage_census(rec, p)
        checks.append(Check("preimage", f"random table #{r} n={n} k={k}", census.holds, str(census.prob_small)))
    return checks


def independence_suite(sizes=((2, 1, 2), (4, 2, 2), (4, 2, 4)), n=None, k=None, m=None):
    if n is not None and k is not None:
        sizes = ((n, k, m or n),)
    checks = []
    for a, b, c in sizes:
        rep = analysis.independence_check(Params(a, b, c))
        checks.append(Check("independence", f"n={a} k={b} m={c}", rep.passed, str(rep)))
    return checks


SUITES = {
    "discrepancy": discrepancy_suite,
    "invariance": invariance_suite,
    "band": band_suite,
    "goodness": goodness_suite,
    "grammian": grammian_suite,
    "preimage": preimage_suite,
    "independence": independence_suite,
}


def run(name: str, **kw) -> list[Check]:
    """Run one suite (or ``"all"``), passing each only the options it accepts."""
    kw = {key: v for key, v in kw.items() if v is not None}
    names = list(SUITES) if name == "all" else [name]
    checks: list[Check] = []
    for suite in names:
        fn = SUITES[suite]
        accepted = inspect.signature(fn).parameters
        try:
            checks += fn(**{key: v for key, v in kw.items() if key in accepted})
        except TooLargeToEnumerate as exc:
            checks.append(Check(suite, "enumeration limit", False, str(exc)))
    return checks
