"""Acceptance criteria, one test per criterion.

Run alone with ``pytest tests/test_acceptance.py -v``; the terminal summary
prints one PASS/FAIL line per criterion.
"""
import itertools
import json
import time
from fractions import Fraction

import numpy as np
import pytest

from bsmkit import adversary as adv
from bsmkit import analysis, cli, randomness
from bsmkit.errors import StorageExceeded
from bsmkit.protocol import (
    Message,
    Params,
    RandomString,
    SecretKey,
    all_keys,
    decrypt,
    encrypt,
    expand_key,
    final_key,
    key_positions,
)

EXHAUSTIVE_SIZES = [(2, 2), (3, 2), (2, 3), (4, 2), (3, 3)]


def all_strings(n, k):
    for v in range(1 << (n * k)):
        yield RandomString.from_int(v, n, k)


def test_criterion_01_bounds_reproduction(tmp_path):
    out = tmp_path / "bounds.json"
    t0 = time.perf_counter()
    code = cli.main(["bounds", "--n", str(2**45), "--k", "300", "--m", str(2**25), "--json-out", str(out)])
    elapsed = time.perf_counter() - t0
    assert code == 0
    report = json.loads(out.read_text())
    log2_bound = report["distinguishing_bound_log2"]
    assert log2_bound <= -23
    assert abs(log2_bound - (-24)) <= 0.1
    assert report["vacuous"] is False
    assert elapsed < 1.0


def test_criterion_02_round_trip():
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    failures = 0
    for _ in range(1000):
        n = int(rng.integers(1, 65))
        k = int(rng.integers(1, 9))
        m = int(rng.integers(1, n + 1))
        p = Params(n, k, m)
        alpha = RandomString(rng.integers(0, 2, size=(k, n), dtype=np.uint8))
        z = SecretKey(tuple(int(v) for v in rng.integers(0, n, size=k)), n)
        msg = Message(tuple(int(b) for b in rng.integers(0, 2, size=m)))
        cfg = randomness.StreamConfig(b"\x00" * 32, int(rng.integers(1, 2 * n * k + 1)))
        x_stream = expand_key(randomness.broadcast(alpha, cfg), z, p)
        x_batch = expand_key(alpha, z, p)
        failures += decrypt(encrypt(msg, x_stream), x_batch) != msg
    assert failures == 0
    assert time.perf_counter() - t0 < 10.0


def test_criterion_03_disjointness():
    failures = 0
    for n in range(1, 9):
        for k in range(1, 4):
            p = Params(n, k, n)
            for z in all_keys(n, k):
                failures += len(key_positions(z, p)) != p.m * p.k
    assert failures == 0


def test_criterion_04_discrepancy_oracle_equivalence():
    t0 = time.perf_counter()
    mismatches = 0
    for n, k in EXHAUSTIVE_SIZES:
        p = Params(n, k, 1)
        for alpha in all_strings(n, k):
            brute = analysis.discrepancy_bruteforce(alpha, 1, p)
            closed = analysis.discrepancy_closed_form(alpha)
            mismatches += brute.value != closed.value
    rng = np.random.default_rng(4)
    p = Params(16, 3, 1)
    for _ in range(1000):
        alpha = RandomString(rng.integers(0, 2, size=(3, 16), dtype=np.uint8))
        mismatches += analysis.discrepancy_bruteforce(alpha, 1, p).value != analysis.discrepancy_closed_form(alpha).value
    assert mismatches == 0
    assert time.perf_counter() - t0 < 60.0


def test_criterion_05_i_invariance():
    failures = 0
    for n, k in EXHAUSTIVE_SIZES:
        p = Params(n, k, n)
        for alpha in all_strings(n, k):
            failures += not analysis.discrepancy_i_invariance_check(alpha, p)
    assert failures == 0


def test_criterion_06_per_row_band():
    n, k = 32, 6
    K = n**k
    rng = np.random.default_rng(6)
    failures = accepted = 0
    while accepted < 1000:
        alpha = RandomString(rng.integers(0, 2, size=(k, n), dtype=np.uint8))
        if not analysis.row_fractions_in_band(alpha):
            continue
        accepted += 1
        d = analysis.discrepancy_closed_form(alpha).value
        # d <= K 2^(-k/3)  <=>  d^3 2^k <= K^3
        failures += d**3 * 2**k > K**3
    assert failures == 0


def test_criterion_07_goodness_identity():
    rng = np.random.default_rng(7)
    failures = 0
    for n, k in [(2, 2), (3, 2)]:
        p = Params(n, k, 1)
        keys = list(all_keys(n, k))
        for _ in range(200):
            alpha = RandomString(rng.integers(0, 2, size=(k, n), dtype=np.uint8))
            H = [int(b) for b in rng.integers(0, 2, size=p.K)]
            record = analysis.goodness(H, analysis.spectrum_vector(alpha, 1, p), p)
            hits = sum(H[t] == final_key(alpha, z, p)[0] for t, z in enumerate(keys))
            failures += record.success_probability != Fraction(hits, p.K)
    assert failures == 0


def test_criterion_08_grammian_identities():
    failures = []
    for n in range(1, 11):
        for k in range(1, 11):
            if n * k > 10:
                continue
            report = analysis.grammian_check(Params(n, k, 1), limit=10)
            if not report.passed:
                failures.append((n, k, report))
    assert failures == []


def test_criterion_09_preimage_inequality():
    sizes = [(2, 2), (4, 2), (4, 3), (4, 4), (8, 2)]
    failures = []
    for n, k in sizes:
        p = Params(n, k, 1)
        prefix = analysis.preimage_census(adv.PrefixRecorder(p.beta), p)
        if not prefix.holds or prefix.histogram != {2 ** (p.nk - p.beta): 2**p.beta}:
            failures.append(("prefix", n, k, prefix.histogram))
        parity = analysis.preimage_census(adv.ParitySketchRecorder(p.beta, n, k), p)
        if not parity.holds:
            failures.append(("parity", n, k, parity.prob_small))
    rng = np.random.default_rng(9)
    for r in range(20):
        n, k = sizes[r % len(sizes)]
        p = Params(n, k, 1)
        census = analysis.preimage_census(adv.TableRecorder.random(p, p.beta, int(rng.integers(1 << 31))), p)
        if not census.holds:
            failures.append(("table", n, k, census.prob_small))
    assert failures == []


def test_criterion_10_independence():
    for n, k, m in [(2, 1, 2), (4, 2, 2), (4, 2, 4)]:
        report = analysis.independence_check(Params(n, k, m))
        assert report.product_form, (n, k, m)
        assert report.z_invariant, (n, k, m)


def test_criterion_11_exact_vs_monte_carlo():
    p = Params(2, 2, 1)
    recorders = {
        "zero": adv.ZeroRecorder(),
        "prefix": adv.PrefixRecorder(p.beta),
        "parity": adv.ParitySketchRecorder(p.beta, p.n, p.k),
    }
    t0 = time.perf_counter()
    for name, rec in recorders.items():
        dec = adv.bayes_optimal_decoder(rec, p)
        result = adv.bit_security_game(rec, dec, p, 1, 100_000, f"accept-{name}", with_exact=True)
        assert result.exact == adv.exact_bit_advantage(rec, dec, p, 1)
        assert abs(float(result.estimate - result.exact)) <= 3 * result.std_error, (name, result)
    assert time.perf_counter() - t0 < 60.0


def test_criterion_12_reduction_inequality():
    p = Params(2, 2, 2)
    rng = np.random.default_rng(12)
    messages = list(itertools.product((0, 1), repeat=p.m))
    failures = []
    for r in range(20):
        rec = adv.TableRecorder.random(p, p.beta, int(rng.integers(1 << 31)))
        dist = adv.TableDistinguisher(int(rng.integers(1 << 31)))
        a, b = rng.choice(len(messages), size=2, replace=False)
        report = adv.reduction_check(rec, dist, messages[a], messages[b], p)
        if not report.holds:
            failures.append((r, report))
    assert failures == []


class _OverBudget(adv.Recorder):
    """Declares beta+1 and emits beta+1 bits, in one of several shapes."""

    def __init__(self, beta, style, seed):
        self.declared_budget = beta + 1
        self.style = style
        self.rng = np.random.default_rng(seed)
        self.bits = tuple(int(b) for b in self.rng.integers(0, 2, size=beta + 1))

    def record(self, flat):
        if self.style == 0:
            return list(self.bits)
        if self.style == 1:
            return iter(self.bits)
        if self.style == 2:
            return np.array(self.bits, dtype=np.uint8)
        if self.style == 3:
            return itertools.cycle(self.bits)  # never terminates
        return tuple(int(b) for b in flat[: len(self.bits)]) + (0,) * max(0, len(self.bits) - flat.size)

    def record_batch(self, flats):
        if self.style == 2:
            return np.tile(np.array(self.bits, dtype=np.uint8), (flats.shape[0], 1))
        return super().record_batch(flats)


def test_criterion_13_budget_enforcement():
    p = Params(4, 2, 2)
    escapes = 0
    for r in range(100):
        if r % 2:
            rec = _OverBudget(p.beta, r % 5, r)
        else:
            # lies about its budget: declares beta, emits beta+1
            extra = tuple(int(b) for b in np.random.default_rng(r).integers(0, 2, size=p.beta + 1))
            rec = adv.FunctionRecorder(lambda flat, e=extra: e, p.beta)
        dec = adv.HashDecoder(r)
        dist = adv.HashDistinguisher(r)
        calls = [
            lambda: adv.bit_security_game(rec, dec, p, 1, 3, r),
            lambda: adv.semantic_security_game(rec, dist, (0, 0), (1, 1), p, 3, r),
            lambda: adv.exact_bit_advantage(rec, dec, p, 1),
            lambda: adv.bayes_optimal_decoder(rec, p),
        ]
        for call in calls:
            try:
                call()
            except StorageExceeded:
                continue
            escapes += 1
    assert escapes == 0


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
