import numpy as np
import pytest

from bsmkit import _kernels_py, kernels
from bsmkit.protocol import Params, RandomString, SecretKey, all_keys, final_key

compiled = pytest.mark.skipif(not kernels.compiled_available(), reason="compiled extension not built")


def spectrum_oracle(alpha, shift):
    n, k = alpha.n, alpha.k
    p = Params(n, k, shift + 1)
    return [1 - 2 * final_key(alpha, z, p)[shift] for z in all_keys(n, k)]


@pytest.mark.parametrize("n, k", [(1, 3), (2, 2), (3, 3), (5, 2), (4, 4)])
@pytest.mark.parametrize("impl", ["python", pytest.param("cython", marks=compiled)])
def test_spectrum_matches_protocol(n, k, impl, rng):
    mod = _kernels_py if impl == "python" else __import__("bsmkit._kernels", fromlist=["x"])
    alpha = RandomString(rng.integers(0, 2, size=(k, n), dtype=np.uint8))
    for shift in range(n):
        assert mod.spectrum(np.ascontiguousarray(alpha.bits), shift).tolist() == spectrum_oracle(alpha, shift)


def test_spectrum_example():
    alpha = RandomString(np.array([[1, 0], [0, 1]], dtype=np.uint8))
    assert kernels.spectrum(alpha.bits).tolist() == [-1, 1, 1, -1]


@compiled
def test_backends_agree_on_parity(rng):
    from bsmkit import _kernels

    alphas = rng.integers(0, 2**20, size=3000, dtype=np.uint64)
    masks = kernels.key_masks(4, 5)
    weights = rng.integers(-3, 4, size=masks.size).astype(np.int64)
    for w in (None, weights):
        assert np.array_equal(_kernels.parity_sums(alphas, masks, w), _kernels_py.parity_sums(alphas, masks, w))
    assert np.array_equal(_kernels.parity_signs(alphas[:50], masks), _kernels_py.parity_signs(alphas[:50], masks))


def test_parity_signs_oracle(rng):
    alphas = rng.integers(0, 2**12, size=40, dtype=np.uint64)
    masks = rng.integers(0, 2**12, size=30, dtype=np.uint64)
    expected = [[1 - 2 * (bin(int(a) & int(m)).count("1") & 1) for m in masks] for a in alphas]
    assert kernels.parity_signs(alphas, masks).tolist() == expected
    assert kernels.parity_sums(alphas, masks).tolist() == [sum(r) for r in expected]


def test_key_masks_match_positions():
    n, k = 3, 2
    for shift in range(n):
        masks = kernels.key_masks(n, k, shift)
        for t, z in enumerate(all_keys(n, k)):
            expected = sum(1 << (j * n + (v + shift) % n) for j, v in enumerate(z.z))
            assert int(masks[t]) == expected


def test_subkey_masks():
    masks = kernels.subkey_masks(SecretKey((1, 3), 4).z, 4, 2)
    assert [int(v) for v in masks] == [(1 << 1) | (1 << 7), (1 << 2) | (1 << 4)]


def test_use_backend_switches():
    before = kernels.BACKEND
    try:
        kernels.use_backend("python")
        assert kernels.BACKEND == "python"
        with pytest.raises(ValueError):
            kernels.use_backend("fortran")
    finally:
        if before == "cython":
            kernels.use_backend("cython")


def test_packed_limit():
    with pytest.raises(ValueError):
        kernels.key_masks(33, 2)


def test_env_forces_fallback():
    import os
    import subprocess
    import sys

    env = dict(os.environ, BSMKIT_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from bsmkit import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
