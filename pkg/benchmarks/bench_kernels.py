"""Compare the compiled and numpy kernel backends on the exhaustive workloads.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import time

import numpy as np

from bsmkit import analysis, kernels
from bsmkit.protocol import Params, RandomString


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def workloads():
    rng = np.random.default_rng(0)
    alphas = [RandomString(rng.integers(0, 2, size=(3, 16), dtype=np.uint8)) for _ in range(200)]
    yield "discrepancy table n=4 k=4 (65536 strings x 256 keys)", lambda: analysis.discrepancy_table(Params(4, 4, 1))
    yield "enumerate D n=5 k=3", lambda: analysis.enumerate_D(Params(5, 3, 1))
    yield "grammian check n=3 k=3", lambda: analysis.grammian_check(Params(3, 3, 1))
    yield "200 spectra n=16 k=3 (4096 keys)", lambda: [kernels.spectrum(a.bits) for a in alphas]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = ["python"] + (["cython"] if kernels.compiled_available() else [])
    if len(backends) == 1:
        print("compiled extension not built; timing the numpy backend only")
    original = kernels.BACKEND
    print(f"{'workload':58s}" + "".join(f"{b:>10s}" for b in backends) + ("   speedup" if len(backends) == 2 else ""))
    for name, fn in workloads():
        times = []
        for b in backends:
            kernels.use_backend(b)
            fn()  # warm-up
            times.append(_time(fn, args.repeat))
        row = f"{name:58s}" + "".join(f"{t:9.4f}s" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:9.1f}x"
        print(row)
    kernels.use_backend(original)


if __name__ == "__main__":
    main()
