"""Compare the compiled kernels against the pure-numpy fallback.

Run: python3 benchmarks/bench_kernels.py [--sizes 1000,100000,1000000]
"""

import argparse
import time

import numpy as np

from uqbench import _kernels_py

try:
    from uqbench import _kernels
except ImportError:
    _kernels = None


def bench(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", default="1000,100000,1000000")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(args.seed)

    if _kernels is None:
        print("compiled kernels unavailable; benchmarking fallback only")

    header = f"{'kernel':<22}{'n':>10}{'numpy':>12}{'cython':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        values = np.round(rng.normal(size=n) * 4) / 4  # ~50% tied
        order = np.argsort(-values, kind="stable")
        scores = values[order]
        correct = rng.random(n) < 0.7

        for name, py_args in (
            ("midranks", (values,)),
            ("grid_expected_errors", (correct[order].astype(np.float64), scores)),
        ):
            py_fn = getattr(_kernels_py, name)
            t_py = bench(py_fn, *py_args)
            if _kernels is not None:
                cy_fn = getattr(_kernels, name)
                got = cy_fn(*py_args)
                want = py_fn(*py_args)
                assert np.array_equal(got, want), f"{name} backends disagree"
                t_cy = bench(cy_fn, *py_args)
                print(f"{name:<22}{n:>10}{t_py:>12.6f}{t_cy:>12.6f}"
                      f"{t_py / t_cy:>9.2f}x")
            else:
                print(f"{name:<22}{n:>10}{t_py:>12.6f}{'-':>12}{'-':>10}")


if __name__ == "__main__":
    main()
