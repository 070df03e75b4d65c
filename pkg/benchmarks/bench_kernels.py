"""Compare the compiled and pure-Python sampling kernels.

    python benchmarks/bench_kernels.py [--arms 2000] [--repeat 5]

Both backends are fed the same keys, so the script also checks that their
outputs match bit for bit before timing them.
"""
import argparse
import time

import numpy as np

from bandit_elim import _purepy

try:
    from bandit_elim import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--arms", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _kernels is None:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation` first")

    n = args.arms
    keys = _kernels.derive_keys(1, 0, n)
    batches = np.zeros(n, dtype=np.uint64)
    probs = np.full(n, 0.5)
    probs[-1] = 0.7
    sigmas = np.full(n, 0.25)

    cases = [
        ("derive_keys", lambda m: m.derive_keys(1, 0, n)),
        ("bernoulli count=5 (inversion)", lambda m: m.bernoulli_sums(keys, batches, probs, 5)),
        ("bernoulli count=781 (btrs)", lambda m: m.bernoulli_sums(keys, batches, probs, 781)),
        ("gaussian count=781", lambda m: m.gaussian_sums(keys, batches, probs, sigmas, 781)),
    ]
    print(f"{'kernel':<32}{'cython':>12}{'python':>12}{'speedup':>10}  identical")
    for name, call in cases:
        same = np.array_equal(call(_kernels), call(_purepy))
        tc = best_of(lambda: call(_kernels), args.repeat)
        tp = best_of(lambda: call(_purepy), max(1, args.repeat // 2))
        print(f"{name:<32}{tc * 1e9 / n:>9.0f} ns{tp * 1e9 / n:>9.0f} ns{tp / tc:>9.0f}x  {same}")
    print(f"(per arm, {n} arms)")


if __name__ == "__main__":
    main()
