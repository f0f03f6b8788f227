"""Time the compiled and fallback kernel backends against each other.

    python benchmarks/bench_kernels.py [--sizes 1024 4096 16384] [--repeat 5]

Prints one line per (kernel, size, backend) with the best wall time and the
max abs difference from the fallback result.
"""

from __future__ import annotations

import argparse
import time

import numpy as np
from scipy.signal import fftconvolve

from infosum.kernels import available_backends


def best_time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[1024, 4096, 16384])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    backends = available_backends()
    if "cython" not in backends:
        print("compiled backend not built; only the fallback is timed")
    print(f"{'kernel':<16}{'size':>8}  {'backend':<8}{'seconds':>12}{'max |diff|':>14}")
    for size in args.sizes:
        a, b, c = (rng.random(size) for _ in range(3))
        ref_conv = backends["python"].direct_convolve(a, b)
        ref_joint = backends["python"].joint_sums(a, c, b)
        for name, mod in sorted(backends.items()):
            t = best_time(lambda: mod.direct_convolve(a, b), args.repeat)
            diff = np.max(np.abs(mod.direct_convolve(a, b) - ref_conv))
            print(f"{'direct_convolve':<16}{size:>8}  {name:<8}{t:>12.6f}{diff:>14.2e}")
            t = best_time(lambda: mod.joint_sums(a, c, b), args.repeat)
            num, den = mod.joint_sums(a, c, b)
            diff = max(np.max(np.abs(num - ref_joint[0])), np.max(np.abs(den - ref_joint[1])))
            print(f"{'joint_sums':<16}{size:>8}  {name:<8}{t:>12.6f}{diff:>14.2e}")
        t = best_time(lambda: fftconvolve(a, b), args.repeat)
        diff = np.max(np.abs(fftconvolve(a, b) - ref_conv))
        print(f"{'direct_convolve':<16}{size:>8}  {'fft':<8}{t:>12.6f}{diff:>14.2e}")


if __name__ == "__main__":
    main()
