"""Independent reference values, computed without the grid machinery.

Sums of independent Gaussian mixtures are Gaussian mixtures, so every
functional below is a one-dimensional adaptive quadrature of an analytic
density (scipy.integrate.quad). Run this file to regenerate the constants
frozen in the test modules:

    python tests/oracles/generate.py
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy import integrate, stats

BIMODAL = ((0.5, -1.0, 0.25), (0.5, 1.0, 0.25))


def mixture_sum(*mixtures):
    comps = []
    for parts in itertools.product(*mixtures):
        w = math.prod(p[0] for p in parts)
        comps.append((w, sum(p[1] for p in parts), sum(p[2] for p in parts)))
    return tuple(comps)


def mixture_scale(mix, a):
    return tuple((w, a * m, a * a * v) for w, m, v in mix)


def _pdf(mix, x):
    return sum(w * math.exp(-(x - m) ** 2 / (2 * v)) / math.sqrt(2 * math.pi * v) for w, m, v in mix)


def _dpdf(mix, x):
    return sum(
        -w * (x - m) / v * math.exp(-(x - m) ** 2 / (2 * v)) / math.sqrt(2 * math.pi * v) for w, m, v in mix
    )


def _bounds(mix):
    lo = min(m - 12 * math.sqrt(v) for _, m, v in mix)
    hi = max(m + 12 * math.sqrt(v) for _, m, v in mix)
    return lo, hi


def mixture_variance(mix):
    mean = sum(w * m for w, m, _ in mix)
    return sum(w * (v + m * m) for w, m, v in mix) - mean * mean


def mixture_entropy(mix):
    lo, hi = _bounds(mix)

    def g(x):
        f = _pdf(mix, x)
        return -f * math.log(f) if f > 0 else 0.0

    return integrate.quad(g, lo, hi, limit=500, epsabs=1e-13, epsrel=1e-13)[0]


def mixture_fisher(mix):
    lo, hi = _bounds(mix)

    def g(x):
        f = _pdf(mix, x)
        return _dpdf(mix, x) ** 2 / f if f > 1e-300 else 0.0

    return integrate.quad(g, lo, hi, limit=500, epsabs=1e-13, epsrel=1e-13)[0]


def smoothed_uniform_entropy(t):
    s = math.sqrt(t)

    def f(x):
        return stats.norm.cdf(x / s) - stats.norm.cdf((x - 1) / s)

    def g(x):
        v = f(x)
        return -v * math.log(v) if v > 0 else 0.0

    return integrate.quad(g, -12 * s, 1 + 12 * s, limit=500, points=[0.0, 1.0], epsabs=1e-13)[0]


def smoothed_uniform_fisher(t):
    s = math.sqrt(t)

    def g(x):
        v = stats.norm.cdf(x / s) - stats.norm.cdf((x - 1) / s)
        d = (stats.norm.pdf(x / s) - stats.norm.pdf((x - 1) / s)) / s
        return d * d / v if v > 1e-300 else 0.0

    return integrate.quad(g, -12 * s, 1 + 12 * s, limit=500, points=[0.0, 1.0], epsabs=1e-13)[0]


def main():
    one = BIMODAL
    print("bimodal H, I:", repr(mixture_entropy(one)), repr(mixture_fisher(one)))
    two, three = mixture_sum(one, one), mixture_sum(one, one, one)
    print("sum2 H, I:", repr(mixture_entropy(two)), repr(mixture_fisher(two)))
    print("sum3 H, I:", repr(mixture_entropy(three)), repr(mixture_fisher(three)))
    for n in range(1, 7):
        parts = [one] * n
        y = mixture_scale(mixture_sum(*parts), 1 / math.sqrt(n))
        print(f"Y_{n} H, I:", repr(mixture_entropy(y)), repr(mixture_fisher(y)))
    print("smoothed uniform t=0.01 H, I:", repr(smoothed_uniform_entropy(0.01)), repr(smoothed_uniform_fisher(0.01)))


if __name__ == "__main__":
    main()
