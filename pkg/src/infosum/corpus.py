"""Seeded random instances for the exact finite-space checks.

Every generator takes a ``numpy.random.Generator`` so a corpus is fully
determined by the seed that created it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .anova import CAdditiveFunction, ProductSpace
from .subsets import SubsetCollection

MAX_N = 5
MAX_SETS = 8


def random_product_space(rng: np.random.Generator, n: int, max_size: int = 5) -> ProductSpace:
    supports, probs = [], []
    for _ in range(n):
        k = int(rng.integers(2, max_size + 1))
        supports.append(np.sort(rng.normal(size=k)))
        p = rng.uniform(0.2, 1.0, size=k)
        p /= p.sum()
        p[-1] = 1.0 - p[:-1].sum()
        probs.append(p)
    return ProductSpace(tuple(supports), tuple(probs))


def random_table(rng: np.random.Generator, space: ProductSpace) -> np.ndarray:
    return rng.normal(size=space.shape)


def random_collection(rng: np.random.Generator, n: int, max_sets: int = MAX_SETS) -> SubsetCollection:
    m = int(rng.integers(1, max_sets + 1))
    sets = []
    for _ in range(m):
        mask = rng.random(n) < 0.5
        if not mask.any():
            mask[rng.integers(n)] = True
        sets.append(tuple(int(i) + 1 for i in np.flatnonzero(mask)))
    return SubsetCollection(n, tuple(sets))


def random_c_additive(rng: np.random.Generator, C: SubsetCollection, space: ProductSpace) -> CAdditiveFunction:
    """Each component is a random table on its coordinates, centered under the product measure."""
    comps = []
    for s in C.sets:
        sub = ProductSpace(tuple(space.supports[i - 1] for i in s), tuple(space.probs[i - 1] for i in s))
        table = rng.normal(size=sub.shape)
        comps.append(table - sub.expect(table))
    return CAdditiveFunction(C, tuple(comps))


@dataclass(frozen=True, eq=False)
class VarianceDropCase:
    space: ProductSpace
    function: CAdditiveFunction

    @property
    def collection(self) -> SubsetCollection:
        return self.function.collection


def variance_drop_corpus(seed: int, count: int = 100, max_n: int = MAX_N) -> list[VarianceDropCase]:
    rng = np.random.default_rng(seed)
    cases = []
    for _ in range(count):
        n = int(rng.integers(1, max_n + 1))
        space = random_product_space(rng, n, max_size=4)
        C = random_collection(rng, n)
        cases.append(VarianceDropCase(space, random_c_additive(rng, C, space)))
    return cases


def table_corpus(seed: int, count: int = 50, max_n: int = 4, max_size: int = 5):
    """``(space, table)`` pairs."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(1, max_n + 1))
        space = random_product_space(rng, n, max_size)
        out.append((space, random_table(rng, space)))
    return out


def collection_corpus(seed: int, count: int = 100, max_n: int = MAX_N, max_sets: int = MAX_SETS):
    rng = np.random.default_rng(seed)
    return [random_collection(rng, int(rng.integers(1, max_n + 1)), max_sets) for _ in range(count)]
