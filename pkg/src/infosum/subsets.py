"""Collections of subsets of ``{1..n}``, weights on them, and fractional packings."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import ConfigurationError, DomainError, ShapeError
from .simplex import simplex_max

PACKING_TOL = 1e-12
WEIGHT_TOL = 1e-12

Subset = tuple[int, ...]


class Multiplicities(NamedTuple):
    r: int
    r_index: dict[int, int]
    r_set: tuple[int, ...]  # aligned with ``SubsetCollection.sets``


class Classification(NamedTuple):
    balanced: bool
    discriminating: bool
    quasibalanced: bool


@dataclass(frozen=True)
class SubsetCollection:
    """A multiset of nonempty subsets of ``{1..n}``.

    Each set is stored as a sorted tuple; the order of the sets is kept as
    given (duplicates allowed and counted).
    """

    n: int
    sets: tuple[Subset, ...]

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ConfigurationError(f"n must be a positive integer, got {self.n!r}")
        norm = []
        for k, s in enumerate(self.sets):
            t = tuple(sorted(set(int(i) for i in s)))
            if not t:
                raise ConfigurationError(f"sets[{k}] is empty")
            if t[0] < 1 or t[-1] > self.n:
                raise ConfigurationError(f"sets[{k}] = {list(t)} is not a subset of 1..{self.n}")
            norm.append(t)
        if not norm:
            raise ConfigurationError("collection has no sets")
        object.__setattr__(self, "sets", tuple(norm))

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    @cached_property
    def multiplicities(self) -> Multiplicities:
        r_index = {i: 0 for i in range(1, self.n + 1)}
        for s in self.sets:
            for i in s:
                r_index[i] += 1
        r_set = tuple(max(r_index[i] for i in s) for s in self.sets)
        return Multiplicities(max(r_index.values()), r_index, r_set)

    @property
    def r(self) -> int:
        return self.multiplicities.r

    def incidence(self) -> np.ndarray:
        """``n x |C|`` 0/1 matrix, row ``i-1`` marks the sets containing ``i``."""
        A = np.zeros((self.n, len(self.sets)))
        for j, s in enumerate(self.sets):
            for i in s:
                A[i - 1, j] = 1.0
        return A

    def to_dict(self) -> dict:
        return {"n": self.n, "sets": [list(s) for s in self.sets]}

    @classmethod
    def from_dict(cls, obj, path: str = "$") -> "SubsetCollection":
        if not isinstance(obj, dict):
            raise ConfigurationError(f"{path}: expected an object")
        if "kind" in obj:
            try:
                return standard_collection(obj["kind"], obj.get("n"), m=obj.get("m"), k=obj.get("k"))
            except (ConfigurationError, DomainError) as exc:
                raise ConfigurationError(f"{path}: {exc}") from exc
        n, sets = obj.get("n"), obj.get("sets")
        if not isinstance(n, int) or isinstance(n, bool):
            raise ConfigurationError(f"{path}.n: expected an integer")
        if not isinstance(sets, list) or not all(isinstance(s, list) for s in sets):
            raise ConfigurationError(f"{path}.sets: expected a list of index lists")
        for k, s in enumerate(sets):
            if not all(isinstance(i, int) and not isinstance(i, bool) for i in s):
                raise ConfigurationError(f"{path}.sets[{k}]: indices must be integers")
        try:
            return cls(n, tuple(tuple(s) for s in sets))
        except ConfigurationError as exc:
            raise ConfigurationError(f"{path}: {exc}") from exc


def standard_collection(kind: str, n: int, m: int | None = None, k: int | None = None) -> SubsetCollection:
    """``singletons``, ``leave_one_out``, ``all_m_subsets`` (needs ``m``) or ``sliding_window`` (needs ``k``)."""
    if not isinstance(n, int) or n < 1:
        raise ConfigurationError(f"n must be a positive integer, got {n!r}")
    idx = range(1, n + 1)
    if kind == "singletons":
        sets = [(i,) for i in idx]
    elif kind == "leave_one_out":
        if n < 2:
            raise DomainError("leave_one_out needs n >= 2")
        sets = list(itertools.combinations(idx, n - 1))
    elif kind == "all_m_subsets":
        if not isinstance(m, int) or not 1 <= m <= n:
            raise DomainError(f"need 1 <= m <= n, got m={m!r}, n={n}")
        sets = list(itertools.combinations(idx, m))
    elif kind == "sliding_window":
        if not isinstance(k, int) or not 1 <= k <= n:
            raise DomainError(f"need 1 <= k <= n, got k={k!r}, n={n}")
        sets = [tuple(range(i, i + k)) for i in range(1, n - k + 2)]
    else:
        raise ConfigurationError(f"unknown collection kind {kind!r}")
    return SubsetCollection(n, tuple(sets))


def multiplicities(C: SubsetCollection) -> Multiplicities:
    return C.multiplicities


def classify(C: SubsetCollection) -> Classification:
    mult = C.multiplicities
    counts = set(mult.r_index.values())
    balanced = len(counts) == 1
    members = [set(s) for s in C.sets]
    discriminating = all(
        any(i in s and j not in s for s in members)
        for i in range(1, C.n + 1)
        for j in range(1, C.n + 1)
        if i != j
    )
    quasibalanced = all(mult.r_index[i] == rs for s, rs in zip(C.sets, mult.r_set) for i in s)
    return Classification(balanced, discriminating, quasibalanced)


def augment_to_balanced(C: SubsetCollection) -> SubsetCollection:
    """Add each under-covered index to the first sets lacking it until every r(i) = r."""
    mult = C.multiplicities
    sets = [set(s) for s in C.sets]
    for i in range(1, C.n + 1):
        need = mult.r - mult.r_index[i]
        for s in sets:
            if need == 0:
                break
            if i not in s:
                s.add(i)
                need -= 1
    return SubsetCollection(C.n, tuple(tuple(s) for s in sets))


# -- fractional packings ----------------------------------------------------


@dataclass(frozen=True)
class FractionalPacking:
    """Nonnegative set weights ``beta`` aligned with ``collection.sets``."""

    collection: SubsetCollection
    beta: tuple[float, ...]

    def __post_init__(self):
        beta = tuple(float(b) for b in self.beta)
        if len(beta) != len(self.collection):
            raise ShapeError(f"packing has {len(beta)} entries for {len(self.collection)} sets")
        object.__setattr__(self, "beta", beta)

    def value(self, c) -> float:
        return float(np.dot(self.beta, np.asarray(c, dtype=float)))

    def to_list(self) -> list[float]:
        return list(self.beta)


def validate_packing(C: SubsetCollection, beta) -> bool:
    b = np.asarray(beta.beta if isinstance(beta, FractionalPacking) else beta, dtype=float)
    if b.shape != (len(C),):
        raise ShapeError(f"packing has shape {b.shape}, expected ({len(C)},)")
    if np.any(b < 0) or not np.all(np.isfinite(b)):
        return False
    return bool(np.all(C.incidence() @ b <= 1 + PACKING_TOL))


def uniform_packing(C: SubsetCollection) -> FractionalPacking:
    return FractionalPacking(C, tuple(1.0 / C.r for _ in C.sets))


def natural_packing(C: SubsetCollection) -> FractionalPacking:
    """``beta_s = 1 / r(s)``."""
    return FractionalPacking(C, tuple(1.0 / rs for rs in C.multiplicities.r_set))


def optimize_packing_lp(C: SubsetCollection, c) -> FractionalPacking:
    """Packing maximizing ``sum_s beta_s c_s``."""
    c = np.asarray(c, dtype=float)
    if c.shape != (len(C),):
        raise ShapeError(f"objective has shape {c.shape}, expected ({len(C)},)")
    if np.any(c < 0):
        raise DomainError("objective coefficients must be nonnegative")
    x, _ = simplex_max(c, C.incidence(), np.ones(C.n))
    return FractionalPacking(C, tuple(x))


# -- weights ----------------------------------------------------------------


@dataclass(frozen=True)
class WeightVector:
    """Probability vector on the sets of a collection."""

    weights: tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if not w or any(x < 0 or not math.isfinite(x) for x in w):
            raise DomainError("weights must be finite and nonnegative")
        if abs(math.fsum(w) - 1.0) > WEIGHT_TOL:
            raise DomainError(f"weights sum to {math.fsum(w)!r}, not 1")
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return len(self.weights)

    def __iter__(self):
        return iter(self.weights)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.weights)

    @property
    def entropy(self) -> float:
        return -math.fsum(w * math.log(w) for w in self.weights if w > 0)

    @classmethod
    def normalized(cls, values) -> "WeightVector":
        v = np.asarray(values, dtype=float)
        total = v.sum()
        if not total > 0:
            raise DomainError("cannot normalize weights with nonpositive total")
        w = v / total
        # push the rounding residue into the largest entry so the sum is 1 to ~1 ulp
        w[np.argmax(w)] += 1.0 - math.fsum(w)
        return cls(tuple(w))

    @classmethod
    def uniform(cls, k: int) -> "WeightVector":
        return cls.normalized(np.ones(k))

    @classmethod
    def point_mass(cls, k: int, j: int) -> "WeightVector":
        w = [0.0] * k
        w[j] = 1.0
        return cls(tuple(w))


def kl_divergence(w, q) -> float:
    """Discrete relative entropy ``D(w || q)``; ``q`` may be a subprobability vector."""
    total = 0.0
    for wi, qi in zip(w, q):
        if wi > 0:
            if qi <= 0:
                return math.inf
            total += wi * math.log(wi / qi)
    return total


def eta_weights(C: SubsetCollection, variances) -> np.ndarray:
    """``eta_s = v_s / (r v_n)``; a probability vector exactly when ``C`` is balanced."""
    var = np.asarray(variances, dtype=float)
    if var.shape != (C.n,):
        raise ShapeError(f"need {C.n} variances, got shape {var.shape}")
    v_n = var.sum()
    return np.array([var[[i - 1 for i in s]].sum() / (C.r * v_n) for s in C.sets])


def fact1_sides(C: SubsetCollection, a) -> tuple[float, float]:
    """``(sum_{s in C} sum_{i in s} a_i, r sum_i a_i)``; equal when ``C`` is balanced."""
    a = list(a)
    lhs = sum((a[i - 1] for s in C.sets for i in s), start=type(a[0])(0))
    rhs = C.r * sum(a, start=type(a[0])(0))
    return lhs, rhs
