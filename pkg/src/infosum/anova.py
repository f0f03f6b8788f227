"""Exact ANOVA (Hoeffding) decomposition on finite product probability spaces.

Functions of ``n`` independent discrete coordinates are stored as numpy
arrays with one axis per coordinate. Coordinates and subsets are 1-based to
match :mod:`infosum.subsets`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, PreconditionError, ShapeError
from .subsets import FractionalPacking, SubsetCollection, validate_packing

MEAN_TOL = 1e-12
DROP_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ProductSpace:
    supports: tuple[np.ndarray, ...]
    probs: tuple[np.ndarray, ...]

    def __post_init__(self):
        sup = tuple(np.asarray(s, dtype=float) for s in self.supports)
        pr = tuple(np.asarray(p, dtype=float) for p in self.probs)
        if len(sup) != len(pr) or not sup:
            raise ConfigurationError("need one probability vector per coordinate")
        for j, (s, p) in enumerate(zip(sup, pr), start=1):
            if s.ndim != 1 or s.shape != p.shape:
                raise ConfigurationError(f"coordinate {j}: support and probabilities differ in shape")
            if np.any(p <= 0) or abs(p.sum() - 1.0) > 1e-12:
                raise ConfigurationError(f"coordinate {j}: probabilities must be positive and sum to 1")
        object.__setattr__(self, "supports", sup)
        object.__setattr__(self, "probs", pr)

    @property
    def n(self) -> int:
        return len(self.supports)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(s.size for s in self.supports)

    def joint(self) -> np.ndarray:
        """Product measure on the full grid."""
        out = np.ones(())
        for p in self.probs:
            out = np.multiply.outer(out, p)
        return out

    def coordinate(self, j: int) -> np.ndarray:
        """The value of ``X_j`` broadcast over the full grid."""
        shape = [1] * self.n
        shape[j - 1] = -1
        return np.broadcast_to(self.supports[j - 1].reshape(shape), self.shape)

    def expect(self, table: np.ndarray) -> float:
        return float(np.sum(self.joint() * table))

    def inner(self, a: np.ndarray, b: np.ndarray) -> float:
        return self.expect(a * b)

    @classmethod
    def iid(cls, support, probs, n: int) -> "ProductSpace":
        return cls(tuple(support for _ in range(n)), tuple(probs for _ in range(n)))


def _check_table(psi: np.ndarray, space: ProductSpace) -> np.ndarray:
    psi = np.asarray(psi, dtype=float)
    if psi.shape != space.shape:
        raise ShapeError(f"table shape {psi.shape} does not match space {space.shape}")
    return psi


def project_out(psi: np.ndarray, j: int, space: ProductSpace) -> np.ndarray:
    """``E_j psi``: average over coordinate ``j``, constant along that axis."""
    psi = _check_table(psi, space)
    ax = j - 1
    p = space.probs[ax]
    avg = np.tensordot(psi, p, axes=([ax], [0]))
    return np.broadcast_to(np.expand_dims(avg, ax), psi.shape).copy()


@dataclass(frozen=True, eq=False)
class AnovaDecomposition:
    space: ProductSpace
    components: dict[tuple[int, ...], np.ndarray]

    def reconstruct(self) -> np.ndarray:
        return sum(self.components.values())

    def variances(self) -> dict[tuple[int, ...], float]:
        return {t: self.space.expect(c * c) for t, c in self.components.items() if t}


def all_subsets(n: int):
    for k in range(n + 1):
        yield from itertools.combinations(range(1, n + 1), k)


def anova_decompose(psi: np.ndarray, space: ProductSpace) -> AnovaDecomposition:
    """Components ``E_{t^c} prod_{j in t} (I - E_j) psi`` for every ``t`` in ``[n]``."""
    psi = _check_table(psi, space)
    comps = {}
    for t in all_subsets(space.n):
        comp = psi
        for j in range(1, space.n + 1):
            proj = project_out(comp, j, space)
            comp = comp - proj if j in t else proj
        comps[t] = comp
    return AnovaDecomposition(space, comps)


@dataclass(frozen=True, eq=False)
class CAdditiveFunction:
    """``U = sum_s psi_s(x_s)``; ``components[k]`` is a table over the coordinates of set ``k``."""

    collection: SubsetCollection
    components: tuple[np.ndarray, ...]

    def __post_init__(self):
        comps = tuple(np.asarray(c, dtype=float) for c in self.components)
        if len(comps) != len(self.collection):
            raise ShapeError(f"{len(comps)} components for {len(self.collection)} sets")
        for s, c in zip(self.collection.sets, comps):
            if c.ndim != len(s):
                raise ShapeError(f"component for {list(s)} has {c.ndim} axes")
        object.__setattr__(self, "components", comps)

    def lift(self, k: int, space: ProductSpace) -> np.ndarray:
        """Component ``k`` as a table over the full product grid."""
        s = self.collection.sets[k]
        c = self.components[k]
        if c.shape != tuple(space.shape[i - 1] for i in s):
            raise ShapeError(f"component for {list(s)} has shape {c.shape}")
        shape = [1] * space.n
        for axis, i in enumerate(s):
            shape[i - 1] = c.shape[axis]
        return np.broadcast_to(c.reshape(shape), space.shape)

    def table(self, space: ProductSpace) -> np.ndarray:
        return sum(self.lift(k, space) for k in range(len(self.components)))

    def component_second_moments(self, space: ProductSpace) -> np.ndarray:
        return np.array([space.expect(self.lift(k, space) ** 2) for k in range(len(self.components))])

    def check_centered(self, space: ProductSpace):
        for k, s in enumerate(self.collection.sets):
            m = space.expect(self.lift(k, space))
            if abs(m) > MEAN_TOL:
                raise PreconditionError(f"component for {list(s)} has mean {m:.3g}, not 0")


class VarianceDropViolation(ArithmeticError):
    pass


def variance_drop_bound(
    U: CAdditiveFunction, space: ProductSpace, beta: FractionalPacking | Sequence[float] | None = None
) -> tuple[float, float]:
    """``(E U^2, bound)``; the bound is ``r sum E psi_s^2`` or, with a packing, ``sum E psi_s^2 / beta_s``."""
    U.check_centered(space)
    lhs = space.expect(U.table(space) ** 2)
    second = U.component_second_moments(space)
    if beta is None:
        rhs = U.collection.r * math.fsum(second)
    else:
        b = np.asarray(beta.beta if isinstance(beta, FractionalPacking) else beta, dtype=float)
        if not validate_packing(U.collection, b):
            raise PreconditionError(f"{list(b)} is not a fractional packing")
        terms = []
        for m2, bs in zip(second, b):
            if bs > 0:
                terms.append(m2 / bs)
            elif m2 > 0:
                terms.append(math.inf)
        rhs = math.fsum(terms) if terms else 0.0
    if lhs > rhs + DROP_TOL * max(1.0, abs(rhs)):
        raise VarianceDropViolation(f"E U^2 = {lhs!r} exceeds bound {rhs!r}")
    return lhs, rhs


def hoeffding_u_variance(psi: np.ndarray, space: ProductSpace) -> tuple[float, float]:
    """``(E U^2, (m/n) E psi^2)`` for the U-statistic of a symmetric mean-zero kernel.

    ``psi`` has ``m`` axes; ``space`` holds ``n >= m`` i.i.d. coordinates.
    """
    psi = np.asarray(psi, dtype=float)
    m, n = psi.ndim, space.n
    if not 1 <= m <= n:
        raise PreconditionError(f"kernel degree {m} must be between 1 and n={n}")
    sup0, p0 = space.supports[0], space.probs[0]
    for s, p in zip(space.supports, space.probs):
        if s.shape != sup0.shape or not (np.array_equal(s, sup0) and np.array_equal(p, p0)):
            raise PreconditionError("coordinates are not identically distributed")
    if psi.shape != (sup0.size,) * m:
        raise ShapeError(f"kernel shape {psi.shape} does not match support size {sup0.size}")
    for perm in itertools.permutations(range(m)):
        if not np.allclose(psi, psi.transpose(perm), rtol=0, atol=1e-12):
            raise PreconditionError("kernel is not symmetric in its arguments")
    sub = ProductSpace.iid(sup0, p0, m)
    e_psi2 = sub.expect(psi**2)
    if abs(sub.expect(psi)) > MEAN_TOL:
        raise PreconditionError("kernel does not have mean zero")
    sets = list(itertools.combinations(range(1, n + 1), m))
    C = SubsetCollection(n, tuple(sets))
    U = CAdditiveFunction(C, tuple(psi / len(sets) for _ in sets))
    lhs = space.expect(U.table(space) ** 2)
    return lhs, (m / n) * e_psi2


def anova_table(psi: np.ndarray, space: ProductSpace) -> list[dict]:
    """Rows ``{"subset", "variance", "fraction"}`` for every non-empty ``t``."""
    dec = anova_decompose(psi, space)
    var = dec.variances()
    total = math.fsum(var.values())
    rows = []
    for t, v in var.items():
        rows.append({"subset": list(t), "variance": v, "fraction": v / total if total > 0 else 0.0})
    return rows
