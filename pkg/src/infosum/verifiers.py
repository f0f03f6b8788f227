"""Subset-sum systems and numerical checks of the subset-sum information inequalities.

Every check returns an :class:`InequalityReport` whose ``gap`` is signed so
that a nonnegative value means the inequality holds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .density import GridDensity, build_density, convolve, scale_density
from .errors import ConsistencyError, DomainError, PreconditionError, ScoreUndefinedError
from .functionals import entropy, fisher_information, rel_entropy_gaussian
from .specs import DistributionSpec, GridConfig
from .subsets import (
    FractionalPacking,
    SubsetCollection,
    WeightVector,
    classify,
    eta_weights,
    kl_divergence,
    natural_packing,
    validate_packing,
)

TOL_NATS = 1e-6
TOL_REL = 1e-3
SCALING_TOL = 1e-9


class SumSystem:
    """Independent summands ``X_1..X_n`` and a cache of subset-sum densities.

    Subsets are 1-based index tuples. ``T^(s)`` is built by convolving
    ``T^(s minus max s)`` with ``X_{max s}``, so prefixes are shared.
    """

    def __init__(self, specs: Sequence[DistributionSpec], cfg: GridConfig | None = None):
        if not specs:
            raise DomainError("a system needs at least one summand")
        self.specs = tuple(specs)
        self.cfg = cfg or GridConfig()
        self._density: dict[tuple[int, ...], GridDensity] = {}
        self._entropy: dict[tuple[int, ...], float] = {}
        self._fisher: dict[tuple[int, ...], float | ScoreUndefinedError] = {}

    @property
    def n(self) -> int:
        return len(self.specs)

    @property
    def full(self) -> tuple[int, ...]:
        return tuple(range(1, self.n + 1))

    def _key(self, s: Iterable[int]) -> tuple[int, ...]:
        key = tuple(sorted(set(int(i) for i in s)))
        if not key:
            raise DomainError("subset sum over an empty set")
        if key[0] < 1 or key[-1] > self.n:
            raise DomainError(f"subset {list(key)} not within 1..{self.n}")
        return key

    def subset_sum(self, s: Iterable[int]) -> GridDensity:
        key = self._key(s)
        d = self._density.get(key)
        if d is None:
            if len(key) == 1:
                d = build_density(self.specs[key[0] - 1], self.cfg)
            else:
                d = convolve(self.subset_sum(key[:-1]), self.subset_sum(key[-1:]))
            self._density[key] = d
        return d

    def variance(self, s: Iterable[int]) -> float:
        """Exact ``Var(T^(s))`` from the specs."""
        return math.fsum(self.specs[i - 1].variance for i in self._key(s))

    @property
    def variances(self) -> np.ndarray:
        return np.array([sp.variance for sp in self.specs])

    def entropy(self, s: Iterable[int]) -> float:
        key = self._key(s)
        if key not in self._entropy:
            self._entropy[key] = entropy(self.subset_sum(key))
        return self._entropy[key]

    def entropy_power(self, s: Iterable[int]) -> float:
        return math.exp(2 * self.entropy(s))

    def fisher(self, s: Iterable[int]) -> float:
        key = self._key(s)
        if key not in self._fisher:
            try:
                self._fisher[key] = fisher_information(self.subset_sum(key))
            except ScoreUndefinedError as exc:
                self._fisher[key] = exc
        val = self._fisher[key]
        if isinstance(val, ScoreUndefinedError):
            raise val
        return val

    def rel_entropy(self, s: Iterable[int]) -> float:
        return rel_entropy_gaussian(self.subset_sum(s))

    def build(self, collections: Iterable[SubsetCollection]) -> "SumSystem":
        """Populate the cache for the full sum and every set of every collection."""
        self.subset_sum(self.full)
        for C in collections:
            self._check_collection(C)
            for s in C.sets:
                self.subset_sum(s)
        return self

    def _check_collection(self, C: SubsetCollection):
        if C.n != self.n:
            raise DomainError(f"collection is over 1..{C.n} but the system has {self.n} summands")


def subset_sum(system: SumSystem, s: Iterable[int]) -> GridDensity:
    return system.subset_sum(s)


@dataclass
class InequalityReport:
    name: str
    inequality: str
    lhs: float | None
    rhs: float | None
    gap: float | None
    satisfied: bool | None
    tolerance: float
    status: str = "evaluated"  # or "skipped"
    reason: str = ""
    metadata: dict = field(default_factory=dict)

    @classmethod
    def evaluated(cls, name, inequality, lhs, rhs, gap, tolerance, **metadata) -> "InequalityReport":
        return cls(name, inequality, lhs, rhs, gap, bool(gap >= -tolerance), tolerance, metadata=metadata)

    @classmethod
    def skipped(cls, name, inequality, reason, tolerance=0.0, **metadata) -> "InequalityReport":
        return cls(name, inequality, None, None, None, None, tolerance, "skipped", reason, metadata)

    @property
    def violated(self) -> bool:
        return self.status == "evaluated" and not self.satisfied

    def to_dict(self) -> dict:
        def clean(v):
            if isinstance(v, float) and not math.isfinite(v):
                return str(v)
            if isinstance(v, (list, tuple)):
                return [clean(x) for x in v]
            if isinstance(v, dict):
                return {k: clean(x) for k, x in v.items()}
            if isinstance(v, np.generic):
                return clean(v.item())
            return v

        return clean(
            {
                "name": self.name,
                "inequality": self.inequality,
                "lhs": self.lhs,
                "rhs": self.rhs,
                "gap": self.gap,
                "satisfied": self.satisfied,
                "tolerance": self.tolerance,
                "status": self.status,
                "reason": self.reason,
                "metadata": self.metadata,
            }
        )


def _weights(C: SubsetCollection, w) -> WeightVector:
    if w is None:
        return WeightVector.uniform(len(C))
    if not isinstance(w, WeightVector):
        w = WeightVector(tuple(w))
    if len(w) != len(C):
        raise DomainError(f"weight vector has {len(w)} entries for {len(C)} sets")
    return w


def _sets(C: SubsetCollection) -> list[list[int]]:
    return [list(s) for s in C.sets]


EPI = "N(T_n) >= (1/r) sum_s N(T^s)"
FII = "1/I(T_n) >= (1/r) sum_s 1/I(T^s)"
WEIGHTED_FII = "r sum_s w_s^2 I(T^s) >= I(T_n)"
ENTROPY_OF_SUMS = "H(T_n) >= sum_s w_s H(T^s) + H(w)/2 - log(r)/2"
RELENT = "D(T_n) <= sum_s w_s D(T^s) + D(w||eta)/2"
REFINED_FII = "1/I(T_n) >= sum_s beta_s / I(T^s)"
RS_EPI = "N(T_n) >= sum_s N(T^s)/r(s)"


def verify_subset_epi(system: SumSystem, C: SubsetCollection, tol: float = TOL_REL) -> InequalityReport:
    system._check_collection(C)
    lhs = system.entropy_power(system.full)
    rhs = math.fsum(system.entropy_power(s) for s in C.sets) / C.r
    return InequalityReport.evaluated("subset_epi", EPI, lhs, rhs, lhs - rhs, tol * abs(lhs), r=C.r, sets=_sets(C))


def verify_fii(system: SumSystem, C: SubsetCollection, tol: float = TOL_REL) -> InequalityReport:
    system._check_collection(C)
    try:
        lhs = 1.0 / system.fisher(system.full)
        rhs = math.fsum(1.0 / system.fisher(s) for s in C.sets) / C.r
    except ScoreUndefinedError as exc:
        return InequalityReport.skipped("fii", FII, f"not evaluable: {exc}")
    return InequalityReport.evaluated("fii", FII, lhs, rhs, lhs - rhs, tol * abs(lhs), r=C.r, sets=_sets(C))


def verify_weighted_fii(
    system: SumSystem, C: SubsetCollection, w: WeightVector | None = None, tol: float = TOL_REL
) -> InequalityReport:
    system._check_collection(C)
    w = _weights(C, w)
    try:
        rhs = system.fisher(system.full)
        lhs = C.r * math.fsum(ws * ws * system.fisher(s) for ws, s in zip(w, C.sets) if ws > 0)
    except ScoreUndefinedError as exc:
        return InequalityReport.skipped("weighted_fii", WEIGHTED_FII, f"not evaluable: {exc}")
    return InequalityReport.evaluated(
        "weighted_fii", WEIGHTED_FII, lhs, rhs, lhs - rhs, tol * abs(lhs), r=C.r, weights=list(w)
    )


def verify_entropy_of_sums(
    system: SumSystem, C: SubsetCollection, w: WeightVector | None = None, tol: float = TOL_NATS
) -> InequalityReport:
    """Also evaluates the scaled form ``sum_s w_s H(T^s / sqrt(w_s r))`` and checks it matches."""
    system._check_collection(C)
    w = _weights(C, w)
    lhs = system.entropy(system.full)
    rhs = (
        math.fsum(ws * system.entropy(s) for ws, s in zip(w, C.sets) if ws > 0)
        + 0.5 * w.entropy
        - 0.5 * math.log(C.r)
    )
    scaled = math.fsum(
        ws * entropy(scale_density(system.subset_sum(s), 1.0 / math.sqrt(ws * C.r)))
        for ws, s in zip(w, C.sets)
        if ws > 0
    )
    if abs(scaled - rhs) > SCALING_TOL:
        raise ConsistencyError(f"scaled form {scaled!r} disagrees with weighted form {rhs!r}")
    return InequalityReport.evaluated(
        "entropy_of_sums",
        ENTROPY_OF_SUMS,
        lhs,
        rhs,
        lhs - rhs,
        tol,
        r=C.r,
        weights=list(w),
        weight_entropy=w.entropy,
        scaled_form=scaled,
    )


def verify_relent(
    system: SumSystem, C: SubsetCollection, w: WeightVector | None = None, tol: float = TOL_NATS
) -> InequalityReport:
    system._check_collection(C)
    if not classify(C).balanced:
        return InequalityReport.skipped(
            "relent", RELENT, "out of contract: collection is not balanced, so eta is only a subprobability"
        )
    w = _weights(C, w)
    eta = eta_weights(C, system.variances)
    lhs = system.rel_entropy(system.full)
    div = kl_divergence(w, eta)
    rhs = math.fsum(ws * system.rel_entropy(s) for ws, s in zip(w, C.sets) if ws > 0) + 0.5 * div
    return InequalityReport.evaluated(
        "relent", RELENT, lhs, rhs, rhs - lhs, tol, eta=list(eta), weights=list(w), kl_w_eta=div
    )


def verify_refined_fii(
    system: SumSystem, C: SubsetCollection, beta: FractionalPacking | None = None, tol: float = TOL_REL
) -> InequalityReport:
    system._check_collection(C)
    if beta is None:
        beta = natural_packing(C)
    elif not isinstance(beta, FractionalPacking):
        beta = FractionalPacking(C, tuple(beta))
    if not validate_packing(C, beta):
        raise PreconditionError(f"{list(beta.beta)} is not a fractional packing for {_sets(C)}")
    try:
        lhs = 1.0 / system.fisher(system.full)
        rhs = math.fsum(b / system.fisher(s) for b, s in zip(beta.beta, C.sets) if b > 0)
    except ScoreUndefinedError as exc:
        return InequalityReport.skipped("refined_fii", REFINED_FII, f"not evaluable: {exc}")
    return InequalityReport.evaluated(
        "refined_fii", REFINED_FII, lhs, rhs, lhs - rhs, tol * abs(lhs), packing=list(beta.beta)
    )


def verify_rs_epi(system: SumSystem, C: SubsetCollection, tol: float = TOL_REL) -> InequalityReport:
    """Checked only when no set dominates its multiplicity class."""
    system._check_collection(C)
    r_set = C.multiplicities.r_set
    powers = [system.entropy_power(s) for s in C.sets]
    for r in sorted(set(r_set)):
        members = [j for j, rs in enumerate(r_set) if rs == r]
        budget = math.fsum(powers[j] for j in members) / r
        for j in members:
            if powers[j] > budget * (1 + 1e-12):
                return InequalityReport.skipped(
                    "rs_epi",
                    RS_EPI,
                    f"not evaluable: set {list(C.sets[j])} dominates its class r(s)={r}",
                    dominating_set=list(C.sets[j]),
                )
    lhs = system.entropy_power(system.full)
    rhs = math.fsum(p / rs for p, rs in zip(powers, r_set))
    return InequalityReport.evaluated("rs_epi", RS_EPI, lhs, rhs, lhs - rhs, tol * abs(lhs), r_set=list(r_set))


def verify_all(
    system: SumSystem,
    C: SubsetCollection,
    w: WeightVector | None = None,
    beta: FractionalPacking | None = None,
    tol_rel: float = TOL_REL,
    tol_nats: float = TOL_NATS,
) -> list[InequalityReport]:
    return [
        verify_subset_epi(system, C, tol_rel),
        verify_fii(system, C, tol_rel),
        verify_weighted_fii(system, C, w, tol_rel),
        verify_entropy_of_sums(system, C, w, tol_nats),
        verify_relent(system, C, w, tol_nats),
        verify_refined_fii(system, C, beta, tol_rel),
        verify_rs_epi(system, C, tol_rel),
    ]
