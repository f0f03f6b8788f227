"""Monotonicity experiments: i.i.d. normalized sums, standardized subset sums
and the score-projection diagnostic."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.stats import qmc

from .density import GridDensity, build_density, convolve, scale_density
from .errors import DomainError, PreconditionError, ScoreUndefinedError
from .functionals import entropy, fisher_information, heat_perturb, info_summary, score
from .specs import DistributionSpec, GridConfig
from .subsets import SubsetCollection, WeightVector, classify, eta_weights
from .verifiers import TOL_NATS, TOL_REL, InequalityReport, SumSystem

N_MAX_LIMIT = 12


@dataclass(frozen=True)
class CltRow:
    n: int
    entropy: float
    fisher: float | None
    entropy_power: float
    rel_entropy_gaussian: float
    gap_prev: float | None  # H(Y_n) - H(Y_{n-1})

    def to_dict(self) -> dict:
        fisher = self.fisher if self.fisher is not None and math.isfinite(self.fisher) else None
        return {
            "n": self.n,
            "entropy": self.entropy,
            "fisher": fisher,
            "entropy_power": self.entropy_power,
            "rel_entropy_gaussian": self.rel_entropy_gaussian,
            "gap_prev": self.gap_prev,
        }


@dataclass(frozen=True)
class CltSweepResult:
    """Information functionals of ``Y_n = (X_1 + ... + X_n) / sqrt(n)``, ordered by ``n``."""

    spec: DistributionSpec
    rows: tuple[CltRow, ...]
    presmooth: float = 0.0

    def entropy_gaps(self) -> list[float]:
        return [row.gap_prev for row in self.rows[1:]]

    def fisher_gaps(self) -> list[float | None]:
        """``I(Y_{n-1}) - I(Y_n)`` per step (nonnegative when Fisher information drops)."""
        out = []
        for prev, row in zip(self.rows, self.rows[1:]):
            if prev.fisher is None or row.fisher is None:
                out.append(None)
            else:
                out.append(prev.fisher - row.fisher)
        return out

    def entropy_monotone(self, tol: float = TOL_NATS, start: int = 2) -> bool:
        return all(r.gap_prev >= -tol for r in self.rows if r.n >= start)

    def fisher_monotone(self, tol: float = TOL_NATS, start: int = 2) -> bool:
        gaps = [g for g, row in zip(self.fisher_gaps(), self.rows[1:]) if row.n >= start]
        return all(g is not None and g >= -tol for g in gaps)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "presmooth": self.presmooth,
            "rows": [row.to_dict() for row in self.rows],
        }


def iid_info_sequence(
    spec: DistributionSpec, n_max: int, cfg: GridConfig | None = None, presmooth: float = 0.0
) -> CltSweepResult:
    """Sweep ``n = 1..n_max``.

    ``presmooth > 0`` first replaces ``X`` by ``X + sqrt(presmooth) Z``; that
    gives densities with jumps (the uniform family) a finite Fisher information.
    """
    if not isinstance(n_max, int) or not 2 <= n_max <= N_MAX_LIMIT:
        raise DomainError(f"n_max must be an integer in 2..{N_MAX_LIMIT}, got {n_max!r}")
    if presmooth < 0 or not math.isfinite(presmooth):
        raise DomainError(f"presmooth must be a nonnegative variance, got {presmooth}")
    base = build_density(spec, cfg)
    if presmooth > 0:
        base = heat_perturb(base, presmooth)
    rows = []
    total = base
    prev_h = None
    for n in range(1, n_max + 1):
        if n > 1:
            total = convolve(total, base)
        summary = info_summary(scale_density(total, 1.0 / math.sqrt(n)))
        rows.append(
            CltRow(
                n=n,
                entropy=summary.entropy,
                fisher=summary.fisher,
                entropy_power=summary.entropy_power,
                rel_entropy_gaussian=summary.rel_entropy_gaussian,
                gap_prev=None if prev_h is None else summary.entropy - prev_h,
            )
        )
        prev_h = summary.entropy
    return CltSweepResult(spec, tuple(rows), presmooth)


MOA_ENTROPY = "H(V_n) >= sum_s eta_s H(V^s)"
MOA_INV_FISHER = "1/I(V_n) >= sum_s eta_s / I(V^s)"
MOA_ENTROPY_POWER = "N(V_n) >= sum_s eta_s N(V^s)"


def _standardized(system: SumSystem, s) -> GridDensity:
    return scale_density(system.subset_sum(s), 1.0 / math.sqrt(system.variance(s)))


def monotone_on_average(
    system: SumSystem, C: SubsetCollection, tol_rel: float = TOL_REL, tol_nats: float = TOL_NATS
) -> list[InequalityReport]:
    """Entropy, inverse-Fisher and entropy-power reports for the standardized sums.

    ``V_n = T_n / sqrt(v_n)`` and ``V^s = T^s / sqrt(v_s)``, weighted by
    ``eta_s = v_s / (r v_n)``.
    """
    system._check_collection(C)
    if not classify(C).balanced:
        raise PreconditionError("monotonicity on average needs a balanced collection")
    eta = eta_weights(C, system.variances)
    v_full = _standardized(system, system.full)
    v_sets = [_standardized(system, s) for s in C.sets]
    meta = {"eta": list(eta), "sets": [list(s) for s in C.sets]}

    h_full = entropy(v_full)
    h_sets = [entropy(d) for d in v_sets]
    rhs = math.fsum(e * h for e, h in zip(eta, h_sets))
    reports = [
        InequalityReport.evaluated("moa_entropy", MOA_ENTROPY, h_full, rhs, h_full - rhs, tol_nats, **meta)
    ]

    try:
        lhs = 1.0 / fisher_information(v_full)
        rhs = math.fsum(e / fisher_information(d) for e, d in zip(eta, v_sets))
        reports.append(
            InequalityReport.evaluated(
                "moa_inv_fisher", MOA_INV_FISHER, lhs, rhs, lhs - rhs, tol_rel * abs(lhs), **meta
            )
        )
    except ScoreUndefinedError as exc:
        reports.append(InequalityReport.skipped("moa_inv_fisher", MOA_INV_FISHER, f"not evaluable: {exc}"))

    lhs = math.exp(2 * h_full)
    rhs = math.fsum(e * math.exp(2 * h) for e, h in zip(eta, h_sets))
    reports.append(
        InequalityReport.evaluated(
            "moa_entropy_power", MOA_ENTROPY_POWER, lhs, rhs, lhs - rhs, tol_rel * abs(lhs), **meta
        )
    )
    return reports


@dataclass(frozen=True)
class ProjectionGap:
    """``gap = E[(sum_s w_s rho_s(T^s) - rho(T_n))^2]`` and the two terms of its Pythagorean split."""

    gap: float
    mean_sq_combined: float
    fisher_total: float
    n_points: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "gap": self.gap,
            "mean_sq_combined": self.mean_sq_combined,
            "fisher_total": self.fisher_total,
            "n_points": self.n_points,
            "seed": self.seed,
        }


def _inverse_cdf(d: GridDensity, u: np.ndarray) -> np.ndarray:
    cdf = cumulative_trapezoid(d.values, dx=d.dx, initial=0.0)
    cdf /= cdf[-1]
    return np.interp(u, cdf, d.x)


def projection_gap(
    system: SumSystem, C: SubsetCollection, w: WeightVector | None = None, n_points: int = 2**14, seed: int = 0
) -> ProjectionGap:
    """Mean square distance between a weighted score combination and the score of ``T_n``.

    Summands are sampled by pushing a scrambled Sobol point set (seeded, so
    deterministic) through each marginal's inverse CDF; scores are
    interpolated on their grids.
    """
    system._check_collection(C)
    if w is None:
        w = WeightVector.uniform(len(C))
    elif not isinstance(w, WeightVector):
        w = WeightVector(tuple(w))
    if len(w) != len(C):
        raise DomainError(f"weight vector has {len(w)} entries for {len(C)} sets")
    if n_points < 2 or n_points & (n_points - 1):
        raise DomainError(f"n_points must be a power of two, got {n_points}")

    u = qmc.Sobol(d=system.n, scramble=True, seed=seed).random_base2(int(math.log2(n_points)))
    u = np.clip(u, 1e-15, 1 - 1e-15)
    samples = np.column_stack([_inverse_cdf(system.subset_sum((i,)), u[:, i - 1]) for i in system.full])

    def score_at(s) -> np.ndarray:
        t = samples[:, [i - 1 for i in s]].sum(axis=1)
        return score(system.subset_sum(s)).at(t)

    combined = np.zeros(n_points)
    for ws, s in zip(w, C.sets):
        if ws > 0:
            combined += ws * score_at(s)
    rho_n = score_at(system.full)
    return ProjectionGap(
        gap=float(np.mean((combined - rho_n) ** 2)),
        mean_sq_combined=float(np.mean(combined**2)),
        fisher_total=system.fisher(system.full),
        n_points=n_points,
        seed=seed,
    )
