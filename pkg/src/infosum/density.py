"""One-dimensional densities sampled on uniform grids."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.signal import fftconvolve

from .errors import ConfigurationError, DomainError, InvalidDensityError, ResolutionError
from .specs import DistributionSpec, GaussianMixture, GridConfig, Tabulated, Uniform

TOL_MASS = 1e-9
TRIM_REL = 1e-14
# adjacent-sample jump (relative to the peak) above which a tabulated density is treated as discontinuous
JUMP_REL = 0.1
# largest factor by which common_step will coarsen a smooth density to spare one with jumps
COARSEN_LIMIT = 8.0


def trapezoid(y: np.ndarray, dx: float) -> float:
    y = np.asarray(y, dtype=float)
    return float(dx * (y.sum() - 0.5 * (y[0] + y[-1])))


@dataclass(frozen=True, eq=False)
class GridDensity:
    """Density samples ``values[k] = f(x0 + k*dx)``.

    ``smooth`` is False for densities known to have jumps (uniform laws and
    their unsmoothed sums); score-based functionals refuse those.
    """

    x0: float
    dx: float
    values: np.ndarray = field(repr=False)
    smooth: bool = True

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64)
        if vals.ndim != 1:
            raise InvalidDensityError("density values must be one-dimensional")
        if vals.size < 16:
            raise InvalidDensityError(f"grid needs at least 16 points, got {vals.size}")
        if not (math.isfinite(self.dx) and self.dx > 0):
            raise InvalidDensityError(f"grid step must be positive, got {self.dx}")
        if not math.isfinite(self.x0):
            raise InvalidDensityError("grid origin must be finite")
        if not np.all(np.isfinite(vals)):
            raise InvalidDensityError("density values must be finite")
        if np.any(vals < 0):
            raise InvalidDensityError("density values must be nonnegative")
        vals.setflags(write=False)
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "dx", float(self.dx))
        object.__setattr__(self, "values", vals)

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.size)

    @property
    def x_end(self) -> float:
        return self.x0 + self.dx * (self.size - 1)

    @property
    def span(self) -> float:
        return self.dx * (self.size - 1)

    @property
    def mass(self) -> float:
        return trapezoid(self.values, self.dx)

    @property
    def peak(self) -> float:
        return float(self.values.max())

    def pdf(self, x) -> np.ndarray:
        """Linear interpolation of the samples; zero off the grid."""
        return np.interp(np.asarray(x, dtype=float), self.x, self.values, left=0.0, right=0.0)


def normalize(d: GridDensity) -> GridDensity:
    mass = d.mass
    if not math.isfinite(mass) or mass <= 0:
        raise InvalidDensityError(f"cannot normalize a density with total mass {mass}")
    return replace(d, values=d.values / mass)


def _uniform_density(spec: Uniform, cfg: GridConfig) -> GridDensity:
    # Endpoints sit exactly on nodes with half height, so the trapezoid rule
    # integrates the jump exactly.
    width = spec.b - spec.a
    half_width = cfg.half_width_sigmas * math.sqrt(spec.variance)
    target_dx = 2 * half_width / (cfg.points - 1)
    m = max(1, int(round(width / target_dx)))
    m = min(m, cfg.points - 1)
    dx = width / m
    start = (cfg.points - 1 - m) // 2
    vals = np.zeros(cfg.points)
    vals[start : start + m + 1] = 1.0 / width
    vals[start] *= 0.5
    vals[start + m] *= 0.5
    return normalize(GridDensity(spec.a - start * dx, dx, vals, smooth=False))


def _has_jumps(values: np.ndarray) -> bool:
    peak = values.max()
    padded = np.concatenate(([0.0], values, [0.0]))
    return bool(np.abs(np.diff(padded)).max() > JUMP_REL * peak)


def _tabulated_density(spec: Tabulated, cfg: GridConfig) -> GridDensity:
    src = normalize(spec.density)
    mean, var = moments(src)
    if not (math.isfinite(var) and var > 0):
        raise ConfigurationError("tabulated density must have finite positive variance")
    half_width = max(
        cfg.half_width_sigmas * math.sqrt(var),
        mean - src.x0,
        src.x_end - mean,
    )
    x = mean + np.linspace(-half_width, half_width, cfg.points)
    out = np.interp(x, src.x, src.values, left=0.0, right=0.0)
    smooth = src.smooth and not _has_jumps(src.values)
    return normalize(GridDensity(x[0], x[1] - x[0], out, smooth=smooth))


def build_density(spec: DistributionSpec, cfg: GridConfig | None = None) -> GridDensity:
    """Sample ``spec`` on a grid centred at its mean, spanning the configured number of sigmas."""
    cfg = cfg or GridConfig()
    var = spec.variance
    if not (math.isfinite(var) and var > 0):
        raise ConfigurationError(f"distribution variance must be finite and > 0, got {var}")
    if isinstance(spec, Uniform):
        return _uniform_density(spec, cfg)
    if isinstance(spec, Tabulated):
        return _tabulated_density(spec, cfg)
    mean = spec.mean
    half_width = cfg.half_width_sigmas * math.sqrt(var)
    if isinstance(spec, GaussianMixture):
        # narrow, far-out components can poke past mean +- k*sigma_total
        for w, m, v in spec.components:
            if w > 0:
                half_width = max(half_width, abs(m - mean) + cfg.half_width_sigmas * math.sqrt(v))
    x = mean + np.linspace(-half_width, half_width, cfg.points)
    return normalize(GridDensity(x[0], x[1] - x[0], spec.pdf(x)))


def scale_density(d: GridDensity, a: float) -> GridDensity:
    """Density of ``a*X``; the grid is mapped exactly, no interpolation."""
    if a == 0 or not math.isfinite(a):
        raise DomainError("scale factor must be finite and nonzero")
    s = abs(a)
    if a > 0:
        return replace(d, x0=a * d.x0, dx=s * d.dx, values=d.values / s)
    return replace(d, x0=a * d.x_end, dx=s * d.dx, values=d.values[::-1] / s)


def shift_density(d: GridDensity, c: float) -> GridDensity:
    return replace(d, x0=d.x0 + c)


def resample(d: GridDensity, dx: float) -> GridDensity:
    """Linear interpolation onto a step-``dx`` grid starting at ``d.x0``, renormalized."""
    if math.isclose(dx, d.dx, rel_tol=1e-12):
        return d
    k = int(math.ceil(d.span / dx - 1e-9)) + 1
    x = d.x0 + dx * np.arange(k)
    vals = np.interp(x, d.x, d.values, left=0.0, right=0.0)
    return normalize(GridDensity(d.x0, dx, vals, smooth=d.smooth))


def common_step(d1: GridDensity, d2: GridDensity) -> tuple[GridDensity, GridDensity]:
    """Bring two densities onto one grid step.

    Normally the finer step. When exactly one density has jumps its grid is
    kept (interpolating across a jump moves mass and shifts the mean) unless
    that would coarsen the smooth one by more than ``COARSEN_LIMIT``.
    """
    big, small = max(d1.span, d2.span), min(d1.span, d2.span)
    if big > 1e6 * small:
        raise ResolutionError(f"grid spans differ by more than 1e6 ({big:g} vs {small:g})")
    if math.isclose(d1.dx, d2.dx, rel_tol=1e-12):
        return d1, replace(d2, dx=d1.dx)
    dx = min(d1.dx, d2.dx)
    if d1.smooth != d2.smooth:
        rough, fine = (d1, d2) if not d1.smooth else (d2, d1)
        if rough.dx <= COARSEN_LIMIT * fine.dx:
            dx = rough.dx
    return resample(d1, dx), resample(d2, dx)


def trim(d: GridDensity, rel: float = TRIM_REL) -> GridDensity:
    """Drop leading/trailing samples below ``rel * peak``."""
    keep = np.flatnonzero(d.values >= rel * d.peak)
    lo, hi = int(keep[0]), int(keep[-1])
    if hi - lo + 1 < 16:
        pad = (16 - (hi - lo + 1) + 1) // 2
        lo, hi = max(0, lo - pad), min(d.size - 1, hi + pad)
    if lo == 0 and hi == d.size - 1:
        return d
    return replace(d, x0=d.x0 + lo * d.dx, values=d.values[lo : hi + 1])


def convolve(d1: GridDensity, d2: GridDensity) -> GridDensity:
    """Density of ``X1 + X2`` for independent ``X1 ~ d1``, ``X2 ~ d2``."""
    a, b = common_step(d1, d2)
    vals = fftconvolve(a.values, b.values) * a.dx
    np.clip(vals, 0.0, None, out=vals)
    out = GridDensity(a.x0 + b.x0, a.dx, vals, smooth=d1.smooth or d2.smooth)
    return normalize(trim(out))


def moments(d: GridDensity) -> tuple[float, float]:
    """Trapezoidal mean and variance (the density is assumed normalized)."""
    x = d.x
    mean = trapezoid(x * d.values, d.dx)
    var = trapezoid((x - mean) ** 2 * d.values, d.dx)
    return mean, var


def gaussian_grid(variance: float, dx: float, half_width_sigmas: float = 8.0) -> GridDensity:
    """Centred normal density sampled with step ``dx``."""
    sd = math.sqrt(variance)
    k = int(math.ceil(half_width_sigmas * sd / dx))
    x = dx * np.arange(-k, k + 1)
    vals = np.exp(-0.5 * x * x / variance)
    return normalize(GridDensity(x[0], dx, vals))
