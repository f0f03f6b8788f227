"""Distribution specifications and grid configuration.

A spec describes a one-dimensional law in closed form (or as a tabulated
density) and knows its own mean and variance. ``build_density`` in
:mod:`infosum.density` turns a spec into a :class:`~infosum.density.GridDensity`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import TYPE_CHECKING, ClassVar, Union

import numpy as np

from .errors import ConfigurationError

if TYPE_CHECKING:
    from .density import GridDensity

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _gauss_pdf(x, mean, variance):
    return np.exp(-0.5 * (x - mean) ** 2 / variance) / (_SQRT_2PI * math.sqrt(variance))


def _positive_finite(value, what, path):
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ConfigurationError(f"{path}: {what} must be finite and > 0, got {value!r}")
    return value


@dataclass(frozen=True)
class Gaussian:
    mean: float = 0.0
    variance: float = 1.0
    family: ClassVar[str] = "gaussian"

    def __post_init__(self):
        _positive_finite(self.variance, "variance", "gaussian")
        if not math.isfinite(self.mean):
            raise ConfigurationError("gaussian: mean must be finite")

    def pdf(self, x):
        return _gauss_pdf(np.asarray(x, dtype=float), self.mean, self.variance)

    def to_dict(self) -> dict:
        return {"family": self.family, "mean": self.mean, "variance": self.variance}


@dataclass(frozen=True)
class Uniform:
    a: float = 0.0
    b: float = 1.0
    family: ClassVar[str] = "uniform"

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or self.b <= self.a:
            raise ConfigurationError(f"uniform: need finite a < b, got ({self.a}, {self.b})")

    @property
    def mean(self) -> float:
        return 0.5 * (self.a + self.b)

    @property
    def variance(self) -> float:
        return (self.b - self.a) ** 2 / 12.0

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= self.a) & (x <= self.b), 1.0 / (self.b - self.a), 0.0)

    def to_dict(self) -> dict:
        return {"family": self.family, "a": self.a, "b": self.b}


@dataclass(frozen=True)
class GaussianMixture:
    """Finite mixture; ``components`` holds ``(weight, mean, variance)`` triples."""

    components: tuple[tuple[float, float, float], ...]
    family: ClassVar[str] = "gaussian_mixture"

    def __post_init__(self):
        comps = tuple(tuple(float(v) for v in c) for c in self.components)
        if not comps:
            raise ConfigurationError("gaussian_mixture: no components")
        for k, c in enumerate(comps):
            if len(c) != 3:
                raise ConfigurationError(f"gaussian_mixture.components[{k}]: expected (weight, mean, variance)")
            if c[0] < 0:
                raise ConfigurationError(f"gaussian_mixture.components[{k}]: negative weight")
            _positive_finite(c[2], "variance", f"gaussian_mixture.components[{k}]")
        total = sum(c[0] for c in comps)
        if abs(total - 1.0) > 1e-9:
            raise ConfigurationError(f"gaussian_mixture: weights sum to {total}, not 1")
        object.__setattr__(self, "components", comps)

    @property
    def mean(self) -> float:
        return sum(w * m for w, m, _ in self.components)

    @property
    def variance(self) -> float:
        mu = self.mean
        return sum(w * (v + (m - mu) ** 2) for w, m, v in self.components)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return sum(w * _gauss_pdf(x, m, v) for w, m, v in self.components)

    def pdf_derivative(self, x):
        x = np.asarray(x, dtype=float)
        return sum(-w * (x - m) / v * _gauss_pdf(x, m, v) for w, m, v in self.components)

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "components": [{"weight": w, "mean": m, "variance": v} for w, m, v in self.components],
        }


@dataclass(frozen=True)
class Tabulated:
    density: "GridDensity"
    family: ClassVar[str] = "tabulated"

    @classmethod
    def from_samples(cls, x0: float, dx: float, values) -> "Tabulated":
        """Build from raw samples; negative entries are clamped to 0 with a warning."""
        from .density import GridDensity, normalize

        vals = np.asarray(values, dtype=float)
        if np.any(vals < 0):
            warnings.warn("tabulated density has negative samples; clamping to 0", stacklevel=2)
            vals = np.clip(vals, 0.0, None)
        return cls(normalize(GridDensity(x0, dx, vals)))

    @property
    def mean(self) -> float:
        from .density import moments

        return moments(self.density)[0]

    @property
    def variance(self) -> float:
        from .density import moments

        return moments(self.density)[1]

    def to_dict(self) -> dict:
        d = self.density
        return {"family": self.family, "x0": d.x0, "dx": d.dx, "values": [float(v) for v in d.values]}


DistributionSpec = Union[Gaussian, Uniform, GaussianMixture, Tabulated]


def spec_from_dict(obj, path: str = "$") -> DistributionSpec:
    """Parse the JSON form of a distribution spec.

    Errors name the offending JSON path, e.g. ``$.system[2].variance``.
    """
    if not isinstance(obj, dict):
        raise ConfigurationError(f"{path}: expected an object, got {type(obj).__name__}")
    family = obj.get("family")

    def num(key, default=None):
        if key not in obj:
            if default is None:
                raise ConfigurationError(f"{path}.{key}: missing")
            return default
        val = obj[key]
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ConfigurationError(f"{path}.{key}: expected a number")
        return float(val)

    try:
        if family == "gaussian":
            return Gaussian(num("mean", 0.0), _positive_finite(num("variance"), "variance", f"{path}.variance"))
        if family == "uniform":
            return Uniform(num("a"), num("b"))
        if family == "gaussian_mixture":
            comps = obj.get("components")
            if not isinstance(comps, list):
                raise ConfigurationError(f"{path}.components: expected a list")
            triples = []
            for k, c in enumerate(comps):
                if isinstance(c, dict):
                    triples.append((c.get("weight"), c.get("mean", 0.0), c.get("variance")))
                elif isinstance(c, (list, tuple)):
                    triples.append(tuple(c))
                else:
                    raise ConfigurationError(f"{path}.components[{k}]: expected object or [w, mean, var]")
                if any(not isinstance(v, (int, float)) or isinstance(v, bool) for v in triples[-1]):
                    raise ConfigurationError(f"{path}.components[{k}]: non-numeric entry")
            return GaussianMixture(tuple(triples))
        if family == "tabulated":
            vals = obj.get("values")
            if not isinstance(vals, list):
                raise ConfigurationError(f"{path}.values: expected a list")
            return Tabulated.from_samples(num("x0"), num("dx"), vals)
    except ConfigurationError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigurationError(f"{path}: {exc}") from exc
    raise ConfigurationError(f"{path}.family: unknown family {family!r}")


@dataclass(frozen=True)
class GridConfig:
    half_width_sigmas: float = 8.0
    points: int = 4096

    def __post_init__(self):
        if not math.isfinite(self.half_width_sigmas) or self.half_width_sigmas < 6:
            raise ConfigurationError(
                f"grid half-width must be at least 6 standard deviations, got {self.half_width_sigmas}"
            )
        p = self.points
        if not isinstance(p, int) or p < 1024 or p & (p - 1):
            raise ConfigurationError(f"grid points must be a power of two >= 1024, got {p!r}")
