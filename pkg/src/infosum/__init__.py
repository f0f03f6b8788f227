"""Information functionals of sums of independent random variables on grids.

Entropy, Fisher information, entropy power and relative entropy of densities
sampled on uniform grids, together with numerical checks of subset-sum
entropy power and Fisher information inequalities, variance-drop bounds and
central-limit monotonicity.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .density import GridDensity, build_density, convolve, moments, normalize, scale_density
from .errors import (
    ConfigurationError,
    ConsistencyError,
    DomainError,
    InfosumError,
    InvalidDensityError,
    PreconditionError,
    ResolutionError,
    ScoreUndefinedError,
    ShapeError,
)
from .functionals import (
    de_bruijn_entropy,
    entropy,
    entropy_power,
    fisher_information,
    heat_perturb,
    info_summary,
    rel_entropy_gaussian,
    score,
    score_convolution_check,
)
from .specs import Gaussian, GaussianMixture, GridConfig, Tabulated, Uniform, spec_from_dict
from .subsets import (
    FractionalPacking,
    SubsetCollection,
    WeightVector,
    classify,
    natural_packing,
    optimize_packing_lp,
    standard_collection,
)
from .verifiers import InequalityReport, SumSystem, verify_all

__all__ = [name for name in dir() if not name.startswith("_")]
