from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from infosum.density import build_density, convolve, moments, scale_density
from infosum.errors import DomainError, ScoreUndefinedError
from infosum.functionals import (
    HeatPath,
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
from infosum.specs import Gaussian, GridConfig, Uniform

from conftest import BIMODAL, HALF_LOG_2PIE

# Frozen adaptive-quadrature values of the analytic densities (tests/oracles/generate.py).
BIMODAL_H = 1.3585115463815944
BIMODAL_I = 2.902441459348179
SMOOTH_UNIFORM_H = 0.18063945711371013  # uniform(0,1) + N(0, 0.01)
SMOOTH_UNIFORM_I = 18.063945711294163


def test_gaussian_entropy():
    assert entropy(build_density(Gaussian(0, 1))) == pytest.approx(HALF_LOG_2PIE, abs=1e-5)


def test_uniform_entropy_edge_error():
    assert abs(entropy(build_density(Uniform(0, 1)))) < 5e-3


def test_mixture_entropy_against_oracle_and_refinement():
    coarse = entropy(build_density(BIMODAL))
    fine = entropy(build_density(BIMODAL, GridConfig(points=4 * 4096)))
    assert coarse == pytest.approx(fine, abs=1e-4)
    assert coarse == pytest.approx(BIMODAL_H, abs=1e-5)


@pytest.mark.parametrize("mu, var", [(0.0, 1.0), (2.0, 0.5), (-1.0, 4.0)])
def test_gaussian_score(mu, var):
    d = build_density(Gaussian(mu, var))
    rho = score(d)
    region = np.abs(d.x - mu) <= 4 * math.sqrt(var)
    assert np.max(np.abs(rho.values[region] + (d.x[region] - mu) / var)) < 1e-3
    assert abs(np.sum(d.values * rho.values) * d.dx) < 1e-3


def test_mixture_score_matches_analytic():
    d = build_density(BIMODAL)
    rho = score(d)
    x = d.x
    f = BIMODAL.pdf(x)
    mask = f > 1e-6
    analytic = BIMODAL.pdf_derivative(x[mask]) / f[mask]
    assert np.max(np.abs(rho.values[mask] - analytic)) < 1e-3


def test_score_refuses_jumps():
    with pytest.raises(ScoreUndefinedError):
        score(build_density(Uniform(0, 1)))
    with pytest.raises(ScoreUndefinedError):
        fisher_information(convolve(build_density(Uniform(0, 1)), build_density(Uniform(0, 1))))


@pytest.mark.parametrize("var", [0.5, 1.0, 4.0])
def test_gaussian_fisher(var):
    assert fisher_information(build_density(Gaussian(0, var))) == pytest.approx(1 / var, rel=1e-3)


def test_fisher_scaling_law():
    i1 = fisher_information(build_density(Gaussian(0, 1)))
    i4 = fisher_information(build_density(Gaussian(0, 4)))
    assert i1 == pytest.approx(4 * i4, rel=1e-6)


def test_mixture_fisher_against_oracle_and_refinement():
    coarse = fisher_information(build_density(BIMODAL))
    fine = fisher_information(build_density(BIMODAL, GridConfig(points=4 * 4096)))
    assert coarse == pytest.approx(fine, rel=1e-3)
    assert coarse == pytest.approx(BIMODAL_I, rel=1e-4)


def test_info_summary_gaussians():
    s = info_summary(build_density(Gaussian(0, 1)))
    assert s.entropy == pytest.approx(HALF_LOG_2PIE, abs=1e-6)
    assert s.fisher == pytest.approx(1.0, rel=1e-6)
    assert s.entropy_power == pytest.approx(2 * math.pi * math.e, rel=1e-6)
    assert abs(s.rel_entropy_gaussian) < 1e-8
    assert s.variance == pytest.approx(1.0, rel=1e-9)
    assert s.entropy_power == math.exp(2 * s.entropy)
    s2 = info_summary(build_density(Gaussian(0, 2)))
    assert s2.fisher == pytest.approx(0.5, rel=1e-6)
    assert s2.entropy_power == pytest.approx(4 * math.pi * math.e, rel=1e-6)
    assert set(s2.to_dict()) == {"entropy", "fisher", "entropy_power", "rel_entropy_gaussian", "variance"}


def test_info_summary_mixture_and_uniform():
    assert info_summary(build_density(BIMODAL)).rel_entropy_gaussian > 0.01
    u = info_summary(build_density(Uniform(0, 1)))
    assert u.fisher is None
    assert u.to_dict()["fisher"] is None


def test_heat_perturb():
    d = heat_perturb(build_density(Gaussian(0, 1)), 1.0)
    assert entropy(d) == pytest.approx(0.5 * math.log(4 * math.pi * math.e), abs=1e-8)
    u = heat_perturb(build_density(Uniform(0, 1)), 0.01)
    assert u.smooth
    assert entropy(u) == pytest.approx(SMOOTH_UNIFORM_H, abs=1e-5)
    assert fisher_information(u) == pytest.approx(SMOOTH_UNIFORM_I, rel=1e-4)
    with pytest.raises(DomainError):
        heat_perturb(u, 0.0)
    assert HeatPath(u, 0.0).density() is u


@given(st.sampled_from([Gaussian(0, 1), Uniform(0, 1), BIMODAL]), st.floats(0.01, 3.0))
def test_heat_perturb_adds_variance(spec, t):
    d = build_density(spec)
    assert moments(heat_perturb(d, t))[1] == pytest.approx(moments(d)[1] + t, abs=1e-4)


@pytest.mark.parametrize("spec", [Gaussian(0, 1), Uniform(0, 1), BIMODAL])
def test_smoothing_increases_entropy(spec):
    d = build_density(spec)
    values = [entropy(heat_perturb(d, t)) for t in (0.1, 0.5, 1.0, 2.0)]
    assert all(b > a for a, b in zip(values, values[1:]))


@given(st.sampled_from([Gaussian(0, 1), BIMODAL, Gaussian(1, 3)]), st.sampled_from([2.0, 1 / 3, -1.0, 0.7]))
def test_scaling_laws(spec, a):
    d = build_density(spec)
    scaled = scale_density(d, a)
    assert entropy(scaled) == pytest.approx(entropy(d) + math.log(abs(a)), abs=1e-4)
    assert fisher_information(scaled) == pytest.approx(fisher_information(d) / a**2, rel=1e-3)


@pytest.mark.parametrize("spec", [Gaussian(0, 1), Gaussian(3, 2), BIMODAL, Uniform(0, 1)])
def test_gaussian_extremality(spec):
    D = rel_entropy_gaussian(build_density(spec))
    assert D >= -1e-6
    assert (D < 1e-4) == (spec.family == "gaussian")


def test_entropy_power():
    d = build_density(Gaussian(0, 3))
    assert entropy_power(d) == pytest.approx(2 * math.pi * math.e * 3, rel=1e-6)


def test_de_bruijn():
    assert de_bruijn_entropy(build_density(Gaussian(0, 1))) == pytest.approx(HALF_LOG_2PIE, abs=1e-4)
    u = build_density(Uniform(0, 1))
    assert de_bruijn_entropy(u) == pytest.approx(entropy(u), abs=5e-3)
    m = build_density(BIMODAL)
    assert de_bruijn_entropy(m) == pytest.approx(entropy(m), abs=1e-3)
    with pytest.raises(DomainError):
        de_bruijn_entropy(m, t_max=0)


@pytest.mark.parametrize(
    "first, second, bound",
    [
        (Gaussian(0, 1), Gaussian(0, 1), 1e-3),
        (BIMODAL, Gaussian(0, 1), 5e-3),
        (Gaussian(0, 1), Uniform(0, 1), 5e-3),
    ],
)
def test_score_convolution_identity(first, second, bound):
    assert score_convolution_check(build_density(first), build_density(second)) < bound


def test_score_convolution_needs_first_score():
    with pytest.raises(ScoreUndefinedError):
        score_convolution_check(build_density(Uniform(0, 1)), build_density(Gaussian(0, 1)))


@pytest.mark.parametrize("pair", [("g", "m"), ("m", "s"), ("s", "g"), ("s", "s")])
def test_score_convolution_smooth_families(pair):
    smooth_u = heat_perturb(build_density(Uniform(0, 1)), 0.01)
    pool = {"g": build_density(Gaussian(0, 1)), "m": build_density(BIMODAL), "s": smooth_u}
    assert score_convolution_check(pool[pair[0]], pool[pair[1]]) < 5e-3
