from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from infosum.anova import (
    CAdditiveFunction,
    ProductSpace,
    VarianceDropViolation,
    anova_decompose,
    anova_table,
    hoeffding_u_variance,
    project_out,
    variance_drop_bound,
)
from infosum.corpus import random_product_space, table_corpus, variance_drop_corpus
from infosum.errors import ConfigurationError, PreconditionError, ShapeError
from infosum.subsets import (
    SubsetCollection,
    natural_packing,
    optimize_packing_lp,
    standard_collection,
    uniform_packing,
)

SUPPORT = np.array([-1.0, 0.0, 2.0])
PROBS = np.array([0.3, 0.5, 0.2])
CENTERED = SUPPORT - SUPPORT @ PROBS


def centered_space(n):
    return ProductSpace.iid(CENTERED, PROBS, n)


def test_product_space_validation():
    with pytest.raises(ConfigurationError):
        ProductSpace((np.array([0.0, 1.0]),), (np.array([0.5, 0.6]),))
    with pytest.raises(ConfigurationError):
        ProductSpace((np.array([0.0, 1.0]),), (np.array([1.0, 0.0]),))
    with pytest.raises(ConfigurationError):
        ProductSpace((np.array([0.0, 1.0]),), ())


def test_project_out_examples():
    space = centered_space(2)
    x1 = space.coordinate(1)
    assert np.allclose(project_out(x1, 1, space), 0.0, atol=1e-15)
    assert np.allclose(project_out(x1, 2, space), x1)
    const = np.full(space.shape, 3.5)
    assert np.allclose(project_out(const, 1, space), 3.5)


@given(st.integers(0, 2**32 - 1))
def test_projection_idempotent_and_constant_along_axis(seed):
    rng = np.random.default_rng(seed)
    space = random_product_space(rng, int(rng.integers(1, 4)))
    psi = rng.normal(size=space.shape)
    for j in range(1, space.n + 1):
        once = project_out(psi, j, space)
        assert np.max(np.abs(project_out(once, j, space) - once)) < 1e-14
        assert np.allclose(np.diff(once, axis=j - 1), 0.0, atol=1e-14)


def test_pure_interaction_and_main_effects():
    space = centered_space(2)
    x1, x2 = space.coordinate(1), space.coordinate(2)
    dec = anova_decompose(x1 * x2, space)
    nonzero = {t for t, c in dec.components.items() if np.max(np.abs(c)) > 1e-12}
    assert nonzero == {(1, 2)}
    dec = anova_decompose(x1 + x2, space)
    nonzero = {t for t, c in dec.components.items() if np.max(np.abs(c)) > 1e-12}
    assert nonzero == {(1,), (2,)}


def test_variance_additivity_three_coordinates():
    rng = np.random.default_rng(7)
    space = ProductSpace(
        tuple(np.sort(rng.normal(size=3)) for _ in range(3)),
        tuple(np.array([0.2, 0.3, 0.5]) for _ in range(3)),
    )
    psi = rng.normal(size=space.shape)
    dec = anova_decompose(psi, space)
    var = space.expect(psi**2) - space.expect(psi) ** 2
    assert math.fsum(dec.variances().values()) == pytest.approx(var, abs=1e-10)


@pytest.mark.parametrize("k", range(50))
def test_decomposition_invariants(k):
    space, psi = table_corpus(seed=11, count=50)[k]
    dec = anova_decompose(psi, space)
    assert len(dec.components) == 2**space.n
    assert np.max(np.abs(dec.reconstruct() - psi)) < 1e-12
    for t, comp in dec.components.items():
        for j in range(1, space.n + 1):
            proj = project_out(comp, j, space)
            target = 0.0 if j in t else comp
            assert np.max(np.abs(proj - target)) < 1e-12
    for a, b in itertools.combinations(dec.components.values(), 2):
        assert abs(space.inner(a, b)) < 1e-12


def test_anova_table_fractions():
    space = centered_space(2)
    rows = anova_table(space.coordinate(1) + space.coordinate(1) * space.coordinate(2), space)
    assert math.fsum(r["fraction"] for r in rows) == pytest.approx(1.0)


def test_c_additive_validation():
    space = centered_space(2)
    C = standard_collection("singletons", 2)
    with pytest.raises(ShapeError):
        CAdditiveFunction(C, (CENTERED,))
    with pytest.raises(ShapeError):
        CAdditiveFunction(C, (CENTERED, np.outer(CENTERED, CENTERED)))
    U = CAdditiveFunction(C, (CENTERED + 1.0, CENTERED))
    with pytest.raises(PreconditionError):
        variance_drop_bound(U, space)


def test_singletons_equality():
    space = centered_space(3)
    U = CAdditiveFunction(standard_collection("singletons", 3), (CENTERED, 2 * CENTERED, CENTERED**2 - CENTERED**2 @ PROBS))
    lhs, rhs = variance_drop_bound(U, space)
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_leave_one_out_additive_equality_and_interaction_strict():
    space = centered_space(3)
    C = standard_collection("leave_one_out", 3)
    additive = tuple(np.add.outer(CENTERED, CENTERED) for _ in C.sets)
    lhs, rhs = variance_drop_bound(CAdditiveFunction(C, additive), space)
    assert lhs == pytest.approx(rhs, abs=1e-12)
    interaction = tuple(np.outer(CENTERED, CENTERED) for _ in C.sets)
    lhs, rhs = variance_drop_bound(CAdditiveFunction(C, interaction), space)
    assert lhs < rhs - 1e-3


def test_packing_mode_requires_valid_packing():
    space = centered_space(2)
    C = SubsetCollection(2, ((1,), (1, 2)))
    U = CAdditiveFunction(C, (CENTERED, np.outer(CENTERED, CENTERED)))
    with pytest.raises(PreconditionError):
        variance_drop_bound(U, space, [1.0, 1.0])
    lhs, rhs = variance_drop_bound(U, space, [1.0, 0.0])
    assert rhs == math.inf


def test_violation_is_reported(monkeypatch):
    import infosum.anova as anova

    space = centered_space(2)
    U = CAdditiveFunction(standard_collection("singletons", 2), (CENTERED, CENTERED))
    monkeypatch.setattr(anova.math, "fsum", lambda xs: 0.0)
    with pytest.raises(VarianceDropViolation):
        anova.variance_drop_bound(U, space)


CASES = variance_drop_corpus(seed=314, count=100)


@pytest.mark.parametrize("k", range(len(CASES)))
def test_variance_drop_corpus(k):
    case = CASES[k]
    U, space, C = case.function, case.space, case.collection
    lhs, rhs = variance_drop_bound(U, space)
    assert rhs - lhs >= -1e-10
    second = U.component_second_moments(space)
    for beta in (optimize_packing_lp(C, second), natural_packing(C)):
        lhs_b, rhs_b = variance_drop_bound(U, space, beta)
        assert rhs_b - lhs_b >= -1e-10
    # with beta_s = 1/r the general bound is the uniform one
    _, rhs_u = variance_drop_bound(U, space, uniform_packing(C))
    assert rhs_u == pytest.approx(rhs, rel=1e-14, abs=1e-300)


def test_hoeffding_m1_equality():
    lhs, rhs = hoeffding_u_variance(CENTERED, centered_space(4))
    sigma2 = CENTERED**2 @ PROBS
    assert lhs == pytest.approx(sigma2 / 4, abs=1e-15)
    assert abs(lhs - rhs) < 1e-12


def test_hoeffding_pure_interaction():
    psi = np.outer(CENTERED, CENTERED)
    lhs, rhs = hoeffding_u_variance(psi, centered_space(4))
    e_psi2 = ProductSpace.iid(CENTERED, PROBS, 2).expect(psi**2)
    assert lhs == pytest.approx(e_psi2 / 6, abs=1e-15)
    assert rhs == pytest.approx(0.5 * e_psi2)


def test_hoeffding_full_degree_and_errors():
    psi = np.multiply.outer(np.outer(CENTERED, CENTERED), CENTERED)
    lhs, rhs = hoeffding_u_variance(psi, centered_space(3))
    assert lhs <= rhs + 1e-15
    with pytest.raises(PreconditionError):
        hoeffding_u_variance(np.outer(CENTERED, SUPPORT), centered_space(3))
    with pytest.raises(PreconditionError):
        hoeffding_u_variance(SUPPORT, centered_space(3))
    with pytest.raises(PreconditionError):
        hoeffding_u_variance(psi, centered_space(2))
