import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as quad_integrate

from gtrmodel.core import (
    BlochVector,
    LocallyUniformDistribution,
    ModelParams,
    PiecewiseDistribution,
    RatioSolution,
    SequentialProbTable,
    integrate,
    probabilities_from_params,
    sequential_probabilities,
    single_outcome_probabilities,
)
from gtrmodel.errors import InfeasibleError, NormalizationError, ParameterDomainError

from conftest import PRINTED_RATIOS, ratios_from_brackets

CG_AB = (0.4899, 0.0447, 0.1767, 0.2887)
CG_BA = (0.5625, 0.1991, 0.0255, 0.2129)


def quad_yes(eps, d, c):
    """Independent oracle: numerically integrate the locally uniform density below c."""
    lo, hi = d - eps, d + eps
    val, _ = quad_integrate.quad(lambda x: 1.0 / (2 * eps) if lo <= x <= hi else 0.0, -1.0, c,
                                 points=[p for p in (lo, hi) if -1 < p < c], limit=200)
    return val


# -- distributions ----------------------------------------------------------


@pytest.mark.parametrize("eps, d", [(0.0, 0.0), (-0.1, 0.0), (1.5, 0.0), (0.5, 0.6), (0.3, -0.8)])
def test_locally_uniform_rejects_bad_domain(eps, d):
    with pytest.raises(ParameterDomainError):
        LocallyUniformDistribution(eps, d)


def test_born_rule_recovery():
    rho = LocallyUniformDistribution(1.0, 0.0)
    for c in np.linspace(-1, 1, 21):
        p_yes, p_no = single_outcome_probabilities(rho, c)
        assert p_yes == pytest.approx((1 + c) / 2, abs=1e-15)
        assert p_yes + p_no == 1.0


def test_single_outcome_closed_form_against_quadrature():
    p_yes, _ = single_outcome_probabilities(LocallyUniformDistribution(0.5, 0.08), 0.11)
    assert p_yes == pytest.approx(0.53, abs=1e-12)
    assert p_yes == pytest.approx(quad_yes(0.5, 0.08, 0.11), abs=1e-9)


@pytest.mark.parametrize("c, expected", [(0.9, 1.0), (-0.9, 0.0), (0.2, 1.0), (-0.2, 0.0)])
def test_single_outcome_clamps_outside_support(c, expected):
    assert single_outcome_probabilities(LocallyUniformDistribution(0.2, 0.0), c)[0] == expected


def test_single_outcome_rejects_bad_cosine():
    with pytest.raises(ParameterDomainError):
        single_outcome_probabilities(LocallyUniformDistribution(1.0, 0.0), 1.5)


def test_integrate_examples():
    born = PiecewiseDistribution.uniform()
    assert integrate(born, -1, 0) == 0.5
    trunc = PiecewiseDistribution.from_intervals([(-0.42, 0.32, 1 / 0.74)])
    assert integrate(trunc, -0.42, 0.32) == pytest.approx(1.0, abs=1e-12)
    assert integrate(trunc, 0.1, 0.1) == 0.0
    assert integrate(trunc, -1, 1) == 1.0


@pytest.mark.parametrize("lo, hi", [(-1.5, 0), (0, 1.1), (0.5, 0.2)])
def test_integrate_rejects_bad_bounds(lo, hi):
    with pytest.raises(ParameterDomainError):
        integrate(PiecewiseDistribution.uniform(), lo, hi)


def test_piecewise_validation():
    with pytest.raises(ParameterDomainError):
        PiecewiseDistribution([-1, 0, 1], [0.5, 0.6])
    with pytest.raises(ParameterDomainError):
        PiecewiseDistribution([-1, 0.5, 0.2, 1], [0.5, 0.5, 0.5])
    with pytest.raises(ParameterDomainError):
        PiecewiseDistribution([-0.9, 1], [1 / 1.9])
    with pytest.raises(ParameterDomainError):
        PiecewiseDistribution([-1, 0, 1], [1.5, -0.5])


@settings(max_examples=300)
@given(
    eps=st.floats(0.01, 1.0),
    frac=st.floats(0.0, 1.0),
    t=st.floats(0.0, 1.0),
)
def test_closed_form_matches_piecewise_integral(eps, frac, t):
    d = (1 - eps) * (2 * frac - 1)
    rho = LocallyUniformDistribution(eps, d)
    c = d - eps + 2 * eps * t
    c = min(1.0, max(-1.0, c))
    assert single_outcome_probabilities(rho, c)[0] == pytest.approx(
        integrate(rho.to_piecewise(), -1, c), abs=1e-12
    )


# -- sequential probabilities ----------------------------------------------


@pytest.mark.parametrize("order, expected", [("AB", CG_AB), ("BA", CG_BA)])
def test_sequential_from_printed_ratios(order, expected):
    probs = sequential_probabilities(RatioSolution(*PRINTED_RATIOS["clinton-gore"]), order)
    np.testing.assert_allclose(probs, expected, atol=5e-4)


@pytest.mark.parametrize("order", ["AB", "BA"])
def test_zero_ratios_give_quarter(order):
    assert sequential_probabilities(RatioSolution(0, 0, 0, 0, 0, 0), order) == (0.25,) * 4


def test_infeasible_ratios():
    with pytest.raises(InfeasibleError):
        sequential_probabilities(RatioSolution(0, 1.5, 0, 0, 0, 0), "AB")
    with pytest.raises(ParameterDomainError):
        sequential_probabilities(RatioSolution(0, 0, 0, 0, 0, 0), "AC")


def test_probabilities_from_params_clinton_gore(cg_params):
    np.testing.assert_allclose(probabilities_from_params(cg_params, "AB"), CG_AB, atol=1e-3)
    rounded = ModelParams(0.5, 0.0772, 0.5884, -0.1742, 0.1118, 0.1336, 0.3158)
    np.testing.assert_allclose(probabilities_from_params(rounded, "AB"), CG_AB, atol=1e-3)


def test_born_params_give_quarter():
    born = ModelParams(1, 0, 1, 0, 0, 0, 0)
    for order in ("AB", "BA"):
        np.testing.assert_allclose(probabilities_from_params(born, order), 0.25, atol=1e-15)


@pytest.mark.parametrize("cos_theta", [-0.35, 0.0, 0.2, 0.35])
def test_state_along_a_yes(cos_theta):
    # B support is [-0.4, 0.8]; both +-cos_theta must lie inside it
    p = ModelParams(1.0, 0.0, 0.6, 0.2, 1.0, 0.2, cos_theta)
    yy, yn, ny, nn = probabilities_from_params(p, "AB")
    assert ny == 0.0 and nn == 0.0
    assert yy + yn == 1.0


def test_model_params_reports_named_violations():
    with pytest.raises(InfeasibleError) as info:
        ModelParams(0.5, 0.0, 0.5, 0.0, 0.9, 0.0, 0.0)
    assert "cos_theta_a in support A" in info.value.constraints
    with pytest.raises(InfeasibleError) as info:
        ModelParams(0.6, 0.5, 0.5, 0.0, 0.5, 0.0, 0.0)
    assert "|d_a| <= 1 - eps_a" in info.value.constraints


brackets = st.floats(-1.0, 1.0)


@settings(max_examples=500)
@given(st.tuples(*[brackets] * 6))
def test_orders_sum_to_one(br):
    r = ratios_from_brackets(*br)
    for order in ("AB", "BA"):
        probs = sequential_probabilities(r, order)
        assert abs(math.fsum(probs) - 1.0) <= 1e-12
        assert all(-1e-15 <= p <= 1 for p in probs)


@settings(max_examples=300)
@given(
    eps_a=st.floats(0.05, 1.0),
    fa=st.floats(-1, 1),
    ta=st.floats(-1, 1),
    t=st.floats(-1, 1),
)
def test_marginal_consistency(eps_a, fa, ta, t):
    d_a = fa * (1 - eps_a)
    cos_a = d_a + ta * eps_a
    cos_t = d_a + t * eps_a
    p = ModelParams(eps_a, d_a, 1.0, 0.0, cos_a, 0.0, cos_t)
    yy, yn, _, _ = probabilities_from_params(p, "AB")
    assert yy + yn == pytest.approx(single_outcome_probabilities(p.rho_a, cos_a)[0], abs=1e-12)


def test_table_validation_and_renormalization():
    with pytest.raises(NormalizationError):
        SequentialProbTable((0.4899, 0.0447, 0.1767, 0.2886), CG_BA)
    t = SequentialProbTable.from_raw((0.4899, 0.0447, 0.1767, 0.2886), (0.5625, 0.1991, 0.0255, 0.2130))
    assert sum(t.ab) == pytest.approx(1, abs=1e-15)
    with pytest.raises(NormalizationError):
        SequentialProbTable.from_raw((0.5, 0.1, 0.1, 0.2), CG_BA)
    with pytest.raises(ParameterDomainError):
        SequentialProbTable((1.2, -0.2, 0, 0), CG_BA)


def test_bloch_vector_norm():
    BlochVector(0, 0.6, 0.8)
    with pytest.raises(ParameterDomainError):
        BlochVector(0, 0.6, 0.81)
