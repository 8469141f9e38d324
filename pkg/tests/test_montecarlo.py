import numpy as np
import pytest

from gtrmodel.core import LocallyUniformDistribution, ModelParams, PiecewiseDistribution, probabilities_from_params
from gtrmodel.errors import InfeasibleError, ParameterDomainError
from gtrmodel.montecarlo import estimate_sequential, make_generators, sample_outcome


def test_sample_outcome_born():
    rng = make_generators(1)[0]
    d = PiecewiseDistribution.uniform()
    yes = sum(sample_outcome(d, 0.0, rng) == "yes" for _ in range(20000))
    assert abs(yes / 20000 - 0.5) < 4 * 0.5 / np.sqrt(20000)
    assert all(sample_outcome(d, 1.0, rng) == "yes" for _ in range(1000))
    assert all(sample_outcome(d, -1.0, rng) == "no" for _ in range(1000))
    with pytest.raises(ParameterDomainError):
        sample_outcome(d, 1.5, rng)


def test_frequency_of_fitted_marginal(cg_params):
    d = cg_params.rho_a.to_piecewise()
    u = make_generators(3)[0].random(10**6)
    freq = np.mean(d.inverse_cdf(u) < cg_params.cos_theta_a)
    assert abs(freq - 0.5346) < 3 * 0.0005


def test_determinism(cg_params):
    a = estimate_sequential(cg_params, "AB", 300_001, seed=11, shards=4)
    b = estimate_sequential(cg_params, "AB", 300_001, seed=11, shards=4)
    assert a == b
    c = estimate_sequential(cg_params, "AB", 300_001, seed=11, shards=4, workers=4)
    assert c == a
    assert sum(a.counts) == a.n
    assert estimate_sequential(cg_params, "AB", 300_001, seed=12, shards=4) != a


def test_estimates_within_4_sigma(dataset):
    from gtrmodel.inversion import concretize, fit_ratios

    params = concretize(fit_ratios(dataset.table()), 0.5)
    for order in ("AB", "BA"):
        rep = estimate_sequential(params, order, 10**6, seed=2016)
        assert max(abs(z) for z in rep.z_scores(probabilities_from_params(params, order))) < 4
        assert sum(rep.estimates) == pytest.approx(1.0, abs=1e-15)
        assert all(se >= 0 for se in rep.standard_errors)


def test_clinton_gore_against_table(cg_params):
    rep = estimate_sequential(cg_params, "AB", 10**6, seed=5)
    assert max(abs(z) for z in rep.z_scores((0.4899, 0.0447, 0.1767, 0.2887))) < 4


def test_certain_first_outcome():
    p = ModelParams(1.0, 0.0, 1.0, 0.0, 1.0, 0.3, 0.3)
    rep = estimate_sequential(p, "AB", 100_000, seed=0)
    assert rep.counts[2] == rep.counts[3] == 0
    assert rep.estimates[0] + rep.estimates[1] == 1.0
    assert rep.standard_errors[2] == rep.standard_errors[3] == 0.0


def test_argument_errors(cg_params):
    with pytest.raises(ParameterDomainError):
        estimate_sequential(cg_params, "AB", 0, seed=0)
    with pytest.raises(ParameterDomainError):
        estimate_sequential(cg_params, "AC", 10, seed=0)
    with pytest.raises(ParameterDomainError):
        estimate_sequential(cg_params, "AB", 10, seed=0, shards=0)


def test_infeasible_params_rejected():
    with pytest.raises(InfeasibleError):
        ModelParams(0.1, 0.0, 1.0, 0.0, 0.5, 0.0, 0.0)


def test_report_serializes(cg_params):
    d = estimate_sequential(cg_params, "BA", 1000, seed=1).as_dict()
    assert set(d) == {"order", "n", "seed", "shards", "counts", "estimates", "standard_errors"}
    assert sum(d["counts"].values()) == 1000
