import math

import numpy as np
import pytest

from gtrmodel.core import LocallyUniformDistribution, PiecewiseDistribution, probabilities_from_params
from gtrmodel.datasets import BUILTIN
from gtrmodel.errors import DegenerateDataError, ImpossibleOutcomeError, ParameterDomainError
from gtrmodel.inversion import concretize, fit_ratios
from gtrmodel.replicability import Session, measure, parse_sequence, run_sequence, truncate_renormalize


@pytest.fixture(params=sorted(BUILTIN))
def params(request):
    return concretize(fit_ratios(BUILTIN[request.param].table()), 0.5)


def test_truncate_locally_uniform():
    d = LocallyUniformDistribution(0.5, 0.08).to_piecewise()
    t = truncate_renormalize(d, 0.32, "below")
    (lo, hi, h), = [iv for iv in t.intervals() if iv[2] > 0]
    assert lo == pytest.approx(-0.42, abs=1e-15)
    assert hi == pytest.approx(0.32, abs=1e-15)
    assert h == pytest.approx(1 / 0.74, rel=1e-12)
    assert t.total() == pytest.approx(1.0, abs=1e-12)


def test_truncate_born():
    t = truncate_renormalize(PiecewiseDistribution.uniform(), 0.0, "below")
    assert [iv for iv in t.intervals() if iv[2] > 0] == [(-1.0, 0.0, 1.0)]
    t = truncate_renormalize(PiecewiseDistribution.uniform(), 0.0, "above")
    assert [iv for iv in t.intervals() if iv[2] > 0] == [(0.0, 1.0, 1.0)]


def test_truncate_zero_mass():
    d = LocallyUniformDistribution(0.5, 0.08).to_piecewise()
    with pytest.raises(DegenerateDataError):
        truncate_renormalize(d, -0.6, "below")
    with pytest.raises(DegenerateDataError):
        truncate_renormalize(d, 0.9, "above")
    with pytest.raises(ParameterDomainError):
        truncate_renormalize(d, 0.0, "left")


def test_first_step_marginal(cg_params):
    s = Session(cg_params)
    assert s.yes_probability("A") == pytest.approx(0.4899 + 0.0447, abs=1e-3)


@pytest.mark.parametrize("seed", range(50))
def test_aba_and_abab(params, seed):
    steps = run_sequence(params, ["A", "B", "A", "B"], seed)
    assert steps[2].outcome == steps[0].outcome and steps[2].probability == 1.0
    assert steps[3].outcome == steps[1].outcome and steps[3].probability == 1.0


@pytest.mark.parametrize("seed", range(20))
def test_adjacent_replicability(params, seed):
    for labels in (["A", "A"], ["B", "B"], ["B", "A", "B", "B", "A"]):
        steps = run_sequence(params, labels, seed)
        for prev, cur in zip(steps, steps[1:]):
            if prev.label == cur.label:
                assert cur.outcome == prev.outcome and cur.probability == 1.0


@pytest.mark.parametrize("path", ["yy", "yn", "ny", "nn"])
@pytest.mark.parametrize("first", ["A", "B"])
def test_mixed_paths(params, first, path):
    second = "B" if first == "A" else "A"
    s = Session(params)
    s.measure(first, outcome=path[0])
    s.measure(second, outcome=path[1])
    for _ in range(3):
        for label, out in ((first, path[0]), (second, path[1])):
            assert s.yes_probability(label) == (1.0 if out == "y" else 0.0)
            outcome, prob = s.measure(label, outcome=out)
            assert prob == 1.0
    for dist in (s.dist_a, s.dist_b):
        assert dist.total() == pytest.approx(1.0, abs=1e-12)


def test_first_pass_matches_closed_form(params):
    expected = probabilities_from_params(params, "AB")
    s = Session(params)
    p1 = s.yes_probability("A")
    s.measure("A", outcome="yes")
    assert p1 * s.yes_probability("B") == pytest.approx(expected[0], abs=1e-12)


def test_impossible_outcome():
    from gtrmodel.core import ModelParams

    p = ModelParams(1.0, 0.0, 1.0, 0.0, 1.0, 0.5, 0.5)
    s = Session(p)
    with pytest.raises(ImpossibleOutcomeError):
        s.measure("A", outcome="no")
    assert s.history == []
    s.measure("A", outcome="yes")
    s.measure("B", outcome="no")
    with pytest.raises(ImpossibleOutcomeError):
        s.measure("A", outcome="no")


def test_measure_arguments(cg_params):
    s = Session(cg_params)
    with pytest.raises(ParameterDomainError):
        s.measure("A")
    with pytest.raises(ParameterDomainError):
        s.measure("A", rng=np.random.default_rng(0), outcome="yes")
    with pytest.raises(ParameterDomainError):
        s.measure("C", outcome="yes")
    outcome, prob, same = measure(s, "A", np.random.default_rng(0))
    assert same is s and outcome in ("yes", "no") and 0 < prob < 1


def test_parse_sequence():
    assert parse_sequence("A, b:y,A:no") == [("A", None), ("B", "yes"), ("A", "no")]
    for bad in ("", "A,,B", "A,C", "A:maybe"):
        with pytest.raises(ParameterDomainError):
            parse_sequence(bad)
    with pytest.raises(ParameterDomainError):
        run_sequence(None, [], 0)


def test_normalization_and_replay(params):
    labels = ["A", "B", "A", "B", "B", "A"]
    for seed in range(30):
        steps = run_sequence(params, labels, seed, session=(s := Session(params)))
        for da, db in s.snapshots:
            assert da.total() == pytest.approx(1.0, abs=1e-12)
            assert db.total() == pytest.approx(1.0, abs=1e-12)
        replay = Session(params)
        run_sequence(params, [(st.label, st.outcome) for st in steps], seed + 1, session=replay)
        assert replay.history == s.history
        assert replay.state == s.state
        for x, y in zip(replay.snapshots, s.snapshots):
            for dx, dy in zip(x, y):
                np.testing.assert_array_equal(dx.breakpoints, dy.breakpoints)
                np.testing.assert_array_equal(dx.densities, dy.densities)


def test_determinism(cg_params):
    assert run_sequence(cg_params, "A,B,A,B", 7) == run_sequence(cg_params, "A,B,A,B", 7)


def test_single_step_frequency(cg_params):
    n = 100_000
    p = Session(cg_params).yes_probability("A")
    yes = sum(run_sequence(cg_params, ["A"], seed)[0].outcome == "yes" for seed in range(n))
    assert abs(yes / n - p) < 3 * math.sqrt(p * (1 - p) / n)


@pytest.mark.parametrize("order", ["AB", "BA"])
def test_order_effects_over_seeds(params, order):
    n = 20_000
    expected = probabilities_from_params(params, order)
    counts = dict.fromkeys(("yy", "yn", "ny", "nn"), 0)
    for seed in range(n):
        s1, s2 = run_sequence(params, list(order), seed)
        counts[s1.outcome[0] + s2.outcome[0]] += 1
    for key, p in zip(counts, expected):
        assert abs(counts[key] / n - p) < 4 * math.sqrt(p * (1 - p) / n)
