"""Circuit-reuse variance formulas against algebra and Monte Carlo."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcbench import sampling_stats as ss


def test_model_validation():
    with pytest.raises(ValueError):
        ss.TwoLevelModel(mu=1.2, sigma_sq=0.0, k=1, l=1)
    with pytest.raises(ValueError):
        ss.TwoLevelModel(mu=0.5, sigma_sq=-0.01, k=1, l=1)
    with pytest.raises(ValueError):
        ss.TwoLevelModel(mu=0.1, sigma_sq=0.5, k=1, l=1)  # mu^2+s^2 > mu
    with pytest.raises(ValueError):
        ss.TwoLevelModel(mu=0.5, sigma_sq=0.01, k=0, l=1)


def test_known_variance_values():
    model = ss.TwoLevelModel(mu=0.5, sigma_sq=0.0, k=100, l=1)
    assert ss.var_scheme1(model) == pytest.approx(0.25 / 100)
    assert ss.var_scheme2(model) == pytest.approx(0.25 / 100)
    model = ss.TwoLevelModel(mu=0.5, sigma_sq=0.01, k=10, l=10)
    # (mu - mu^2 - s^2)/n + s^2/k
    assert ss.var_scheme1(model) == pytest.approx(0.24 / 100 + 0.01 / 10)
    assert ss.var_scheme2(model) == pytest.approx(0.25 / 100)


@given(mu=st.floats(0.05, 0.95), frac=st.floats(0.0, 0.9),
       k=st.integers(1, 200), l=st.integers(1, 50))
@settings(max_examples=200, deadline=None)
def test_reuse_never_beats_fresh_circuits(mu, frac, l, k):
    sigma_sq = frac * (mu - mu ** 2)   # always a valid moment pair
    model = ss.TwoLevelModel(mu=mu, sigma_sq=sigma_sq, k=k, l=l)
    v1, v2 = ss.var_scheme1(model), ss.var_scheme2(model)
    assert v1 >= v2 - 1e-15
    if l == 1 or sigma_sq == 0.0:
        assert v1 == pytest.approx(v2, abs=1e-15)


def test_equality_cases_are_sharp():
    strict = ss.TwoLevelModel(mu=0.4, sigma_sq=0.02, k=5, l=4)
    assert ss.var_scheme1(strict) > ss.var_scheme2(strict)


def test_samples_required_closed_form():
    # l = 1 reduces to the Bernoulli rule (mu - mu^2) / eps^2
    assert ss.samples_required(0.5, 0.01, 1, 0.01) == 2500
    assert ss.samples_required(0.5, 0.0, 1, 0.005) == 10000
    # returned n is always a multiple of l and meets the target
    for l in (1, 2, 5, 10):
        n = ss.samples_required(0.3, 0.02, l, 0.01)
        assert n % l == 0
        model = ss.TwoLevelModel(mu=0.3, sigma_sq=0.02, k=n // l, l=l)
        assert ss.var_scheme1(model) <= 0.01 ** 2 + 1e-15


def test_samples_required_grows_with_reuse():
    values = [ss.samples_required(0.4, 0.01, l, 0.01) for l in (1, 5, 25)]
    assert values == sorted(values)
    assert values[0] < values[-1]


def test_samples_required_validation():
    with pytest.raises(ValueError):
        ss.samples_required(0.5, 0.01, 1, 0.0)
    with pytest.raises(ValueError):
        ss.samples_required(0.5, 0.01, 0, 0.01)
    with pytest.raises(ValueError):
        ss.samples_required(0.1, 0.5, 1, 0.01)


def test_samples_required_degenerate_distribution():
    # P identically 0 or 1: one batch of l shots settles it
    assert ss.samples_required(1.0, 0.0, 4, 0.01) == 4


def test_beta_params_match_moments():
    a, b = ss.beta_params(0.3, 0.01)
    mean = a / (a + b)
    var = a * b / ((a + b) ** 2 * (a + b + 1))
    assert mean == pytest.approx(0.3, abs=1e-12)
    assert var == pytest.approx(0.01, abs=1e-12)
    with pytest.raises(ValueError):
        ss.beta_params(0.5, 0.25)   # variance at the Bernoulli limit
    with pytest.raises(ValueError):
        ss.beta_params(0.5, 0.0)


def test_monte_carlo_matches_formula_at_one_point():
    mu, sigma_sq, k, l = 0.3, 0.01, 8, 4
    model = ss.TwoLevelModel(mu=mu, sigma_sq=sigma_sq, k=k, l=l)
    for scheme, formula in ((1, ss.var_scheme1(model)),
                            (2, ss.var_scheme2(model))):
        est, stderr = ss.monte_carlo_variance(mu, sigma_sq, k, l, scheme,
                                              replications=200000, seed=4)
        assert est == pytest.approx(formula, abs=4 * stderr)


def test_monte_carlo_validation():
    with pytest.raises(ValueError):
        ss.monte_carlo_variance(0.5, 0.01, 2, 2, 3, replications=100)
