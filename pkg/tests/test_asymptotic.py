"""Limiting-throughput solver tests."""

import math

import pytest

from ratelesscast import (asymptotic_throughput, beta_over_lambda,
                          gilbert_elliott, memoryless, memoryless_asymptotic,
                          rate_function)

LOG2 = math.log(2.0)


def test_residual_small_at_interior_solutions():
    for model in (memoryless(0.5), gilbert_elliott(0.4, 0.4),
                  gilbert_elliott(0.1, 0.3)):
        for c in (0.5, 2.0, 15.0 / LOG2):
            res = asymptotic_throughput(model, c)
            lam = rate_function(model, res.beta_c).value
            assert abs(c * lam - res.beta_c) < 1e-8
            assert 0.0 < res.beta_c < model.success_prob
            assert res.attained


def test_limits():
    model = gilbert_elliott(0.4, 0.4)
    z = asymptotic_throughput(model, 0.0)
    assert z.beta_c == 0.0 and z.attained
    inf = asymptotic_throughput(model, math.inf)
    assert inf.beta_c == model.success_prob
    assert not inf.attained


def test_monotone_in_ratio():
    model = gilbert_elliott(0.4, 0.4)
    cs = [0.1 * 1.6**i for i in range(20)]
    vals = [asymptotic_throughput(model, c).beta_c for c in cs]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < model.success_prob


def test_memoryless_cross_path_agreement():
    for gamma in (0.25, 0.5, 0.75):
        model = memoryless(gamma)
        for c in (0.7, 3.0, 15.0 / LOG2, 40.0):
            a = asymptotic_throughput(model, c).beta_c
            b = memoryless_asymptotic(gamma, c)
            assert a == pytest.approx(b, abs=1e-9)


def test_frozen_reference_values():
    # references from a closed-form root find done with scipy.brentq
    assert memoryless_asymptotic(0.5, 15.0 / LOG2) == pytest.approx(
        0.4037203635138125, abs=1e-10)
    assert memoryless_asymptotic(0.5, 5.0 / LOG2) == pytest.approx(
        0.34631776657088603, abs=1e-10)
    # reference from an eigenvalue-based rate function plus scipy.brentq
    ge = asymptotic_throughput(gilbert_elliott(0.4, 0.4), 5.0 / LOG2)
    assert ge.beta_c == pytest.approx(0.32016004624116157, abs=1e-8)


def test_bracket_invariance():
    model = gilbert_elliott(0.4, 0.4)
    base = asymptotic_throughput(model, 4.0).beta_c
    alt = asymptotic_throughput(model, 4.0, bracket=(1e-6, 0.49)).beta_c
    assert alt == pytest.approx(base, abs=1e-9)


def test_beta_over_lambda_increasing():
    model = gilbert_elliott(0.4, 0.4)
    grid = [0.05, 0.1, 0.2, 0.3, 0.4, 0.45, 0.49]
    vals = [beta_over_lambda(model, b) for b in grid]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_input_validation():
    model = memoryless(0.5)
    with pytest.raises(ValueError):
        asymptotic_throughput(model, -1.0)
    with pytest.raises(ValueError):
        beta_over_lambda(model, 0.6)
    with pytest.raises(ValueError):
        memoryless_asymptotic(0.5, 0.0)
    with pytest.raises(ValueError):
        memoryless_asymptotic(1.0, 2.0)
