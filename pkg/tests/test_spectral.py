"""Tilted-matrix, Perron-root, and rate-function tests."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ratelesscast import (gilbert_elliott, memoryless, perron_root,
                          rate_function, rate_function_memoryless, tilted)
from ratelesscast.channel import from_transition
from ratelesscast.spectral import log_perron


def random_chain(rng, order):
    """A validated random order-l chain with all legal entries positive."""
    m = 1 << order
    pi = np.zeros((m, m))
    for s in range(m):
        p = rng.uniform(0.05, 0.95)
        pi[s, ((s << 1) | 1) & (m - 1)] = p
        pi[s, (s << 1) & (m - 1)] = 1.0 - p
    return from_transition(order, pi)


def test_untilted_root_is_one():
    rng = np.random.default_rng(0)
    for _ in range(40):
        for order in (1, 2, 3):
            model = random_chain(rng, order)
            assert perron_root(tilted(model, 0.0)) == pytest.approx(
                1.0, abs=1e-10)
    assert perron_root(tilted(memoryless(0.37), 0.0)) == pytest.approx(
        1.0, abs=1e-12)


def test_two_by_two_closed_form_matches_eigvals():
    rng = np.random.default_rng(1)
    for _ in range(50):
        model = random_chain(rng, 1)
        theta = rng.uniform(-3.0, 3.0)
        t = tilted(model, theta)
        ref = max(np.linalg.eigvals(t.entries).real)
        assert perron_root(t) == pytest.approx(ref, abs=1e-10)


def test_power_iteration_matches_eigvals_large():
    rng = np.random.default_rng(2)
    for _ in range(20):
        model = random_chain(rng, 3)
        t = tilted(model, rng.uniform(-2.0, 2.0))
        ref = max(np.linalg.eigvals(t.entries).real)
        assert perron_root(t) == pytest.approx(ref, rel=1e-10)


def test_tilting_scales_success_columns():
    model = gilbert_elliott(0.4, 0.4)
    t = tilted(model, math.log(2.0))
    assert np.allclose(t.entries[:, 1], 2.0 * model.transition[:, 1])
    assert np.allclose(t.entries[:, 0], model.transition[:, 0])
    # closed-form root of the doubled success column
    assert perron_root(t) == pytest.approx((1.8 + math.sqrt(1.64)) / 2,
                                           abs=1e-12)


def test_memoryless_numeric_matches_closed_form():
    model = memoryless(0.5)
    for beta in np.linspace(0.05, 0.95, 19):
        num = rate_function(model, float(beta)).value
        ref = rate_function_memoryless(0.5, float(beta))
        assert num == pytest.approx(ref, abs=1e-8)


def test_rate_function_frozen_values():
    # references computed with scipy.optimize over numpy.linalg eigenvalues
    ev = rate_function(gilbert_elliott(0.4, 0.4), 0.25)
    assert ev.value == pytest.approx(0.08833411863027943, abs=1e-9)
    assert ev.theta_star == pytest.approx(-0.7519585295240524, abs=1e-5)
    ev2 = rate_function(gilbert_elliott(0.1, 0.3), 0.4)
    assert ev2.value == pytest.approx(0.012905417450468401, abs=1e-9)
    assert rate_function_memoryless(0.5, 0.25) == pytest.approx(
        0.13081203594113697, abs=1e-12)


def test_rate_function_zero_at_capacity():
    for model in (memoryless(0.35), gilbert_elliott(0.4, 0.4),
                  gilbert_elliott(0.1, 0.3)):
        ev = rate_function(model, model.success_prob)
        assert ev.value == pytest.approx(0.0, abs=1e-9)
        assert abs(ev.theta_star) < 1e-4


def test_rate_function_positive_away_from_capacity():
    model = gilbert_elliott(0.3, 0.5)
    g = model.success_prob
    for beta in (g / 4, g / 2, (1 + g) / 2, 0.9):
        if abs(beta - g) > 1e-3:
            assert rate_function(model, beta).value > 1e-6


@given(beta=st.floats(0.02, 0.98), theta=st.floats(-5.0, 5.0))
@settings(max_examples=60, deadline=None)
def test_supremum_dominates_any_tilt(beta, theta):
    model = gilbert_elliott(0.4, 0.4)
    sup = rate_function(model, beta).value
    assert sup >= theta * beta - log_perron(model, theta) - 1e-7


def test_log_perron_overflow_safe():
    # at extreme tilts the root is dominated by the all-success or
    # all-failure submatrix
    big = log_perron(memoryless(0.5), 699.0)
    assert big == pytest.approx(699.0 + math.log(0.5), rel=1e-9)
    small = log_perron(memoryless(0.5), -699.0)
    assert small == pytest.approx(math.log(0.5), rel=1e-6)
    ge = gilbert_elliott(0.4, 0.4)
    assert log_perron(ge, 699.0) == pytest.approx(699.0 + math.log(0.6),
                                                  rel=1e-9)
    assert log_perron(ge, -699.0) == pytest.approx(math.log(0.6), rel=1e-6)


def test_log_perron_general_path_agrees_with_closed_form():
    rng = np.random.default_rng(3)
    for _ in range(20):
        model = random_chain(rng, 1)
        theta = rng.uniform(-4.0, 4.0)
        direct = math.log(perron_root(tilted(model, theta)))
        assert log_perron(model, theta) == pytest.approx(direct, abs=1e-9)


def test_edge_betas_return_capped_limits():
    model = memoryless(0.5)
    lo = rate_function(model, 1e-9)
    hi = rate_function(model, 1.0 - 1e-9)
    assert lo.capped and hi.capped
    assert lo.value == pytest.approx(math.log(2.0), abs=1e-9)
    assert hi.value == pytest.approx(math.log(2.0), abs=1e-9)


def test_rejects_beta_outside_open_interval():
    model = memoryless(0.5)
    for beta in (0.0, 1.0, -0.2, 1.3):
        with pytest.raises(ValueError):
            rate_function(model, beta)
    with pytest.raises(ValueError):
        rate_function_memoryless(0.5, 1.0)
    with pytest.raises(ValueError):
        tilted(model, 701.0)
