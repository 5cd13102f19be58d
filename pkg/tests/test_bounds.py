"""Finite lower bound and baseline-bound tests."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ratelesscast import (cse_bound_1, cse_bound_2, finite_lower_bound,
                          gilbert_elliott, k_zero, memoryless)

LOG2 = math.log(2.0)


@pytest.mark.parametrize("p01,p10,expected", [
    (0.4, 0.4, 1),
    (0.2, 0.2, 7),
    (0.7, 0.7, 0),
    (0.2, 0.7, 1),
    (0.7, 0.2, 1),
    (0.1, 0.1, 21),
    (0.5, 0.5, 0),
    (1.0, 1.0, 0),
])
def test_memory_penalty_values(p01, p10, expected):
    assert k_zero(p01, p10) == expected


@given(p01=st.floats(0.01, 1.0), p10=st.floats(0.01, 1.0))
@settings(max_examples=100, deadline=None)
def test_memory_penalty_zero_iff_fast_mixing(p01, p10):
    k0 = k_zero(p01, p10)
    assert k0 >= 0
    if p01 + p10 >= 1.0 + 1e-9:
        assert k0 == 0
    if p01 + p10 < 1.0 - 1e-9:
        assert k0 >= 1
    # minimality: the defining sum first clears 1 exactly at m = k0
    def partial(m):
        return sum((1 - p10) ** d * p10 for d in range(m + 1)) + p01
    assert partial(k0) >= 1.0 - 1e-9
    if k0 > 0:
        assert partial(k0 - 1) < 1.0 + 1e-9


def test_cse1_validity_edge():
    assert cse_bound_1(0.5, 100, 16) is None
    assert cse_bound_1(0.5, 100, 17) is not None
    v = cse_bound_1(0.5, 100.0, 20)
    assert v == pytest.approx(
        0.5 * 20 / (20 + (math.log(100.0) + 0.78) * math.sqrt(20) + 2.61),
        abs=1e-12)


def test_cse1_numerator_switch():
    lo = cse_bound_1(0.25, 50, 30, numerator="one_minus_gamma")
    hi = cse_bound_1(0.25, 50, 30, numerator="gamma")
    assert lo == pytest.approx(3.0 * hi, rel=1e-12)
    # both readings coincide at the symmetric point
    assert cse_bound_1(0.5, 50, 30, "gamma") == cse_bound_1(0.5, 50, 30)
    with pytest.raises(ValueError):
        cse_bound_1(0.5, 50, 30, numerator="other")


def test_cse2_validity_ranges():
    # needs slow mixing (p01 + p10 <= 1) and large enough k
    assert cse_bound_2(0.6, 0.6, 10, 1000) is None
    n = 32.0
    k_min = 21.0 * math.log(n) - 4.0
    assert cse_bound_2(0.4, 0.4, n, int(k_min) - 1) is None
    k = int(math.ceil(k_min))
    v = cse_bound_2(0.4, 0.4, n, k)
    assert v == pytest.approx(
        0.4 * k / (k + 2 * math.sqrt((0.78 * k + 3.37) * math.log(n)) + 2.61),
        abs=1e-12)


def test_report_internal_consistency():
    model = gilbert_elliott(0.4, 0.4)
    rep = finite_lower_bound(model, 64.0, 30)
    assert rep.k_zero == 1
    assert rep.ratio == pytest.approx(31.0 / math.log(64.0), abs=1e-12)
    assert rep.our_bound == pytest.approx(30 / 31 * rep.asymptotic_ref,
                                          abs=1e-12)
    assert 0.0 < rep.our_bound < model.success_prob
    assert rep.cse1 is None  # memoryless baseline does not apply here
    assert not rep.degenerate


def test_memoryless_report():
    rep = finite_lower_bound(memoryless(0.5), 1000.0, 40)
    assert rep.k_zero == 0
    assert rep.our_bound == rep.asymptotic_ref
    assert rep.cse2 is None
    assert rep.cse1_valid and rep.cse1 is not None
    assert rep.our_bound > rep.cse1


def test_slow_mixing_chain_has_no_valid_baselines():
    # symmetric 0.4 chain at ratio 5/log2: both baselines out of range
    model = gilbert_elliott(0.4, 0.4)
    for k in (5, 20, 50, 100):
        n = math.exp(k * LOG2 / 5.0)
        rep = finite_lower_bound(model, n, k)
        assert rep.cse1 is None and not rep.cse1_valid
        assert rep.cse2 is None and not rep.cse2_valid
        assert rep.our_bound > 0.0


def test_constant_ratio_gives_constant_bound():
    model = memoryless(0.5)
    c = 15.0 / LOG2
    vals = [finite_lower_bound(model, math.exp(k / c), k).our_bound
            for k in (10, 50, 150, 300)]
    for v in vals[1:]:
        assert v == pytest.approx(vals[0], abs=1e-9)


def test_bound_tightens_with_block_size_at_fixed_n():
    model = gilbert_elliott(0.4, 0.4)
    vals = [finite_lower_bound(model, 10.0, k).our_bound
            for k in (5, 20, 80, 320)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_single_receiver_degenerates_to_capacity():
    rep = finite_lower_bound(memoryless(0.5), 1.0, 10)
    assert rep.degenerate
    assert rep.our_bound == 0.5


def test_input_validation():
    with pytest.raises(ValueError):
        k_zero(0.0, 0.5)
    with pytest.raises(ValueError):
        finite_lower_bound(memoryless(0.5), 0.5, 10)
    with pytest.raises(ValueError):
        finite_lower_bound(memoryless(0.5), 10.0, 0)
