"""Finite-(n, K) throughput lower bounds and the prior-art CSE baselines.

The main bound multiplies the asymptotic throughput at the inflated ratio
(K + K0) / log n by K / (K + K0), where K0 is a channel-memory penalty that
depends only on the Gilbert-Elliott transition probabilities.  The two CSE
bounds carry explicit validity ranges and are reported as absent outside
them.
"""

import math
from dataclasses import dataclass

from .asymptotic import asymptotic_throughput
from .channel import ChannelModel

_K0_TOL = 1e-12

CSE1_NUMERATORS = ("one_minus_gamma", "gamma")


@dataclass(frozen=True)
class BoundReport:
    """All analytical bounds for one (n, K, channel) setting."""

    n: float
    k: int
    k_zero: int
    ratio: float
    our_bound: float
    asymptotic_ref: float
    cse1: float | None
    cse1_valid: bool
    cse2: float | None
    cse2_valid: bool
    degenerate: bool = False  # n == 1: no straggler effect, bound is gamma


def k_zero(p01: float, p10: float) -> int:
    """Channel-memory penalty: smallest m >= 0 with
    sum_{d<=m} (1-p10)^d p10 + p01 >= 1.  Zero iff p01 + p10 >= 1."""
    if not 0.0 < p01 <= 1.0 or not 0.0 < p10 <= 1.0:
        raise ValueError(f"invalid transition probabilities ({p01}, {p10})")
    acc = 0.0
    term = p10
    m = 0
    while acc + term + p01 < 1.0 - _K0_TOL:
        acc += term
        term *= 1.0 - p10
        m += 1
    return m


def cse_bound_1(gamma: float, n: float, k: int,
                numerator: str = "one_minus_gamma") -> float | None:
    """Memoryless-channel baseline bound; valid only for K > 16.

    ``numerator`` selects between the printed (1 - gamma) factor and the
    gamma reading; the two coincide at gamma = 0.5.
    """
    if numerator not in CSE1_NUMERATORS:
        raise ValueError(f"numerator must be one of {CSE1_NUMERATORS}")
    if k <= 16:
        return None
    num = (1.0 - gamma) if numerator == "one_minus_gamma" else gamma
    return num * k / (k + (math.log(n) + 0.78) * math.sqrt(k) + 2.61)


def cse_bound_2(p01: float, p10: float, n: float, k: int) -> float | None:
    """Gilbert-Elliott baseline bound; valid only when 1 - p10 - p01 >= 0
    and K >= 21 log n - 4."""
    if 1.0 - p10 - p01 < 0.0:
        return None
    if k < 21.0 * math.log(n) - 4.0:
        return None
    return p01 * k / (k + 2.0 * math.sqrt((0.78 * k + 3.37) * math.log(n)) + 2.61)


def finite_lower_bound(model: ChannelModel, n: float, k: int,
                       cse1_numerator: str = "one_minus_gamma") -> BoundReport:
    """Throughput lower bound for finite n and K (orders 0 and 1 only).

    ``n`` may be a non-integral real when an exact K/log n ratio schedule is
    analyzed; only log n enters the formulas.
    """
    if model.order > 1:
        raise ValueError("finite bound defined for memoryless and "
                         "Gilbert-Elliott channels only")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    gamma = model.success_prob

    if model.order == 0:
        k0 = 0
        p01, p10 = gamma, 1.0 - gamma  # memoryless-equivalent chain
        cse2 = None
    else:
        ge = model.ge
        if ge is None:
            p01 = float(model.transition[0, 1])
            p10 = float(model.transition[1, 0])
        else:
            p01, p10 = ge.p01, ge.p10
        k0 = k_zero(p01, p10)
        cse2 = cse_bound_2(p01, p10, n, k)

    cse1 = cse_bound_1(gamma, n, k, cse1_numerator) if model.order == 0 else None

    if n == 1:
        return BoundReport(
            n=float(n), k=int(k), k_zero=k0, ratio=math.inf,
            our_bound=gamma, asymptotic_ref=gamma,
            cse1=cse1, cse1_valid=cse1 is not None,
            cse2=cse2, cse2_valid=cse2 is not None,
            degenerate=True,
        )

    ratio = (k + k0) / math.log(n)
    ref = asymptotic_throughput(model, ratio).beta_c
    return BoundReport(
        n=float(n), k=int(k), k_zero=k0, ratio=ratio,
        our_bound=k / (k + k0) * ref, asymptotic_ref=ref,
        cse1=cse1, cse1_valid=cse1 is not None,
        cse2=cse2, cse2_valid=cse2 is not None,
    )
