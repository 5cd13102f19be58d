"""Asymptotic throughput when the receiver count grows with fixed K/log n.

With c the limit of K / log n, the limiting throughput is the largest beta
below capacity gamma satisfying c >= beta / Lambda(beta).  The ratio
beta / Lambda(beta) is strictly increasing on (0, gamma), so the interior
solution is found by bisection.
"""

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .channel import ChannelModel
from .spectral import rate_function, rate_function_memoryless

_BISECT_WIDTH = 1e-12
_BISECT_CAP = 200
_EDGE = 1e-9


@dataclass(frozen=True)
class AsymptoticResult:
    """Solution of the limiting-throughput variational problem.

    ``attained`` is False for c = infinity, where the supremum gamma is the
    limit of the feasible set but not a member of it.
    """

    c: float
    beta_c: float
    residual: float
    attained: bool = True


def beta_over_lambda(model: ChannelModel, beta: float) -> float:
    """beta / Lambda(beta); strictly increasing on (0, gamma)."""
    if not 0.0 < beta < model.success_prob:
        raise ValueError(
            f"beta must be in (0, gamma={model.success_prob}), got {beta}")
    value = rate_function(model, beta).value
    if value <= 0.0:
        return math.inf
    return beta / value


def asymptotic_throughput(model: ChannelModel, c: float,
                          bracket=None) -> AsymptoticResult:
    """Solve for the limiting throughput at ratio c = lim K / log n.

    c = 0 gives 0; c = inf gives capacity gamma (supremum not attained);
    otherwise bisection on beta / Lambda(beta) = c.
    """
    gamma = model.success_prob
    if c < 0.0:
        raise ValueError(f"c must be >= 0, got {c}")
    if c == 0.0:
        return AsymptoticResult(c=0.0, beta_c=0.0, residual=0.0)
    if math.isinf(c):
        return AsymptoticResult(c=math.inf, beta_c=gamma, residual=0.0,
                                attained=False)

    lo, hi = bracket if bracket is not None else (_EDGE, gamma - _EDGE)

    def gap(beta: float) -> float:
        ratio = beta_over_lambda(model, beta)
        return c - ratio if math.isfinite(ratio) else -math.inf

    if gap(hi) >= 0.0:
        # ratio stays below c across the whole interior: solution hugs gamma
        beta = hi
    else:
        for _ in range(_BISECT_CAP):
            mid = 0.5 * (lo + hi)
            if gap(mid) >= 0.0:
                lo = mid
            else:
                hi = mid
            if hi - lo <= _BISECT_WIDTH:
                break
        beta = 0.5 * (lo + hi)
    return AsymptoticResult(
        c=float(c),
        beta_c=beta,
        residual=abs(c - beta_over_lambda(model, beta)),
    )


def memoryless_asymptotic(gamma: float, c: float) -> float:
    """Limiting throughput of the memoryless channel via the closed-form
    rate function; independent of the numeric-supremum code path."""
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must be in (0, 1), got {gamma}")
    if c <= 0.0:
        raise ValueError(f"c must be > 0, got {c}")
    if math.isinf(c):
        return gamma

    def gap(beta: float) -> float:
        return c * rate_function_memoryless(gamma, beta) - beta

    lo = gamma * 1e-12
    hi = gamma * (1.0 - 1e-12)
    if gap(hi) >= 0.0:
        return hi
    return float(brentq(gap, lo, hi, xtol=1e-14, rtol=8.9e-16))
