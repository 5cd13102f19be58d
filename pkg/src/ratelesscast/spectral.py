"""Tilted transition matrices, Perron roots, and the large-deviations
rate function of the per-slot success process.

The rate function at target rate beta is the concave maximum over the tilt
parameter theta of ``theta * beta - log rho(tilted(theta))`` where rho is the
Perron-Frobenius eigenvalue.  Closed forms are used for orders 0 and 1; power
iteration handles the general case and doubles as a cross-check.
"""

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelModel

THETA_CAP = 700.0  # exp overflow guard
_GOLDEN_WIDTH = 1e-12
_GOLDEN_CAP = 500
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_BETA_EDGE = 1e-6

_POWER_TOL = 1e-14
_POWER_CAP = 10**6


@dataclass(frozen=True)
class TiltedMatrix:
    """Channel transition matrix with success columns scaled by e^theta."""

    theta: float
    entries: np.ndarray  # (1, 1) for a memoryless channel


@dataclass(frozen=True)
class RateFunctionEval:
    beta: float
    theta_star: float
    value: float
    iterations: int
    capped: bool = False


def tilted(model: ChannelModel, theta: float) -> TiltedMatrix:
    """Multiply entries into success states (newest bit 1) by e^theta."""
    if abs(theta) > THETA_CAP:
        raise ValueError(f"|theta| must be <= {THETA_CAP}, got {theta}")
    if model.order == 0:
        # single state: both outcomes fold into the one self-transition
        g = model.success_prob
        entries = np.array([[g * math.exp(theta) + (1.0 - g)]])
    else:
        scale = np.where(np.arange(model.n_states) & 1, math.exp(theta), 1.0)
        entries = model.transition * scale[None, :]
    return TiltedMatrix(theta=float(theta), entries=entries)


def perron_root(m) -> float:
    """Largest eigenvalue of a nonnegative matrix with primitive pattern.

    Accepts a TiltedMatrix or a plain square array.  1x1 and 2x2 cases use
    closed forms; larger matrices use normalized power iteration.
    """
    a = m.entries if isinstance(m, TiltedMatrix) else np.asarray(m, dtype=float)
    if a.shape == (1, 1):
        return float(a[0, 0])
    if a.shape == (2, 2):
        return _root_2x2(a[0, 0], a[0, 1], a[1, 0], a[1, 1])
    return _power_iteration(a)


def rate_function(model: ChannelModel, beta: float) -> RateFunctionEval:
    """Maximize theta * beta - log rho(tilted(theta)) over theta.

    For beta within 1e-6 of 0 or 1 the continuous extension is returned with
    ``capped=True`` instead of failing.
    """
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must be in (0, 1), got {beta}")
    if beta <= _BETA_EDGE:
        return RateFunctionEval(beta, -math.inf, _edge_value(model, success=False),
                                0, capped=True)
    if beta >= 1.0 - _BETA_EDGE:
        return RateFunctionEval(beta, math.inf, _edge_value(model, success=True),
                                0, capped=True)

    def objective(theta: float) -> float:
        return theta * beta - log_perron(model, theta)

    lo, hi, capped, nbr = _bracket(objective)
    theta_star, ngs = _golden_max(objective, lo, hi)
    return RateFunctionEval(
        beta=float(beta),
        theta_star=theta_star,
        value=objective(theta_star),
        iterations=nbr + ngs,
        capped=capped,
    )


def rate_function_memoryless(gamma: float, beta: float) -> float:
    """Closed form: KL divergence between Bernoulli(beta) and Bernoulli(gamma).

    Defined on beta in [0, 1); the value at beta = 0 is -log(1 - gamma).
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must be in (0, 1), got {gamma}")
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"beta must be in [0, 1), got {beta}")
    first = beta * math.log(beta / gamma) if beta > 0.0 else 0.0
    return first + (1.0 - beta) * math.log((1.0 - beta) / (1.0 - gamma))


def log_perron(model: ChannelModel, theta: float) -> float:
    """log rho(tilted(theta)), overflow-safe for |theta| up to the cap."""
    if model.order == 0:
        g = model.success_prob
        if theta <= 0.0:
            return math.log(g * math.exp(theta) + (1.0 - g))
        return theta + math.log(g + (1.0 - g) * math.exp(-theta))
    if model.order == 1:
        pi = model.transition
        a, b = pi[0, 0], pi[0, 1]
        c, d = pi[1, 0], pi[1, 1]
        x = math.exp(theta)
        if x <= 1.0:
            return math.log(_root_2x2(a, b * x, c, d * x))
        # factor x out of the success column to avoid overflow at large theta
        return theta + math.log(_root_2x2(a / x, b, c / x, d))
    t = tilted(model, theta)
    top = t.entries.max()
    return math.log(top) + math.log(_power_iteration(t.entries / top))


def spectral_radius_nonneg(a: np.ndarray) -> float:
    """Spectral radius of any nonnegative matrix (reducible allowed).

    Power iteration on a + I; the shift removes periodicity so the iteration
    converges even for patterns the primitive-case routine would reject.
    """
    a = np.asarray(a, dtype=float)
    if a.shape == (1, 1):
        return float(a[0, 0])
    shifted = a + np.eye(a.shape[0])
    return _power_iteration(shifted) - 1.0


def _root_2x2(a, b, c, d) -> float:
    tr = a + d
    disc = (a - d) * (a - d) + 4.0 * b * c
    return 0.5 * (tr + math.sqrt(max(disc, 0.0)))


def _power_iteration(a: np.ndarray) -> float:
    v = np.full(a.shape[0], 1.0 / a.shape[0])
    rho = 0.0
    for _ in range(_POWER_CAP):
        w = a @ v
        nrm = w.sum()
        if nrm <= 0.0:
            return 0.0
        w /= nrm
        new_rho = float(w @ (a @ w) / (w @ w))
        if abs(new_rho - rho) <= _POWER_TOL * max(abs(new_rho), 1.0):
            return new_rho
        rho = new_rho
        v = w
    raise RuntimeError("Perron root power iteration did not converge")


def _edge_value(model: ChannelModel, success: bool) -> float:
    """Limit of the rate function at beta -> 1 (success) or beta -> 0."""
    if model.order == 0:
        g = model.success_prob
        return -math.log(g) if success else -math.log(1.0 - g)
    keep = (np.arange(model.n_states) & 1).astype(bool)
    if not success:
        keep = ~keep
    sub = model.transition * keep[None, :]
    rho = spectral_radius_nonneg(sub)
    return math.inf if rho <= 0.0 else -math.log(rho)


def _bracket(objective):
    """Expand [-1, 1] by doubling until the numeric slope changes sign."""
    h = 1e-6

    def slope(t: float) -> float:
        return (objective(t + h) - objective(t - h)) / (2.0 * h)

    lo, hi = -1.0, 1.0
    n = 0
    capped = False
    while slope(lo) < 0.0:
        lo *= 2.0
        n += 1
        if lo <= -(THETA_CAP - 1.0):
            lo = -(THETA_CAP - 1.0)
            capped = True
            break
    while slope(hi) > 0.0:
        hi *= 2.0
        n += 1
        if hi >= THETA_CAP - 1.0:
            hi = THETA_CAP - 1.0
            capped = True
            break
    return lo, hi, capped, n


def _golden_max(f, lo: float, hi: float):
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = f(c), f(d)
    n = 0
    while hi - lo > _GOLDEN_WIDTH and n < _GOLDEN_CAP:
        n += 1
        if fc > fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = f(d)
    return 0.5 * (lo + hi), n
