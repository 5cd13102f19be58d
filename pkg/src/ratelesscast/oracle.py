"""Exact expected block completion time for memoryless channels.

Independent of the Monte Carlo engine; used as its reference in tests.
"""

import numpy as np

_TERM_CAP = 10**8


def exact_expected_completion_memoryless(gamma: float, n: int, k: int,
                                         tail_tol: float = 1e-12) -> float:
    """E[T(n, k)] for n i.i.d. memoryless receivers needing k successes.

    Sums P[T > t] = 1 - F(t)^n over t >= 0, where F(t) = P[Binomial(t, gamma)
    >= k].  F is advanced by the one-step binomial pmf recurrence (never by
    factorials), which keeps every quantity in [0, 1].  Terms are accumulated
    until the summand falls below ``tail_tol`` while monotonically shrinking.
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must be in (0, 1), got {gamma}")
    if n < 1 or k < 1:
        raise ValueError(f"n and k must be >= 1, got n={n}, k={k}")
    if tail_tol <= 0.0:
        raise ValueError("tail_tol must be positive")

    # pmf[j] = P[Binomial(t, gamma) = j] for j < k; tail = P[>= k]
    pmf = np.zeros(k)
    pmf[0] = 1.0
    tail = 0.0
    total = 0.0
    q = 1.0 - gamma
    for _ in range(_TERM_CAP):
        term = 1.0 - tail**n
        total += term
        if term < tail_tol and tail > 0.5:
            return total
        tail += pmf[k - 1] * gamma
        pmf[1:] = pmf[1:] * q + pmf[:-1] * gamma
        pmf[0] *= q
    raise RuntimeError("completion-time series did not converge")
