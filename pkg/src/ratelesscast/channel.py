"""Order-l Markov-modulated binary erasure channels.

A channel emits one bit per slot: 1 = packet delivered, 0 = erased.  The
distribution of the next bit depends on the last ``l`` bits (the channel
state), encoded as an l-bit integer with the newest slot in the least
significant bit.  ``l = 0`` is the memoryless channel, ``l = 1`` the
Gilbert-Elliott channel.
"""

from dataclasses import dataclass, replace
from math import gcd
from typing import NamedTuple

import numpy as np

MAX_ORDER = 16  # 2^l states must stay dense-tractable

_ROW_SUM_TOL = 1e-12
_STATIONARY_TOL = 1e-12
_STATIONARY_CAP = 10**6


class GilbertElliott(NamedTuple):
    """Two-state chain parameters: 0->1 and 1->0 transition probabilities."""

    p01: float
    p10: float


@dataclass(frozen=True)
class ChannelModel:
    """Validated channel: immutable and shareable across workers.

    Attributes
    ----------
    order : memory depth l >= 0.
    transition : row-stochastic 2^l x 2^l matrix, None when order == 0.
    success_prob : stationary per-slot success probability gamma.
    stationary : stationary distribution over states, None when order == 0.
    p_success : P[next bit = 1 | state s] for each state, shape (2^l,).
    ge : the (p01, p10) pair when order == 1, else None.
    """

    order: int
    transition: np.ndarray | None
    success_prob: float
    stationary: np.ndarray | None
    p_success: np.ndarray
    ge: GilbertElliott | None = None

    @property
    def n_states(self) -> int:
        return 1 << self.order

    @property
    def state_mask(self) -> int:
        return (1 << self.order) - 1


def memoryless(gamma: float) -> ChannelModel:
    """Memoryless channel (l = 0) with per-slot success probability gamma."""
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must be in (0, 1), got {gamma}")
    return ChannelModel(
        order=0,
        transition=None,
        success_prob=float(gamma),
        stationary=None,
        p_success=np.array([float(gamma)]),
    )


def gilbert_elliott(p01: float, p10: float) -> ChannelModel:
    """Gilbert-Elliott channel (l = 1); gamma = p01 / (p01 + p10)."""
    if not 0.0 < p01 <= 1.0:
        raise ValueError(f"p01 must be in (0, 1], got {p01}")
    if not 0.0 < p10 <= 1.0:
        raise ValueError(f"p10 must be in (0, 1], got {p10}")
    pi = np.array([[1.0 - p01, p01], [p10, 1.0 - p10]])
    model = from_transition(1, pi)
    return replace(model, ge=GilbertElliott(float(p01), float(p10)))


def from_transition(l: int, pi) -> ChannelModel:
    """Build and validate a channel from its 2^l x 2^l transition matrix.

    Rows must be stochastic, the nonzero pattern must respect the one-slot
    shift structure (a state can only move to the two states obtained by
    shifting in a 0 or a 1), and the chain must be irreducible and aperiodic.
    """
    if l < 1:
        raise ValueError("from_transition requires l >= 1; use memoryless()")
    if l > MAX_ORDER:
        raise ValueError(f"memory order capped at {MAX_ORDER}, got {l}")
    pi = np.asarray(pi, dtype=float)
    m = 1 << l
    if pi.shape != (m, m):
        raise ValueError(f"transition matrix must be {m}x{m}, got {pi.shape}")
    if (pi < 0).any() or (pi > 1).any():
        raise ValueError("transition probabilities must lie in [0, 1]")
    rowsum = pi.sum(axis=1)
    if np.abs(rowsum - 1.0).max() > _ROW_SUM_TOL:
        raise ValueError("transition matrix rows must each sum to 1")

    mask = m - 1
    legal = np.zeros((m, m), dtype=bool)
    for s in range(m):
        legal[s, ((s << 1) | 0) & mask] = True
        legal[s, ((s << 1) | 1) & mask] = True
    if (pi[~legal] > 0).any():
        raise ValueError("nonzero entry outside the one-slot shift structure")

    _check_ergodic(pi)

    stationary = _stationary_power_iteration(pi)
    p_success = np.array([pi[s, ((s << 1) | 1) & mask] for s in range(m)])
    f = np.arange(m) & 1
    gamma = float(stationary @ f)
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"degenerate stationary success probability {gamma}")
    return ChannelModel(
        order=l,
        transition=pi,
        success_prob=gamma,
        stationary=stationary,
        p_success=p_success,
    )


def stationary_distribution(model: ChannelModel) -> np.ndarray:
    """Stationary distribution over the 2^l states (l >= 1 only)."""
    if model.order < 1:
        raise ValueError("memoryless channel has no state distribution")
    return model.stationary.copy()


def next_slot(model: ChannelModel, state: int, uniform_draw: float):
    """One channel step: emit a bit and the shifted state.

    Emits 1 iff ``uniform_draw < P[1 | state]``; deterministic in its inputs.
    """
    bit = 1 if uniform_draw < model.p_success[state] else 0
    return bit, ((state << 1) | bit) & model.state_mask


def state_from_history(model: ChannelModel, history) -> int:
    """Encode a bit history (newest last) as the integer channel state."""
    if len(history) != model.order:
        raise ValueError(f"history must have length {model.order}")
    s = 0
    for b in history:
        s = (s << 1) | int(b)
    return s


def _check_ergodic(pi: np.ndarray) -> None:
    """Reject reducible or periodic chains, judged on the nonzero pattern."""
    m = pi.shape[0]
    adj = pi > 0.0
    if not (_reaches_all(adj, 0) and _reaches_all(adj.T, 0)):
        raise ValueError("transition matrix is reducible")
    # period = gcd over all edges of (level[u] + 1 - level[v]) on a BFS tree
    level = np.full(m, -1)
    level[0] = 0
    frontier = [0]
    while frontier:
        nxt = []
        for u in frontier:
            for v in np.flatnonzero(adj[u]):
                if level[v] < 0:
                    level[v] = level[u] + 1
                    nxt.append(v)
        frontier = nxt
    g = 0
    for u in range(m):
        for v in np.flatnonzero(adj[u]):
            g = gcd(g, level[u] + 1 - level[v])
    if abs(g) != 1:
        raise ValueError("transition matrix is periodic")


def _reaches_all(adj: np.ndarray, start: int) -> bool:
    m = adj.shape[0]
    seen = np.zeros(m, dtype=bool)
    seen[start] = True
    stack = [start]
    while stack:
        u = stack.pop()
        for v in np.flatnonzero(adj[u]):
            if not seen[v]:
                seen[v] = True
                stack.append(v)
    return bool(seen.all())


def _stationary_power_iteration(pi: np.ndarray) -> np.ndarray:
    m = pi.shape[0]
    v = np.full(m, 1.0 / m)
    pit = pi.T
    for _ in range(_STATIONARY_CAP):
        nv = pit @ v
        nv /= nv.sum()
        if np.abs(nv - v).sum() < _STATIONARY_TOL:
            return nv
        v = nv
    raise RuntimeError("stationary distribution power iteration did not converge")
