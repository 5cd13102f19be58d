"""Monte Carlo engine: block completion times, renewal throughput,
first-success sampling, and queue stability runs.

All randomness flows through counter-based streams keyed by
(seed, stream class, stream id, receiver id), so estimates are reproducible
bit for bit regardless of backend, scheduling, or worker count.  By default
each (n, k) setting is decorrelated by folding the setting into the seed;
``common_random_numbers=True`` shares receiver streams across settings, which
makes completion times samplewise monotone in n.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._rng import CLS_RENEWAL, CLS_TRIAL, stream_key
from .channel import ChannelModel

_SEED_MASK = (1 << 63) - 1
DEFAULT_MAX_SLOTS = 10**7

# init policies: "stationary", "all_ones", "all_zeros", or an explicit
# ndarray of integer states (broadcast over trials)


@dataclass(frozen=True)
class CompletionStats:
    mean: float
    std_error: float
    trials: int
    min: int
    max: int


@dataclass(frozen=True)
class ThroughputEstimate:
    eta_hat: float
    blocks_completed: int
    total_slots: int
    std_error: float


@dataclass(frozen=True)
class QueueThresholds:
    """Explicit verdict thresholds for finite-horizon stability runs."""

    slope_threshold: float = 1e-4   # packets per slot
    mean_queue_factor: float = 50.0  # multiples of k


@dataclass(frozen=True)
class QueueStats:
    lam: float
    mean_queue: float
    queue_trend_slope: float
    verdict: str  # stable | unstable | inconclusive
    blocks_completed: int


def burn_in_slots(model: ChannelModel) -> int:
    """Burn-in used to approximate stationary joint histories."""
    if model.order == 0:
        return 0
    return max(1000, 100 * model.n_states)


def _fold_seed(seed: int, cls: int, a: int, b: int) -> int:
    with np.errstate(over="ignore"):
        return int(stream_key(seed & _SEED_MASK, cls, a, b)) & _SEED_MASK


def _resolve_init(model: ChannelModel, init, tags: np.ndarray, n: int,
                  seed: int, cls: int, backend):
    """Return (initial states (trials, n), slot offsets (trials,))."""
    trials = tags.shape[0]
    offsets = np.zeros(trials, dtype=np.int64)
    if isinstance(init, np.ndarray):
        states = np.broadcast_to(init.astype(np.int64), (trials, n)).copy()
        return states, offsets
    if init == "all_ones":
        fill = model.state_mask
    elif init in ("all_zeros", "stationary"):
        fill = 0
    else:
        raise ValueError(f"unknown init policy {init!r}")
    states = np.full((trials, n), fill, dtype=np.int64)
    if init == "stationary" and model.order >= 1:
        burn = burn_in_slots(model)
        states = backend["advance"](model.p_success, model.state_mask,
                                    seed, cls, tags, states, offsets, burn)
        offsets = np.full(trials, burn, dtype=np.int64)
    return states, offsets


def block_time(model: ChannelModel, n: int, k: int, *, init="stationary",
               seed: int = 0, trial: int = 0,
               max_slots: int = DEFAULT_MAX_SLOTS):
    """One sampled block: straggler completion time and all end histories.

    Every receiver's channel keeps ticking for the full straggler time, so
    the returned states are valid continuation points for the next block.
    """
    times, states = _completion_raw(model, n, k, init, 1, seed,
                                    trial_base=trial, max_slots=max_slots)
    return int(times[0]), states[0]


def completion_time_samples(model: ChannelModel, n: int, k: int, *,
                            init="stationary", trials: int, seed: int,
                            common_random_numbers: bool = False,
                            max_slots: int = DEFAULT_MAX_SLOTS) -> np.ndarray:
    """Independent samples of the block completion time T(n, k)."""
    if n < 1 or k < 1:
        raise ValueError(f"n and k must be >= 1, got n={n}, k={k}")
    eff_seed = seed if common_random_numbers else _fold_seed(seed, 7, n, k)
    times, _ = _completion_raw(model, n, k, init, trials, eff_seed,
                               max_slots=max_slots)
    return times


def _completion_raw(model, n, k, init, trials, seed, trial_base=0,
                    max_slots=DEFAULT_MAX_SLOTS):
    backend = _kernels.get_backend()
    seed &= _SEED_MASK
    tags = np.arange(trial_base, trial_base + trials, dtype=np.int64)
    states, offsets = _resolve_init(model, init, tags, n, seed, CLS_TRIAL,
                                    backend)
    times, end_states = backend["block_times"](
        model.p_success, model.state_mask, k, seed, CLS_TRIAL, tags,
        states, offsets, max_slots)
    if (times < 0).any():
        raise RuntimeError(f"block did not complete within {max_slots} slots")
    return times, end_states


def estimate_expected_completion(model: ChannelModel, n: int, k: int, *,
                                 init="stationary", trials: int, seed: int,
                                 common_random_numbers: bool = False
                                 ) -> CompletionStats:
    """Monte Carlo estimate of E[T(n, k)] under the given initial-state
    policy (``init="all_ones"`` gives the all-good-state conditional mean)."""
    if trials < 100:
        raise ValueError(f"trials must be >= 100, got {trials}")
    t = completion_time_samples(model, n, k, init=init, trials=trials,
                                seed=seed,
                                common_random_numbers=common_random_numbers)
    return CompletionStats(
        mean=float(t.mean()),
        std_error=float(t.std(ddof=1) / math.sqrt(trials)),
        trials=trials,
        min=int(t.min()),
        max=int(t.max()),
    )


def renewal_block_times(model: ChannelModel, n: int, k: int, *, blocks: int,
                        seed: int, init="stationary",
                        max_slots: int = DEFAULT_MAX_SLOTS) -> np.ndarray:
    """Per-block completion times of the chained renewal process: block h+1
    starts the slot after block h completes and inherits all n histories."""
    if n < 1 or k < 1:
        raise ValueError(f"n and k must be >= 1, got n={n}, k={k}")
    backend = _kernels.get_backend()
    eff_seed = _fold_seed(seed, 8, n, k)
    states, offsets = _resolve_init(model, init, np.zeros(1, dtype=np.int64),
                                    n, eff_seed, CLS_RENEWAL, backend)
    times, _ = backend["renewal"](model.p_success, model.state_mask, k,
                                  blocks, eff_seed, states[0],
                                  int(offsets[0]), max_slots)
    if (times < 0).any():
        raise RuntimeError(f"block did not complete within {max_slots} slots")
    return times


def estimate_throughput(model: ChannelModel, n: int, k: int, *, blocks: int,
                        seed: int, init="stationary") -> ThroughputEstimate:
    """Renewal estimate of the long-run throughput eta(n, k) = packets/slot.

    Standard error comes from batch means over sqrt(blocks) batches; blocks
    of a chained renewal trace are only asymptotically independent.
    """
    if blocks < 100:
        raise ValueError(f"blocks must be >= 100, got {blocks}")
    times = renewal_block_times(model, n, k, blocks=blocks, seed=seed,
                                init=init)
    total = int(times.sum())
    eta = k * blocks / total
    nbatch = int(math.sqrt(blocks))
    size = blocks // nbatch
    batch_slots = times[:nbatch * size].reshape(nbatch, size).sum(axis=1)
    batch_eta = k * size / batch_slots
    se = float(batch_eta.std(ddof=1) / math.sqrt(nbatch))
    return ThroughputEstimate(
        eta_hat=float(eta),
        blocks_completed=blocks,
        total_slots=total,
        std_error=se,
    )


def first_success_times(model: ChannelModel, start_bit: int, *, trials: int,
                        seed: int) -> np.ndarray:
    """Samples of the first-success time of one Gilbert-Elliott receiver
    whose previous slot was ``start_bit``."""
    if model.order != 1:
        raise ValueError("first_success_times is defined for order-1 channels")
    if start_bit not in (0, 1):
        raise ValueError(f"start_bit must be 0 or 1, got {start_bit}")
    eff_seed = _fold_seed(seed, 10, start_bit, 0)
    init = np.full(1, start_bit, dtype=np.int64)
    times, _ = _completion_raw(model, 1, 1, init, trials, eff_seed)
    return times


def sample_trace(model: ChannelModel, nslots: int, *, seed: int,
                 init="stationary") -> np.ndarray:
    """One channel trace of length nslots (bits), stationary by default."""
    backend = _kernels.get_backend()
    eff_seed = _fold_seed(seed, 11, nslots, 0)
    state = 0
    burn = burn_in_slots(model) if init == "stationary" else 0
    if burn:
        head, state = backend["trace"](model.p_success, model.state_mask,
                                       burn, eff_seed, 0, 0)
    bits, _ = backend["trace"](model.p_success, model.state_mask, nslots,
                               eff_seed, 1, state)
    return bits


def simulate_queue(model: ChannelModel, n: int, k: int, lam: float, *,
                   arrival: str = "bernoulli_batch", slots: int, seed: int,
                   thresholds: QueueThresholds = QueueThresholds()
                   ) -> QueueStats:
    """Finite-horizon queue run: arrivals accumulate, service of k packets
    takes one block completion time, channels tick through idle slots.

    The verdict uses the explicit thresholds: stable when the queue trend
    over the last half horizon is below ``slope_threshold`` and the mean
    queue stays below ``mean_queue_factor * k``; unstable when both are
    exceeded; inconclusive otherwise (never coerced).
    """
    if slots < 10**5:
        raise ValueError(f"slots must be >= 1e5, got {slots}")
    if lam <= 0.0:
        raise ValueError(f"lambda must be > 0, got {lam}")
    kinds = {"bernoulli_batch": 0, "poisson": 1}
    if arrival not in kinds:
        raise ValueError(f"arrival must be one of {sorted(kinds)}")
    backend = _kernels.get_backend()
    eff_seed = _fold_seed(seed, 9, n, k)
    states, offsets = _resolve_init(model, "stationary",
                                    np.zeros(1, dtype=np.int64), n, eff_seed,
                                    2, backend)
    qlen, blocks, _ = backend["queue_sim"](
        model.p_success, model.state_mask, k, float(lam), kinds[arrival],
        slots, eff_seed, states[0], int(offsets[0]))
    half = qlen[slots // 2:]
    x = np.arange(half.size, dtype=float)
    slope = float(np.polyfit(x, half.astype(float), 1)[0])
    mean_q = float(half.mean())
    bounded = mean_q <= thresholds.mean_queue_factor * k
    if slope < thresholds.slope_threshold and bounded:
        verdict = "stable"
    elif slope > thresholds.slope_threshold and not bounded:
        verdict = "unstable"
    else:
        verdict = "inconclusive"
    return QueueStats(
        lam=float(lam),
        mean_queue=mean_q,
        queue_trend_slope=slope,
        verdict=verdict,
        blocks_completed=int(blocks),
    )


def backend_name() -> str:
    return _kernels.backend_name()
