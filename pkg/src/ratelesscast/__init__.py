"""Throughput of rateless-coded broadcast over Markov-modulated erasure
channels: analytical rate-function machinery, finite-size lower bounds, and
a reproducible Monte Carlo renewal simulator."""

from ._version import __version__
from .asymptotic import AsymptoticResult, asymptotic_throughput, \
    beta_over_lambda, memoryless_asymptotic
from .bounds import BoundReport, cse_bound_1, cse_bound_2, \
    finite_lower_bound, k_zero
from .channel import ChannelModel, GilbertElliott, from_transition, \
    gilbert_elliott, memoryless, next_slot, stationary_distribution
from .oracle import exact_expected_completion_memoryless
from .simulate import CompletionStats, QueueStats, QueueThresholds, \
    ThroughputEstimate, backend_name, block_time, completion_time_samples, \
    estimate_expected_completion, estimate_throughput, first_success_times, \
    renewal_block_times, sample_trace, simulate_queue
from .spectral import RateFunctionEval, TiltedMatrix, perron_root, \
    rate_function, rate_function_memoryless, tilted

__all__ = [
    "__version__",
    "AsymptoticResult", "asymptotic_throughput", "beta_over_lambda",
    "memoryless_asymptotic",
    "BoundReport", "cse_bound_1", "cse_bound_2", "finite_lower_bound",
    "k_zero",
    "ChannelModel", "GilbertElliott", "from_transition", "gilbert_elliott",
    "memoryless", "next_slot", "stationary_distribution",
    "exact_expected_completion_memoryless",
    "CompletionStats", "QueueStats", "QueueThresholds", "ThroughputEstimate",
    "backend_name", "block_time", "completion_time_samples",
    "estimate_expected_completion", "estimate_throughput",
    "first_success_times", "renewal_block_times", "sample_trace",
    "simulate_queue",
    "RateFunctionEval", "TiltedMatrix", "perron_root", "rate_function",
    "rate_function_memoryless", "tilted",
]
