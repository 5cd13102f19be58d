"""Counter-based uniform random streams.

Every draw is a pure function of (seed, stream class, stream id, receiver id,
slot index), so simulation results do not depend on scheduling order, worker
count, or how many draws other streams consumed.  The same integer arithmetic
runs under numba and under vectorized numpy, so both backends produce
bit-identical uniforms.

The generator is the splitmix64 output function applied to a mixed key plus a
golden-ratio-stepped counter.  All operations are on uint64 and wrap mod 2^64.
"""

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
# 2^-53: top 53 bits of the hash become a uniform in [0, 1)
INV53 = 1.0 / 9007199254740992.0

# Stream classes, used as the `cls` argument of stream_key so that different
# parts of a simulation never share draws for the same (seed, id, slot).
CLS_TRIAL = 0      # i.i.d. trials, one stream per (trial, receiver)
CLS_RENEWAL = 1    # renewal trace, one stream per receiver
CLS_QUEUE = 2      # queue simulation channel streams
CLS_ARRIVAL = 3    # queue simulation arrival stream
CLS_TRACE = 4      # standalone channel traces


def mix64(z):
    """splitmix64 finalizer; works elementwise on uint64 arrays."""
    with np.errstate(over="ignore"):  # uint64 wraparound is the point
        z = (z ^ (z >> _S30)) * _M1
        z = (z ^ (z >> _S27)) * _M2
        return z ^ (z >> _S31)


def stream_key(seed, cls, sid, rid):
    """Derive the uint64 key of one stream from its integer coordinates."""
    with np.errstate(over="ignore"):
        k = mix64(np.uint64(seed) + GOLDEN)
        k = mix64(k + np.uint64(cls) * GOLDEN)
        k = mix64(k + np.uint64(sid) * GOLDEN)
        k = mix64(k + np.uint64(rid) * GOLDEN)
    return k


def u01(key, idx):
    """Uniform in [0, 1) at counter position idx of the stream `key`."""
    with np.errstate(over="ignore"):
        return (mix64(key + np.uint64(idx) * GOLDEN) >> _S11) * INV53
