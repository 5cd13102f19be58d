"""Hot simulation kernels with two interchangeable backends.

The numba backend jit-compiles per-chain scalar loops; the numpy backend runs
the same slot-by-slot recursion vectorized over all chains.  Both consume the
identical counter-based uniforms from :mod:`ratelesscast._rng`, so their
outputs match bit for bit (asserted in tests/test_kernels.py).

Backend selection: numba by default; set ``RB_NO_NUMBA=1`` to force the numpy
fallback.  If numba is not importable the fallback is used automatically.
"""

import math
import os

import numpy as np

from ._rng import GOLDEN, INV53, mix64, stream_key

_NO_NUMBA_ENV = os.environ.get("RB_NO_NUMBA", "").lower() in ("1", "true", "yes")

_POISSON_DRAWS_PER_SLOT = 64  # sub-counter budget for Knuth's method


# ---------------------------------------------------------------------------
# numba backend: scalar loops over chains, parallel over independent trials
# ---------------------------------------------------------------------------

def _build_numba_backend():
    from numba import njit, prange

    gold = GOLDEN
    m1 = np.uint64(0xBF58476D1CE4E5B9)
    m2 = np.uint64(0x94D049BB133111EB)
    s30, s27, s31, s11 = (np.uint64(s) for s in (30, 27, 31, 11))
    inv53 = INV53

    @njit(inline="always")
    def mix_j(z):
        z = (z ^ (z >> s30)) * m1
        z = (z ^ (z >> s27)) * m2
        return z ^ (z >> s31)

    @njit(inline="always")
    def key_j(seed, cls, sid, rid):
        k = mix_j(np.uint64(seed) + gold)
        k = mix_j(k + np.uint64(cls) * gold)
        k = mix_j(k + np.uint64(sid) * gold)
        return mix_j(k + np.uint64(rid) * gold)

    @njit(inline="always")
    def u01_j(key, idx):
        return (mix_j(key + np.uint64(idx) * gold) >> s11) * inv53

    @njit(parallel=True, cache=True)
    def block_times(p1, mask, k, seed, cls, tags, init_states, slot_offsets,
                    max_slots):
        trials, n = init_states.shape
        out_t = np.zeros(trials, np.int64)
        out_s = np.zeros((trials, n), np.int64)
        for tr in prange(trials):
            st = np.empty(n, np.int64)
            succ = np.zeros(n, np.int64)
            keys = np.empty(n, np.uint64)
            for i in range(n):
                st[i] = init_states[tr, i]
                keys[i] = key_j(seed, cls, tags[tr], i)
            off = slot_offsets[tr]
            ndone = 0
            t = 0
            while ndone < n and t < max_slots:
                t += 1
                for i in range(n):
                    u = u01_j(keys[i], off + t - 1)
                    b = 1 if u < p1[st[i]] else 0
                    st[i] = ((st[i] << 1) | b) & mask
                    if succ[i] < k:
                        succ[i] += b
                        if succ[i] == k:
                            ndone += 1
            out_t[tr] = t if ndone == n else -1
            for i in range(n):
                out_s[tr, i] = st[i]
        return out_t, out_s

    @njit(parallel=True, cache=True)
    def advance(p1, mask, seed, cls, tags, init_states, slot_offsets, nslots):
        trials, n = init_states.shape
        out_s = np.zeros((trials, n), np.int64)
        for tr in prange(trials):
            off = slot_offsets[tr]
            for i in range(n):
                key = key_j(seed, cls, tags[tr], i)
                s = init_states[tr, i]
                for t in range(nslots):
                    u = u01_j(key, off + t)
                    b = 1 if u < p1[s] else 0
                    s = ((s << 1) | b) & mask
                out_s[tr, i] = s
        return out_s

    @njit(cache=True)
    def renewal(p1, mask, k, blocks, seed, init_states, idx0, max_slots):
        n = init_states.shape[0]
        out_t = np.zeros(blocks, np.int64)
        st = init_states.copy()
        succ = np.zeros(n, np.int64)
        keys = np.empty(n, np.uint64)
        for i in range(n):
            keys[i] = key_j(seed, 1, 0, i)  # CLS_RENEWAL
        idx = idx0
        for h in range(blocks):
            for i in range(n):
                succ[i] = 0
            ndone = 0
            t = 0
            while ndone < n and t < max_slots:
                t += 1
                for i in range(n):
                    u = u01_j(keys[i], idx + t - 1)
                    b = 1 if u < p1[st[i]] else 0
                    st[i] = ((st[i] << 1) | b) & mask
                    if succ[i] < k:
                        succ[i] += b
                        if succ[i] == k:
                            ndone += 1
            out_t[h] = t if ndone == n else -1
            idx += t
        return out_t, st

    @njit(cache=True)
    def queue_sim(p1, mask, k, lam, arrival_kind, slots, seed, init_states,
                  idx0):
        n = init_states.shape[0]
        st = init_states.copy()
        succ = np.zeros(n, np.int64)
        keys = np.empty(n, np.uint64)
        for i in range(n):
            keys[i] = key_j(seed, 2, 0, i)  # CLS_QUEUE
        akey = key_j(seed, 3, 0, 0)        # CLS_ARRIVAL
        qlen = np.zeros(slots, np.int64)
        base = int(lam)
        frac = lam - base
        pois_floor = math.exp(-lam)
        q = 0
        serving = False
        ndone = 0
        blocks = 0
        for t in range(slots):
            if arrival_kind == 0:
                u = u01_j(akey, t * 64)
                q += base + (1 if u < frac else 0)
            else:
                p = 1.0
                j = 0
                while j < 64:
                    p *= u01_j(akey, t * 64 + j)
                    j += 1
                    if p <= pois_floor:
                        break
                q += j - 1
            for i in range(n):
                u = u01_j(keys[i], idx0 + t)
                b = 1 if u < p1[st[i]] else 0
                st[i] = ((st[i] << 1) | b) & mask
                if serving and succ[i] < k:
                    succ[i] += b
                    if succ[i] == k:
                        ndone += 1
            if serving and ndone == n:
                serving = False
                q -= k
                blocks += 1
            if not serving and q >= k:
                serving = True
                ndone = 0
                for i in range(n):
                    succ[i] = 0
            qlen[t] = q
        return qlen, blocks, st

    @njit(cache=True)
    def trace(p1, mask, nslots, seed, sid, init_state):
        key = key_j(seed, 4, sid, 0)  # CLS_TRACE
        bits = np.zeros(nslots, np.uint8)
        s = init_state
        for t in range(nslots):
            u = u01_j(key, t)
            b = 1 if u < p1[s] else 0
            s = ((s << 1) | b) & mask
            bits[t] = b
        return bits, s

    return {
        "name": "numba",
        "block_times": block_times,
        "advance": advance,
        "renewal": renewal,
        "queue_sim": queue_sim,
        "trace": trace,
    }


# ---------------------------------------------------------------------------
# numpy backend: slot loop, vectorized across chains
# ---------------------------------------------------------------------------

def _u01_vec(keys, idx):
    return (mix64(keys + idx.astype(np.uint64) * GOLDEN) >> np.uint64(11)) * INV53


def _key_vec(seed, cls, sids, rids):
    with np.errstate(over="ignore"):
        k = mix64(np.uint64(seed) + GOLDEN)
        k = mix64(k + np.uint64(cls) * GOLDEN)
        k = mix64(k + sids.astype(np.uint64) * GOLDEN)
        k = mix64(k + rids.astype(np.uint64) * GOLDEN)
    return k


def _block_times_np(p1, mask, k, seed, cls, tags, init_states, slot_offsets,
                    max_slots):
    trials, n = init_states.shape
    keys = _key_vec(seed, cls, np.asarray(tags)[:, None],
                    np.arange(n)[None, :])
    states = np.array(init_states, dtype=np.int64, copy=True)
    succ = np.zeros((trials, n), dtype=np.int64)
    out_t = np.full(trials, -1, dtype=np.int64)
    active = np.ones(trials, dtype=bool)
    offsets = np.asarray(slot_offsets, dtype=np.int64)
    t = 0
    while active.any() and t < max_slots:
        t += 1
        rows = np.flatnonzero(active)
        idx = (offsets[rows] + t - 1)[:, None]
        u = _u01_vec(keys[rows], idx)
        bits = (u < p1[states[rows]]).astype(np.int64)
        states[rows] = ((states[rows] << 1) | bits) & mask
        succ[rows] += bits
        done = (succ[rows] >= k).all(axis=1)
        out_t[rows[done]] = t
        active[rows[done]] = False
    return out_t, states


def _advance_np(p1, mask, seed, cls, tags, init_states, slot_offsets, nslots):
    trials, n = init_states.shape
    keys = _key_vec(seed, cls, np.asarray(tags)[:, None],
                    np.arange(n)[None, :])
    states = np.array(init_states, dtype=np.int64, copy=True)
    offsets = np.asarray(slot_offsets, dtype=np.int64)[:, None]
    for t in range(nslots):
        u = _u01_vec(keys, offsets + t)
        bits = (u < p1[states]).astype(np.int64)
        states = ((states << 1) | bits) & mask
    return states


def _renewal_np(p1, mask, k, blocks, seed, init_states, idx0, max_slots):
    n = init_states.shape[0]
    out_t = np.zeros(blocks, dtype=np.int64)
    states = np.array(init_states, dtype=np.int64, copy=True)[None, :]
    idx = idx0
    tags = np.zeros(1, dtype=np.int64)
    for h in range(blocks):
        t, states = _block_times_np(p1, mask, k, seed, 1, tags, states,
                                    np.array([idx], dtype=np.int64), max_slots)
        out_t[h] = t[0]
        idx += int(t[0])
    return out_t, states[0]


def _queue_sim_np(p1, mask, k, lam, arrival_kind, slots, seed, init_states,
                  idx0):
    n = init_states.shape[0]
    states = np.array(init_states, dtype=np.int64, copy=True)
    succ = np.zeros(n, dtype=np.int64)
    keys = _key_vec(seed, 2, np.zeros(n, dtype=np.int64), np.arange(n))
    with np.errstate(over="ignore"):
        akey = stream_key(seed, 3, 0, 0)
    qlen = np.zeros(slots, dtype=np.int64)
    base = int(lam)
    frac = lam - base
    pois_floor = math.exp(-lam)
    q = 0
    serving = False
    blocks = 0
    slot_idx = np.arange(slots, dtype=np.int64)
    # arrivals are independent of the channel state: precompute per slot
    if arrival_kind == 0:
        u = _u01_vec(np.full(slots, akey, dtype=np.uint64), slot_idx * 64)
        arrivals = base + (u < frac).astype(np.int64)
    else:
        u = _u01_vec(np.full((slots, 64), akey, dtype=np.uint64),
                     slot_idx[:, None] * 64 + np.arange(64)[None, :])
        prods = np.cumprod(u, axis=1)
        arrivals = np.minimum((prods > pois_floor).sum(axis=1), 63)
    with np.errstate(over="ignore"):
        for t in range(slots):
            q += int(arrivals[t])
            u = _u01_vec(keys, np.full(n, idx0 + t, dtype=np.int64))
            bits = (u < p1[states]).astype(np.int64)
            states = ((states << 1) | bits) & mask
            if serving:
                succ = np.minimum(succ + bits, k)
                if (succ >= k).all():
                    serving = False
                    q -= k
                    blocks += 1
            if not serving and q >= k:
                serving = True
                succ[:] = 0
            qlen[t] = q
    return qlen, blocks, states


def _trace_np(p1, mask, nslots, seed, sid, init_state):
    with np.errstate(over="ignore"):
        key = np.full(1, stream_key(seed, 4, sid, 0), dtype=np.uint64)
    bits = np.zeros(nslots, dtype=np.uint8)
    s = np.array([init_state], dtype=np.int64)
    for t in range(nslots):
        u = _u01_vec(key, np.array([t], dtype=np.int64))
        b = int(u[0] < p1[s[0]])
        s = ((s << 1) | b) & mask
        bits[t] = b
    return bits, int(s[0])


_NUMPY_BACKEND = {
    "name": "numpy",
    "block_times": _block_times_np,
    "advance": _advance_np,
    "renewal": _renewal_np,
    "queue_sim": _queue_sim_np,
    "trace": _trace_np,
}

_numba_backend = None
if not _NO_NUMBA_ENV:
    try:
        _numba_backend = _build_numba_backend()
    except ImportError:
        _numba_backend = None

_active = _numba_backend if _numba_backend is not None else _NUMPY_BACKEND


def get_backend(name=None):
    """Return the kernel table: the active backend, or one by name."""
    if name is None:
        return _active
    if name == "numpy":
        return _NUMPY_BACKEND
    if name == "numba":
        if _NO_NUMBA_ENV:
            raise RuntimeError("numba backend disabled via RB_NO_NUMBA")
        if _numba_backend is None:
            raise RuntimeError("numba is not available")
        return _numba_backend
    raise ValueError(f"unknown backend {name!r}")


def backend_name():
    return _active["name"]
