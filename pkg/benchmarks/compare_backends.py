"""Time the jit backend against the vectorized numpy fallback.

Each backend runs in its own subprocess so that the RB_NO_NUMBA switch takes
effect at import time.  The workload is a renewal throughput estimate; both
backends consume identical counter-based draws, so the results agree bit for
bit and only speed differs.
"""

import argparse
import json
import os
import subprocess
import sys
import time

_WORKER = r"""
import json, sys, time
from ratelesscast import gilbert_elliott, estimate_throughput, backend_name
n, k, blocks, seed = json.loads(sys.argv[1])
model = gilbert_elliott(0.4, 0.4)
# warm-up triggers jit compilation so it is not billed to the timing
estimate_throughput(model, n, k, blocks=100, seed=seed)
t0 = time.perf_counter()
est = estimate_throughput(model, n, k, blocks=blocks, seed=seed)
dt = time.perf_counter() - t0
print(json.dumps({"backend": backend_name(), "seconds": dt,
                  "eta_hat": est.eta_hat, "total_slots": est.total_slots}))
"""


def run_backend(no_numba, n, k, blocks, seed):
    env = dict(os.environ, RB_NO_NUMBA="1" if no_numba else "")
    out = subprocess.run(
        [sys.executable, "-c", _WORKER, json.dumps([n, k, blocks, seed])],
        env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=64)
    ap.add_argument("--k", type=int, default=40)
    ap.add_argument("--blocks", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=12345)
    args = ap.parse_args()

    results = [run_backend(False, args.n, args.k, args.blocks, args.seed),
               run_backend(True, args.n, args.k, args.blocks, args.seed)]
    agree = (results[0]["eta_hat"] == results[1]["eta_hat"]
             and results[0]["total_slots"] == results[1]["total_slots"])
    print(f"workload: n={args.n} k={args.k} blocks={args.blocks}")
    for r in results:
        rate = r["total_slots"] * args.n / r["seconds"]
        print(f"{r['backend']:>6}: {r['seconds']:8.3f} s "
              f"({rate:.3e} receiver-slots/s), eta_hat={r['eta_hat']:.6f}")
    print(f"outputs bit-identical: {agree}")
    print(f"speedup: {results[1]['seconds'] / results[0]['seconds']:.1f}x")
    return 0 if agree else 1


if __name__ == "__main__":
    sys.exit(main())
