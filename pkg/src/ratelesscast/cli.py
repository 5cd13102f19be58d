"""Command line entry point.

Subcommands: ``analyze`` (one-shot analytical evaluations), ``simulate``
(one Monte Carlo setting, CSV row to stdout), ``experiment`` (preset or
config-file sweeps with CSV + manifest outputs), and ``selftest`` (quick
oracle and property checks).  ``RB_SEED`` overrides any configured seed.
Exit codes: 0 ok, 1 usage error, 2 runtime error.
"""

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from ._version import __version__
from .asymptotic import asymptotic_throughput
from .bounds import CSE1_NUMERATORS, finite_lower_bound, k_zero
from .channel import gilbert_elliott, memoryless
from .experiments import (ExperimentConfig, PRESET_NAMES, channel_from_spec,
                          preset, resolve_schedule, run)
from .oracle import exact_expected_completion_memoryless
from .simulate import (backend_name, estimate_expected_completion,
                       estimate_throughput, renewal_block_times,
                       completion_time_samples, sample_trace)
from .spectral import perron_root, rate_function, rate_function_memoryless, \
    tilted


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def parse_channel_arg(text: str) -> dict:
    """mem:GAMMA | ge:P01,P10 | matrix:PATH.json -> channel spec block."""
    kind, _, rest = text.partition(":")
    try:
        if kind == "mem":
            return {"kind": "memoryless", "gamma": float(rest)}
        if kind == "ge":
            p01, p10 = (float(x) for x in rest.split(","))
            return {"kind": "gilbert_elliott", "p01": p01, "p10": p10}
        if kind == "matrix":
            with open(rest) as fh:
                d = json.load(fh)
            return {"kind": "matrix", "l": d["l"], "rows": d["rows"]}
    except (ValueError, OSError, KeyError) as exc:
        raise ValueError(f"bad channel spec {text!r}: {exc}") from exc
    raise ValueError(f"bad channel spec {text!r} (use mem:/ge:/matrix:)")


def _seed_override(seed: int) -> int:
    env = os.environ.get("RB_SEED")
    return int(env) if env else seed


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------

def _cmd_analyze(args) -> int:
    model = channel_from_spec(parse_channel_arg(args.channel))
    out = {"channel": args.channel, "gamma": model.success_prob}
    if args.k0:
        if model.order != 1 or model.ge is None:
            raise ValueError("--k0 needs a Gilbert-Elliott channel (ge:...)")
        out["k0"] = k_zero(model.ge.p01, model.ge.p10)
    if args.rate_fn is not None:
        ev = rate_function(model, args.rate_fn)
        out["beta"] = args.rate_fn
        out["rate_fn"] = ev.value
        out["theta_star"] = ev.theta_star
    if args.asymptotic is not None:
        c = math.inf if args.asymptotic.lower() in ("inf", "infinity") \
            else float(args.asymptotic)
        res = asymptotic_throughput(model, c)
        out["c"] = c
        out["asymptotic"] = res.beta_c
        out["attained"] = res.attained
    if args.bound is not None:
        n, k = args.bound
        rep = finite_lower_bound(model, float(n), int(k),
                                 cse1_numerator=args.cse1_numerator)
        out["n"], out["k"] = float(n), int(k)
        out["k0"] = rep.k_zero
        out["our_bound"] = rep.our_bound
        out["cse1"], out["cse2"] = rep.cse1, rep.cse2
    if args.bounds:
        cols = ("n", "k", "k0", "ratio", "our_bound", "cse1", "cse1_valid",
                "cse2", "cse2_valid")
        print(",".join(cols))
        for n in args.n_list:
            for k in args.k_list:
                rep = finite_lower_bound(model, n, k,
                                         cse1_numerator=args.cse1_numerator)
                print(",".join(_fmt(v) for v in (
                    rep.n, rep.k, rep.k_zero, rep.ratio, rep.our_bound,
                    rep.cse1, rep.cse1_valid, rep.cse2, rep.cse2_valid)))
        return 0
    if args.json:
        print(json.dumps(out))
    else:
        width = max(len(k) for k in out)
        for key, val in out.items():
            print(f"{key:<{width}}  {val}")
    return 0


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def _cmd_simulate(args) -> int:
    spec = parse_channel_arg(args.channel)
    model = channel_from_spec(spec)
    seed = _seed_override(args.seed)
    header = ("n", "k", "channel", "seed", "trials",
              "mean_T", "se_T", "eta_hat", "se_eta")
    if args.completion:
        samples = completion_time_samples(
            model, args.n, args.k, init=args.init, trials=args.trials,
            seed=seed)
        mean_t = float(samples.mean())
        se_t = float(samples.std(ddof=1) / math.sqrt(samples.size))
        eta = se_eta = None
        count = args.trials
    else:
        samples = renewal_block_times(model, args.n, args.k,
                                      blocks=args.blocks, seed=seed,
                                      init=args.init)
        est = estimate_throughput(model, args.n, args.k, blocks=args.blocks,
                                  seed=seed, init=args.init)
        mean_t = float(samples.mean())
        se_t = float(samples.std(ddof=1) / math.sqrt(samples.size))
        eta, se_eta = est.eta_hat, est.std_error
        count = args.blocks
    if args.dump_trials:
        with open(args.dump_trials, "w") as fh:
            fh.writelines(f"{int(t)}\n" for t in samples)
    writer = csv.writer(sys.stdout)
    writer.writerow(header)
    writer.writerow(_fmt(v) for v in (
        args.n, args.k, args.channel, seed, count, mean_t, se_t, eta,
        se_eta))
    return 0


# ---------------------------------------------------------------------------
# experiment
# ---------------------------------------------------------------------------

def _cmd_experiment(args) -> int:
    if bool(args.preset) == bool(args.config):
        raise ValueError("give exactly one of --preset or --config")
    if args.preset:
        cfg = preset(args.preset)
        stem = args.preset
    else:
        with open(args.config) as fh:
            cfg = ExperimentConfig.from_dict(json.load(fh))
        stem = os.path.splitext(os.path.basename(args.config))[0]
    if args.seed is not None:
        cfg.seed = args.seed
    cfg.seed = _seed_override(cfg.seed)
    if args.blocks is not None:
        cfg.blocks = args.blocks
    if args.k_max is not None:
        sched = cfg.schedule
        if "k_list" in sched:
            sched["k_list"] = [k for k in sched["k_list"] if k <= args.k_max]
        else:
            sched["pairs"] = [p for p in sched["pairs"] if p[1] <= args.k_max]
    if args.no_simulate:
        cfg.toggles["simulate"] = False
    if args.no_bounds:
        cfg.toggles["bounds"] = False
    if args.no_cse:
        cfg.toggles["cse"] = False
    if args.cse1_numerator:
        cfg.toggles["cse1_numerator"] = args.cse1_numerator

    out_dir = args.out_dir or "."
    os.makedirs(out_dir, exist_ok=True)
    cfg.outputs = {
        "csv": args.csv or os.path.join(out_dir, f"{stem}_results.csv"),
        "manifest": args.manifest or os.path.join(out_dir,
                                                  f"{stem}_manifest.json"),
    }
    resolve_schedule(cfg.schedule)  # validate before any work
    _, csv_text = run(cfg, jobs=args.jobs)
    sys.stdout.write(csv_text)
    print(f"wrote {cfg.outputs['csv']} and {cfg.outputs['manifest']}",
          file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# selftest
# ---------------------------------------------------------------------------

def _cmd_selftest(args) -> int:
    failures = 0

    def check(name, ok):
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        failures += 0 if ok else 1

    check("exact oracle: E[T(2,1)] at gamma=0.5 equals 8/3",
          abs(exact_expected_completion_memoryless(0.5, 2, 1) - 8.0 / 3.0)
          < 1e-9)
    mem = memoryless(0.5)
    check("rate function closed form at beta=0.25",
          abs(rate_function(mem, 0.25).value
              - rate_function_memoryless(0.5, 0.25)) < 1e-8)
    ge = gilbert_elliott(0.4, 0.4)
    check("Perron root of untilted chain is 1",
          abs(perron_root(tilted(ge, 0.0)) - 1.0) < 1e-10)
    check("K0 of symmetric 0.4 chain is 1", k_zero(0.4, 0.4) == 1)
    est1 = estimate_expected_completion(mem, 2, 5, trials=20000, seed=42)
    est2 = estimate_expected_completion(mem, 2, 5, trials=20000, seed=42)
    check("simulation is seed-deterministic", est1 == est2)
    exact = exact_expected_completion_memoryless(0.5, 2, 5)
    check("simulated mean within 4 SE of exact oracle",
          abs(est1.mean - exact) < 4.0 * est1.std_error)
    trace = sample_trace(mem, 10**5, seed=7)
    check("trace frequency near gamma",
          abs(float(trace.mean()) - 0.5) < 0.01)
    print(f"backend: {backend_name()}")
    if failures:
        print(f"{failures} selftest check(s) failed", file=sys.stderr)
        return 2
    return 0


# ---------------------------------------------------------------------------

def _build_parser() -> _Parser:
    p = _Parser(prog="ratelesscast",
                description="Rateless-coded broadcast throughput toolkit")
    p.add_argument("--version", action="version",
                   version=f"ratelesscast {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="one-shot analytical evaluations")
    a.add_argument("--channel", required=True,
                   help="mem:GAMMA | ge:P01,P10 | matrix:PATH.json")
    a.add_argument("--rate-fn", type=float, metavar="BETA",
                   help="evaluate the rate function at BETA")
    a.add_argument("--asymptotic", metavar="C",
                   help="limiting throughput at ratio C (or 'inf')")
    a.add_argument("--k0", action="store_true",
                   help="channel-memory penalty K0")
    a.add_argument("--bound", nargs=2, metavar=("N", "K"),
                   help="finite lower bound at one (n, k)")
    a.add_argument("--bounds", action="store_true",
                   help="CSV bound sweep over --n-list x --k-list")
    a.add_argument("--n-list", type=_int_list, default=[],
                   help="comma-separated n values for --bounds")
    a.add_argument("--k-list", type=_int_list, default=[],
                   help="comma-separated k values for --bounds")
    a.add_argument("--cse1-numerator", choices=CSE1_NUMERATORS,
                   default="one_minus_gamma")
    a.add_argument("--json", action="store_true")
    a.set_defaults(func=_cmd_analyze)

    s = sub.add_parser("simulate", help="Monte Carlo run for one setting")
    s.add_argument("--channel", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--blocks", type=int, default=20000,
                   help="renewal blocks (throughput mode)")
    s.add_argument("--completion", action="store_true",
                   help="estimate E[T] from i.i.d. trials instead")
    s.add_argument("--trials", type=int, default=100000)
    s.add_argument("--init", default="stationary",
                   choices=("stationary", "all_ones", "all_zeros"))
    s.add_argument("--seed", type=int, default=12345)
    s.add_argument("--dump-trials", metavar="PATH",
                   help="write one completion time per line")
    s.set_defaults(func=_cmd_simulate)

    e = sub.add_parser("experiment", help="run a sweep to CSV + manifest")
    e.add_argument("--preset", choices=PRESET_NAMES)
    e.add_argument("--config", metavar="PATH", help="JSON experiment config")
    e.add_argument("--seed", type=int)
    e.add_argument("--jobs", type=int, default=1)
    e.add_argument("--blocks", type=int, help="override renewal blocks")
    e.add_argument("--k-max", type=int,
                   help="drop schedule points with k above this")
    e.add_argument("--no-simulate", action="store_true")
    e.add_argument("--no-bounds", action="store_true")
    e.add_argument("--no-cse", action="store_true")
    e.add_argument("--cse1-numerator", choices=CSE1_NUMERATORS)
    e.add_argument("--out-dir", metavar="DIR")
    e.add_argument("--csv", metavar="PATH")
    e.add_argument("--manifest", metavar="PATH")
    e.set_defaults(func=_cmd_experiment)

    t = sub.add_parser("selftest", help="quick oracle/property checks")
    t.set_defaults(func=_cmd_selftest)
    return p


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --version exits 0, usage errors exit 1
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
