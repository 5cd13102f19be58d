"""Declarative experiment sweeps: schedules, presets, CSV and manifest output.

A schedule either lists explicit (n, k) pairs or gives a ratio rule
``{"ratio_c": c, "k_list": [...]}`` meaning n = round(e^{k/c}).  For ratio
rules the analytic columns (bounds, asymptotic reference) use the exact real
n = e^{k/c}, so a constant-ratio sweep yields a constant bound column; the
simulated column uses the rounded receiver count, recorded in the manifest.
"""

import json
import math
import multiprocessing
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from ._version import __version__
from .bounds import finite_lower_bound
from .channel import ChannelModel, from_transition, gilbert_elliott, memoryless
from .simulate import backend_name, estimate_throughput

PRESET_NAMES = ("example1", "example2", "example3a", "example3b", "example3c")

CSV_COLUMNS = ("n", "k", "eta_hat", "se", "our_bound", "cse1", "cse2",
               "asymptotic")


@dataclass(frozen=True)
class SchedulePoint:
    k: int
    n_sim: int      # receiver count actually simulated
    n_exact: float  # real-valued n used by the analytic columns


@dataclass
class ExperimentConfig:
    channel: dict
    schedule: dict
    blocks: int = 20000
    seed: int = 12345
    outputs: dict = field(default_factory=dict)  # {"csv": path, "manifest": path}
    toggles: dict = field(default_factory=lambda: dict(
        bounds=True, simulate=True, cse=True,
        cse1_numerator="one_minus_gamma"))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        cfg = cls(channel=dict(d["channel"]), schedule=dict(d["schedule"]))
        cfg.blocks = int(d.get("blocks", cfg.blocks))
        cfg.seed = int(d.get("seed", cfg.seed))
        cfg.outputs = dict(d.get("outputs", {}))
        toggles = dict(cfg.toggles)
        toggles.update(d.get("toggles", {}))
        cfg.toggles = toggles
        return cfg


def channel_from_spec(spec: dict) -> ChannelModel:
    """Build a channel from its JSON spec block."""
    kind = spec.get("kind")
    if kind == "memoryless":
        return memoryless(float(spec["gamma"]))
    if kind == "gilbert_elliott":
        return gilbert_elliott(float(spec["p01"]), float(spec["p10"]))
    if kind == "matrix":
        return from_transition(int(spec["l"]), spec["rows"])
    raise ValueError(f"unknown channel kind {kind!r}")


def resolve_schedule(schedule: dict) -> list[SchedulePoint]:
    if "pairs" in schedule:
        pts = [SchedulePoint(k=int(k), n_sim=int(n), n_exact=float(n))
               for n, k in schedule["pairs"]]
    elif "ratio_c" in schedule:
        c = float(schedule["ratio_c"])
        pts = []
        for k in schedule["k_list"]:
            n_exact = math.exp(int(k) / c)
            pts.append(SchedulePoint(k=int(k),
                                     n_sim=max(2, round(n_exact)),
                                     n_exact=n_exact))
    else:
        raise ValueError("schedule needs either 'pairs' or 'ratio_c'+'k_list'")
    if not pts:
        raise ValueError("schedule is empty")
    for p in pts:
        if p.n_sim < 1 or p.k < 1:
            raise ValueError(f"schedule point out of range: {p}")
    return pts


def preset(name: str) -> ExperimentConfig:
    """Five built-in sweeps over block size, receiver count, and ratio."""
    log2 = math.log(2.0)
    if name == "example1":
        return ExperimentConfig(
            channel={"kind": "memoryless", "gamma": 0.5},
            schedule={"ratio_c": 15.0 / log2,
                      "k_list": list(range(5, 301, 5))})
    if name == "example2":
        return ExperimentConfig(
            channel={"kind": "gilbert_elliott", "p01": 0.4, "p10": 0.4},
            schedule={"ratio_c": 5.0 / log2,
                      "k_list": list(range(5, 101, 5))})
    if name == "example3a":
        return ExperimentConfig(
            channel={"kind": "memoryless", "gamma": 0.5},
            schedule={"pairs": [[n, n] for n in range(5, 301, 5)]})
    if name == "example3b":
        return ExperimentConfig(
            channel={"kind": "memoryless", "gamma": 0.5},
            schedule={"pairs": [[10, k] for k in range(5, 301, 5)]})
    if name == "example3c":
        return ExperimentConfig(
            channel={"kind": "memoryless", "gamma": 0.5},
            schedule={"pairs": [[n, 80] for n in range(5, 101, 5)]})
    raise ValueError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")


def point_seed(base_seed: int, index: int) -> int:
    # decorrelate schedule points while keeping the derivation obvious
    return (base_seed + 1_000_003 * index) & ((1 << 62) - 1)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def _run_point(config_dict: dict, index: int) -> dict:
    cfg = ExperimentConfig.from_dict(config_dict)
    model = channel_from_spec(cfg.channel)
    pt = resolve_schedule(cfg.schedule)[index]
    tg = cfg.toggles
    t0 = time.perf_counter()
    row = {"n": pt.n_sim, "k": pt.k, "eta_hat": None, "se": None,
           "our_bound": None, "cse1": None, "cse2": None, "asymptotic": None}
    if tg.get("bounds", True):
        rep = finite_lower_bound(model, pt.n_exact, pt.k,
                                 cse1_numerator=tg.get(
                                     "cse1_numerator", "one_minus_gamma"))
        row["our_bound"] = rep.our_bound
        row["asymptotic"] = rep.asymptotic_ref
        if tg.get("cse", True):
            row["cse1"] = rep.cse1
            row["cse2"] = rep.cse2
    if tg.get("simulate", True):
        est = estimate_throughput(model, pt.n_sim, pt.k, blocks=cfg.blocks,
                                  seed=point_seed(cfg.seed, index))
        row["eta_hat"] = est.eta_hat
        row["se"] = est.std_error
    row["_wall_time_ms"] = (time.perf_counter() - t0) * 1e3
    return row


def run(config: ExperimentConfig, jobs: int = 1):
    """Execute a sweep; returns (rows, csv_text) and writes any configured
    output files.  Rows are emitted in schedule order for any jobs count."""
    points = resolve_schedule(config.schedule)
    cfg_dict = config.to_dict()
    if jobs > 1:
        # spawn: fork is unsafe once the jit backend's thread pool is live
        ctx = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(max_workers=jobs, mp_context=ctx) as pool:
            rows = list(pool.map(_run_point, [cfg_dict] * len(points),
                                 range(len(points))))
    else:
        rows = [_run_point(cfg_dict, i) for i in range(len(points))]

    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(_fmt(row[col]) for col in CSV_COLUMNS))
    csv_text = "\n".join(lines) + "\n"

    if config.outputs.get("csv"):
        with open(config.outputs["csv"], "w") as fh:
            fh.write(csv_text)
    if config.outputs.get("manifest"):
        manifest = {
            "config": config.to_dict(),
            "version": f"ratelesscast-{__version__}",
            "backend": backend_name(),
            "seed": config.seed,
            "schedule_points": [asdict(p) for p in points],
            "point_seeds": [point_seed(config.seed, i)
                            for i in range(len(points))],
            "wall_time_ms": [row["_wall_time_ms"] for row in rows],
        }
        with open(config.outputs["manifest"], "w") as fh:
            json.dump(manifest, fh, indent=2)
            fh.write("\n")
    return rows, csv_text
