"""Run matrix orchestration, objective ratios, CSV persistence and summaries."""

from __future__ import annotations

import csv
import logging
import math
import os
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from functools import lru_cache
from pathlib import Path

import numpy as np

from .heuristics import weighted_greedy_tour
from .instance import TtpInstance, load_instance, load_tour
from .objectives import Evaluator
from .packing import derive_seed, generate_packing
from .search import MOVE_SCHEMES, Driver, Mutation, RunResult, default_budget, run_one_plus_one_ea
from .similarity import common_edges, inversion_similarity

log = logging.getLogger(__name__)

PAPER_P_VALUES = (0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.6, 0.8, 1.0)
WORKERS_ENV = "WTTP_WORKERS"

_CLASS_TAGS = {
    "bounded-strongly-corr": "bsc",
    "uncorr-similar-weights": "usw",
    "uncorr": "u",
}
_NAME_RE = re.compile(r"^(?P<base>[^_]+)_n(?P<items>\d+)_(?P<kind>[a-z-]+)_(?P<cap>\d+)$")


def default_workers() -> int:
    return int(os.environ.get(WORKERS_ENV, os.cpu_count() or 1))


@dataclass
class ExperimentConfig:
    instance_paths: list[str]
    optimal_tour_paths: dict[str, str] = field(default_factory=dict)
    p_values: tuple[float, ...] = PAPER_P_VALUES
    replicates: int = 31
    budget: int | None = None
    mutation: Mutation = Mutation.INVERSION
    base_seed: int = 0
    drivers: tuple[Driver, ...] = (Driver.WTSP, Driver.WTTP)
    output_dir: str = "results"
    worker_count: int = 1
    log_stride: int = 1000
    trajectories: bool = False
    record_timing: bool = False
    moves: str = "poisson"

    def __post_init__(self):
        self.p_values = tuple(float(p) for p in self.p_values)
        self.drivers = tuple(Driver(d) for d in self.drivers)
        self.mutation = Mutation(self.mutation)
        if any(not 0.0 <= p <= 1.0 for p in self.p_values):
            raise ValueError("p values must lie in [0, 1]")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.worker_count < 1:
            raise ValueError("worker_count must be >= 1")
        if not self.drivers:
            raise ValueError("need at least one driver")
        if self.moves not in MOVE_SCHEMES:
            raise ValueError(f"moves must be one of {MOVE_SCHEMES}")


@dataclass
class ExperimentRecord:
    instance: str
    n: int
    ipn: int
    weight_class: str
    p: float
    replicate: int
    driver: Driver
    final_wtsp: float
    final_wttp: float
    ce_tsp: float | None
    ce_wgr: float
    inv_tsp: float | None
    inv_wgr: float
    evaluations: int
    seed: int
    plan_seed: int
    wallclock_ms: int | None = None


RECORD_COLUMNS = [f.name for f in fields(ExperimentRecord)]


def instance_label(path) -> str:
    return Path(path).stem


def instance_attributes(label: str, inst: TtpInstance) -> tuple[int, str]:
    """(items per node, weight class) from the competition file naming scheme."""
    mt = _NAME_RE.match(label)
    if mt and mt["kind"] in _CLASS_TAGS and inst.n > 1:
        items = int(mt["items"])
        if items % (inst.n - 1) == 0:
            return items // (inst.n - 1), _CLASS_TAGS[mt["kind"]]
    ipn = round(inst.m / (inst.n - 1)) if inst.n > 1 else inst.m
    return ipn, "unknown"


def compute_ratio(a: ExperimentRecord, b: ExperimentRecord, target: Driver | str) -> float | None:
    """Own-driver final over cross-driver final for the ``target`` objective.

    Below 1 means optimising with the target's own objective did better.
    Returns None when the cross-driver value is zero.
    """
    target = Driver(target)
    if (a.instance, a.p, a.replicate) != (b.instance, b.p, b.replicate):
        raise ValueError("records belong to different cells")
    if a.driver == b.driver:
        raise ValueError("records must differ in driver")
    own, cross = (a, b) if a.driver == target else (b, a)
    column = "final_wtsp" if target is Driver.WTSP else "final_wttp"
    num, den = getattr(own, column), getattr(cross, column)
    if den == 0:
        return None
    return num / den


@lru_cache(maxsize=None)
def _load(path: str) -> TtpInstance:
    return load_instance(path)


@lru_cache(maxsize=None)
def _load_tour(path: str, n: int):
    return load_tour(path, n)


def _cell(config: ExperimentConfig, path: str, opt_path: str | None, p_index: int,
          replicate: int, driver: Driver) -> tuple[ExperimentRecord, RunResult]:
    inst = _load(path)
    label = instance_label(path)
    p = config.p_values[p_index]
    plan_seed = derive_seed(config.base_seed, label, p_index, replicate, stream=0)
    run_seed = derive_seed(config.base_seed, label, p_index, replicate, stream=1)
    plan = generate_packing(inst, p, plan_seed)
    ev = Evaluator(inst, plan)
    budget = config.budget or default_budget(inst.n)

    t0 = time.perf_counter()
    res = run_one_plus_one_ea(inst, plan, driver, config.mutation, budget, run_seed,
                              config.log_stride, evaluator=ev, moves=config.moves)
    elapsed = int(round((time.perf_counter() - t0) * 1000))

    wgr = weighted_greedy_tour(inst, plan)
    opt = _load_tour(opt_path, inst.n) if opt_path else None
    ipn, wclass = instance_attributes(label, inst)
    rec = ExperimentRecord(
        instance=label,
        n=inst.n,
        ipn=ipn,
        weight_class=wclass,
        p=p,
        replicate=replicate,
        driver=driver,
        final_wtsp=res.final_wtsp,
        final_wttp=res.final_wttp,
        ce_tsp=common_edges(res.final_tour, opt) if opt else None,
        ce_wgr=common_edges(res.final_tour, wgr),
        inv_tsp=inversion_similarity(res.final_tour, opt) if opt else None,
        inv_wgr=inversion_similarity(res.final_tour, wgr),
        evaluations=res.evaluations_used,
        seed=run_seed,
        plan_seed=plan_seed,
        wallclock_ms=elapsed if config.record_timing else None,
    )
    if config.trajectories:
        write_trajectory(Path(config.output_dir) / f"trajectory_{run_id(rec)}.csv", res)
    return rec, res


def _cell_record(args) -> ExperimentRecord:
    return _cell(*args)[0]


def run_id(rec: ExperimentRecord) -> str:
    return f"{rec.instance}_p{rec.p!r}_r{rec.replicate}_{rec.driver.value}"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, Driver):
        return value.value
    if isinstance(value, float):
        return "" if math.isnan(value) else repr(value)
    return str(value)


def write_records(path, records: list[ExperimentRecord]) -> None:
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_COLUMNS)
        for rec in records:
            w.writerow([_fmt(v) for v in asdict(rec).values()])
    os.replace(tmp, path)


def _parse_field(name: str, text: str):
    if text == "":
        return None
    if name in ("instance", "weight_class"):
        return text
    if name == "driver":
        return Driver(text)
    if name in ("n", "ipn", "replicate", "evaluations", "seed", "plan_seed", "wallclock_ms"):
        return int(text)
    return float(text)


def read_records(path) -> list[ExperimentRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = set(RECORD_COLUMNS) - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"{path}: records CSV lacks columns {sorted(missing)}")
        return [ExperimentRecord(**{k: _parse_field(k, row[k]) for k in RECORD_COLUMNS}) for row in reader]


def write_trajectory(path, result: RunResult) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["evaluation_index", "wtsp", "wttp"])
        for pt in result.trajectory:
            w.writerow([pt.evaluation_index, repr(pt.wtsp_value), repr(pt.wttp_value)])


def _opt_path_for(config: ExperimentConfig, path: str) -> str | None:
    for key in (path, instance_label(path), Path(path).name):
        if key in config.optimal_tour_paths:
            return config.optimal_tour_paths[key]
    base = instance_label(path).split("_")[0]
    sibling = Path(path).with_name(f"{base}.opt.tour")
    return str(sibling) if sibling.exists() else None


def plan_cells(config: ExperimentConfig) -> list[tuple]:
    """Task tuples for every runnable cell, in output order.

    Unparseable instances are skipped with a warning.
    """
    tasks = []
    for path in config.instance_paths:
        path = str(path)
        try:
            inst = _load(path)
            if inst.m == 0:
                raise ValueError("instance has no items")
        except (OSError, ValueError) as exc:
            log.warning("skipping %s: %s", path, exc)
            continue
        opt = _opt_path_for(config, path)
        if opt is None:
            log.info("%s: no optimal tour, CE/INV against TSP left empty", path)
        for pi in range(len(config.p_values)):
            for rep in range(config.replicates):
                for drv in config.drivers:
                    tasks.append((config, path, opt, pi, rep, drv))
    return tasks


def run_experiment(config: ExperimentConfig) -> list[ExperimentRecord]:
    """Run every (instance, p, replicate, driver) cell and write records.csv.

    Both drivers of a cell share the packing plan and the EA seed. Records are
    written in matrix order regardless of worker scheduling.
    """
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise PermissionError(f"output directory {out} is not writable")

    tasks = plan_cells(config)
    if config.worker_count == 1 or len(tasks) <= 1:
        records = [_cell_record(t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (8 * config.worker_count))
        with ProcessPoolExecutor(max_workers=config.worker_count) as pool:
            records = list(pool.map(_cell_record, tasks, chunksize=chunk))

    _check_pairing(records)
    write_records(out / "records.csv", records)
    return records


def _check_pairing(records: list[ExperimentRecord]) -> None:
    seeds: dict[tuple, int] = {}
    for r in records:
        key = (r.instance, r.p, r.replicate)
        if seeds.setdefault(key, r.plan_seed) != r.plan_seed:
            raise RuntimeError(f"drivers of cell {key} used different packing plans")


# -- summaries -------------------------------------------------------------------

SUMMARY_METRICS = ("ratio_wtsp", "ratio_wttp", "ce_tsp", "ce_wgr", "inv_tsp", "inv_wgr")
STAT_COLUMNS = ("count", "min", "q1", "median", "q3", "max", "mean")


def cell_ratios(records: list[ExperimentRecord]) -> list[tuple[ExperimentRecord, float | None, float | None]]:
    """(WTSP-driver record, W-TSP ratio, W-TTP ratio) for every complete cell."""
    cells: dict[tuple, dict[Driver, ExperimentRecord]] = {}
    for r in records:
        cells.setdefault((r.instance, r.p, r.replicate), {})[r.driver] = r
    out = []
    for pair in cells.values():
        if len(pair) == 2:
            a, b = pair[Driver.WTSP], pair[Driver.WTTP]
            out.append((a, compute_ratio(a, b, Driver.WTSP), compute_ratio(a, b, Driver.WTTP)))
    return out


def describe(values) -> dict[str, float]:
    """Count, min, quartiles (linear interpolation), max and mean."""
    v = np.asarray([x for x in values if x is not None], dtype=float)
    if v.size == 0:
        return {"count": 0, **{k: None for k in STAT_COLUMNS[1:]}}
    q1, med, q3 = np.percentile(v, [25, 50, 75])
    return {"count": int(v.size), "min": float(v.min()), "q1": float(q1), "median": float(med),
            "q3": float(q3), "max": float(v.max()), "mean": float(v.mean())}


def summary_rows(records: list[ExperimentRecord], group_by: list[str]) -> list[dict]:
    bad = set(group_by) - set(RECORD_COLUMNS)
    if bad:
        raise ValueError(f"unknown group_by columns {sorted(bad)}")
    groups: dict[tuple, dict[str, list]] = {}

    def key_of(rec, blank_driver=False):
        return tuple("" if (blank_driver and c == "driver") else _fmt(getattr(rec, c)) for c in group_by)

    for r in records:
        g = groups.setdefault(key_of(r), {})
        for m in SUMMARY_METRICS[2:]:
            g.setdefault(m, []).append(getattr(r, m))
    for rec, rw, rt in cell_ratios(records):
        g = groups.setdefault(key_of(rec, blank_driver=True), {})
        g.setdefault("ratio_wtsp", []).append(rw)
        g.setdefault("ratio_wttp", []).append(rt)

    rows = []
    for key in sorted(groups, key=_sort_key):
        for m in SUMMARY_METRICS:
            if m in groups[key]:
                rows.append({**dict(zip(group_by, key)), "metric": m, **describe(groups[key][m])})
    return rows


def _sort_key(key: tuple):
    out = []
    for k in key:
        try:
            out.append((0, float(k), ""))
        except ValueError:
            out.append((1, 0.0, k))
    return out


def summarize(records_csv, group_by: list[str], output=None) -> list[dict]:
    rows = summary_rows(read_records(records_csv), list(group_by))
    if output is not None:
        with open(output, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(list(group_by) + ["metric", *STAT_COLUMNS])
            for row in rows:
                w.writerow([_fmt(row[c]) for c in list(group_by) + ["metric", *STAT_COLUMNS]])
    return rows
