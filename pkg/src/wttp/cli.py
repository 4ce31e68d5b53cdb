"""Command line entry point: ``wttp <subcommand> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import benchmarks
from .experiment import (
    PAPER_P_VALUES,
    ExperimentConfig,
    default_workers,
    run_experiment,
    summarize,
    write_trajectory,
)
from .heuristics import nearest_neighbor_tour, weighted_greedy_tour
from .instance import format_tour_file, format_ttp_instance, load_instance, load_tour
from .objectives import Evaluator
from .packing import format_packing, generate_packing, parse_packing
from .search import MOVE_SCHEMES, Driver, Mutation, default_budget, run_one_plus_one_ea
from .similarity import common_edges, count_inversions, inversion_similarity


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(","))


def _add_packing(p):
    g = p.add_argument_group("packing plan")
    g.add_argument("--packing", help="packing file (one line of 0/1)")
    g.add_argument("--p", type=float, default=0.0, help="item probability when generating (default 0.0)")
    g.add_argument("--seed", type=int, default=0, help="packing seed when generating (default 0)")


def _plan(args, inst):
    if args.packing:
        return parse_packing(Path(args.packing).read_text(), inst.m)
    return generate_packing(inst, args.p, args.seed)


def _show_settings(args, out=None):
    out = out or sys.stderr
    skip = {"func", "command"}
    for k, v in sorted(vars(args).items()):
        if k not in skip:
            print(f"# {k} = {v}", file=out)


def cmd_solve(args):
    inst = load_instance(args.instance)
    plan = _plan(args, inst)
    if args.budget is None:
        args.budget = default_budget(inst.n)
    _show_settings(args)
    res = run_one_plus_one_ea(inst, plan, args.driver, args.mutation, args.budget,
                              args.ea_seed, args.log_stride, moves=args.moves)
    print(f"driver\t{res.driver.value}")
    print(f"evaluations\t{res.evaluations_used}")
    print(f"final_wtsp\t{res.final_wtsp!r}")
    print(f"final_wttp\t{res.final_wttp!r}")
    if args.trajectory:
        write_trajectory(args.trajectory, res)
    if args.tour_out:
        Path(args.tour_out).write_text(format_tour_file(res.final_tour, inst.name))


def cmd_evaluate(args):
    inst = load_instance(args.instance)
    tour = load_tour(args.tour, inst.n)
    ev = Evaluator(inst, _plan(args, inst))
    order = tour.array()
    values = {"tsp": ev.tsp(order), "wtsp": ev.wtsp(order), "wttp": ev.wttp(order), "ttp": ev.ttp(order)}
    for name in (args.objective or values):
        print(f"{name}\t{values[name]!r}")


def cmd_greedy(args):
    inst = load_instance(args.instance)
    if args.kind == "nn":
        tour = nearest_neighbor_tour(inst, args.start)
    else:
        tour = weighted_greedy_tour(inst, _plan(args, inst))
    text = format_tour_file(tour, f"{inst.name}.{args.kind}")
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_similarity(args):
    t1 = load_tour(args.tour1, args.n) if args.n else None
    if t1 is None:
        # infer n from the first file
        toks = Path(args.tour1).read_text().split()
        start = [t.upper() for t in toks].index("TOUR_SECTION")
        body = toks[start + 1:]
        n = body.index("-1") if "-1" in body else len(body)
        t1 = load_tour(args.tour1, n)
    t2 = load_tour(args.tour2, t1.n)
    print(f"ce\t{common_edges(t1, t2)!r}")
    print(f"inversions\t{count_inversions(t1, t2)}")
    print(f"inv\t{inversion_similarity(t1, t2)!r}")


def cmd_gen_packing(args):
    inst = load_instance(args.instance)
    text = format_packing(generate_packing(inst, args.p, args.seed), inst.name)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_gen_instance(args):
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    for base in args.base:
        coords = benchmarks.bundled_coords(base)
        for ipn in args.ipn:
            for kind in args.kind:
                inst = benchmarks.make_ttp_instance(base, coords, ipn, kind, args.capacity_class, args.seed)
                name = benchmarks.instance_filename(base, len(coords), ipn, kind, args.capacity_class)
                (out / name).write_text(format_ttp_instance(inst))
                print(out / name)
        (out / f"{base}.opt.tour").write_text(benchmarks.bundled_optimal_tour_text(base))


def _opt_map(pairs):
    out = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep:
            raise SystemExit(f"--opt-tour expects INSTANCE=PATH, got {pair!r}")
        out[key] = value
    return out


def cmd_experiment(args):
    _show_settings(args)
    cfg = ExperimentConfig(
        instance_paths=args.instances,
        optimal_tour_paths=_opt_map(args.opt_tour),
        p_values=args.p_values,
        replicates=args.replicates,
        budget=args.budget,
        mutation=args.mutation,
        base_seed=args.base_seed,
        drivers=args.drivers,
        output_dir=args.output_dir,
        worker_count=args.workers,
        log_stride=args.log_stride,
        trajectories=args.trajectories,
        record_timing=args.timing,
        moves=args.moves,
    )
    t0 = time.perf_counter()
    records = run_experiment(cfg)
    print(f"{len(records)} records -> {Path(args.output_dir) / 'records.csv'} "
          f"({time.perf_counter() - t0:.1f} s)")


def cmd_summarize(args):
    output = args.output or str(Path(args.records).with_name("summary.csv"))
    rows = summarize(args.records, args.group_by, output)
    print(f"{len(rows)} summary rows -> {output}")


def cmd_bench(args):
    inst = load_instance(args.instance)
    ev = Evaluator(inst, generate_packing(inst, args.p, 0))
    rng = np.random.default_rng(0)
    order = np.concatenate(([0], 1 + rng.permutation(inst.n - 1)))
    ev.wtsp(order), ev.wttp(order)
    for name, fn in (("wtsp", ev.wtsp), ("wttp", ev.wttp)):
        t0 = time.perf_counter()
        for _ in range(args.repeat):
            fn(order)
        per = (time.perf_counter() - t0) / args.repeat * 1e6
        print(f"{name}\tn={inst.n}\t{per:.3f} us/eval (includes Python call overhead)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wttp", description="W-TSP / W-TTP tour optimisation and comparison")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="one (1+1)-EA run")
    p.add_argument("instance")
    _add_packing(p)
    p.add_argument("--driver", type=Driver, choices=list(Driver), default=Driver.WTSP)
    p.add_argument("--mutation", type=Mutation, choices=list(Mutation), default=Mutation.INVERSION)
    p.add_argument("--moves", choices=MOVE_SCHEMES, default="poisson",
                   help="moves per offspring: 1+Poisson(1) or exactly one (default poisson)")
    p.add_argument("--budget", type=int, default=None, help="evaluations (default 1e6 if n<=300 else 5e6)")
    p.add_argument("--ea-seed", type=int, default=0)
    p.add_argument("--log-stride", type=int, default=1000)
    p.add_argument("--trajectory", help="write trajectory CSV here")
    p.add_argument("--tour-out", help="write final tour (.tour) here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("evaluate", help="evaluate a tour file")
    p.add_argument("instance")
    p.add_argument("tour")
    _add_packing(p)
    p.add_argument("--objective", action="append", choices=["tsp", "wtsp", "wttp", "ttp"])
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("greedy", help="emit a weighted greedy or nearest neighbour tour")
    p.add_argument("instance")
    p.add_argument("--kind", choices=["wgr", "nn"], default="wgr")
    p.add_argument("--start", type=int, default=1, help="NN start city")
    p.add_argument("-o", "--output")
    _add_packing(p)
    p.set_defaults(func=cmd_greedy)

    p = sub.add_parser("similarity", help="CE and INV between two tour files")
    p.add_argument("tour1")
    p.add_argument("tour2")
    p.add_argument("--n", type=int, default=None)
    p.set_defaults(func=cmd_similarity)

    p = sub.add_parser("gen-packing", help="write a Bernoulli packing plan")
    p.add_argument("instance")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen_packing)

    p = sub.add_parser("gen-instance", help="build TTP files from bundled TSPlib coordinates")
    p.add_argument("--base", nargs="+", choices=benchmarks.BUNDLED, default=list(benchmarks.BUNDLED))
    p.add_argument("--ipn", type=int, nargs="+", default=[1, 5])
    p.add_argument("--kind", nargs="+", choices=sorted(benchmarks.KINDS), default=["bsc", "u", "usw"])
    p.add_argument("--capacity-class", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output-dir", default="instances")
    p.set_defaults(func=cmd_gen_instance)

    p = sub.add_parser("experiment", help="run the instance x p x replicate x driver matrix")
    p.add_argument("instances", nargs="+")
    p.add_argument("--opt-tour", action="append", metavar="INSTANCE=PATH")
    p.add_argument("--p-values", type=_floats, default=PAPER_P_VALUES)
    p.add_argument("--replicates", type=int, default=31)
    p.add_argument("--budget", type=int, default=None, help="evaluations (default 1e6 if n<=300 else 5e6)")
    p.add_argument("--mutation", type=Mutation, choices=list(Mutation), default=Mutation.INVERSION)
    p.add_argument("--moves", choices=MOVE_SCHEMES, default="poisson",
                   help="moves per offspring: 1+Poisson(1) or exactly one (default poisson)")
    p.add_argument("--base-seed", type=int, default=0)
    p.add_argument("--drivers", type=lambda s: tuple(Driver(x) for x in s.split(",")),
                   default=(Driver.WTSP, Driver.WTTP))
    p.add_argument("-o", "--output-dir", default="results")
    p.add_argument("--workers", type=int, default=default_workers())
    p.add_argument("--log-stride", type=int, default=1000)
    p.add_argument("--trajectories", action="store_true")
    p.add_argument("--timing", action="store_true", help="fill wallclock_ms (breaks byte-identical output)")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("summarize", help="box-plot statistics of a records CSV")
    p.add_argument("records")
    p.add_argument("--group-by", type=lambda s: s.split(","), default=["ipn", "p", "driver"])
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("bench", help="time single objective evaluations")
    p.add_argument("instance")
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--repeat", type=int, default=100_000)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
