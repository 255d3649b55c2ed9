"""Command-line front end: ``ipe-lab sample-pdip | evolve | verify``.

Partitions go to JSONL, scalar summaries to CSV, reports to JSON.  Every
file starts with a metadata record (JSON line, or ``# `` comment line in
CSV) holding the package version, the RNG record and all parameters.
Replicate i always uses stream i of the master seed, so output does not
depend on ``--threads``.

Exit codes: 0 pass, 1 statistical failure, 2 usage error.
"""

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .dagger import evolve_dagger
from .harness import SuiteConfig, resolve_names, run_suite
from .immigration import sample_ssip2_path
from .kernel import sample_grid_path
from .partition import IntervalPartition, diversity_estimate
from .pdip import sample_pdip
from .rng import RngStream, rng_metadata
from .scaffolding import clade_path, sample_clade, scaffold

ENGINES = ("kernel", "dagger", "immigration", "scaffold")
PRESETS = {
    "empty": IntervalPartition(),
    "unit": IntervalPartition([1.0]),
    "three": IntervalPartition([0.5, 0.3, 0.2]),
}


class UsageError(Exception):
    pass


def parse_times(text):
    """``"0:2:0.1"`` (start:stop:step, stop included) or a comma-separated list."""
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            k = int(math.floor((stop - start) / step + 1e-9))
            times = [start + i * step for i in range(k + 1)]
        else:
            times = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"cannot parse --times {text!r}") from None
    if not times or any(b <= a for a, b in zip(times, times[1:])) or times[0] < 0:
        raise UsageError("--times must be non-negative and strictly increasing")
    return [round(t, 12) for t in times]


def load_init(spec):
    if spec in PRESETS:
        return PRESETS[spec]
    if not os.path.exists(spec):
        raise UsageError(f"--init must be one of {sorted(PRESETS)} or a partition JSON file")
    with open(spec) as fh:
        return IntervalPartition.from_dict(json.load(fh))


def metadata(command, args, seed, streams):
    params = {k: v for k, v in vars(args).items() if k not in ("func", "threads", "out")}
    return {"version": __version__, "command": command, "rng": rng_metadata(seed, streams), "params": params}


def _map_replicates(fn, n, threads):
    if threads > 1 and n > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, range(n)))
    return [fn(i) for i in range(n)]


def _write_jsonl(path, meta, records):
    with open(path, "w") as fh:
        fh.write(json.dumps({"metadata": meta}) + "\n")
        for rec in records:
            fh.write(json.dumps(rec) + "\n")


def _write_csv(path, meta, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write("# " + json.dumps(meta) + "\n")
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _out_dir(path):
    os.makedirs(path, exist_ok=True)
    return path


# sample-pdip


def cmd_sample_pdip(args):
    if not 0 < args.alpha < 1 or args.theta <= -args.alpha:
        raise UsageError("need 0 < alpha < 1 and theta > -alpha")
    if args.n < 0 or args.eps <= 0 or args.h < args.eps:
        raise UsageError("need n >= 0, eps > 0 and h >= eps")
    out = _out_dir(args.out)

    def one(i):
        return sample_pdip(args.alpha, args.theta, args.eps, RngStream(args.seed, i), mass=args.mass)

    parts = _map_replicates(one, args.n, args.threads)
    meta = metadata("sample-pdip", args, args.seed, "stream i = replicate i")
    _write_jsonl(os.path.join(out, "pdip.jsonl"), meta,
                 ({"replicate": i, "partition": p.to_dict()} for i, p in enumerate(parts)))
    rows = []
    for i, p in enumerate(parts):
        top = p.ranked(3)
        rows.append([i, p.total_mass, p.leftmost(args.h), *top,
                     diversity_estimate(p, args.h, p.total_mass, args.alpha)])
    _write_csv(os.path.join(out, "pdip_summary.csv"), meta,
               ["replicate", "total_mass", "leftmost", "rank1", "rank2", "rank3", "diversity"], rows)
    return 0


# evolve


def _check_engine(args):
    a, t1, t2 = args.alpha, args.theta1, args.theta2
    if not 0 < a < 1:
        raise UsageError("alpha must lie in (0, 1)")
    if t1 < 0 or t2 < 0:
        raise UsageError("theta1 and theta2 must be non-negative")
    if args.engine == "kernel" and t2 != 0:
        raise UsageError("the kernel engine runs SSIP(theta1); leave --theta2 at 0")
    if args.engine == "immigration" and t1 < a:
        raise UsageError("the immigration engine needs theta1 >= alpha")
    if args.engine == "scaffold" and (t1 != 0 or t2 != 0):
        raise UsageError("the scaffold engine runs SSIP(0); use --theta1 0 --theta2 0")
    if args.n < 0 or args.eps <= 0 or args.h <= 0:
        raise UsageError("need n >= 0, eps > 0 and h > 0")


# stream id of the optional scaffolding dump, away from the replicate streams
DUMP_STREAM = 2 ** 40


def _z_min(args, grid):
    return args.z_min if args.z_min else 1e-3 * 2 * max(grid[-1], 1e-12)


def _evolve_one(args, init, times, i):
    """A list of (time, partition, n_renaissance) for replicate i."""
    gen = RngStream(args.seed, i).gen
    grid = times if times[0] == 0 else [0.0] + times
    if args.engine == "kernel":
        states = sample_grid_path(init, grid, args.alpha, args.theta1, args.eps, gen)
        counts = [0] * len(grid)
    elif args.engine == "immigration":
        states = sample_ssip2_path(init, grid, args.alpha, args.theta1, args.theta2, args.eps, gen)
        counts = [0] * len(grid)
    elif args.engine == "dagger":
        if init.n_blocks == 0:
            states, counts = [IntervalPartition()] * len(grid), [0] * len(grid)
        else:
            tr = evolve_dagger(init, args.alpha, args.theta1, args.theta2, grid[-1], grid=grid,
                               eps=args.eps, mass_floor=args.mass_floor, rng=gen)
            states = [s.to_partition() for _, s in tr.grid_states]
            counts = [int(np.searchsorted(tr.renaissance_times, t, side="right")) for t in grid]
    else:
        states, counts = clade_path(init, grid, args.alpha, _z_min(args, grid), gen), [0] * len(grid)
    keep = slice(0, None) if times[0] == 0 else slice(1, None)
    return list(zip(grid[keep], states[keep], counts[keep]))


def cmd_evolve(args):
    _check_engine(args)
    init = load_init(args.init)
    times = parse_times(args.times)
    out = _out_dir(args.out)
    results = _map_replicates(lambda i: _evolve_one(args, init, times, i), args.n, args.threads)
    meta = metadata("evolve", args, args.seed, "stream i = replicate i")
    rows = []
    for i, states in enumerate(results):
        for t, p, k in states:
            rows.append([i, t, p.total_mass, p.count_at_least(args.h), p.leftmost(args.h), p.longest(), k])
    _write_csv(os.path.join(out, "evolve_summary.csv"), meta,
               ["replicate", "time", "total_mass", "n_blocks_ge_h", "leftmost", "longest", "n_renaissance"], rows)
    if args.dump:
        _write_jsonl(os.path.join(out, "evolve_partitions.jsonl"), meta,
                     ({"replicate": i, "time": t, "partition": p.to_dict()}
                      for i, states in enumerate(results) for t, p, _k in states))
    if args.scaffold_csv and args.engine == "scaffold" and init.n_blocks:
        # one clade of the first block, up to the last time
        gen = RngStream(args.seed, DUMP_STREAM).gen
        N = sample_clade(float(init.lengths[0]), args.alpha, _z_min(args, times), gen, level_cap=times[-1] or math.inf)
        with open(os.path.join(out, "scaffold_path.csv"), "w") as fh:
            fh.write("# " + json.dumps(meta) + "\n")
            fh.write(scaffold(N).to_csv())
    return 0


# verify


def cmd_verify(args):
    try:
        names = resolve_names(args.suites or ["acceptance"])
    except KeyError as exc:
        print(exc.args[0], file=sys.stderr)
        return 2
    out = _out_dir(args.out)
    reports = run_suite(SuiteConfig(tuple(names), args.seed, args.n, args.threads))
    meta = metadata("verify", args, args.seed, "per experiment: seeds master+k, stream ids per sample")
    summary = []
    for rep in reports:
        with open(os.path.join(out, f"{rep.name}.json"), "w") as fh:
            json.dump({"metadata": meta, "report": rep.to_dict()}, fh, indent=2)
        summary.append({"name": rep.name, "verdict": rep.verdict, "seeds": rep.seeds, "runtime": rep.runtime})
        print(f"{rep.verdict.upper():4s}  {rep.name}  seeds={rep.seeds}  {rep.runtime:.1f}s")
    with open(os.path.join(out, "summary.json"), "w") as fh:
        json.dump({"metadata": meta, "experiments": summary}, fh, indent=2)
    return 0 if all(r.passed for r in reports) else 1


def build_parser():
    p = argparse.ArgumentParser(prog="ipe-lab", description="Interval partition evolutions: sample, evolve, verify.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample-pdip", help="draw PDIP(alpha, theta) partitions")
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--theta", type=float, required=True)
    s.add_argument("--mass", type=float, default=1.0)
    s.add_argument("--n", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--eps", type=float, default=1e-6, help="blocks shorter than this are kept as dust")
    s.add_argument("--h", type=float, default=1e-3, help="block threshold for summaries")
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--out", default="ipe_out")
    s.set_defaults(func=cmd_sample_pdip)

    e = sub.add_parser("evolve", help="run an evolution on a time grid")
    e.add_argument("--engine", choices=ENGINES, default="kernel")
    e.add_argument("--alpha", type=float, required=True)
    e.add_argument("--theta1", type=float, default=0.0)
    e.add_argument("--theta2", type=float, default=0.0)
    e.add_argument("--init", default="unit", help=f"preset ({', '.join(PRESETS)}) or partition JSON file")
    e.add_argument("--times", default="0:1:0.25", help='"start:stop:step" or "t1,t2,..."')
    e.add_argument("--n", type=int, default=100)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--eps", type=float, default=1e-4)
    e.add_argument("--h", type=float, default=1e-3)
    e.add_argument("--mass-floor", type=float, default=1e-6)
    e.add_argument("--z-min", type=float, default=None, help="scaffold engine: smallest spindle lifetime")
    e.add_argument("--dump", action="store_true", help="also write every partition as JSONL")
    e.add_argument("--scaffold-csv", action="store_true",
                   help="scaffold engine: also dump the scaffolding of one clade of the first block")
    e.add_argument("--threads", type=int, default=1)
    e.add_argument("--out", default="ipe_out")
    e.set_defaults(func=cmd_evolve)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("suites", nargs="*", help="suite or experiment names (default: acceptance)")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--n", type=int, default=None, help="override every experiment's sample size")
    v.add_argument("--threads", type=int, default=1)
    v.add_argument("--out", default="ipe_reports")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ipe-lab: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"ipe-lab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
