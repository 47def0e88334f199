"""Batch entry points: solve one instance, compare the two modes, or render
benchmark tables over a dataset directory.

Every command reads an instance either from a file path or from a registry
dataset name, runs the search the requested number of times, and reports.
All randomness flows from the seed: per-run seeds are derived from it the
same way regardless of how many worker processes execute the runs, so a
given seed, config, and run count always produce the same results and the
same summary bytes. Timing values never enter the JSON reports; the summary
CSV carries CPU minutes rounded to two decimals.

Exit codes: 0 success, 1 infeasible or failed solve, 2 usage or IO error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import multiprocessing
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .datasets import REGISTRY, load_dataset
from .engine import EAConfig, Mode, RunReport, run, spawn_seeds
from .evaluate import decode, improvement
from .model import Instance, ParseError, distance_matrix, fleet_size
from .stats import mann_whitney_u
from .svgplot import render_svg

__all__ = ["main", "build_parser"]

DATA_DIR_VAR = "TANDEMROUTE_DATA"

CSV_COLUMNS = (
    "dataset", "mode", "runs",
    "best_time", "mean_time", "stddev_time",
    "best_distance", "mean_distance", "stddev_distance",
    "cpu_minutes", "seed",
)

CAPPED_FRACTION = 0.75


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def _fail(code: int, message: str) -> None:
    raise _CliError(code, message)


# ---------------------------------------------------------------------------
# running

def _run_job(job) -> RunReport:
    instance, config, mode = job
    return run(instance, config, mode)


def _execute(instance: Instance, config: EAConfig, mode: Mode,
             runs: int, jobs: int) -> list[RunReport]:
    """Independent runs, optionally across worker processes.

    Per-run seeds come from the same derivation either way, and results
    keep submission order, so the job count never changes the output.
    """
    tasks = [
        (instance, replace(config, seed=s), mode)
        for s in spawn_seeds(config.seed, runs)
    ]
    if jobs <= 1 or runs == 1:
        return [_run_job(task) for task in tasks]
    with multiprocessing.Pool(processes=min(jobs, runs)) as pool:
        return pool.map(_run_job, tasks)


def _best_report(reports: list[RunReport]) -> RunReport:
    return min(reports, key=lambda r: r.objective)


def _try_execute(instance, config, mode, runs, jobs) -> list[RunReport]:
    try:
        return _execute(instance, config, mode, runs, jobs)
    except ValueError as exc:
        # pair/capacity conflicts surface here: the solve failed, not the usage
        _fail(1, f"{instance.name}: {exc}")


# ---------------------------------------------------------------------------
# report files

def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _summary_csv(instance_name: str, mode: Mode, seed: int,
                 reports: list[RunReport]) -> str:
    times = [r.objective for r in reports]
    dists = [r.truck_distance for r in reports]
    cpus = [r.cpu_seconds for r in reports]
    spread = (lambda v: float(np.std(v, ddof=1))) if len(reports) > 1 else (lambda v: 0.0)
    best = _best_report(reports)
    row = (
        instance_name,
        mode.value,
        str(len(reports)),
        f"{min(times):.4f}",
        f"{float(np.mean(times)):.4f}",
        f"{spread(times):.4f}",
        f"{best.truck_distance:.4f}",  # truck distance of the best-time run
        f"{float(np.mean(dists)):.4f}",
        f"{spread(dists):.4f}",
        f"{float(np.mean(cpus)) / 60.0:.2f}",
        str(seed),
    )
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    writer.writerow(row)
    return buffer.getvalue()


def _write_solve_reports(out_dir: Path, instance: Instance, mode: Mode,
                         seed: int, reports: list[RunReport]) -> RunReport:
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"{instance.name}_{mode.value}"
    for index, report in enumerate(reports, start=1):
        _atomic_write(
            out_dir / f"{stem}_run{index:02d}.json",
            report.to_json(include_timing=False) + "\n",
        )
    best = _best_report(reports)
    schedule = decode(best.best.genotype, instance)
    payload = {
        "report": json.loads(best.to_json(include_timing=False)),
        "schedule": json.loads(schedule.to_json()),
    }
    _atomic_write(out_dir / f"{stem}_best.json", json.dumps(payload, indent=2) + "\n")
    _atomic_write(
        out_dir / f"{stem}_best.svg",
        render_svg(schedule, instance, title=f"{instance.name} ({mode.value})") + "\n",
    )
    _atomic_write(
        out_dir / f"{stem}_summary.csv",
        _summary_csv(instance.name, mode, seed, reports),
    )
    return best


# ---------------------------------------------------------------------------
# argument handling

def _resolve_instance(args) -> Instance:
    try:
        instance = load_dataset(args.instance, data_dir=os.environ.get(DATA_DIR_VAR))
        if args.max_drone_fraction is not None:
            instance = instance.with_max_drone_fraction(args.max_drone_fraction)
    except (OSError, ParseError, ValueError) as exc:
        _fail(2, str(exc))
    return instance


def _resolve_config(args) -> EAConfig:
    try:
        config = EAConfig.from_file(args.config) if args.config else EAConfig()
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.pairs is not None:
            overrides["pair_count"] = args.pairs
        return replace(config, **overrides) if overrides else config
    except (OSError, ValueError) as exc:
        _fail(2, str(exc))


# ---------------------------------------------------------------------------
# solve

def _cmd_solve(args) -> int:
    instance = _resolve_instance(args)
    config = _resolve_config(args)
    mode = Mode(args.mode)
    reports = _try_execute(instance, config, mode, args.runs, args.jobs)
    best = _write_solve_reports(Path(args.out), instance, mode, config.seed, reports)
    print(
        f"{instance.name} {mode.value}: best time {best.objective:.4f}, "
        f"truck distance {best.truck_distance:.2f} "
        f"({args.runs} runs, seed {config.seed}) -> {args.out}"
    )
    return 0


# ---------------------------------------------------------------------------
# compare

def _mode_line(label: str, reports: list[RunReport]) -> str:
    times = [r.objective for r in reports]
    spread = float(np.std(times, ddof=1)) if len(times) > 1 else 0.0
    best = _best_report(reports)
    return (
        f"  {label:<6} best {best.objective:9.4f}   "
        f"mean {float(np.mean(times)):9.4f} +/- {spread:.4f}   "
        f"best-run distance {best.truck_distance:9.2f}"
    )


def _cmd_compare(args) -> int:
    instance = _resolve_instance(args)
    config = _resolve_config(args)
    if args.same_mode:
        # debug path: a mode against itself must come out as a draw
        mode = Mode(args.mode)
        left = right = _try_execute(instance, config, mode, args.runs, args.jobs)
        left_label = right_label = mode.value
    else:
        left = _try_execute(instance, config, Mode.VRPDI, args.runs, args.jobs)
        right = _try_execute(instance, config, Mode.VRP, args.runs, args.jobs)
        left_label, right_label = Mode.VRPDI.value, Mode.VRP.value

    print(
        f"{instance.name}: {left_label} vs {right_label}, "
        f"{args.runs} runs per mode, seed {config.seed}"
    )
    print(_mode_line(right_label, right))
    print(_mode_line(left_label, left))

    best_left, best_right = _best_report(left), _best_report(right)
    time_gain = improvement(best_right.objective, best_left.objective)
    dist_gain = improvement(best_right.truck_distance, best_left.truck_distance)
    print(f"  improvement over {right_label}: time {time_gain:.1f}%, "
          f"distance {dist_gain:.1f}%")

    for metric, key in (("Time", lambda r: r.objective),
                        ("Distance", lambda r: r.truck_distance)):
        result = mann_whitney_u(
            [key(r) for r in left], [key(r) for r in right], metric=metric
        )
        print(
            f"  Mann-Whitney {metric:<8} U={result.u_statistic:7.1f}  "
            f"p={result.p_value:.4g}  -> {result.verdict.value} for {left_label}"
        )
    return 0


# ---------------------------------------------------------------------------
# bench

def _bench_datasets(directory: Path):
    if not directory.is_dir():
        _fail(2, f"dataset directory {directory} does not exist")
    found, missing = [], []
    for record in REGISTRY:
        path = directory / f"{record.name}.txt"
        if path.is_file():
            found.append((record, path))
        else:
            missing.append(record.name)
    if not found:
        _fail(2, f"no benchmark instance files in {directory}")
    return found, missing


def _pct(reference: float, candidate: float) -> str:
    if reference <= 0 or candidate <= 0:
        return "-"
    return f"{improvement(reference, candidate):.1f}"


def _bench_modes_table(found, config, runs, jobs, fraction=None) -> list[str]:
    header = (
        f"{'dataset':<16} {'source':<6} "
        f"{'vrp_time':>9} {'vrp_dist':>9} {'vrp_cpu':>8} "
        f"{'vrpdi_time':>10} {'vrpdi_dist':>10} {'vrpdi_cpu':>9} "
        f"{'time%':>6} {'dist%':>6} {'cpu%':>6}"
    )
    lines = [header, "-" * len(header)]
    for record, path in found:
        instance = load_dataset(path)
        if fraction is not None:
            instance = instance.with_max_drone_fraction(fraction)
        vrp = _try_execute(instance, config, Mode.VRP, runs, jobs)
        vrpdi = _try_execute(instance, config, Mode.VRPDI, runs, jobs)
        best_vrp, best_di = _best_report(vrp), _best_report(vrpdi)
        cpu_vrp = float(np.mean([r.cpu_seconds for r in vrp])) / 60.0
        cpu_di = float(np.mean([r.cpu_seconds for r in vrpdi])) / 60.0
        lines.append(
            f"{record.name:<16} {'ours':<6} "
            f"{best_vrp.objective:>9.2f} {best_vrp.truck_distance:>9.2f} {cpu_vrp:>8.2f} "
            f"{best_di.objective:>10.2f} {best_di.truck_distance:>10.2f} {cpu_di:>9.2f} "
            f"{_pct(best_vrp.objective, best_di.objective):>6} "
            f"{_pct(best_vrp.truck_distance, best_di.truck_distance):>6} "
            f"{_pct(cpu_vrp, cpu_di):>6}"
        )
        lines.append(
            f"{'':<16} {'ref':<6} "
            f"{record.vrp.time:>9.2f} {record.vrp.distance:>9.2f} {record.vrp.cpu_minutes:>8.2f} "
            f"{record.vrpdi.time:>10.2f} {record.vrpdi.distance:>10.2f} {record.vrpdi.cpu_minutes:>9.2f} "
            f"{_pct(record.vrp.time, record.vrpdi.time):>6} "
            f"{_pct(record.vrp.distance, record.vrpdi.distance):>6} "
            f"{_pct(record.vrp.cpu_minutes, record.vrpdi.cpu_minutes):>6}"
        )
    return lines


def _bench_capped_table(found, config, runs, jobs, fraction=None) -> list[str]:
    header = (
        f"{'dataset':<16} {'nodes':>5} {'max_dist':>9} {'drone_cap':>9} {'pairs':>5} "
        f"{'ours_time':>9} {'ref_time':>8} {'ref_alt':>8}"
    )
    lines = [header, "-" * len(header)]
    for record, path in found:
        instance = load_dataset(path).with_max_drone_fraction(
            CAPPED_FRACTION if fraction is None else fraction
        )
        pairs = config.pair_count or fleet_size(instance)
        capped_config = replace(config, pair_count=pairs)
        reports = _try_execute(instance, capped_config, Mode.VRPDI, runs, jobs)
        best = _best_report(reports)
        ref_time = "-" if record.capped_time is None else f"{record.capped_time:.2f}"
        ref_alt = "-" if record.capped_alt_time is None else f"{record.capped_alt_time:.2f}"
        lines.append(
            f"{record.name:<16} {record.customers:>5} "
            f"{float(distance_matrix(instance).max()):>9.2f} "
            f"{instance.max_drone_distance:>9.2f} {pairs:>5} "
            f"{best.objective:>9.2f} {ref_time:>8} {ref_alt:>8}"
        )
    return lines


def _cmd_bench(args) -> int:
    directory = args.dataset_dir or os.environ.get(DATA_DIR_VAR)
    if not directory:
        _fail(2, f"no dataset directory given and {DATA_DIR_VAR} is not set")
    found, missing = _bench_datasets(Path(directory))
    config = _resolve_config(args)
    table = _bench_modes_table if args.table == "vrp-vs-vrpdi" else _bench_capped_table
    lines = table(found, config, args.runs, args.jobs, args.max_drone_fraction)
    print("\n".join(lines))
    if missing:
        print("missing instance files: " + ", ".join(missing), file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tandemroute",
        description=(
            "Truck-and-drone routing: solve instances, compare the plain and "
            "drone-assisted modes, and render benchmark tables."
        ),
        epilog=(
            f"Instances are file paths or registry dataset names; the "
            f"{DATA_DIR_VAR} environment variable supplies the default "
            f"dataset directory."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, out_flag: bool) -> None:
        p.add_argument("--runs", type=int, default=30,
                       help="independent runs per mode (default 30)")
        p.add_argument("--seed", type=int, default=None,
                       help="master seed; every random draw descends from it")
        p.add_argument("--jobs", type=int, default=1,
                       help="worker processes for the runs (default 1)")
        p.add_argument("--config", type=Path, default=None,
                       help="search settings file (JSON or key = value lines)")
        p.add_argument("--pairs", type=int, default=None,
                       help="truck-drone pair count (default: sized from demand)")
        p.add_argument("--max-drone-fraction", type=float, default=None,
                       help="cap drone legs at this fraction of the max "
                            "pairwise distance")
        if out_flag:
            p.add_argument("--out", type=Path, default=Path("reports"),
                           help="directory for report files (default ./reports)")

    solve = sub.add_parser("solve", help="run one instance and write reports")
    solve.add_argument("instance", help="instance file or dataset name")
    solve.add_argument("--mode", choices=[m.value for m in Mode],
                       default=Mode.VRPDI.value,
                       help="vrp = trucks only, vrpdi = drones intercept (default)")
    common(solve, out_flag=True)
    solve.set_defaults(handler=_cmd_solve)

    compare = sub.add_parser(
        "compare", help="run both modes and test the difference"
    )
    compare.add_argument("instance", help="instance file or dataset name")
    compare.add_argument("--mode", choices=[m.value for m in Mode],
                         default=Mode.VRPDI.value,
                         help="mode used by --same-mode (default vrpdi)")
    compare.add_argument("--same-mode", action="store_true",
                         help="debug check: compare one mode against itself")
    common(compare, out_flag=False)
    compare.set_defaults(handler=_cmd_compare)

    bench = sub.add_parser(
        "bench", help="benchmark tables over a directory of instance files"
    )
    bench.add_argument("dataset_dir", nargs="?", default=None,
                       help=f"directory of instance files (default ${DATA_DIR_VAR})")
    bench.add_argument("--table", choices=["vrp-vs-vrpdi", "max-drone-distance"],
                       default="vrp-vs-vrpdi", help="which table to render")
    common(bench, out_flag=False)
    bench.set_defaults(handler=_cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except _CliError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return exc.code
