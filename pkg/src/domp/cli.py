"""Command-line front end: generate, solve, verify, bench.

Exit codes: 0 success (including limit-reached solves), 1 usage error,
2 verification mismatch, 3 internal error.  Site and client indices in
JSON output are 1-based to match the instance file convention (line i of
the cost block is client i).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import glob
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .engine import BnbConfig, SolveReport
from .errors import DompError, Mismatch, ThresholdOutOfRange, TooLarge
from .instance import Instance, generate_instance, load_instance, save_instance
from .methods import solve_branch_and_cut, solve_full, solve_row_generation
from .objective import brute_force, ordered_value

METHODS = ("soc", "woc", "bc", "rowgen")
STRATEGIES = ("pool", "callback")

CSV_HEADER = ["instance", "n", "p", "method", "strategy", "b", "status",
              "time_s", "value", "best_bound", "gap_root_pct", "gap_pct",
              "orig_cons", "cuts", "nodes"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt_num(v) -> str:
    if v is None:
        return ""
    f = float(v)
    if f != f:
        return "nan"
    return repr(f)


def _dispatch(instance: Instance, method: str, strategy: str, b,
              config: BnbConfig, warm: bool) -> SolveReport:
    if method == "soc" or method == "woc":
        return solve_full(instance, method, config=config, warm_start=warm)
    if method == "bc":
        return solve_branch_and_cut(instance, strategy, config=config, warm_start=warm)
    if method == "rowgen":
        return solve_row_generation(instance, strategy, b=b, config=config,
                                    warm_start=warm)
    raise ValueError(f"unknown method {method!r}")


def _report_json(report: SolveReport) -> dict:
    sol = report.incumbent
    out = {
        "status": report.status,
        "value": report.value if np.isfinite(report.value) else None,
        "open_sites": [j + 1 for j in sol.open_set] if sol else None,
        "assignment": [j + 1 for j in sol.assign] if sol else None,
        "positions": [[i + 1, j + 1] for i, j in sol.positions] if sol else None,
        "bounds": {"lower": report.best_bound, "upper": report.value
                   if np.isfinite(report.value) else None},
        "gaps": {"root_pct": report.gap_root_pct, "pct": report.gap_pct},
        "cuts": report.cuts_added,
        "nodes": report.nodes,
        "time": report.wall_time,
    }
    return out


def cmd_generate(args) -> int:
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    for k in range(args.count):
        seed = args.seed + k
        inst = generate_instance(args.n, args.p, seed,
                                 self_service_zero=args.self_service_zero)
        path = outdir / f"{args.name}_n{args.n}_p{args.p}_s{seed}.domp"
        save_instance(inst, path)
        print(path)
    return 0


def cmd_solve(args) -> int:
    if not 1.0 <= args.b < 2.0:
        raise ThresholdOutOfRange(f"--b must be in [1, 2), got {args.b}")
    instance = load_instance(args.instance)
    config = BnbConfig(time_limit=args.time_limit, node_limit=args.node_limit,
                       mip_gap=args.gap, b=args.b)
    report = _dispatch(instance, args.method, args.strategy, args.b, config,
                       not args.no_warm_start)
    print(f"instance    {instance.name}  (n={instance.n}, p={instance.p})")
    print(f"method      {args.method}"
          + (f" / {args.strategy}" if args.method in ("bc", "rowgen") else "")
          + (f"  b={args.b}" if args.method == "rowgen" else ""))
    print(f"status      {report.status}")
    print(f"value       {report.value}")
    print(f"best bound  {report.best_bound}")
    print(f"gap root %  {report.gap_root_pct:.4f}")
    print(f"gap %       {report.gap_pct:.4f}")
    print(f"orig cons   {report.orig_cons}")
    print(f"cuts        {report.cuts_added}")
    print(f"nodes       {report.nodes}")
    print(f"time s      {report.wall_time:.3f}")
    if report.incumbent is not None:
        print(f"open sites  {[j + 1 for j in report.incumbent.open_set]}")
    if args.json:
        Path(args.json).write_text(json.dumps(_report_json(report), indent=2) + "\n")
    return 0


def _verify_solution(instance: Instance, payload: dict, opt_value: float) -> None:
    n, p = instance.n, instance.p
    sites = payload.get("open_sites")
    assign = payload.get("assignment")
    positions = payload.get("positions")
    value = payload.get("value")
    if sites is None or assign is None or positions is None or value is None:
        raise Mismatch("solution JSON is missing fields")
    open0 = sorted(int(j) - 1 for j in sites)
    if len(open0) != p or len(set(open0)) != p \
            or open0[0] < 0 or open0[-1] >= n:
        raise Mismatch(f"open set {sites} is not a valid p-subset")
    assign0 = [int(j) - 1 for j in assign]
    if len(assign0) != n or any(j not in set(open0) for j in assign0):
        raise Mismatch("assignment does not map every client to an open site")
    pos0 = [(int(i) - 1, int(j) - 1) for i, j in positions]
    if sorted(i for i, _ in pos0) != list(range(n)):
        raise Mismatch("positions do not cover each client exactly once")
    if any(assign0[i] != j for i, j in pos0):
        raise Mismatch("positions disagree with the assignment")
    costs = [instance.c[i, j] for i, j in pos0]
    if any(costs[k] > costs[k + 1] for k in range(n - 1)):
        raise Mismatch("position costs are not nondecreasing")
    recomputed = ordered_value(instance.lam, costs)
    tol = 1e-9 * max(1.0, abs(recomputed))
    if abs(recomputed - float(value)) > tol:
        raise Mismatch(f"stored value {value} != recomputed {recomputed}")
    if abs(float(value) - opt_value) > tol:
        raise Mismatch(f"value {value} is not optimal (optimum {opt_value})")


def cmd_verify(args) -> int:
    instance = load_instance(args.instance)
    opt_value, best = brute_force(instance, subset_limit=args.limit)
    print(f"brute-force optimum: {opt_value}  open sites {[j + 1 for j in best]}")
    if args.solution:
        payload = json.loads(Path(args.solution).read_text())
        try:
            _verify_solution(instance, payload, opt_value)
        except Mismatch as exc:
            print(f"FAIL: {exc}")
            return 2
        print("PASS: solution is feasible and optimal")
    return 0


@dataclasses.dataclass
class BenchTask:
    path: str
    method: str
    strategy: str
    b: float | None
    time_limit: float
    gap: float
    warm: bool


def make_tasks(paths, methods, strategies, b_values, time_limit=3600.0,
               gap=0.0, warm=True) -> list[BenchTask]:
    """The run matrix: b applies to row generation, strategies to the two
    separation-driven methods."""
    tasks = []
    for path in paths:
        for method in methods:
            if method in ("soc", "woc"):
                combos = [("-", None)]
            elif method == "bc":
                combos = [(s, None) for s in strategies]
            else:
                combos = [(s, b) for s in strategies for b in b_values]
            for strategy, b in combos:
                tasks.append(BenchTask(path=str(path), method=method,
                                       strategy=strategy, b=b,
                                       time_limit=time_limit, gap=gap, warm=warm))
    return tasks


def report_to_row(task: BenchTask, inst: Instance, rep: SolveReport) -> dict:
    return {"instance": inst.name, "n": inst.n, "p": inst.p,
            "method": task.method,
            "strategy": task.strategy if task.method in ("bc", "rowgen") else "-",
            "b": _fmt_num(task.b) if task.method == "rowgen" else "-",
            "status": rep.status, "time_s": rep.wall_time, "value": rep.value,
            "best_bound": rep.best_bound, "gap_root_pct": rep.gap_root_pct,
            "gap_pct": rep.gap_pct, "orig_cons": rep.orig_cons,
            "cuts": rep.cuts_added, "nodes": rep.nodes}


def run_bench_task(task: BenchTask) -> dict:
    """One bench row; errors are recorded, not raised, so sweeps continue."""
    try:
        inst = load_instance(task.path)
        config = BnbConfig(time_limit=task.time_limit, mip_gap=task.gap,
                           b=task.b if task.b is not None else 1.0)
        rep = _dispatch(inst, task.method, task.strategy, task.b, config, task.warm)
        return report_to_row(task, inst, rep)
    except DompError as exc:
        return {"instance": Path(task.path).stem, "n": "", "p": "",
                "method": task.method,
                "strategy": task.strategy if task.method in ("bc", "rowgen") else "-",
                "b": _fmt_num(task.b) if task.method == "rowgen" else "-",
                "status": f"error: {type(exc).__name__}", "time_s": None,
                "value": None, "best_bound": None, "gap_root_pct": None,
                "gap_pct": None, "orig_cons": None, "cuts": None, "nodes": None}


def aggregate(rows) -> list[dict]:
    """Append one mean row per (n, p, method, strategy, b) group."""
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        key = (row["n"], row["p"], row["method"], row["strategy"], row["b"])
        groups.setdefault(key, []).append(row)
    agg_fields = ["time_s", "value", "best_bound", "gap_root_pct", "gap_pct",
                  "orig_cons", "cuts", "nodes"]
    out = list(rows)
    for key, members in groups.items():
        clean = [r for r in members if not str(r["status"]).startswith("error")]
        agg = {"instance": "mean", "n": key[0], "p": key[1], "method": key[2],
               "strategy": key[3], "b": key[4],
               "status": f"mean-of-{len(clean)}"}
        for f in agg_fields:
            vals = [float(r[f]) for r in clean if r[f] is not None]
            agg[f] = sum(vals) / len(vals) if vals else None
        out.append(agg)
    return out


def bench_rows(paths, methods, strategies, b_values, time_limit=3600.0,
               gap=0.0, warm=True, jobs=1) -> list[dict]:
    """All per-instance rows plus one mean row per (n, p, method, strategy, b)."""
    tasks = make_tasks(paths, methods, strategies, b_values,
                       time_limit=time_limit, gap=gap, warm=warm)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(run_bench_task, tasks))
    else:
        rows = [run_bench_task(t) for t in tasks]
    return aggregate(rows)


def write_csv(rows, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([
            row["instance"], row["n"], row["p"], row["method"], row["strategy"],
            row["b"],
            row["status"],
            _fmt_num(row["time_s"]),
            _fmt_num(row["value"]),
            _fmt_num(row["best_bound"]),
            _fmt_num(row["gap_root_pct"]),
            _fmt_num(row["gap_pct"]),
            "" if row["orig_cons"] is None else int(row["orig_cons"]),
            "" if row["cuts"] is None else int(row["cuts"]),
            "" if row["nodes"] is None else int(row["nodes"]),
        ])


def cmd_bench(args) -> int:
    paths: list[str] = []
    for pattern in args.instances:
        hits = sorted(glob.glob(pattern))
        paths.extend(hits if hits else ([pattern] if Path(pattern).exists() else []))
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    strategies = [s.strip() for s in args.strategies.split(",") if s.strip()]
    b_values = [float(b) for b in args.b_values.split(",") if b.strip()]
    for m in methods:
        if m not in METHODS:
            print(f"domp bench: error: unknown method {m!r}", file=sys.stderr)
            return 1
    for s in strategies:
        if s not in STRATEGIES:
            print(f"domp bench: error: unknown strategy {s!r}", file=sys.stderr)
            return 1
    for b in b_values:
        if not 1.0 <= b < 2.0:
            print(f"domp bench: error: b values must be in [1, 2), got {b}",
                  file=sys.stderr)
            return 1
    rows = bench_rows(paths, methods, strategies, b_values,
                      time_limit=args.time_limit, gap=args.gap,
                      warm=not args.no_warm_start, jobs=args.jobs)
    buf = io.StringIO()
    write_csv(rows, buf)
    if args.output:
        Path(args.output).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return 0


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="domp", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[], help="write random instances")
    g.add_argument("-n", type=int, required=True)
    g.add_argument("-p", type=int, required=True)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", default=".")
    g.add_argument("--name", default="rand")
    g.add_argument("--self-service-zero", action="store_true")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="solve one instance")
    s.add_argument("instance")
    s.add_argument("--method", choices=METHODS, default="rowgen")
    s.add_argument("--strategy", choices=STRATEGIES, default="callback")
    s.add_argument("--b", type=float, default=1.0)
    s.add_argument("--time-limit", type=float, default=3600.0)
    s.add_argument("--node-limit", type=int, default=10_000_000)
    s.add_argument("--gap", type=float, default=0.0)
    s.add_argument("--no-warm-start", action="store_true")
    s.add_argument("--json", default=None)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="recompute the optimum; check a solution")
    v.add_argument("instance")
    v.add_argument("--solution", default=None)
    v.add_argument("--limit", type=int, default=10_000_000)
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="sweep instances x methods to CSV")
    b.add_argument("instances", nargs="+")
    b.add_argument("--methods", default="rowgen")
    b.add_argument("--strategies", default="callback")
    b.add_argument("--b-values", default="1.0")
    b.add_argument("--time-limit", type=float, default=3600.0)
    b.add_argument("--gap", type=float, default=0.0)
    b.add_argument("--no-warm-start", action="store_true")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("-o", "--output", default=None)
    b.set_defaults(func=cmd_bench)
    return top


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ThresholdOutOfRange as exc:
        print(f"domp: error: {exc}", file=sys.stderr)
        return 1
    except TooLarge as exc:
        print(f"domp: {exc}", file=sys.stderr)
        return 3
    except DompError as exc:
        print(f"domp: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"domp: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
