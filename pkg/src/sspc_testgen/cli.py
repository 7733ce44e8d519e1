"""Command-line pipeline: validate -> explore -> concretize -> minimize -> emit.

Subcommands::

    sspc-testgen generate MODEL.smx [--out-dir D] [--minimize-by full|branch|off]
                                    [--solver-budget-ms N] [--max-paths N]
                                    [--stats-json PATH] [--dump-traces PATH]
    sspc-testgen cover    MODEL.smx SUITE.ssm [--report-json PATH]
    sspc-testgen fuzz     MODEL.smx [--budget N] [--rng-seed S] [--seeds FILE]
                                    [--out-dir D]
    sspc-testgen compare  MODEL.smx [--budget N] [--rng-seeds S1,S2,...]

Exit status: 0 success, 1 diagnostics or failed checks, 2 internal error.
The solver budget can also be set through ``SSPC_SOLVER_BUDGET_MS``.
"""

from __future__ import annotations

import argparse
import json
import os
import statistics
import sys
import time
from pathlib import Path

from .coverage import CoverageReport, ScriptMismatchError, run_suite
from .driver import ExploreConfig, explore, trace_dump
from .fuzz import fuzz, seeds_from_case
from .lang import Model
from .parser import load_model
from .solver import DEFAULT_BUDGET_MS, SolverStats
from .suite import concretize, emit_ssm, manifest_text, minimize, parse_ssm

EXIT_OK = 0
EXIT_DIAGNOSTICS = 1
EXIT_INTERNAL = 2


def _solver_budget(args: argparse.Namespace) -> float:
    if args.solver_budget_ms is not None:
        return args.solver_budget_ms
    env = os.environ.get("SSPC_SOLVER_BUDGET_MS")
    if env:
        return float(env)
    return DEFAULT_BUDGET_MS


def _load(path: str) -> Model | None:
    result = load_model(path)
    for d in result.diagnostics:
        print(d.render(path), file=sys.stderr)
    return result.model


def _generate_suite(model: Model, args: argparse.Namespace):
    t0 = time.perf_counter()
    config = ExploreConfig(solver_budget_ms=_solver_budget(args), max_paths=args.max_paths)
    traces, stats = explore(model, config)
    solver_stats = SolverStats()
    candidates = []
    for trace in traces:
        case = concretize(model, trace, config.solver_budget_ms, solver_stats)
        if case is not None:
            candidates.append((case, trace))
    suite = minimize(model, candidates, args.minimize_by)
    stats.solver = stats.solver.merge(solver_stats)
    stats.wall_seconds = time.perf_counter() - t0
    return traces, suite, stats


def cmd_generate(args: argparse.Namespace) -> int:
    model = _load(args.model)
    if model is None:
        return EXIT_DIAGNOSTICS
    traces, suite, stats = _generate_suite(model, args)
    if not suite:
        print("no feasible paths: nothing to emit", file=sys.stderr)
        return EXIT_DIAGNOSTICS

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ssm_text = emit_ssm(model, suite)
    ssm_path = out_dir / (Path(args.model).stem + ".ssm")
    ssm_path.write_text(ssm_text, encoding="utf-8")
    (out_dir / "manifest.json").write_text(manifest_text(model, suite), encoding="utf-8")

    report = run_suite(model, ssm_text)
    steps = [len(c.steps) for c in suite]
    summary = {
        "model": model.name,
        "time_s": round(stats.wall_seconds, 3),
        "paths": stats.paths,
        "tests": len(suite),
        "steps_avg": round(sum(steps) / len(steps), 2),
        "steps_max": max(steps),
        "coverage_percent": report.percent,
    }
    stats_payload = dict(stats.to_json())
    stats_payload.update({"tests": len(suite), "coverage_percent": report.percent})
    stats_path = Path(args.stats_json) if args.stats_json else out_dir / "stats.json"
    stats_path.write_text(json.dumps(stats_payload, indent=2) + "\n", encoding="utf-8")
    if args.dump_traces:
        Path(args.dump_traces).write_text(trace_dump(traces), encoding="utf-8")

    print(
        "model={model} time_s={time_s} paths={paths} tests={tests} "
        "steps_avg={steps_avg} steps_max={steps_max} coverage={coverage_percent}%".format(**summary)
    )
    return EXIT_OK


def cmd_cover(args: argparse.Namespace) -> int:
    model = _load(args.model)
    if model is None:
        return EXIT_DIAGNOSTICS
    try:
        ssm_text = Path(args.suite).read_text(encoding="utf-8")
        report = run_suite(model, ssm_text)
    except ScriptMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    sys.stdout.write(report.render_table())
    if args.report_json:
        Path(args.report_json).write_text(json.dumps(report.to_json(), indent=2) + "\n", encoding="utf-8")
    return EXIT_DIAGNOSTICS if report.failures else EXIT_OK


def _fuzz_seeds(model: Model, args: argparse.Namespace):
    if args.seeds:
        text = Path(args.seeds).read_text(encoding="utf-8")
        cases = parse_ssm(model, text)
        if not cases:
            raise ScriptMismatchError("seed file contains no test cases")
        return [seeds_from_case(model, c) for c in cases]
    # mirror the original methodology: seed with the first generated test
    traces, suite, _ = _generate_suite(model, args)
    if not suite:
        raise ScriptMismatchError("model has no feasible paths to seed from")
    return [seeds_from_case(model, suite[0])]


def cmd_fuzz(args: argparse.Namespace) -> int:
    model = _load(args.model)
    if model is None:
        return EXIT_DIAGNOSTICS
    try:
        seeds = _fuzz_seeds(model, args)
    except ScriptMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    result = fuzz(model, seeds, budget=args.budget, rng_seed=args.rng_seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ssm_text = emit_ssm(model, result.suite)
    ssm_path = out_dir / (Path(args.model).stem + ".fuzz.ssm")
    ssm_path.write_text(ssm_text, encoding="utf-8")
    (out_dir / "fuzz-manifest.json").write_text(manifest_text(model, result.suite), encoding="utf-8")
    report = run_suite(model, ssm_text)
    print(
        f"model={model.name} iterations={result.iterations} queue={len(result.queue)} "
        f"coverage={report.percent}%"
    )
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    model = _load(args.model)
    if model is None:
        return EXIT_DIAGNOSTICS
    traces, suite, stats = _generate_suite(model, args)
    if not suite:
        print("no feasible paths", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    sym_report = run_suite(model, emit_ssm(model, suite))
    seeds = [seeds_from_case(model, suite[0])]
    rng_seeds = [int(s) for s in args.rng_seeds.split(",")]
    rows = []
    for seed in rng_seeds:
        result = fuzz(model, seeds, budget=args.budget, rng_seed=seed)
        report = run_suite(model, emit_ssm(model, result.suite))
        rows.append((seed, len(result.suite), report.percent))
    print(f"{'technique':<18} {'tests':>5} {'coverage':>9} {'diff':>6}")
    print(f"{'symbolic':<18} {len(suite):>5} {sym_report.percent:>8}% {'-':>6}")
    for seed, tests, percent in rows:
        print(f"{f'fuzz[seed={seed}]':<18} {tests:>5} {percent:>8}% {sym_report.percent - percent:>5}%")
    gaps = [sym_report.percent - p for _, _, p in rows]
    print(f"median diff: {statistics.median(gaps):.0f}%")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sspc-testgen", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("model", help="model file (.smx)")
        p.add_argument("--solver-budget-ms", type=float, default=None)
        p.add_argument("--max-paths", type=int, default=None)
        p.add_argument("--minimize-by", choices=("full", "branch", "off"), default="full")
        p.add_argument("--no-minimize", dest="minimize_by", action="store_const", const="off")

    g = sub.add_parser("generate", help="generate a minimized test suite with oracles")
    common(g)
    g.add_argument("--out-dir", default=".")
    g.add_argument("--stats-json", default=None)
    g.add_argument("--dump-traces", default=None)
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("cover", help="replay a suite and measure model coverage")
    c.add_argument("model")
    c.add_argument("suite", help="SSM script to replay")
    c.add_argument("--report-json", default=None)
    c.set_defaults(func=cmd_cover)

    f = sub.add_parser("fuzz", help="mutation-based baseline generator")
    common(f)
    f.add_argument("--budget", type=int, default=10000, help="mutation iterations")
    f.add_argument("--rng-seed", type=int, default=0)
    f.add_argument("--seeds", default=None, help="SSM script providing seed inputs")
    f.add_argument("--out-dir", default=".")
    f.set_defaults(func=cmd_fuzz)

    k = sub.add_parser("compare", help="symbolic vs fuzz coverage comparison")
    common(k)
    k.add_argument("--budget", type=int, default=10000)
    k.add_argument("--rng-seeds", default="0,1,2,3,4")
    k.set_defaults(func=cmd_compare)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - exit-code boundary
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
