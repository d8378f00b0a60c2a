"""Command-line entry point: ``run``, ``check``, ``scenario`` and ``plotdata``.

Exit codes: 0 clean, 1 requested outcome not reached (stop condition missed,
violations found, or expected witness absent), 2 run ended in a terminal
configuration, 64 bad usage, 65 bad input data (illegal script step,
malformed trace), 66 unknown scenario or missing input file.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import checker, scenarios, tracefile
from .core import ConfigurationError, Configuration, parse_int_list, random_configuration
from .engine import (
    GAMMA1_REACHED,
    GAMMA1_STABLE,
    TERMINAL,
    CrashPlan,
    CrashPlanError,
    IllegalStep,
    StopCondition,
    metrics,
    parse_crash_plan,
    run,
)
from .scheduler import Daemon, ScriptViolation, parse_policy
from .topology import TopologyError, parse_descriptor

EXIT_OK = 0
EXIT_UNMET = 1
EXIT_TERMINAL = 2
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_NOINPUT = 66

THREADS_ENV = "UNISON_LAB_THREADS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def read_config(path: str | Path) -> list[str]:
    """Turn ``key = value`` lines into the equivalent flag list."""
    argv = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (s.strip() for s in line.partition("="))
        if not sep or not key:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "yes", "on"):
            argv.append(flag)
        elif value.lower() in ("false", "no", "off"):
            continue
        else:
            argv += [flag, value]
    return argv


def _expand_config(argv: list[str]) -> list[str]:
    """Splice ``--config FILE`` in place; explicit flags after it win."""
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a == "--config" and i + 1 < len(argv):
            out += read_config(argv[i + 1])
            i += 2
            continue
        if a.startswith("--config="):
            out += read_config(a.split("=", 1)[1])
            i += 1
            continue
        out.append(a)
        i += 1
    return out


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="unison-lab", description="Simulate and check the UFTSS unison protocol.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="execute one run (or a seed sweep) and write its trace")
    r.add_argument("--config", help="file of 'key = value' lines mirroring these flags")
    r.add_argument("--topology", required=True)
    r.add_argument("--init", required=True, help="clock list, or random:<seed>:<max>")
    r.add_argument("--crash", action="append", default=[], help="p@k, repeatable")
    r.add_argument("--daemon", default="locally-central")
    r.add_argument("--policy", default="lru")
    r.add_argument("--max-steps", type=int, default=1000)
    r.add_argument("--max-faults", type=int)
    r.add_argument("--stop", default="max-steps")
    r.add_argument("--canonical", action="store_true", help="canonicalize clocks after each step")
    r.add_argument("--out", help="trace file (sweep: output directory)")
    r.add_argument("--seeds", help="sweep a..b over random:<seed>:<max> initial clocks")

    c = sub.add_parser("check", help="bounded exhaustive checks")
    c.add_argument("--config")
    c.add_argument("--topology", required=True)
    c.add_argument("--crash", action="append", default=[], help="crashed ids (p or p@0)")
    c.add_argument("--span", type=int, default=3)
    c.add_argument("--checks", default="closure,blocking,priority,potential")
    c.add_argument("--init", help="start liveness searches from this clock list only")
    c.add_argument("--expect-witness", action="store_true")
    c.add_argument("--out", help="report directory (report.json plus witness traces)")

    s = sub.add_parser("scenario", help="replay a golden scenario")
    s.add_argument("name", nargs="?")
    s.add_argument("--list", action="store_true")
    s.add_argument("--out", help="write the replayed trace here")

    d = sub.add_parser("plotdata", help="per-step per-processor CSV from a trace")
    d.add_argument("trace")
    d.add_argument("--out", help="CSV file (default: stdout)")
    return p


# ---------------------------------------------------------------- run


def _crash_plan(items: list[str]) -> CrashPlan:
    return parse_crash_plan(",".join(items))


def _initial(init: str, n: int, seed: int | None = None) -> Configuration:
    if init.startswith("random:"):
        parts = init.split(":")
        if len(parts) != 3:
            raise UsageError(f"--init random expects random:<seed>:<max>, got {init!r}")
        try:
            s = int(parts[1]) if seed is None else seed
            hi = int(parts[2])
        except ValueError:
            raise UsageError(f"bad numbers in --init {init!r}") from None
        return random_configuration(n, s, hi)
    clocks = parse_int_list(init)
    if len(clocks) != n:
        raise UsageError(f"--init has {len(clocks)} clocks, topology has {n} processors")
    if any(h < 0 for h in clocks):
        raise UsageError("clocks must be non-negative")
    return Configuration.of(clocks)


def _seed_range(text: str) -> range:
    a, sep, b = text.partition("..")
    try:
        lo, hi = int(a), int(b)
    except ValueError:
        raise UsageError(f"--seeds expects a..b, got {text!r}") from None
    if not sep or hi < lo:
        raise UsageError(f"--seeds expects a..b with a <= b, got {text!r}")
    return range(lo, hi + 1)


def _run_exit(status: str, stop: StopCondition) -> int:
    if status == TERMINAL:
        return EXIT_OK if stop.kind == TERMINAL else EXIT_TERMINAL
    if stop.kind in (GAMMA1_REACHED, GAMMA1_STABLE) and status != stop.kind:
        return EXIT_UNMET
    return EXIT_OK


def _one_run(args, seed: int | None):
    g = parse_descriptor(args.topology)
    c0 = _initial(args.init, g.n, seed)
    policy = parse_policy(args.policy)
    stop = StopCondition.parse(args.stop)
    trace = run(
        g, c0, policy, Daemon.parse(args.daemon), _crash_plan(args.crash),
        args.max_steps, stop, canonical=args.canonical, max_faults=args.max_faults,
    )
    m = metrics(trace)
    code = _run_exit(trace.status, stop)
    summary = {
        "seed": seed,
        "status": trace.status,
        "steps": m.steps,
        "steps_to_gamma1": m.steps_to_gamma1,
        "increments": m.increments,
        "decrements": m.decrements,
        "executions": m.executions,
        "neutralizations": m.neutralizations,
        "max_increment_gap": m.max_increment_gap,
        "exit": code,
    }
    return trace, summary, code


def _sweep_job(job):
    args, seed, out_dir = job
    trace, summary, code = _one_run(args, seed)
    if out_dir:
        tracefile.dump(trace, Path(out_dir) / f"seed-{seed}.trace")
    return summary


def _workers() -> int:
    cap = os.cpu_count() or 1
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            cap = max(1, min(cap, int(env)))
        except ValueError:
            raise UsageError(f"{THREADS_ENV} must be an integer") from None
    return cap


def cmd_run(args) -> int:
    if args.max_steps < 0:
        raise UsageError("--max-steps must be >= 0")
    if args.seeds:
        if not args.init.startswith("random:"):
            raise UsageError("--seeds needs --init random:<seed>:<max>")
        seeds = _seed_range(args.seeds)
        if args.out:
            Path(args.out).mkdir(parents=True, exist_ok=True)
        jobs = [(args, s, args.out) for s in seeds]
        workers = min(_workers(), len(jobs))
        if workers > 1:
            with ProcessPoolExecutor(workers) as pool:
                results = list(pool.map(_sweep_job, jobs))
        else:
            results = [_sweep_job(j) for j in jobs]
        for r in results:
            print(json.dumps(r))
        codes = {r["exit"] for r in results}
        return EXIT_TERMINAL if EXIT_TERMINAL in codes else max(codes)
    trace, summary, code = _one_run(args, None)
    if args.out:
        tracefile.dump(trace, args.out)
    else:
        sys.stdout.write(tracefile.dumps(trace))
    print(json.dumps(summary), file=sys.stderr if not args.out else sys.stdout)
    return code


# ---------------------------------------------------------------- check


def _crash_set(items: list[str]) -> list[int]:
    plan = _crash_plan(items)
    if any(k != 0 for _, k in plan.events):
        raise UsageError("check only supports initial crashes (p or p@0)")
    return sorted(plan.processors())


def cmd_check(args) -> int:
    g = parse_descriptor(args.topology)
    crashed = _crash_set(args.crash)
    if args.span < 1:
        raise UsageError("--span must be >= 1")
    initial = None
    if args.init:
        initial = [Configuration.of(_initial(args.init, g.n).clocks, crashed)]
    reports = []
    for name in filter(None, (x.strip() for x in args.checks.split(","))):
        kind, _, arg = name.partition(":")
        if kind == "closure":
            rep = checker.check_closure(g, crashed, args.span)
        elif kind == "blocking":
            rep = checker.check_blocking(g, args.span, crashed)
        elif kind == "priority":
            rep = checker.check_priority(g, args.span, crashed)
        elif kind == "potential":
            rep = checker.check_potential_decrease(g, args.span, crashed)
        elif kind == "starvation":
            fairness = arg or checker.STRONG
            if fairness not in (checker.STRONG, checker.WEAK):
                raise UsageError(f"unknown fairness {fairness!r}")
            rep = checker.starvation_report(g, crashed, args.span, fairness, initial)
        elif kind == "convergence":
            rep = checker.check_convergence_reachability(g, crashed, args.span, initial)
        else:
            raise UsageError(f"unknown check {name!r}")
        reports.append(rep)

    found = [v for rep in reports for v in rep]
    summary = {
        "topology": str(g),
        "crashed": crashed,
        "span": args.span,
        "checks": [rep.summary() for rep in reports],
        "witnesses": [],
    }
    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    for i, v in enumerate(found):
        entry = {"kind": v.kind, "message": v.message, "validated": v.validated}
        if out_dir and v.trace is not None:
            path = out_dir / f"witness-{i}-{v.kind}.trace"
            tracefile.dump(v.trace, path)
            entry["file"] = str(path)
        summary["witnesses"].append(entry)
    text = json.dumps(summary, indent=2)
    if out_dir:
        (out_dir / "report.json").write_text(text + "\n")
    print(text)
    if args.expect_witness:
        return EXIT_OK if found else EXIT_UNMET
    return EXIT_UNMET if found else EXIT_OK


# ---------------------------------------------------------------- scenario / plotdata


def cmd_scenario(args) -> int:
    if args.list:
        print("\n".join(scenarios.available()))
        return EXIT_OK
    if not args.name:
        raise UsageError("scenario name required (or --list)")
    try:
        sc = scenarios.load(args.name)
    except scenarios.UnknownScenario:
        print(f"unknown scenario {args.name!r}; known: {', '.join(scenarios.available())}", file=sys.stderr)
        return EXIT_NOINPUT
    report = scenarios.replay(sc)
    print(report)
    if args.out and report.trace is not None:
        tracefile.dump(report.trace, args.out)
    return EXIT_OK if report.passed else EXIT_UNMET


def cmd_plotdata(args) -> int:
    try:
        trace = tracefile.load(args.trace)
    except FileNotFoundError:
        print(f"cannot read {args.trace}", file=sys.stderr)
        return EXIT_NOINPUT
    except (tracefile.TraceFormatError, ValueError) as exc:
        print(f"malformed trace: {exc}", file=sys.stderr)
        return EXIT_DATA
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "processor", "clock", "crashed", "rule"])
        w.writerows(tracefile.plot_rows(trace))
    finally:
        if args.out:
            fh.close()
    return EXIT_OK


COMMANDS = {"run": cmd_run, "check": cmd_check, "scenario": cmd_scenario, "plotdata": cmd_plotdata}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_expand_config(argv))
    except (UsageError, OSError) as exc:
        print(f"unison-lab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except ScriptViolation as exc:
        print(f"illegal script: step {exc.step}: {exc.reason}", file=sys.stderr)
        return EXIT_DATA
    except IllegalStep as exc:
        print(f"illegal step: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"unison-lab: {exc}", file=sys.stderr)
        return EXIT_NOINPUT
    except (UsageError, TopologyError, ConfigurationError, CrashPlanError, ValueError) as exc:
        print(f"unison-lab: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
