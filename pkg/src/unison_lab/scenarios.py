"""Golden replays: scripted executions checked step by step against
hand-transcribed fixture files.

Each fixture directory holds ``topology`` (a descriptor), ``initial`` (a
configuration literal), ``script`` (one selection per line) and ``expected``
(a trace file). An ``expected`` header with ``lasso_start`` also asks for a
fairness verdict on the cycle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from . import tracefile
from .core import Configuration, parse_configuration
from .engine import TERMINAL, CrashPlan, Trace, run
from .protocol import UFTSS_PROTOCOL, Protocol, enabled_decisions
from .scheduler import FairnessVerdict, NotALasso, Scripted, classify_lasso, parse_script
from .topology import Graph, parse_descriptor

FIXTURES = Path(__file__).parent / "fixtures"


class UnknownScenario(KeyError):
    pass


@dataclass
class Scenario:
    name: str
    graph: Graph
    initial: Configuration
    crash_plan: CrashPlan
    script: list[tuple[int, ...]]
    expected: Trace


def _text(path: Path) -> str:
    lines = [ln.split("#", 1)[0].strip() for ln in path.read_text().splitlines()]
    return "\n".join(ln for ln in lines if ln)


def available(root: Path = FIXTURES) -> list[str]:
    return sorted(p.name for p in root.iterdir() if (p / "expected").is_file())


def load(name: str, root: Path = FIXTURES) -> Scenario:
    d = root / name
    if not (d / "expected").is_file():
        raise UnknownScenario(name)
    g = parse_descriptor(_text(d / "topology"))
    initial = parse_configuration(_text(d / "initial"), g.n)
    script = parse_script((d / "script").read_text())
    expected = tracefile.load(d / "expected")
    return Scenario(name, g, initial, expected.crash_plan, script, expected)


@dataclass
class ScenarioReport:
    name: str
    mismatches: list[str] = field(default_factory=list)
    trace: Trace | None = None
    verdict: FairnessVerdict | None = None
    starved: tuple[int, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def __str__(self) -> str:
        if self.passed:
            return f"{self.name}: PASS ({len(self.trace.steps) if self.trace else 0} steps)"
        return f"{self.name}: FAIL\n" + "\n".join("  " + m for m in self.mismatches)


def _compare_step(k, want, got, out: list[str]) -> None:
    if tuple(sorted(want.selected)) != tuple(sorted(got.selected)):
        out.append(f"step {k}: selected {list(got.selected)}, expected {list(want.selected)}")
    for p in sorted(set(want.fired) | set(got.fired)):
        if want.fired.get(p) != got.fired.get(p):
            out.append(f"step {k}: p{p} fired {got.fired.get(p)}, expected {want.fired.get(p)}")
    for p, (a, b) in enumerate(zip(want.clocks_after, got.clocks_after)):
        if a != b:
            out.append(f"step {k}: p{p} clock {b}, expected {a}")
    if want.crashed_after != got.crashed_after:
        out.append(f"step {k}: crashed {sorted(got.crashed_after)}, expected {sorted(want.crashed_after)}")
    if want.gamma1 != got.gamma1:
        out.append(f"step {k}: gamma1={int(got.gamma1)}, expected {int(want.gamma1)}")


def replay(s: Scenario, protocol: Protocol = UFTSS_PROTOCOL) -> ScenarioReport:
    report = ScenarioReport(s.name)
    exp = s.expected
    if exp.initial.clocks != s.initial.clocks or exp.initial.crashed != s.initial.crashed:
        report.mismatches.append("initial configuration differs from the expected trace header")
    trace = run(
        s.graph, s.initial, Scripted(s.script, f"script:{s.name}"), exp.daemon, s.crash_plan,
        max_steps=len(s.script), protocol=protocol,
    )
    report.trace = trace
    if trace.status != exp.status:
        report.mismatches.append(f"status {trace.status}, expected {exp.status}")
    if len(trace.steps) != len(exp.steps):
        report.mismatches.append(f"{len(trace.steps)} steps, expected {len(exp.steps)}")
    for k, (want, got) in enumerate(zip(exp.steps, trace.steps)):
        _compare_step(k, want, got, report.mismatches)

    if exp.status == TERMINAL and enabled_decisions(s.graph, trace.final(), protocol):
        report.mismatches.append("final configuration still has enabled processors")
    if exp.lasso_start is not None:
        trace.lasso_start = exp.lasso_start
        try:
            verdict = classify_lasso(s.graph, trace, exp.lasso_start, protocol)
        except NotALasso as exc:
            report.mismatches.append(f"not a lasso: {exc}")
        else:
            report.verdict = verdict
            if not verdict.strongly_fair_admissible:
                report.mismatches.append("cycle is not strongly fair")
            configs = trace.configurations()
            cyc = range(exp.lasso_start, len(trace.steps))
            report.starved = tuple(
                p for p in trace.final().correct()
                if not any(configs[i + 1].clocks[p] > configs[i].clocks[p] for i in cyc)
            )
            if not report.starved:
                report.mismatches.append("no correct processor starves on the cycle")
    return report


def run_scenario(name: str, root: Path = FIXTURES) -> ScenarioReport:
    return replay(load(name, root))
