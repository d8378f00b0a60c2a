"""Step semantics, crash injection, the run loop, and per-run metrics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .core import Configuration, canonicalize, check_consistent, is_gamma1
from .protocol import UFTSS_PROTOCOL, Protocol, RuleDecision
from .scheduler import (
    LRU,
    Daemon,
    History,
    Policy,
    ScriptExhausted,
    Scripted,
    legality_problem,
    neutralized,
)
from .topology import Graph

# run statuses
MAX_STEPS = "max-steps"
GAMMA1_REACHED = "gamma1-reached"
GAMMA1_STABLE = "gamma1-stable"
TERMINAL = "terminal"
SCRIPT_EXHAUSTED = "script-exhausted"
LASSO = "lasso"


class IllegalStep(ValueError):
    pass


class CrashPlanError(ValueError):
    pass


@dataclass(frozen=True)
class CrashPlan:
    """(processor, step index) pairs; index 0 means crashed initially."""

    events: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        seen = set()
        for p, k in self.events:
            if p in seen:
                raise CrashPlanError(f"processor {p} crashes more than once")
            if k < 0:
                raise CrashPlanError(f"negative crash index for processor {p}")
            seen.add(p)
        object.__setattr__(self, "events", tuple(sorted(self.events, key=lambda e: (e[1], e[0]))))

    @classmethod
    def initial(cls, crashed: Iterable[int]) -> "CrashPlan":
        return cls(tuple((p, 0) for p in crashed))

    def at(self, k: int) -> list[int]:
        return [p for p, j in self.events if j == k]

    def processors(self) -> set[int]:
        return {p for p, _ in self.events}

    def __len__(self) -> int:
        return len(self.events)

    def __str__(self) -> str:
        return ",".join(f"{p}@{k}" for p, k in self.events)


def parse_crash_plan(text: str) -> CrashPlan:
    events = []
    for item in filter(None, (x.strip() for x in text.split(","))):
        p, sep, k = item.partition("@")
        try:
            events.append((int(p), int(k) if sep else 0))
        except ValueError:
            raise CrashPlanError(f"bad crash entry {item!r}") from None
    return CrashPlan(tuple(events))


@dataclass
class Step:
    index: int
    selected: tuple[int, ...]
    fired: dict[int, str]
    clocks_after: tuple[int, ...]
    crashed_after: frozenset[int]
    gamma1: bool
    shift: int = 0


@dataclass
class Trace:
    graph: Graph
    initial: Configuration
    crash_plan: CrashPlan = field(default_factory=CrashPlan)
    steps: list[Step] = field(default_factory=list)
    daemon: Daemon = Daemon.LOCALLY_CENTRAL
    policy: str = ""
    seed: int | None = None
    status: str = ""
    canonical: bool = False
    lasso_start: int | None = None

    def configurations(self) -> list[Configuration]:
        out = [self.initial]
        for s in self.steps:
            out.append(Configuration(s.clocks_after, s.crashed_after))
        return out

    def final(self) -> Configuration:
        if not self.steps:
            return self.initial
        s = self.steps[-1]
        return Configuration(s.clocks_after, s.crashed_after)

    def selections(self) -> list[tuple[int, ...]]:
        return [s.selected for s in self.steps]


def apply_step(
    g: Graph, c: Configuration, selected: Sequence[int], protocol: Protocol = UFTSS_PROTOCOL,
    decisions: dict[int, RuleDecision] | None = None,
) -> tuple[Configuration, dict[int, str]]:
    """Atomic step: every selected processor writes the value its enabled rule
    computes from the pre-state. Returns the new configuration and fired rules."""
    if not selected:
        raise IllegalStep("empty selection")
    clocks = list(c.clocks)
    fired = {}
    for p in selected:
        if p in c.crashed:
            raise IllegalStep(f"processor {p} is crashed")
        d = decisions[p] if decisions and p in decisions else protocol.decide(g, c, p)
        if not d.enabled:
            raise IllegalStep(f"processor {p} is not enabled")
        clocks[p] = d.write_value
        fired[p] = d.rule
    return Configuration(tuple(clocks), c.crashed), fired


def step(
    g: Graph, c: Configuration, selected: Sequence[int], protocol: Protocol = UFTSS_PROTOCOL
) -> Configuration:
    return apply_step(g, c, selected, protocol)[0]


@dataclass(frozen=True)
class StopCondition:
    kind: str = MAX_STEPS
    window: int = 0

    @classmethod
    def parse(cls, text: str) -> "StopCondition":
        kind, _, arg = text.partition(":")
        if kind in (MAX_STEPS, GAMMA1_REACHED, TERMINAL) and not arg:
            return cls(kind)
        if kind == GAMMA1_STABLE:
            try:
                w = int(arg)
            except ValueError:
                raise ValueError(f"bad window in stop condition {text!r}") from None
            if w < 0:
                raise ValueError("stability window must be >= 0")
            return cls(kind, w)
        raise ValueError(f"unknown stop condition {text!r}")

    def __str__(self) -> str:
        return f"{self.kind}:{self.window}" if self.kind == GAMMA1_STABLE else self.kind


def run(
    g: Graph,
    initial: Configuration,
    policy: Policy | None = None,
    daemon: Daemon = Daemon.LOCALLY_CENTRAL,
    crash_plan: CrashPlan | None = None,
    max_steps: int = 1000,
    stop: StopCondition | str = StopCondition(),
    protocol: Protocol = UFTSS_PROTOCOL,
    canonical: bool = False,
    max_faults: int | None = None,
) -> Trace:
    """Execute select+step until ``max_steps``, the stop condition, or a
    terminal configuration (no correct processor enabled)."""
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    policy = policy or LRU()
    if isinstance(stop, str):
        stop = StopCondition.parse(stop)
    check_consistent(g, initial)
    plan = crash_plan or CrashPlan()
    extra = [p for p in initial.crashed if p not in plan.processors()]
    if extra:
        plan = CrashPlan(plan.events + tuple((p, 0) for p in extra))
    for p in plan.processors():
        if not 0 <= p < g.n:
            raise CrashPlanError(f"crash plan names unknown processor {p}")
    if max_faults is not None and len(plan) > max_faults:
        raise CrashPlanError(f"crash plan has {len(plan)} faults, limit is {max_faults}")

    current = initial.with_crashed(set(initial.crashed) | set(plan.at(0)))
    if canonical:
        current, _ = canonicalize(g, current)
    trace = Trace(g, current, plan, [], daemon, policy.descriptor, policy.seed, "", canonical)
    history = History(g.n)
    stable = 1 if is_gamma1(g, current) else 0
    k = 0
    while True:
        if k > 0:
            late = plan.at(k)
            if late:
                current = current.with_crashed(current.crashed | set(late))
        if stop.kind == GAMMA1_REACHED and stable:
            trace.status = GAMMA1_REACHED
            break
        if stop.kind == GAMMA1_STABLE and stable > stop.window:
            trace.status = GAMMA1_STABLE
            break
        decisions = {}
        for p in range(g.n):
            if p not in current.crashed:
                d = protocol.decide(g, current, p)
                if d.enabled:
                    decisions[p] = d
        if not decisions:
            trace.status = TERMINAL
            break
        if k >= max_steps:
            trace.status = MAX_STEPS
            break
        try:
            sel = policy.select(daemon, g, current, list(decisions), history, k)
        except ScriptExhausted:
            trace.status = SCRIPT_EXHAUSTED
            break
        problem = legality_problem(daemon, g, sel, decisions)
        if problem:
            raise IllegalStep(f"step {k}: policy {policy.descriptor} made an illegal choice: {problem}")
        current, fired = apply_step(g, current, sel, protocol, decisions)
        shift = 0
        if canonical:
            current, shift = canonicalize(g, current)
        history.record(k, sel)
        g1 = is_gamma1(g, current)
        stable = stable + 1 if g1 else 0
        trace.steps.append(
            Step(k, tuple(sorted(sel)), fired, current.clocks, current.crashed, g1, shift)
        )
        k += 1
    return trace


def replay(trace: Trace, protocol: Protocol = UFTSS_PROTOCOL) -> Trace:
    """Re-execute the recorded selections from the recorded initial state."""
    g = trace.graph
    policy = Scripted(trace.selections(), trace.policy)
    policy.seed = trace.seed
    again = run(
        g, trace.initial, policy, trace.daemon, trace.crash_plan,
        max_steps=len(trace.steps), protocol=protocol, canonical=trace.canonical,
    )
    again.status = trace.status
    again.lasso_start = trace.lasso_start
    return again


def replays_exactly(trace: Trace, protocol: Protocol = UFTSS_PROTOCOL) -> bool:
    try:
        return replay(trace, protocol).steps == trace.steps
    except (IllegalStep, ValueError):
        return False


@dataclass
class RunMetrics:
    steps: int
    increments: list[int]
    decrements: list[int]
    executions: list[int]
    neutralizations: list[int]
    steps_to_gamma1: int | None
    # longest run of consecutive post-Gamma-1 steps without an increment
    max_increment_gap: list[int | None]
    terminal: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def metrics(trace: Trace, protocol: Protocol = UFTSS_PROTOCOL) -> RunMetrics:
    g = trace.graph
    n = g.n
    configs = trace.configurations()
    inc, dec, exe, neu = [0] * n, [0] * n, [0] * n, [0] * n
    for i, s in enumerate(trace.steps):
        before, after = configs[i], configs[i + 1]
        for p in s.selected:
            exe[p] += 1
            delta = after.clocks[p] + s.shift - before.clocks[p]
            if delta > 0:
                inc[p] += 1
            elif delta < 0:
                dec[p] += 1
        chosen = set(s.selected)
        for p in range(n):
            if p not in chosen and neutralized(g, before, after, p, False, protocol):
                neu[p] += 1

    settle = None
    for i in range(len(configs) - 1, -1, -1):
        if is_gamma1(g, configs[i]):
            settle = i
        else:
            break

    gaps: list[int | None] = [None] * n
    if settle is not None:
        final_crashed = configs[-1].crashed
        for p in range(n):
            if p in final_crashed:
                continue
            run_len = best = 0
            for i in range(settle, len(trace.steps)):
                s = trace.steps[i]
                raised = p in s.fired and configs[i + 1].clocks[p] + s.shift > configs[i].clocks[p]
                run_len = 0 if raised else run_len + 1
                best = max(best, run_len)
            gaps[p] = best
    return RunMetrics(
        steps=len(trace.steps),
        increments=inc,
        decrements=dec,
        executions=exe,
        neutralizations=neu,
        steps_to_gamma1=settle,
        max_increment_gap=gaps,
        terminal=trace.status == TERMINAL,
    )
