"""Bounded exhaustive verification over the canonical finite state space.

Clocks are canonicalized (minimum clock 0 or 1) and the clock span is capped
at ``S``. Universal single-step checks (closure, blocking, priority,
potential) enumerate configurations directly. Liveness checks build a
transition graph and look for fair cycles in it.

A canonical configuration with minimum 1 stands for every upward shift of
itself, because the protocol is shift-invariant once no clock is 0. When a
step from such a configuration produces a 0, the shifted copies do not, so
the abstract graph gets two edges: one to the grounded successor and one to
its shift by +1. This over-approximates the real behaviors, which makes a
"none found" answer sound within span ``S``. Found witnesses are re-checked
on the exact graph and then replayed on raw, unshifted clocks.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import networkx as nx

from .core import (
    Configuration,
    canonicalize,
    is_gamma1,
    node_max_drift,
    potential,
    potential_less,
)
from .engine import LASSO, TERMINAL, CrashPlan, IllegalStep, Trace, run
from .protocol import N, NOT_ENABLED, UFTSS_PROTOCOL, Protocol
from .scheduler import Daemon, Scripted, ScriptViolation, classify_lasso
from .topology import Graph

STRONG = "strong"
WEAK = "weak"

CLOSURE = "closure"
BLOCKING = "blocking"
PRIORITY = "priority"
POTENTIAL = "potential"
STARVATION = "starvation"
FREEZE = "freeze"
CONVERGENCE = "convergence"


@dataclass
class Violation:
    kind: str
    message: str
    configuration: Configuration | None = None
    trace: Trace | None = None
    processors: tuple[int, ...] = ()
    validated: bool = True

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


class CheckReport(list):
    """A list of violations plus the size of the explored space."""

    def __init__(self, name: str, span: int, violations: Iterable[Violation] = ()):
        super().__init__(violations)
        self.name = name
        self.span = span
        self.states = 0
        self.transitions = 0
        self.boundary = 0
        self.notes: list[str] = []

    @property
    def violations(self) -> list[Violation]:
        return list(self)

    def summary(self) -> dict:
        return {
            "check": self.name,
            "span": self.span,
            "states": self.states,
            "transitions": self.transitions,
            "boundary_transitions": self.boundary,
            "violations": len(self),
            "kinds": sorted({v.kind for v in self}),
            "notes": self.notes,
        }


@dataclass(frozen=True)
class Transition:
    src: int
    dst: int
    selected: tuple[int, ...]
    raised: frozenset[int]        # processors whose raw clock went up
    shift: int                    # raw successor minus dst
    extra: bool = False           # over-approximation edge (shifted copy)


@dataclass
class Explored:
    nodes: list[Configuration] = field(default_factory=list)
    index: dict[Configuration, int] = field(default_factory=dict)
    enabled: list[frozenset[int]] = field(default_factory=list)
    transitions: list[Transition] = field(default_factory=list)
    out: list[list[int]] = field(default_factory=list)
    initial: list[int] = field(default_factory=list)
    boundary: int = 0

    def terminal_nodes(self) -> list[int]:
        return [i for i, e in enumerate(self.enabled) if not e]


class StateSpace:
    """Canonical configurations of ``g`` with a fixed crash set and span <= S."""

    def __init__(
        self, g: Graph, crashed: Iterable[int] = (), span: int = 3,
        protocol: Protocol = UFTSS_PROTOCOL, daemon: Daemon = Daemon.LOCALLY_CENTRAL,
    ):
        if span < 1:
            raise ValueError("span must be >= 1")
        self.g = g
        self.crashed = frozenset(crashed)
        for p in self.crashed:
            if not 0 <= p < g.n:
                raise ValueError(f"crashed id {p} is not a node")
        self.span = span
        self.protocol = protocol
        self.daemon = daemon
        self._nbr_mask = [sum(1 << q for q in g.adjacency[p]) for p in range(g.n)]
        self._sel_cache: dict[tuple[int, ...], list[tuple[int, ...]]] = {}

    def states(self) -> Iterable[Configuration]:
        """Every canonical configuration, in lexicographic clock order."""
        S = self.span
        for clocks in itertools.product(range(S + 2), repeat=self.g.n):
            lo, hi = min(clocks), max(clocks)
            if lo <= 1 and hi - lo <= S:
                yield Configuration(clocks, self.crashed)

    def contains(self, c: Configuration) -> bool:
        lo, hi = min(c.clocks), max(c.clocks)
        return c.crashed == self.crashed and lo <= 1 and hi - lo <= self.span

    def decisions(self, c: Configuration):
        out = {}
        for p in range(self.g.n):
            if p not in c.crashed:
                d = self.protocol.decide(self.g, c, p)
                if d.enabled:
                    out[p] = d
        return out

    def selections(self, enabled: Sequence[int]) -> list[tuple[int, ...]]:
        """Every legal selection for the daemon out of ``enabled``."""
        key = tuple(enabled)
        hit = self._sel_cache.get(key)
        if hit is not None:
            return hit
        out = []
        k = len(key)
        if self.daemon is Daemon.CENTRAL:
            out = [(p,) for p in key]
        elif self.daemon is Daemon.SYNCHRONOUS:
            out = [key] if key else []
        else:
            for mask in range(1, 1 << k):
                sel = tuple(key[i] for i in range(k) if mask >> i & 1)
                if self.daemon is Daemon.LOCALLY_CENTRAL:
                    bits = sum(1 << p for p in sel)
                    if any(self._nbr_mask[p] & bits for p in sel):
                        continue
                out.append(sel)
        self._sel_cache[key] = out
        return out

    def raw_successor(self, c: Configuration, sel: Sequence[int], decisions) -> Configuration:
        clocks = list(c.clocks)
        for p in sel:
            clocks[p] = decisions[p].write_value
        return Configuration(tuple(clocks), c.crashed)

    def explore(
        self, initial: Iterable[Configuration] | None = None, overapprox: bool = True,
        strategy: str = "bfs",
    ) -> Explored:
        """Transition graph reachable from ``initial`` (default: every state)."""
        ex = Explored()
        frontier: deque[int] = deque()

        def add(c: Configuration) -> int:
            i = ex.index.get(c)
            if i is None:
                i = len(ex.nodes)
                ex.index[c] = i
                ex.nodes.append(c)
                ex.out.append([])
                ex.enabled.append(frozenset())
                frontier.append(i)
            return i

        starts = self.states() if initial is None else initial
        seen_init = set()
        for c in starts:
            c = canonicalize(self.g, c)[0]
            if not self.contains(c):
                raise ValueError(f"initial configuration {c} is outside the state space")
            i = add(c)
            if i not in seen_init:
                seen_init.add(i)
                ex.initial.append(i)
        ex.initial.sort()

        while frontier:
            i = frontier.popleft() if strategy == "bfs" else frontier.pop()
            c = ex.nodes[i]
            dec = self.decisions(c)
            ex.enabled[i] = frozenset(dec)
            floating = min(c.clocks) >= 1
            for sel in self.selections(sorted(dec)):
                raw = self.raw_successor(c, sel, dec)
                if max(raw.clocks) - min(raw.clocks) > self.span:
                    ex.boundary += 1
                    continue
                raised = frozenset(p for p in sel if raw.clocks[p] > c.clocks[p])
                dst, shift = canonicalize(self.g, raw)
                j = add(dst)
                ex.out[i].append(len(ex.transitions))
                ex.transitions.append(Transition(i, j, tuple(sel), raised, shift))
                if overapprox and floating and min(raw.clocks) == 0:
                    up = Configuration(tuple(h + 1 for h in raw.clocks), raw.crashed)
                    j2 = add(up)
                    ex.out[i].append(len(ex.transitions))
                    ex.transitions.append(Transition(i, j2, tuple(sel), raised, -1, True))
        return ex


# ---------------------------------------------------------------- single-step checks


def _one_step_trace(g, c, sel, protocol) -> Trace:
    t = run(g, c, Scripted([sel], "witness"), Daemon.LOCALLY_CENTRAL, max_steps=1, protocol=protocol)
    t.status = "witness"
    return t


def _snapshot_trace(g, c) -> Trace:
    return Trace(g, c, CrashPlan.initial(sorted(c.crashed)), [], Daemon.LOCALLY_CENTRAL, "none", None, "witness")


def _finish(report: CheckReport, space: StateSpace, states: int, transitions: int) -> CheckReport:
    report.states = states
    report.transitions = transitions
    report.notes.append(f"universal within clock span {space.span}")
    return report


def check_closure(
    g: Graph, crashed: Iterable[int] = (), span: int = 3, protocol: Protocol = UFTSS_PROTOCOL,
) -> CheckReport:
    """Every legal locally-central step from a Gamma-1 configuration stays in Gamma-1."""
    space = StateSpace(g, crashed, span, protocol)
    report = CheckReport(CLOSURE, span)
    states = steps = 0
    for c in space.states():
        if not is_gamma1(g, c):
            continue
        states += 1
        dec = space.decisions(c)
        for sel in space.selections(sorted(dec)):
            steps += 1
            nxt = space.raw_successor(c, sel, dec)
            if not is_gamma1(g, nxt):
                report.append(Violation(
                    CLOSURE, f"{c} --{list(sel)}--> {nxt} leaves Gamma-1",
                    c, _one_step_trace(g, c, sel, protocol),
                ))
    return _finish(report, space, states, steps)


def check_blocking(
    g: Graph, span: int = 4, crashed: Iterable[int] = (), protocol: Protocol = UFTSS_PROTOCOL,
) -> CheckReport:
    """A processor with neighbors at H-1 and H+1 (H >= 1) is not enabled."""
    space = StateSpace(g, crashed, span, protocol)
    report = CheckReport(BLOCKING, span)
    states = 0
    for c in space.states():
        states += 1
        h = c.clocks
        for p in range(g.n):
            hp = h[p]
            nb = [h[q] for q in g.adjacency[p]]
            if hp >= 1 and hp - 1 in nb and hp + 1 in nb:
                d = protocol.decide(g, c, p)
                if d.enabled:
                    report.append(Violation(
                        BLOCKING, f"p{p} enabled ({d.rule}) in {c} despite neighbors at H-1 and H+1",
                        c, _snapshot_trace(g, c), (p,),
                    ))
    return _finish(report, space, states, 0)


def check_priority(
    g: Graph, span: int = 3, crashed: Iterable[int] = (), protocol: Protocol = UFTSS_PROTOCOL,
) -> CheckReport:
    """Neighbors all at H or H+1 means rule N writing H+1."""
    space = StateSpace(g, crashed, span, protocol)
    report = CheckReport(PRIORITY, span)
    states = 0
    for c in space.states():
        states += 1
        h = c.clocks
        for p in range(g.n):
            if all(h[q] in (h[p], h[p] + 1) for q in g.adjacency[p]):
                d = protocol.decide(g, c, p)
                if d.rule != N or d.write_value != h[p] + 1:
                    report.append(Violation(
                        PRIORITY, f"p{p} in {c} decides {d.rule}:{d.write_value}, expected N:{h[p] + 1}",
                        c, _snapshot_trace(g, c), (p,),
                    ))
    return _finish(report, space, states, 0)


def check_potential_decrease(
    g: Graph, span: int = 4, crashed: Iterable[int] = (), protocol: Protocol = UFTSS_PROTOCOL,
) -> CheckReport:
    """Steps by processors that all have local drift >= 2 strictly lower P."""
    space = StateSpace(g, crashed, span, protocol)
    report = CheckReport(POTENTIAL, span)
    states = steps = 0
    for c in space.states():
        if is_gamma1(g, c):
            continue
        states += 1
        dec = space.decisions(c)
        eligible = [p for p in sorted(dec) if node_max_drift(g, c, p) >= 2]
        if not eligible:
            continue
        before = potential(g, c)
        for sel in space.selections(eligible):
            steps += 1
            nxt = space.raw_successor(c, sel, dec)
            after = potential(g, nxt)
            if not potential_less(after, before):
                report.append(Violation(
                    POTENTIAL, f"{c} --{list(sel)}--> {nxt}: P {before} -> {after}",
                    c, _one_step_trace(g, c, sel, protocol), tuple(sel),
                ))
    return _finish(report, space, states, steps)


# ---------------------------------------------------------------- fair cycles

Node = Hashable
Edge = tuple[Node, Node, frozenset]


def find_fair_cycle(
    edges: Sequence[Edge],
    enabled: Mapping[Node, frozenset],
    fairness: str = STRONG,
    nodes: Iterable[Node] | None = None,
) -> list[int] | None:
    """A closed walk (list of edge indices) whose infinite repetition is fair.

    ``edges`` are ``(src, dst, executed processors)``. Strong fairness: every
    processor enabled somewhere on the walk executes on it. Weak fairness:
    every processor enabled at every node of the walk executes on it.
    """
    if fairness not in (STRONG, WEAK):
        raise ValueError(f"unknown fairness {fairness!r}")
    if nodes is None:
        nodes = dict.fromkeys(x for e in edges for x in e[:2])
    out: dict[Node, list[int]] = {}
    for i, (u, _, _) in enumerate(edges):
        out.setdefault(u, []).append(i)
    return _fair_search(list(dict.fromkeys(nodes)), edges, out, enabled, fairness)


def _fair_search(nodes, edges, out, enabled, fairness):
    keep = set(nodes)
    dg = nx.DiGraph()
    dg.add_nodes_from(nodes)
    for u in nodes:
        for i in out.get(u, ()):
            if edges[i][1] in keep:
                dg.add_edge(u, edges[i][1])
    for comp in nx.strongly_connected_components(dg):
        members = [u for u in nodes if u in comp]
        internal = [i for u in members for i in out.get(u, ()) if edges[i][1] in comp]
        if not internal:
            continue
        somewhere = frozenset().union(*(enabled[u] for u in members))
        executed = frozenset().union(*(edges[i][2] for i in internal))
        if fairness == STRONG:
            bad = somewhere - executed
            if not bad:
                return _build_walk(members, internal, edges, enabled, somewhere, executed)
            sub = [u for u in members if not enabled[u] & bad]
            if sub:
                found = _fair_search(sub, edges, out, enabled, fairness)
                if found:
                    return found
        else:
            always = frozenset.intersection(*(frozenset(enabled[u]) for u in members))
            if always <= executed:
                return _build_walk(members, internal, edges, enabled, somewhere, executed)
    return None


def _build_walk(members, internal, edges, enabled, somewhere, executed) -> list[int]:
    """Closed walk inside one SCC touching an executing edge for every
    processor in ``somewhere`` that executes, and a node where it is disabled
    for every one that does not."""
    local: dict[Node, list[int]] = {}
    for i in internal:
        local.setdefault(edges[i][0], []).append(i)
    waypoints: list[tuple[str, object]] = []
    for p in sorted(somewhere):
        if p in executed:
            waypoints.append(("edge", next(i for i in internal if p in edges[i][2])))
        else:
            waypoints.append(("node", next(u for u in members if p not in enabled[u])))
    if not waypoints or waypoints[0][0] != "edge":
        waypoints.insert(0, ("edge", internal[0]))

    def path(a, b) -> list[int]:
        if a == b:
            return []
        prev = {a: None}
        queue = deque([a])
        while queue:
            u = queue.popleft()
            for i in local.get(u, ()):
                v = edges[i][1]
                if v not in prev:
                    prev[v] = i
                    if v == b:
                        walk = []
                        while v != a:
                            j = prev[v]
                            walk.append(j)
                            v = edges[j][0]
                        return walk[::-1]
                    queue.append(v)
        raise AssertionError("nodes of one SCC must be mutually reachable")

    start = edges[waypoints[0][1]][0]
    cur = start
    walk: list[int] = []
    for kind, target in waypoints:
        if kind == "edge":
            walk += path(cur, edges[target][0])
            walk.append(target)
            cur = edges[target][1]
        else:
            walk += path(cur, target)
            cur = target
    walk += path(cur, start)
    return walk


def walk_is_fair(
    walk: Sequence[int], edges: Sequence[Edge], enabled: Mapping[Node, frozenset], fairness: str,
) -> bool:
    if not walk:
        return False
    for a, b in zip(walk, list(walk[1:]) + [walk[0]]):
        if edges[a][1] != edges[b][0]:
            return False
    on = [frozenset(enabled[edges[i][0]]) for i in walk]
    executed = frozenset().union(*(edges[i][2] for i in walk))
    if fairness == STRONG:
        return frozenset().union(*on) <= executed
    return frozenset.intersection(*on) <= executed


# ---------------------------------------------------------------- lassos


def _prefix(ex: Explored, target: int, allowed: Callable[[Transition], bool] = lambda t: True) -> list[int] | None:
    """Shortest transition path from some initial node to ``target``."""
    prev: dict[int, int | None] = {i: None for i in ex.initial}
    queue = deque(ex.initial)
    while queue:
        u = queue.popleft()
        if u == target:
            walk = []
            while prev[u] is not None:
                j = prev[u]
                walk.append(j)
                u = ex.transitions[j].src
            return walk[::-1]
        for j in ex.out[u]:
            t = ex.transitions[j]
            if allowed(t) and t.dst not in prev:
                prev[t.dst] = j
                queue.append(t.dst)
    return None


def _manual_trace(g, ex: Explored, path: list[int], start: int, protocol) -> Trace:
    """Canonical-mode trace straight from graph edges (may include
    over-approximation edges, which do not replay)."""
    from .engine import Step

    first = ex.nodes[ex.transitions[path[0]].src] if path else ex.nodes[start]
    trace = Trace(g, first, CrashPlan.initial(sorted(first.crashed)), [], Daemon.LOCALLY_CENTRAL,
                  "script:witness", None, LASSO, True)
    for k, j in enumerate(path):
        t = ex.transitions[j]
        src, dst = ex.nodes[t.src], ex.nodes[t.dst]
        fired = {p: protocol.decide(g, src, p).rule for p in t.selected}
        trace.steps.append(Step(k, t.selected, fired, dst.clocks, dst.crashed, is_gamma1(g, dst), t.shift))
    return trace


def _engine_trace(g, start: Configuration, selections, protocol) -> Trace | None:
    try:
        return run(g, start, Scripted(selections, "script:witness"), Daemon.LOCALLY_CENTRAL,
                   max_steps=len(selections), protocol=protocol, canonical=True)
    except (IllegalStep, ScriptViolation):
        return None


def validate_lasso_raw(trace: Trace, protocol: Protocol = UFTSS_PROTOCOL, laps: int = 3,
                       starving: Iterable[int] = ()) -> bool:
    """Replay prefix plus several laps on raw clocks and confirm the run is
    genuinely periodic from some lap on, following the canonical lasso, with
    the ``starving`` processors never raising their raw clock."""
    g = trace.graph
    a = trace.lasso_start
    if a is None or a >= len(trace.steps):
        return False
    sel = trace.selections()
    cycle = sel[a:]
    L = len(cycle)
    canon = trace.configurations()
    script = sel[:a] + cycle * laps
    try:
        raw = run(g, trace.initial, Scripted(script, "script:witness"), trace.daemon,
                  max_steps=len(script), protocol=protocol)
    except (IllegalStep, ScriptViolation):
        return False
    if len(raw.steps) != len(script):
        return False
    configs = raw.configurations()
    for i, c in enumerate(configs):
        expect = canon[i] if i <= a else canon[a + (i - a - 1) % L + 1]
        if canonicalize(g, c)[0] != expect:
            return False
    starving = set(starving)
    for lap in range(laps):
        s = a + lap * L
        lap_states = configs[s:s + L + 1]
        begin, end = lap_states[0], lap_states[-1]
        d = end.clocks[0] - begin.clocks[0]
        if any(y - x != d for x, y in zip(begin.clocks, end.clocks)):
            continue
        if d != 0 and min(min(c.clocks) for c in lap_states) < 1:
            continue
        for i in range(s, s + L):
            for p in starving:
                if configs[i + 1].clocks[p] > configs[i].clocks[p]:
                    return False
        return True
    return False


def _lasso_violation(
    g, space: StateSpace, ex: Explored, walk: list[int], kind: str, message: str,
    starving: tuple[int, ...], protocol, exact: bool, fairness: str = STRONG,
) -> Violation:
    cycle_node = ex.transitions[walk[0]].src
    prefix = _prefix(ex, cycle_node)
    path = prefix + walk
    start = ex.transitions[path[0]].src
    trace = None
    if exact:
        trace = _engine_trace(g, ex.nodes[start], [ex.transitions[j].selected for j in path], protocol)
        expected = [ex.nodes[start]] + [ex.nodes[ex.transitions[j].dst] for j in path]
        if trace is not None and trace.configurations() != expected:
            trace = None
    validated = trace is not None
    if trace is None:
        trace = _manual_trace(g, ex, path, start, protocol)
    trace.status = LASSO
    trace.lasso_start = len(prefix)
    if validated:
        validated = validate_lasso_raw(trace, protocol, starving=starving)
        if validated:
            verdict = classify_lasso(g, trace, trace.lasso_start, protocol)
            validated = (
                verdict.strongly_fair_admissible if fairness == STRONG else verdict.weakly_fair_admissible
            )
    return Violation(kind, message, ex.nodes[cycle_node], trace, starving, validated)


def _starved_on(ex: Explored, walk: list[int], crashed) -> tuple[int, ...]:
    n = len(ex.nodes[0].clocks)
    raised = frozenset().union(*(ex.transitions[j].raised for j in walk))
    return tuple(p for p in range(n) if p not in crashed and p not in raised)


def _edges_for(ex: Explored, keep: Callable[[Transition], bool]):
    idx = [j for j, t in enumerate(ex.transitions) if keep(t)]
    edges = [(ex.transitions[j].src, ex.transitions[j].dst, frozenset(ex.transitions[j].selected)) for j in idx]
    return idx, edges


def _search_starvation(ex: Explored, fairness: str, targets: Sequence[int], crashed):
    enabled = dict(enumerate(ex.enabled))
    for p in targets:
        idx, edges = _edges_for(ex, lambda t, p=p: p not in t.raised)
        found = find_fair_cycle(edges, enabled, fairness, nodes=range(len(ex.nodes)))
        if found:
            walk = [idx[i] for i in found]
            return walk, _starved_on(ex, walk, crashed)
    return None


def _fill(report: CheckReport | None, ex: Explored) -> None:
    if report is not None:
        report.states = max(report.states, len(ex.nodes))
        report.transitions = max(report.transitions, sum(not t.extra for t in ex.transitions))
        report.boundary = max(report.boundary, ex.boundary)


def find_starvation_lasso(
    g: Graph,
    crashed: Iterable[int] = (),
    span: int = 4,
    fairness: str = STRONG,
    initial: Iterable[Configuration] | None = None,
    target: int | None = None,
    protocol: Protocol = UFTSS_PROTOCOL,
    report: CheckReport | None = None,
) -> Violation | None:
    """A reachable fair lasso on which some correct processor never raises its
    clock, or a reachable terminal configuration; None if neither exists
    within span ``span``."""
    space = StateSpace(g, crashed, span, protocol)
    crashed = space.crashed
    targets = [target] if target is not None else [p for p in range(g.n) if p not in crashed]
    init = list(initial) if initial is not None else None
    over = space.explore(init, overapprox=True)
    _fill(report, over)
    hit = _search_starvation(over, fairness, targets, crashed)
    if hit is not None:
        exact = space.explore(init, overapprox=False)
        real = _search_starvation(exact, fairness, targets, crashed)
        for ex, found, is_exact in ((exact, real, True), (over, hit, False)):
            if found is None:
                continue
            walk, starving = found
            v = _lasso_violation(
                g, space, ex, walk, STARVATION,
                f"{fairness}ly fair lasso starves p{','.join(map(str, starving))}",
                starving, protocol, is_exact, fairness,
            )
            if v.validated or not is_exact:
                return v
    stuck = over.terminal_nodes()
    if stuck:
        return _freeze_violation(g, space, init, over, stuck[0], protocol)
    return None


def _freeze_violation(g, space, init, over: Explored, node: int, protocol) -> Violation:
    c = over.nodes[node]
    exact = space.explore(init, overapprox=False)
    trace = None
    if c in exact.index:
        path = _prefix(exact, exact.index[c])
        start = exact.nodes[exact.transitions[path[0]].src] if path else c
        trace = _engine_trace(g, start, [exact.transitions[j].selected for j in path], protocol)
        if trace is not None and trace.status != TERMINAL:
            trace = None
    validated = trace is not None
    if trace is None:
        path = _prefix(over, node)
        trace = _manual_trace(g, over, path, node, protocol)
        trace.status = TERMINAL
    return Violation(FREEZE, f"terminal configuration {c}: no correct processor enabled",
                     c, trace, tuple(c.correct()), validated)


def check_convergence_reachability(
    g: Graph,
    crashed: Iterable[int] = (),
    span: int = 3,
    initial: Iterable[Configuration] | None = None,
    protocol: Protocol = UFTSS_PROTOCOL,
) -> CheckReport:
    """Reachable terminal configurations, and strongly fair lassos that never
    enter Gamma-1."""
    space = StateSpace(g, crashed, span, protocol)
    report = CheckReport(CONVERGENCE, span)
    init = list(initial) if initial is not None else None
    over = space.explore(init, overapprox=True)
    _fill(report, over)

    def search(ex: Explored):
        bad = [i for i, c in enumerate(ex.nodes) if not is_gamma1(g, c)]
        idx, edges = _edges_for(ex, lambda t: True)
        found = find_fair_cycle(edges, dict(enumerate(ex.enabled)), STRONG, nodes=bad)
        return None if found is None else [idx[i] for i in found]

    if search(over) is not None:
        exact = space.explore(init, overapprox=False)
        walk = search(exact)
        if walk is not None:
            v = _lasso_violation(g, space, exact, walk, CONVERGENCE,
                                 "strongly fair lasso avoids Gamma-1", (), protocol, True)
        else:
            walk = search(over)
            v = _lasso_violation(g, space, over, walk, CONVERGENCE,
                                 "strongly fair lasso avoids Gamma-1", (), protocol, False)
        report.append(v)
    for node in over.terminal_nodes():
        report.append(_freeze_violation(g, space, init, over, node, protocol))
    report.notes.append(f"complete only within clock span {span}")
    return report


def starvation_report(
    g: Graph, crashed: Iterable[int] = (), span: int = 4, fairness: str = STRONG,
    initial: Iterable[Configuration] | None = None, protocol: Protocol = UFTSS_PROTOCOL,
) -> CheckReport:
    report = CheckReport(f"{STARVATION}:{fairness}", span)
    v = find_starvation_lasso(g, crashed, span, fairness, initial, protocol=protocol, report=report)
    if v is not None:
        report.append(v)
    report.notes.append(f"complete only within clock span {span}")
    return report


__all__ = [
    "StateSpace", "Explored", "Transition", "Violation", "CheckReport",
    "check_closure", "check_blocking", "check_priority", "check_potential_decrease",
    "find_fair_cycle", "walk_is_fair", "find_starvation_lasso",
    "check_convergence_reachability", "starvation_report", "validate_lasso_raw",
    "STRONG", "WEAK", "NOT_ENABLED",
]
