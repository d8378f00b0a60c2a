"""Daemons (which selections are legal), selection policies, and fairness
classification of lassos."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .core import Configuration, canonicalize, parse_int_list
from .protocol import UFTSS_PROTOCOL, Protocol
from .topology import Graph


class Daemon(enum.Enum):
    CENTRAL = "central"
    LOCALLY_CENTRAL = "locally-central"
    DISTRIBUTED = "distributed"
    SYNCHRONOUS = "synchronous"

    @classmethod
    def parse(cls, text: str) -> "Daemon":
        try:
            return cls(text)
        except ValueError:
            raise ValueError(f"unknown daemon {text!r}") from None


class ScriptViolation(Exception):
    def __init__(self, step: int, reason: str):
        super().__init__(f"script step {step}: {reason}")
        self.step = step
        self.reason = reason


class ScriptExhausted(Exception):
    pass


def legality_problem(
    daemon: Daemon, g: Graph, selection: Iterable[int], enabled: Iterable[int]
) -> str | None:
    """Why ``selection`` is not a legal choice for ``daemon``, or None if it is."""
    sel = list(selection)
    en = set(enabled)
    if not sel:
        return "empty selection"
    if len(set(sel)) != len(sel):
        return "duplicate processor in selection"
    bad = [p for p in sel if p not in en]
    if bad:
        return f"processor(s) {','.join(map(str, bad))} not enabled"
    if daemon is Daemon.CENTRAL and len(sel) != 1:
        return "central daemon selects exactly one processor"
    if daemon is Daemon.LOCALLY_CENTRAL:
        chosen = set(sel)
        for p in sel:
            for q in g.adjacency[p]:
                if q in chosen:
                    return f"neighbors {min(p, q)} and {max(p, q)} selected together"
    if daemon is Daemon.SYNCHRONOUS and set(sel) != en:
        return "synchronous daemon selects every enabled processor"
    return None


def is_legal(daemon: Daemon, g: Graph, selection: Iterable[int], enabled: Iterable[int]) -> bool:
    return legality_problem(daemon, g, selection, enabled) is None


def greedy_selection(daemon: Daemon, g: Graph, ordered: Sequence[int]) -> tuple[int, ...]:
    """Maximal legal selection built by scanning ``ordered`` front to back."""
    if not ordered:
        return ()
    if daemon is Daemon.CENTRAL:
        return (ordered[0],)
    if daemon is Daemon.LOCALLY_CENTRAL:
        chosen: list[int] = []
        taken = set()
        for p in ordered:
            if not any(q in taken for q in g.adjacency[p]):
                chosen.append(p)
                taken.add(p)
        return tuple(chosen)
    return tuple(ordered)


class History:
    """Step index of each processor's most recent execution (-1: never)."""

    def __init__(self, n: int):
        self.last = [-1] * n

    def record(self, step: int, selected: Iterable[int]) -> None:
        for p in selected:
            self.last[p] = step


class Policy:
    descriptor = "policy"
    seed: int | None = None

    def select(
        self, daemon: Daemon, g: Graph, c: Configuration, enabled: Sequence[int],
        history: History, step: int,
    ) -> tuple[int, ...]:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.descriptor}>"


class LRU(Policy):
    """Least recently executed first, ties by ascending id."""

    descriptor = "lru"

    def select(self, daemon, g, c, enabled, history, step):
        last = history.last
        ordered = sorted(enabled, key=lambda p: (last[p], p))
        return greedy_selection(daemon, g, ordered)


class RoundRobin(Policy):
    descriptor = "round-robin"

    def __init__(self):
        self.cursor = 0

    def select(self, daemon, g, c, enabled, history, step):
        n = g.n
        ordered = sorted(enabled, key=lambda p: (p - self.cursor) % n)
        sel = greedy_selection(daemon, g, ordered)
        if sel:
            self.cursor = (sel[0] + 1) % n
        return sel


class SeededRandom(Policy):
    """Uniformly random maximal legal selection from a seeded stream."""

    def __init__(self, seed: int):
        self.seed = seed
        self.rng = random.Random(seed)
        self.descriptor = f"random:{seed}"

    def select(self, daemon, g, c, enabled, history, step):
        ordered = list(enabled)
        self.rng.shuffle(ordered)
        return greedy_selection(daemon, g, ordered)


class Scripted(Policy):
    """Replays a fixed list of selections; each is validated when used."""

    def __init__(self, selections: Sequence[Iterable[int]], descriptor: str = "script"):
        self.selections = [tuple(s) for s in selections]
        self.descriptor = descriptor

    @classmethod
    def from_file(cls, path: str | Path) -> "Scripted":
        return cls(parse_script(Path(path).read_text()), f"script:{path}")

    def select(self, daemon, g, c, enabled, history, step):
        if step >= len(self.selections):
            raise ScriptExhausted(step)
        sel = self.selections[step]
        problem = legality_problem(daemon, g, sel, enabled)
        if problem is None and any(p in c.crashed for p in sel):
            problem = "crashed processor selected"
        if problem:
            raise ScriptViolation(step, problem)
        return sel


def parse_script(text: str) -> list[tuple[int, ...]]:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(tuple(parse_int_list(line)))
    return out


def format_script(selections: Iterable[Iterable[int]]) -> str:
    return "".join(",".join(map(str, s)) + "\n" for s in selections)


def parse_policy(spec: str) -> Policy:
    """``lru``, ``round-robin``, ``random:<seed>`` or ``script:<path>``."""
    kind, _, arg = spec.partition(":")
    if kind == "lru" and not arg:
        return LRU()
    if kind == "round-robin" and not arg:
        return RoundRobin()
    if kind == "random":
        try:
            return SeededRandom(int(arg))
        except ValueError:
            raise ValueError(f"bad random seed in policy {spec!r}") from None
    if kind == "script" and arg:
        return Scripted.from_file(arg)
    raise ValueError(f"unknown policy {spec!r}")


def select(
    policy: Policy, daemon: Daemon, g: Graph, c: Configuration,
    enabled: Sequence[int], history: History, step: int = 0,
) -> tuple[int, ...]:
    if not enabled:
        raise ValueError("select called with no enabled processor")
    return policy.select(daemon, g, c, enabled, history, step)


@dataclass(frozen=True)
class FairnessVerdict:
    strongly_fair_admissible: bool
    weakly_fair_admissible: bool
    enabled_somewhere: frozenset[int] = frozenset()
    enabled_everywhere: frozenset[int] = frozenset()
    executed: frozenset[int] = frozenset()


def classify_cycle(
    enabled_sets: Sequence[Iterable[int]], executed_sets: Sequence[Iterable[int]]
) -> FairnessVerdict:
    """Fairness of the infinite repetition of one cycle, given the enabled set
    at each of its configurations and the selection of each of its steps."""
    if not enabled_sets:
        raise ValueError("empty cycle")
    sets = [frozenset(s) for s in enabled_sets]
    somewhere = frozenset().union(*sets)
    everywhere = frozenset.intersection(*sets)
    executed = frozenset().union(*(frozenset(s) for s in executed_sets))
    return FairnessVerdict(
        strongly_fair_admissible=somewhere <= executed,
        weakly_fair_admissible=everywhere <= executed,
        enabled_somewhere=somewhere,
        enabled_everywhere=everywhere,
        executed=executed,
    )


class NotALasso(ValueError):
    pass


def classify_lasso(
    g: Graph, trace, cycle_start: int, protocol: Protocol = UFTSS_PROTOCOL
) -> FairnessVerdict:
    """Fairness verdict for the cycle ``trace.steps[cycle_start:]``, which must
    lead back to the configuration at ``cycle_start`` up to a clock shift."""
    configs = trace.configurations()
    last = len(configs) - 1
    if not 0 <= cycle_start < last:
        raise NotALasso(f"cycle start {cycle_start} leaves an empty cycle (trace has {last} steps)")
    if canonicalize(g, configs[cycle_start])[0] != canonicalize(g, configs[last])[0]:
        raise NotALasso("final configuration does not match the cycle start")
    enabled_sets = []
    for c in configs[cycle_start:last]:
        enabled_sets.append(
            [p for p in range(g.n) if p not in c.crashed and protocol.decide(g, c, p).enabled]
        )
    executed = [s.selected for s in trace.steps[cycle_start:]]
    return classify_cycle(enabled_sets, executed)


def neutralized(
    g: Graph, before: Configuration, after: Configuration, p: int, executed: bool,
    protocol: Protocol = UFTSS_PROTOCOL,
) -> bool:
    """Enabled before the step, disabled after it, without having executed."""
    if executed or p in before.crashed or p in after.crashed:
        return False
    return protocol.decide(g, before, p).enabled and not protocol.decide(g, after, p).enabled
