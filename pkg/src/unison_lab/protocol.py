"""The UFTSS unison protocol as guarded commands, behind a small protocol
interface so the engine and checker never special-case it.

Rules, evaluated on the neighbor-clock intersection ``Inter``:

* N  : ``|Inter| >= 2``                      -> ``H := next(Inter, H)``
* C1 : ``Inter`` empty, ``H`` not the floor/ceil of the neighbor average
                                               -> ``H := floor(average)``
* C2 : ``Inter == {h}`` and ``H != h``        -> ``H := h``
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Sequence

from .core import Configuration
from .topology import Graph

N = "N"
C1 = "C1"
C2 = "C2"
NOT_ENABLED = "NotEnabled"
RULES = (N, C1, C2)


@dataclass(frozen=True)
class ClockInterval:
    """Integer interval ``[lo, hi]``; ``hi=None`` means unbounded above."""

    lo: int = 0
    hi: int | None = None
    empty: bool = False

    @classmethod
    def closed(cls, lo: int, hi: int) -> "ClockInterval":
        if lo > hi:
            return cls.nothing()
        return cls(lo, hi)

    @classmethod
    def nothing(cls) -> "ClockInterval":
        return cls(0, -1, True)

    @classmethod
    def unbounded(cls) -> "ClockInterval":
        return cls(0, None)

    @property
    def size(self) -> float:
        if self.empty:
            return 0
        if self.hi is None:
            return math.inf
        return self.hi - self.lo + 1

    def __contains__(self, h: int) -> bool:
        return not self.empty and h >= self.lo and (self.hi is None or h <= self.hi)

    def intersect(self, other: "ClockInterval") -> "ClockInterval":
        if self.empty or other.empty:
            return ClockInterval.nothing()
        lo = max(self.lo, other.lo)
        if self.hi is None or other.hi is None:
            hi = other.hi if self.hi is None else self.hi
        else:
            hi = min(self.hi, other.hi)
        if hi is not None and lo > hi:
            return ClockInterval.nothing()
        return ClockInterval(lo, hi)

    def __str__(self) -> str:
        if self.empty:
            return "{}"
        return f"[{self.lo},{'inf' if self.hi is None else self.hi}]"


def poss(h: int) -> ClockInterval:
    """Clock values within drift 1 of a neighbor at ``h`` (clamped at 0)."""
    return ClockInterval(h - 1 if h else 0, h + 1)


def inter(neighbor_clocks: Sequence[int]) -> ClockInterval:
    """Intersection of ``poss`` over the neighbors; unbounded when there are none."""
    acc = ClockInterval.unbounded()
    for h in neighbor_clocks:
        acc = acc.intersect(poss(h))
    return acc


def next_clock(interval: ClockInterval, h: int) -> int:
    """``h + 1`` if it stays inside the interval, else the interval minimum."""
    if interval.empty:
        raise ValueError("next_clock on an empty interval")
    return h + 1 if h + 1 in interval else interval.lo


@dataclass(frozen=True)
class RuleDecision:
    rule: str
    write_value: int | None = None

    @property
    def enabled(self) -> bool:
        return self.rule != NOT_ENABLED


DISABLED = RuleDecision(NOT_ENABLED)


class Protocol:
    """A minimal guarded-command protocol: the only variable is the clock."""

    name = "protocol"

    def decide(self, g: Graph, c: Configuration, p: int) -> RuleDecision:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<{type(self).__name__}>"


def decide_local(h: int, neighbor_clocks: Sequence[int]) -> RuleDecision:
    """UFTSS decision from a processor's own clock and its neighbors' clocks."""
    if not neighbor_clocks:
        # no neighbor constrains the clock: behave as an unbounded interval
        return RuleDecision(N, h + 1)
    lo = 0
    hi = None
    for hq in neighbor_clocks:
        a = hq - 1 if hq else 0
        if a > lo:
            lo = a
        if hi is None or hq + 1 < hi:
            hi = hq + 1
    size = hi - lo + 1
    if size >= 2:
        return RuleDecision(N, h + 1 if h + 1 <= hi and h + 1 >= lo else lo)
    if size == 1:
        return DISABLED if h == lo else RuleDecision(C2, lo)
    total, deg = sum(neighbor_clocks), len(neighbor_clocks)
    floor_avg = total // deg
    ceil_avg = -(-total // deg)
    if h == floor_avg or h == ceil_avg:
        return DISABLED
    return RuleDecision(C1, floor_avg)


class UFTSS(Protocol):
    name = "uftss"

    def decide(self, g: Graph, c: Configuration, p: int) -> RuleDecision:
        h = c.clocks
        return decide_local(h[p], [h[q] for q in g.adjacency[p]])


UFTSS_PROTOCOL = UFTSS()


def decide(g: Graph, c: Configuration, p: int) -> RuleDecision:
    return UFTSS_PROTOCOL.decide(g, c, p)


def enabled_decisions(
    g: Graph, c: Configuration, protocol: Protocol = UFTSS_PROTOCOL
) -> dict[int, RuleDecision]:
    """Decisions of every correct processor that has an enabled rule."""
    out = {}
    for p in range(g.n):
        if p in c.crashed:
            continue
        d = protocol.decide(g, c, p)
        if d.enabled:
            out[p] = d
    return out


DecisionFn = Callable[[Graph, Configuration, int], RuleDecision]


def locality_check(
    decision_fn: DecisionFn,
    g: Graph,
    c: Configuration,
    p: int,
    trials: int = 32,
    seed: int = 0,
) -> bool:
    """True iff randomly perturbing clocks outside ``N_p + {p}`` never changes
    the decision at ``p``."""
    rng = random.Random(seed)
    keep = set(g.adjacency[p]) | {p}
    far = [x for x in range(g.n) if x not in keep]
    if not far:
        return True
    base = decision_fn(g, c, p)
    top = max(c.clocks) + 5
    for _ in range(trials):
        clocks = list(c.clocks)
        for x in far:
            clocks[x] = rng.randint(0, top)
        if decision_fn(g, c.with_clocks(clocks), p) != base:
            return False
    return True
