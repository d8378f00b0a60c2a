"""Configurations, legitimacy predicates, edge drifts and the drift potential."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .topology import Graph

CLOCK_MAX = 2**64 - 1


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class Configuration:
    clocks: tuple[int, ...]
    crashed: frozenset[int] = field(default_factory=frozenset)

    @classmethod
    def of(cls, clocks: Iterable[int], crashed: Iterable[int] = ()) -> "Configuration":
        return cls(tuple(int(h) for h in clocks), frozenset(crashed))

    @property
    def n(self) -> int:
        return len(self.clocks)

    def correct(self) -> list[int]:
        return [p for p in range(len(self.clocks)) if p not in self.crashed]

    def with_clocks(self, clocks: Iterable[int]) -> "Configuration":
        return Configuration(tuple(clocks), self.crashed)

    def with_crashed(self, crashed: Iterable[int]) -> "Configuration":
        return Configuration(self.clocks, frozenset(crashed))

    def __str__(self) -> str:
        return format_configuration(self)


def check_consistent(g: Graph, c: Configuration) -> None:
    if len(c.clocks) != g.n:
        raise ConfigurationError(f"configuration has {len(c.clocks)} clocks, graph has {g.n} nodes")
    for h in c.clocks:
        if not 0 <= h <= CLOCK_MAX:
            raise ConfigurationError(f"clock value {h} outside 0..2^64-1")
    for p in c.crashed:
        if not 0 <= p < g.n:
            raise ConfigurationError(f"crashed id {p} is not a node")


def is_gamma1(g: Graph, c: Configuration) -> bool:
    """Every neighboring pair, crashed processors included, is within drift 1."""
    h = c.clocks
    if len(h) != g.n:
        raise ConfigurationError("configuration does not match graph")
    return all(abs(h[p] - h[q]) <= 1 for p, q in g.edges())


def is_gamma1_star(g: Graph, c: Configuration) -> bool:
    """Drift bound restricted to pairs of correct processors."""
    h, dead = c.clocks, c.crashed
    if len(h) != g.n:
        raise ConfigurationError("configuration does not match graph")
    return all(
        abs(h[p] - h[q]) <= 1 for p, q in g.edges() if p not in dead and q not in dead
    )


def edge_drift(c: Configuration, e: tuple[int, int]) -> int:
    p, q = e
    return abs(c.clocks[p] - c.clocks[q])


def node_max_drift(g: Graph, c: Configuration, p: int) -> int:
    # isolated node: max over the empty set is 0
    h = c.clocks
    return max((abs(h[p] - h[q]) for q in g.adjacency[p]), default=0)


@dataclass(frozen=True)
class Potential:
    """Sparse drift histogram: drift value (>= 2) -> number of edges with it.

    Ordered lexicographically with the largest drift most significant; the
    empty potential is the minimum and corresponds exactly to Gamma-1.
    """

    items: tuple[tuple[int, int], ...] = ()

    @classmethod
    def from_counts(cls, counts: Mapping[int, int]) -> "Potential":
        for d, k in counts.items():
            if d < 2 or k < 0:
                raise ValueError(f"invalid potential entry {d}: {k}")
        return cls(tuple(sorted(((d, k) for d, k in counts.items() if k > 0), reverse=True)))

    @property
    def counts(self) -> dict[int, int]:
        return dict(self.items)

    def is_zero(self) -> bool:
        return not self.items

    def __lt__(self, other: "Potential") -> bool:
        return potential_less(self, other)

    def __le__(self, other: "Potential") -> bool:
        return self == other or potential_less(self, other)

    def __gt__(self, other: "Potential") -> bool:
        return potential_less(other, self)

    def __ge__(self, other: "Potential") -> bool:
        return self == other or potential_less(other, self)

    def __str__(self) -> str:
        return "{" + ",".join(f"{d}:{k}" for d, k in self.items) + "}"


def potential(g: Graph, c: Configuration) -> Potential:
    h = c.clocks
    hist = Counter(abs(h[p] - h[q]) for p, q in g.edges())
    return Potential.from_counts({d: k for d, k in hist.items() if d >= 2})


def potential_less(a: Potential | Mapping[int, int], b: Potential | Mapping[int, int]) -> bool:
    ca = a.counts if isinstance(a, Potential) else dict(a)
    cb = b.counts if isinstance(b, Potential) else dict(b)
    for d in sorted(set(ca) | set(cb), reverse=True):
        x, y = ca.get(d, 0), cb.get(d, 0)
        if x != y:
            return x < y
    return False


def canonicalize(g: Graph, c: Configuration) -> tuple[Configuration, int]:
    """Shift all clocks down so the minimum becomes 1, unless some clock is 0.

    The target is 1 rather than 0 because the protocol treats a neighbor clock
    of 0 specially; with no zero on either side the guards only see differences.
    """
    shift = canonical_shift(c.clocks)
    if shift == 0:
        return c, 0
    return Configuration(tuple(h - shift for h in c.clocks), c.crashed), shift


def canonical_shift(clocks: tuple[int, ...]) -> int:
    lo = min(clocks)
    return lo - 1 if lo >= 1 else 0


def parse_configuration(text: str, n: int | None = None) -> Configuration:
    """Parse ``clocks=1,7,6 crashed=1`` (crashed may be empty or omitted)."""
    fields = {}
    for token in text.split():
        key, sep, value = token.partition("=")
        if not sep or key not in ("clocks", "crashed") or key in fields:
            raise ConfigurationError(f"bad configuration token {token!r}")
        fields[key] = value
    if "clocks" not in fields:
        raise ConfigurationError("configuration literal needs clocks=")
    try:
        clocks = parse_int_list(fields["clocks"])
        crashed = parse_int_list(fields.get("crashed", ""))
    except ValueError:
        raise ConfigurationError(f"non-integer entry in {text!r}") from None
    if not clocks:
        raise ConfigurationError("empty clock vector")
    if any(h < 0 for h in clocks):
        raise ConfigurationError("clocks must be non-negative")
    if n is not None and len(clocks) != n:
        raise ConfigurationError(f"expected {n} clocks, got {len(clocks)}")
    return Configuration.of(clocks, crashed)


def format_configuration(c: Configuration) -> str:
    return f"clocks={format_int_list(c.clocks)} crashed={format_int_list(sorted(c.crashed))}"


def parse_int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def format_int_list(values: Iterable[int]) -> str:
    return ",".join(str(v) for v in values)


def random_configuration(
    n: int, seed: int, max_clock: int, crashes: int = 0
) -> Configuration:
    """Clocks uniform on 0..max_clock, then ``crashes`` distinct crashed ids,
    all drawn from one seeded stream."""
    rng = random.Random(seed)
    clocks = [rng.randint(0, max_clock) for _ in range(n)]
    crashed = rng.sample(range(n), crashes) if crashes else []
    return Configuration.of(clocks, crashed)
