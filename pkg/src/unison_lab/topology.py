"""Immutable undirected topologies: chains, rings, the degree-3 "Y" gadget,
and arbitrary validated graphs."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable


class TopologyError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    n: int
    adjacency: tuple[tuple[int, ...], ...]
    descriptor: str = ""

    def neighbors(self, p: int) -> tuple[int, ...]:
        return self.adjacency[p]

    def degree(self, p: int) -> int:
        return len(self.adjacency[p])

    def edges(self) -> list[tuple[int, int]]:
        return [(p, q) for p in range(self.n) for q in self.adjacency[p] if p < q]

    def adjacent(self, p: int, q: int) -> bool:
        return q in self.adjacency[p]

    def __str__(self) -> str:
        return self.descriptor or edges_descriptor(self.n, self.edges())


def edges_descriptor(n: int, edges: Iterable[tuple[int, int]]) -> str:
    body = ",".join(f"{u}-{v}" for u, v in sorted(tuple(sorted(e)) for e in edges))
    return f"edges:{n}:{body}"


def from_edges(n: int, edges: Iterable[tuple[int, int]], descriptor: str = "") -> Graph:
    """Build a graph from an edge list, rejecting anything that is not a simple,
    symmetric, connected graph on ids 0..n-1."""
    if n < 1:
        raise TopologyError(f"graph needs at least one processor, got n={n}")
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise TopologyError(f"edge {u}-{v} references a node outside 0..{n - 1}")
        if u == v:
            raise TopologyError(f"self-loop on node {u}")
        nbrs[u].add(v)
        nbrs[v].add(u)
    g = Graph(n, tuple(tuple(sorted(s)) for s in nbrs), descriptor)
    validate(g)
    if not descriptor:
        g = Graph(g.n, g.adjacency, edges_descriptor(n, g.edges()))
    return g


def validate(g: Graph) -> None:
    if len(g.adjacency) != g.n:
        raise TopologyError("adjacency length does not match n")
    for p, row in enumerate(g.adjacency):
        if p in row:
            raise TopologyError(f"node {p} lists itself as a neighbor")
        for q in row:
            if not 0 <= q < g.n:
                raise TopologyError(f"node {p} has out-of-range neighbor {q}")
            if p not in g.adjacency[q]:
                raise TopologyError(f"asymmetric adjacency between {p} and {q}")
    if any(math.isinf(d) for d in _bfs(g, 0)):
        raise TopologyError("graph is not connected")


def chain(n: int) -> Graph:
    """Path p0 - p1 - ... - p(n-1)."""
    if n < 1:
        raise TopologyError(f"chain needs n >= 1, got {n}")
    return from_edges(n, [(i, i + 1) for i in range(n - 1)], f"chain:{n}")


def ring(n: int) -> Graph:
    if n < 3:
        raise TopologyError(f"ring needs n >= 3, got {n}")
    return from_edges(n, [(i, (i + 1) % n) for i in range(n)], f"ring:{n}")


def y_network(r: int) -> Graph:
    """Chain p0..p(r+1) with two leaves q, q' hanging off p(r+1).

    Ids: chain nodes are 0..r+1, q is r+2 and q' is r+3.
    """
    if r < 0:
        raise TopologyError(f"y_network needs r >= 0, got {r}")
    hub = r + 1
    edges = [(i, i + 1) for i in range(hub)] + [(hub, r + 2), (hub, r + 3)]
    return from_edges(r + 4, edges, f"y:{r}")


def max_degree(g: Graph) -> int:
    return max(len(row) for row in g.adjacency)


def _bfs(g: Graph, src: int) -> list[float]:
    dist: list[float] = [math.inf] * g.n
    dist[src] = 0
    queue = deque([src])
    while queue:
        p = queue.popleft()
        for q in g.adjacency[p]:
            if math.isinf(dist[q]):
                dist[q] = dist[p] + 1
                queue.append(q)
    return dist


def distance(g: Graph, p: int, q: int) -> int | float:
    """Hop count of a shortest path; ``math.inf`` if q is unreachable."""
    for x in (p, q):
        if not 0 <= x < g.n:
            raise TopologyError(f"node {x} not in graph")
    d = _bfs(g, p)[q]
    return d if math.isinf(d) else int(d)


def parse_graph_text(text: str) -> Graph:
    """Parse the plain graph file format: ``n=<count>`` then ``edge u v`` lines."""
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("n="):
            if n is not None:
                raise TopologyError(f"line {lineno}: duplicate n= line")
            try:
                n = int(line[2:])
            except ValueError:
                raise TopologyError(f"line {lineno}: bad node count {line[2:]!r}") from None
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] != "edge":
            raise TopologyError(f"line {lineno}: expected 'edge u v', got {line!r}")
        try:
            edges.append((int(parts[1]), int(parts[2])))
        except ValueError:
            raise TopologyError(f"line {lineno}: non-integer node id") from None
    if n is None:
        raise TopologyError("missing n=<count> line")
    return from_edges(n, edges)


def format_graph_text(g: Graph) -> str:
    lines = [f"n={g.n}"] + [f"edge {u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def load_graph(path: str | Path) -> Graph:
    return parse_graph_text(Path(path).read_text())


def parse_descriptor(desc: str) -> Graph:
    """Resolve ``chain:N``, ``ring:N``, ``y:R``, ``edges:N:u-v,...`` or
    ``file:PATH`` into a graph."""
    kind, _, rest = desc.partition(":")
    try:
        if kind == "chain":
            return chain(int(rest))
        if kind == "ring":
            return ring(int(rest))
        if kind in ("y", "y_network"):
            return y_network(int(rest))
        if kind == "edges":
            count, _, body = rest.partition(":")
            edges = []
            for item in filter(None, body.split(",")):
                u, _, v = item.partition("-")
                edges.append((int(u), int(v)))
            return from_edges(int(count), edges)
    except ValueError as exc:
        if isinstance(exc, TopologyError):
            raise
        raise TopologyError(f"bad topology descriptor {desc!r}") from None
    if kind == "file":
        return load_graph(rest)
    raise TopologyError(f"unknown topology kind {kind!r} in {desc!r}")
