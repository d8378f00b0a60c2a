"""Vectorized LRU runs of UFTSS across many initial configurations at once.

Used for large seeded sweeps. Each row of the batch follows exactly the
trajectory that ``engine.run`` with the ``LRU`` policy would produce; the
test suite checks that step by step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Configuration
from .scheduler import Daemon
from .topology import Graph

_BIG = np.iinfo(np.int64).max // 4


@dataclass
class BatchResult:
    """Per-row summary; row i corresponds to ``inits[i]``."""

    final_clocks: np.ndarray          # (R, n)
    steps_to_gamma1: np.ndarray       # (R,) first index in Gamma-1 thereafter, -1 if final not in Gamma-1
    max_increment_gap: np.ndarray     # (R, n) post-Gamma-1 gap, -1 for crashed or no Gamma-1
    increments: np.ndarray            # (R, n)
    terminal_at: np.ndarray           # (R,) step index where no processor was enabled, -1 if never
    steps: int

    def gamma1_at_end(self) -> np.ndarray:
        return self.steps_to_gamma1 >= 0


class _Topo:
    def __init__(self, g: Graph):
        n = g.n
        deg = np.array([len(a) for a in g.adjacency])
        width = max(1, int(deg.max()))
        nb = np.zeros((n, width), dtype=np.int64)
        valid = np.zeros((n, width), dtype=bool)
        for p, row in enumerate(g.adjacency):
            nb[p, : len(row)] = row
            valid[p, : len(row)] = True
        self.n = n
        self.deg = deg
        self.nb = nb
        self.valid = valid
        self.adj = np.zeros((n, n), dtype=bool)
        for p, row in enumerate(g.adjacency):
            self.adj[p, list(row)] = True
        eu, ev = zip(*g.edges()) if g.edges() else ((), ())
        self.eu = np.array(eu, dtype=np.int64)
        self.ev = np.array(ev, dtype=np.int64)


def _decide(t: _Topo, h: np.ndarray):
    """Enabled mask and write values for every (row, processor)."""
    hn = h[:, t.nb]                                   # (R, n, w)
    lo = np.where(t.valid, np.maximum(hn - 1, 0), 0).max(axis=2)
    hi = np.where(t.valid, hn + 1, _BIG).min(axis=2)
    size = hi - lo + 1
    up = h + 1
    n_write = np.where((up >= lo) & (up <= hi), up, lo)
    total = np.where(t.valid, hn, 0).sum(axis=2)
    deg = np.maximum(t.deg, 1)
    floor_avg = total // deg
    ceil_avg = -((-total) // deg)
    isolated = t.deg == 0
    rule_n = (size >= 2) | isolated
    rule_c2 = (size == 1) & (h != lo) & ~isolated
    rule_c1 = (size <= 0) & (h != floor_avg) & (h != ceil_avg) & ~isolated
    write = np.where(rule_n, np.where(isolated, up, n_write), np.where(rule_c2, lo, floor_avg))
    return rule_n | rule_c1 | rule_c2, write


def _gamma1(t: _Topo, h: np.ndarray) -> np.ndarray:
    if t.eu.size == 0:
        return np.ones(h.shape[0], dtype=bool)
    return (np.abs(h[:, t.eu] - h[:, t.ev]) <= 1).all(axis=1)


def run_lru_batch(
    g: Graph,
    inits: Sequence[Configuration],
    max_steps: int,
    daemon: Daemon = Daemon.LOCALLY_CENTRAL,
) -> BatchResult:
    """Run every initial configuration for ``max_steps`` LRU steps (or until
    terminal). Crashes are initial only."""
    if daemon not in (Daemon.CENTRAL, Daemon.LOCALLY_CENTRAL):
        raise ValueError("batch engine supports central and locally-central daemons")
    t = _Topo(g)
    n, R = g.n, len(inits)
    rows = np.arange(R)
    h = np.array([c.clocks for c in inits], dtype=np.int64).reshape(R, n)
    crashed = np.zeros((R, n), dtype=bool)
    for i, c in enumerate(inits):
        crashed[i, list(c.crashed)] = True
    last = np.full((R, n), -1, dtype=np.int64)
    active = np.ones(R, dtype=bool)
    terminal_at = np.full(R, -1, dtype=np.int64)
    inc_total = np.zeros((R, n), dtype=np.int64)

    in_g1 = _gamma1(t, h)
    g1_start = np.where(in_g1, 0, -1)
    cur_gap = np.zeros((R, n), dtype=np.int64)
    max_gap = np.zeros((R, n), dtype=np.int64)
    ids = np.arange(n)

    for k in range(max_steps):
        enabled, write = _decide(t, h)
        enabled &= ~crashed
        stuck = active & ~enabled.any(axis=1)
        if stuck.any():
            terminal_at[stuck] = k
            active &= ~stuck
        if not active.any():
            break
        key = np.where(enabled, (last + 1) * n + ids, _BIG)
        order = np.argsort(key, axis=1, kind="stable")
        selected = np.zeros((R, n), dtype=bool)
        if daemon is Daemon.CENTRAL:
            first = order[:, 0]
            selected[rows, first] = enabled[rows, first]
        else:
            blocked = np.zeros((R, n), dtype=bool)
            for j in range(n):
                cand = order[:, j]
                ok = enabled[rows, cand] & ~blocked[rows, cand]
                selected[rows, cand] |= ok
                blocked |= t.adj[cand] & ok[:, None]
        selected &= active[:, None]
        new_h = np.where(selected, write, h)
        raised = new_h > h
        inc_total += raised

        # gap bookkeeping for steps taken from a Gamma-1 configuration
        post = (g1_start >= 0) & active
        cur_gap = np.where(post[:, None], np.where(raised, 0, cur_gap + 1), cur_gap)
        max_gap = np.maximum(max_gap, cur_gap)

        last = np.where(selected, k, last)
        h = new_h
        now = _gamma1(t, h)
        left = ~now & active
        entered = now & (g1_start < 0) & active
        g1_start = np.where(left, -1, np.where(entered, k + 1, g1_start))
        reset = left | entered
        cur_gap[reset] = 0
        max_gap[reset] = 0

    gaps = np.where(crashed | (g1_start < 0)[:, None], -1, max_gap)
    return BatchResult(
        final_clocks=h,
        steps_to_gamma1=g1_start,
        max_increment_gap=gaps,
        increments=inc_total,
        terminal_at=terminal_at,
        steps=max_steps,
    )
