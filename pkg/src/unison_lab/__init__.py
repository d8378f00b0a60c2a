"""Simulator and bounded checker for UFTSS, a minimal fault-tolerant
self-stabilizing asynchronous unison protocol."""

from .core import (
    Configuration,
    Potential,
    canonicalize,
    is_gamma1,
    is_gamma1_star,
    potential,
    potential_less,
)
from .engine import CrashPlan, Step, StopCondition, Trace, metrics, replay, run, step
from .protocol import C1, C2, N, NOT_ENABLED, UFTSS, RuleDecision, decide
from .scheduler import LRU, Daemon, RoundRobin, Scripted, SeededRandom, classify_lasso
from .topology import Graph, chain, from_edges, parse_descriptor, ring, y_network

__all__ = [
    "Configuration", "Potential", "canonicalize", "is_gamma1", "is_gamma1_star",
    "potential", "potential_less",
    "CrashPlan", "Step", "StopCondition", "Trace", "metrics", "replay", "run", "step",
    "C1", "C2", "N", "NOT_ENABLED", "UFTSS", "RuleDecision", "decide",
    "LRU", "Daemon", "RoundRobin", "Scripted", "SeededRandom", "classify_lasso",
    "Graph", "chain", "from_edges", "parse_descriptor", "ring", "y_network",
]
