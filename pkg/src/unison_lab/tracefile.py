"""Plain-text trace serialization.

One header line, then one flat ``key=value`` record per step::

    trace topology=chain:5 clocks=1,7,6,7,13 crashes=1@0 daemon=locally-central policy=lru seed= status=max-steps
    step=0 selected=0,3 rules=0:N,3:C1 clocks=6,7,6,9,13 crashed=1 gamma1=0

Optional header fields ``canonical=1`` and ``lasso_start=<i>`` and the step
field ``shift=<s>`` are written only when they carry information. Lines
starting with ``#`` are comments.
"""

from __future__ import annotations

from pathlib import Path

from .core import Configuration, format_int_list, parse_int_list
from .engine import Step, Trace, parse_crash_plan
from .scheduler import Daemon
from .topology import parse_descriptor


class TraceFormatError(ValueError):
    pass


def _fields(line: str, lineno: int) -> dict[str, str]:
    out = {}
    for token in line.split():
        key, sep, value = token.partition("=")
        if not sep:
            raise TraceFormatError(f"line {lineno}: token {token!r} is not key=value")
        if key in out:
            raise TraceFormatError(f"line {lineno}: duplicate field {key!r}")
        out[key] = value
    return out


def format_header(t: Trace) -> str:
    parts = [
        "trace",
        f"topology={t.graph}",
        f"clocks={format_int_list(t.initial.clocks)}",
        f"crashes={t.crash_plan}",
        f"daemon={t.daemon.value}",
        f"policy={t.policy}",
        f"seed={'' if t.seed is None else t.seed}",
        f"status={t.status}",
    ]
    if t.canonical:
        parts.append("canonical=1")
    if t.lasso_start is not None:
        parts.append(f"lasso_start={t.lasso_start}")
    return " ".join(parts)


def format_step(s: Step) -> str:
    rules = ",".join(f"{p}:{s.fired[p]}" for p in sorted(s.fired))
    line = (
        f"step={s.index} selected={format_int_list(sorted(s.selected))} rules={rules} "
        f"clocks={format_int_list(s.clocks_after)} crashed={format_int_list(sorted(s.crashed_after))} "
        f"gamma1={int(s.gamma1)}"
    )
    if s.shift:
        line += f" shift={s.shift}"
    return line


def dumps(t: Trace) -> str:
    return "".join(line + "\n" for line in [format_header(t), *map(format_step, t.steps)])


def dump(t: Trace, path: str | Path) -> None:
    Path(path).write_text(dumps(t))


_HEADER_REQUIRED = ("topology", "clocks", "crashes", "daemon", "policy", "seed", "status")
_STEP_REQUIRED = ("step", "selected", "rules", "clocks", "crashed", "gamma1")


def loads(text: str) -> Trace:
    lines = [
        (i, raw.strip()) for i, raw in enumerate(text.splitlines(), 1)
        if raw.strip() and not raw.lstrip().startswith("#")
    ]
    if not lines:
        raise TraceFormatError("empty trace")
    lineno, head = lines[0]
    if not head.startswith("trace ") and head != "trace":
        raise TraceFormatError(f"line {lineno}: trace header must start with 'trace'")
    h = _fields(head[len("trace"):], lineno)
    missing = [k for k in _HEADER_REQUIRED if k not in h]
    if missing:
        raise TraceFormatError(f"line {lineno}: header lacks {','.join(missing)}")
    try:
        g = parse_descriptor(h["topology"])
        plan = parse_crash_plan(h["crashes"])
        clocks = parse_int_list(h["clocks"])
        daemon = Daemon.parse(h["daemon"])
        seed = int(h["seed"]) if h["seed"] else None
        lasso = int(h["lasso_start"]) if "lasso_start" in h else None
    except ValueError as exc:
        raise TraceFormatError(f"line {lineno}: {exc}") from None
    if len(clocks) != g.n:
        raise TraceFormatError(f"line {lineno}: {len(clocks)} clocks for {g.n} processors")
    initial = Configuration.of(clocks, plan.at(0))
    trace = Trace(
        g, initial, plan, [], daemon, h["policy"], seed, h["status"],
        h.get("canonical") == "1", lasso,
    )
    for lineno, line in lines[1:]:
        f = _fields(line, lineno)
        missing = [k for k in _STEP_REQUIRED if k not in f]
        if missing:
            raise TraceFormatError(f"line {lineno}: step lacks {','.join(missing)}")
        try:
            fired = {}
            for item in filter(None, f["rules"].split(",")):
                p, _, rule = item.partition(":")
                fired[int(p)] = rule
            step = Step(
                index=int(f["step"]),
                selected=tuple(parse_int_list(f["selected"])),
                fired=fired,
                clocks_after=tuple(parse_int_list(f["clocks"])),
                crashed_after=frozenset(parse_int_list(f["crashed"])),
                gamma1=f["gamma1"] == "1",
                shift=int(f.get("shift", "0")),
            )
        except ValueError as exc:
            raise TraceFormatError(f"line {lineno}: {exc}") from None
        if step.index != len(trace.steps):
            raise TraceFormatError(f"line {lineno}: expected step={len(trace.steps)}")
        if len(step.clocks_after) != g.n:
            raise TraceFormatError(f"line {lineno}: wrong clock vector length")
        trace.steps.append(step)
    return trace


def load(path: str | Path) -> Trace:
    return loads(Path(path).read_text())


def plot_rows(t: Trace) -> list[tuple[int, int, int, int, str]]:
    """(step, processor, clock, crashed, rule) for every step and processor."""
    rows = []
    for s in t.steps:
        for p in range(t.graph.n):
            rows.append((s.index, p, s.clocks_after[p], int(p in s.crashed_after), s.fired.get(p, "")))
    return rows
