"""Primitive-operation accounting.

Every arithmetic module reports the work it performs to a thread-local
counter set: modular multiplications and additions, bit shifts, conditional
selects, and big-integer multiplications/additions.  Vectorized kernels
report in bulk (the exact number of scalar operations the kernel executed);
instrumentation never changes computed values.
"""

from __future__ import annotations

import csv
import io
import threading
import time
from dataclasses import dataclass, field, fields

from .errors import UnknownLabel

FIELDS = ("modmul", "modadd", "shift", "select", "bigmul", "bigadd")

# Weights for the single weighted-total scalar printed per label.  Declared
# here and repeated in every report header; they are reporting conveniences,
# not measured quantities.
WEIGHTS = {
    "modmul": 1.0,
    "modadd": 0.1,
    "shift": 0.02,
    "select": 0.02,
    "bigmul": 1.0,
    "bigadd": 0.1,
}


@dataclass
class OpCounters:
    modmul: int = 0
    modadd: int = 0
    shift: int = 0
    select: int = 0
    bigmul: int = 0
    bigadd: int = 0
    wall_ns: int = 0

    def snapshot(self) -> "OpCounters":
        return OpCounters(**{f.name: getattr(self, f.name) for f in fields(self)})

    def delta_from(self, earlier: "OpCounters") -> "OpCounters":
        return OpCounters(
            **{f.name: getattr(self, f.name) - getattr(earlier, f.name) for f in fields(self)}
        )

    def merge(self, other: "OpCounters") -> None:
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))

    def weighted_total(self) -> float:
        return sum(WEIGHTS[name] * getattr(self, name) for name in FIELDS)

    def as_row(self, label: str) -> dict:
        row = {"label": label}
        row.update({name: getattr(self, name) for name in FIELDS})
        row["wall_ns"] = self.wall_ns
        return row


class _State(threading.local):
    def __init__(self):
        self.counters = OpCounters()
        self.scope_depth = 0


_state = _State()

# Measurement registry: label -> OpCounters delta.  Guarded by a lock so
# results from worker threads can be merged explicitly.
_registry: dict[str, OpCounters] = {}
_registry_lock = threading.Lock()


def counters() -> OpCounters:
    """The live counter set of the calling thread."""
    return _state.counters


def add(name: str, amount: int) -> None:
    """Bulk-report `amount` operations of kind `name` on this thread."""
    c = _state.counters
    setattr(c, name, getattr(c, name) + amount)


def reset() -> None:
    _state.counters = OpCounters()


def scoped_measure(label: str, thunk):
    """Run `thunk` and record its counter delta under `label`.

    Returns (result, delta).  Scopes nest: an inner scope's operations are
    also visible to the enclosing scope (deltas are cumulative snapshots),
    so nested scopes sum to their parent.  Concurrent scopes on one thread's
    counter set are not supported.
    """
    before = _state.counters.snapshot()
    _state.scope_depth += 1
    t0 = time.perf_counter_ns()
    try:
        result = thunk()
    finally:
        t1 = time.perf_counter_ns()
        _state.scope_depth -= 1
    delta = _state.counters.delta_from(before)
    delta.wall_ns = t1 - t0
    with _registry_lock:
        _registry[label] = delta
    return result, delta


def merge_thread_counters(source: OpCounters) -> None:
    """Explicitly fold a worker thread's counters into this thread's set."""
    _state.counters.merge(source)


def recorded(label: str) -> OpCounters:
    with _registry_lock:
        if label not in _registry:
            raise UnknownLabel(f"no measurement recorded under {label!r}")
        return _registry[label]


def clear_recordings() -> None:
    with _registry_lock:
        _registry.clear()


def compare_report(baseline: str, candidate: str) -> tuple[str, str]:
    """Per-counter ratios candidate/baseline, plus the weighted total.

    Returns (text_table, csv_text).  Raises UnknownLabel if either label was
    never measured.
    """
    base = recorded(baseline)
    cand = recorded(candidate)

    header = "weights: " + ", ".join(f"{k}={WEIGHTS[k]}" for k in FIELDS)
    lines = [header, f"ratio = {candidate} / {baseline}"]
    rows = []
    for name in FIELDS:
        b = getattr(base, name)
        c = getattr(cand, name)
        ratio = (c / b) if b else (float("inf") if c else 1.0)
        lines.append(f"  {name:8s} {c:>14d} / {b:>14d} = {ratio:.4g}")
        rows.append((name, c, b, ratio))
    wb = base.weighted_total()
    wc = cand.weighted_total()
    wr = (wc / wb) if wb else float("inf")
    lines.append(f"  {'weighted':8s} {wc:>14.1f} / {wb:>14.1f} = {wr:.4g}")
    rows.append(("weighted", wc, wb, wr))

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["# " + header])
    writer.writerow(["counter", candidate, baseline, "ratio"])
    for row in rows:
        writer.writerow(row)
    return "\n".join(lines), buf.getvalue()


def weighted_ratio(baseline: str, candidate: str) -> float:
    """Weighted-total ratio candidate/baseline for two recorded labels."""
    wb = recorded(baseline).weighted_total()
    wc = recorded(candidate).weighted_total()
    return wc / wb if wb else float("inf")


def write_csv(path: str, labels: list[str] | None = None) -> None:
    """Dump recorded measurements, one row per label."""
    with _registry_lock:
        chosen = labels if labels is not None else sorted(_registry)
        rows = [(_registry[lab].as_row(lab)) for lab in chosen if lab in _registry]
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["label", *FIELDS, "wall_ns"])
        writer.writeheader()
        writer.writerows(rows)
