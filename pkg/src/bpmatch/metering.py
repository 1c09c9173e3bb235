"""Operation tallies.

Backends announce each public crypto call with :func:`operation` and the
arithmetic layers report primitive work with :func:`count`.  Nothing is
recorded unless a :func:`metering` block is active, so the cost outside of
measurement is one context-variable lookup per primitive.
"""
from collections import Counter
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Iterator, Optional

_active: ContextVar[Optional["Meter"]] = ContextVar("bpmatch_meter", default=None)


class Meter:
    """Counts calls per operation and primitive units per (operation, unit)."""

    def __init__(self) -> None:
        self.calls: Counter = Counter()
        self.units: Counter = Counter()
        self._current: Optional[str] = None

    def merge(self, other: "Meter") -> None:
        self.calls.update(other.calls)
        self.units.update(other.units)

    def units_for(self, op: str) -> int:
        return sum(v for (name, _), v in self.units.items() if name == op)


@contextmanager
def metering() -> Iterator[Meter]:
    """Activate a fresh meter; its tallies are folded into any enclosing one."""
    parent = _active.get()
    meter = Meter()
    token = _active.set(meter)
    try:
        yield meter
    finally:
        _active.reset(token)
        if parent is not None:
            parent.merge(meter)


@contextmanager
def operation(name: str) -> Iterator[None]:
    meter = _active.get()
    # nested calls are implementation detail of the outer operation
    if meter is None or meter._current is not None:
        yield
        return
    meter.calls[name] += 1
    meter._current = name
    try:
        yield
    finally:
        meter._current = None


def count(unit: str, k: int = 1) -> None:
    meter = _active.get()
    if meter is not None:
        meter.units[(meter._current or "other", unit)] += k
