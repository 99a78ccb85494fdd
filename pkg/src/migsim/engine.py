"""Deterministic virtual-time event engine.

Everything in the simulator schedules callbacks on a single Engine per run.
Events execute in (time, insertion order) order, so a fixed seed and scenario
always produce the same trajectory. Time is virtual seconds; there is no
wall-clock coupling.

Randomness comes from RandomSource, a thin wrapper around the stdlib
``random.Random`` (Mersenne Twister, MT19937). The generator algorithm is
frozen so that a seed reproduces the identical draw sequence on every
platform; exponential variates are drawn by inverse transform, -ln(1-u)/rate.
"""

from __future__ import annotations

import heapq
import itertools
import math
import random
from dataclasses import dataclass
from typing import Callable, Optional


class SchedulingError(Exception):
    """Raised when an event is scheduled before the current clock."""


class EventHandle:
    """Cancellable reference to a scheduled event."""

    __slots__ = ("time", "_cancelled")

    def __init__(self, time: float):
        self.time = time
        self._cancelled = False

    def cancel(self) -> None:
        self._cancelled = True

    @property
    def cancelled(self) -> bool:
        return self._cancelled


class Engine:
    """Event queue plus a monotone virtual clock.

    Pop order is lexicographic on (time, insertion counter): events at equal
    timestamps fire in the order they were scheduled.
    """

    def __init__(self) -> None:
        self._now = 0.0
        self._heap: list[tuple[float, int, EventHandle, Callable[[], None]]] = []
        self._counter = itertools.count()

    @property
    def now(self) -> float:
        return self._now

    def schedule(self, time: float, action: Callable[[], None]) -> EventHandle:
        """Schedule ``action`` to run exactly once at virtual ``time``."""
        if math.isnan(time):
            raise SchedulingError("event time is NaN")
        if time < self._now:
            raise SchedulingError(
                f"cannot schedule past event at t={time} (clock is {self._now})"
            )
        handle = EventHandle(time)
        heapq.heappush(self._heap, (time, next(self._counter), handle, action))
        return handle

    def schedule_in(self, delay: float, action: Callable[[], None]) -> EventHandle:
        return self.schedule(self._now + delay, action)

    def run_until(
        self,
        horizon: float = math.inf,
        predicate: Optional[Callable[[], bool]] = None,
    ) -> float:
        """Execute events in order until ``predicate`` is true, the queue is
        empty, or the next event lies beyond ``horizon``. Returns the clock.

        The clock only advances when an event executes; reaching the horizon
        with pending later events leaves the clock at the last executed event.
        """
        if predicate is not None and predicate():
            return self._now
        while self._heap:
            time, _, handle, action = self._heap[0]
            if time > horizon:
                break
            heapq.heappop(self._heap)
            if handle.cancelled:
                continue
            self._now = time
            action()
            if predicate is not None and predicate():
                break
        return self._now

    def pending(self) -> int:
        """Number of not-yet-cancelled events still queued."""
        return sum(1 for _, _, h, _ in self._heap if not h.cancelled)


class RandomSource:
    """Seeded random stream; one per scenario run.

    Same seed, same draw sequence, on every platform (MT19937 is part of the
    stdlib's documented behaviour).
    """

    def __init__(self, seed: int):
        self.seed = seed
        self._rng = random.Random(seed)

    def uniform(self) -> float:
        """Next u ~ U[0, 1)."""
        return self._rng.random()

    def exponential(self, rate: float) -> float:
        """Next exponential variate with the given rate, by inverse transform."""
        u = self._rng.random()
        return -math.log(1.0 - u) / rate

    def randrange(self, n: int) -> int:
        return self._rng.randrange(n)

    def choice(self, seq):
        return seq[self._rng.randrange(len(seq))]


@dataclass(frozen=True)
class DistributionSpec:
    """Interarrival/service-time distribution: fixed interval or exponential.

    ``parameter`` is the interval in seconds for kind="deterministic" and the
    rate (events/second) for kind="exponential".
    """

    kind: str
    parameter: float

    def __post_init__(self):
        if self.kind not in ("deterministic", "exponential"):
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "exponential" and not self.parameter > 0:
            raise ValueError("exponential rate must be > 0")
        if self.kind == "deterministic" and self.parameter < 0:
            raise ValueError("deterministic interval must be >= 0")

    @classmethod
    def deterministic(cls, interval: float) -> "DistributionSpec":
        return cls("deterministic", interval)

    @classmethod
    def exponential(cls, rate: float) -> "DistributionSpec":
        return cls("exponential", rate)

    def mean(self) -> float:
        if self.kind == "deterministic":
            return self.parameter
        return 1.0 / self.parameter

    def sample(self, rng: RandomSource) -> float:
        """Draw one interval. Deterministic specs never touch the RNG."""
        if self.kind == "deterministic":
            return self.parameter
        return rng.exponential(self.parameter)


def sample(dist: DistributionSpec, rng: RandomSource) -> float:
    return dist.sample(rng)
