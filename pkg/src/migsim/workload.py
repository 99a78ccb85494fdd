"""Producer and consumer models.

The consumer's state is a deterministic fold over the messages it applied:
count, last applied seq, and an order-sensitive running digest. Two states
are equal iff they folded the same seq sequence in the same order, which
makes state synchronization directly checkable. Application is strict: a
non-contiguous seq is an invariant breach and raises instead of silently
diverging.

Service is modeled as: peek at the head message, hold for a sampled service
time, then dequeue and apply at completion. A message in service therefore
stays visible in its queue until applied, so pausing or stopping an instance
mid-service abandons the message losslessly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from .broker import Broker, Message, PrimaryQueue, SecondaryQueue
from .engine import DistributionSpec, Engine, EventHandle, RandomSource

# Consumer modes
SERVING = "serving"
PAUSED = "paused"
RESTORING = "restoring"
REPLAYING = "replaying"
STOPPED = "stopped"

_DIGEST_MULT = 1000003
_DIGEST_MOD = 1 << 64


class StateError(Exception):
    """Out-of-order apply: a lost or duplicated message."""


@dataclass(frozen=True)
class ServiceState:
    applied_count: int = 0
    last_seq: int = 0
    digest: int = 0

    def apply(self, msg: Message) -> "ServiceState":
        if msg.seq != self.last_seq + 1:
            raise StateError(
                f"apply out of order: got seq {msg.seq} after {self.last_seq}"
            )
        return ServiceState(
            applied_count=self.applied_count + 1,
            last_seq=msg.seq,
            digest=(self.digest * _DIGEST_MULT + msg.seq) % _DIGEST_MOD,
        )


def apply(state: ServiceState, msg: Message) -> ServiceState:
    return state.apply(msg)


@dataclass(frozen=True)
class ProducerModel:
    """Arrival process: rate in messages/second, deterministic or exponential
    interarrivals. rate == 0 disables the producer."""

    rate: float
    kind: str = "exponential"

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError("rate must be >= 0")

    @property
    def enabled(self) -> bool:
        return self.rate > 0

    def interarrival(self) -> DistributionSpec:
        if not self.enabled:
            raise ValueError("producer disabled (rate 0)")
        if self.kind == "deterministic":
            return DistributionSpec.deterministic(1.0 / self.rate)
        return DistributionSpec.exponential(self.rate)


@dataclass(frozen=True)
class ConsumerModel:
    """Service process; mu is the processing rate implied by the mean."""

    service: DistributionSpec

    @property
    def mu(self) -> float:
        return 1.0 / self.service.mean()


class Producer:
    """Publishes to one primary queue with sampled interarrival gaps."""

    def __init__(
        self,
        engine: Engine,
        broker: Broker,
        queue: PrimaryQueue,
        model: ProducerModel,
        rng: RandomSource,
        end_time: float = math.inf,
    ):
        self.engine = engine
        self.broker = broker
        self.queue = queue
        self.model = model
        self.rng = rng
        self.end_time = end_time
        self._pending: Optional[EventHandle] = None
        self._stopped = False

    def start(self) -> None:
        if self.model.enabled:
            self._schedule_next()

    def _schedule_next(self) -> None:
        gap = self.model.interarrival().sample(self.rng)
        t = self.engine.now + gap
        if t > self.end_time:
            self._pending = None
            return
        self._pending = self.engine.schedule(t, self._arrive)

    def _arrive(self) -> None:
        self.broker.publish(self.queue, self.engine.now)
        self._schedule_next()

    def stop(self) -> None:
        self._stopped = True
        if self._pending is not None:
            self._pending.cancel()
            self._pending = None


class Consumer:
    """A service instance folding messages from its attached queue.

    Exactly one instance may be in mode ``serving`` per primary queue at any
    instant (the broker enforces single attachment); a replaying instance
    consumes only from a secondary queue. Intervals spent in ``serving`` are
    recorded for downtime accounting, half-open [start, end).
    """

    def __init__(
        self,
        engine: Engine,
        name: str,
        role: str,
        model: ConsumerModel,
        rng: RandomSource,
        state: ServiceState = ServiceState(),
    ):
        self.engine = engine
        self.name = name
        self.role = role  # "source" or "target"
        self.model = model
        self.rng = rng
        self.state = state
        self.mode = RESTORING if role == "target" else PAUSED
        self.queue = None
        self.applied_seqs: list[int] = []
        self.serving_intervals: list[list[float]] = []
        self.on_apply: Optional[Callable[["Consumer", Message], None]] = None
        self.on_idle: Optional[Callable[["Consumer"], None]] = None
        self._busy = False
        self._pending: Optional[EventHandle] = None

    # -- mode / attachment ---------------------------------------------------

    def attach(self, queue, mode: str) -> None:
        if mode == REPLAYING and not isinstance(queue, SecondaryQueue):
            raise StateError("replaying instances consume only from a secondary queue")
        queue.attach(self, listener=self._maybe_start)
        self.queue = queue
        self._set_mode(mode)
        self._maybe_start()

    def detach(self) -> None:
        self._cancel_service()
        if self.queue is not None:
            self.queue.detach(self)
            self.queue = None

    def _set_mode(self, mode: str) -> None:
        now = self.engine.now
        if self.mode == SERVING and mode != SERVING:
            self.serving_intervals[-1][1] = now
        if mode == SERVING and self.mode != SERVING:
            self.serving_intervals.append([now, math.inf])
        self.mode = mode

    def pause(self) -> None:
        self._cancel_service()
        self._set_mode(PAUSED)

    def resume(self) -> None:
        self._set_mode(SERVING)
        self._maybe_start()

    def stop(self) -> None:
        self._cancel_service()
        self._set_mode(STOPPED)
        self.detach()

    def switch_to(self, queue: PrimaryQueue) -> None:
        """Atomic handover step: leave the current queue, serve this one."""
        self.detach()
        self.attach(queue, SERVING)

    # -- service loop ----------------------------------------------------------

    def _cancel_service(self) -> None:
        if self._pending is not None:
            self._pending.cancel()
            self._pending = None
        self._busy = False

    def _maybe_start(self) -> None:
        if self.mode not in (SERVING, REPLAYING):
            return
        if self._busy or self.queue is None:
            return
        if self.queue.peek() is None:
            if self.on_idle is not None:
                self.on_idle(self)
            return
        self._busy = True
        delay = self.model.service.sample(self.rng)
        self._pending = self.engine.schedule_in(delay, self._complete)

    def _complete(self) -> None:
        self._busy = False
        self._pending = None
        msg = self.queue.consume_next(self)
        if msg is None:
            # head became undeliverable mid-service (cutoff); nothing applied
            self._maybe_start()
            return
        self.state = self.state.apply(msg)
        self.applied_seqs.append(msg.seq)
        if self.on_apply is not None:
            self.on_apply(self, msg)
        self._maybe_start()

    # -- introspection -------------------------------------------------------

    @property
    def busy(self) -> bool:
        return self._busy

    def serving_time_within(self, start: float, end: float) -> float:
        """Total serving time intersected with [start, end]."""
        total = 0.0
        for s, e in self.serving_intervals:
            e = min(e, end)
            s = max(s, start)
            if e > s:
                total += e - s
        return total
