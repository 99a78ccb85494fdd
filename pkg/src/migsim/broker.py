"""Broker model: primary queues, replay (secondary) queues, cutoff marking.

Sequence ids are per-queue and assigned by the broker at publish, so a
coordinator can reference a total order ("cutoff message id"). A secondary
queue receives *copies* of every message published to its source queue with
seq >= start_seq; the source keeps consuming the primary while a target
drains the secondary. Buffers are unbounded: saturation shows up as
unbounded catch-up time, not overflow.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Optional


class BrokerError(Exception):
    pass


@dataclass(frozen=True)
class Message:
    seq: int
    publish_time: float


class _QueueBase:
    """FIFO buffer with a single attached consumer and an enqueue listener."""

    def __init__(self) -> None:
        self.buffer: deque[Message] = deque()
        self._consumer = None
        self._listener: Optional[Callable[[], None]] = None

    def attach(self, consumer, listener: Optional[Callable[[], None]] = None) -> None:
        if self._consumer is not None and self._consumer is not consumer:
            raise BrokerError("queue already has a live consumer")
        self._consumer = consumer
        self._listener = listener

    def detach(self, consumer) -> None:
        if self._consumer is consumer:
            self._consumer = None
            self._listener = None

    @property
    def consumer(self):
        return self._consumer

    def _notify(self) -> None:
        if self._listener is not None:
            self._listener()

    def peek(self) -> Optional[Message]:
        return self.buffer[0] if self.buffer else None

    def consume_next(self, consumer) -> Optional[Message]:
        """Remove and return the head message; None when empty."""
        if consumer is not self._consumer:
            raise BrokerError("consume_next by a consumer that is not attached")
        if not self.buffer:
            return None
        return self.buffer.popleft()

    def __len__(self) -> int:
        return len(self.buffer)


class PrimaryQueue(_QueueBase):
    def __init__(self, name: str):
        super().__init__()
        self.name = name
        self.next_seq = 1
        self.secondaries: list[SecondaryQueue] = []

    @property
    def last_published(self) -> int:
        return self.next_seq - 1

    def discard_through(self, seq: int) -> int:
        """Drop the head-run of messages with seq <= ``seq``.

        Used when a stopping source abandons messages it had received but not
        processed; their copies live in the secondary for the target to
        replay. Returns how many were dropped.
        """
        dropped = 0
        while self.buffer and self.buffer[0].seq <= seq:
            self.buffer.popleft()
            dropped += 1
        return dropped


class SecondaryQueue(_QueueBase):
    """Mirror of a primary from start_seq onward, drained during replay.

    Once cutoff_seq is set, no message with seq > cutoff_seq is ever
    delivered; later seqs remain only in the primary queue.
    """

    def __init__(self, source: str, start_seq: int):
        super().__init__()
        self.source = source
        self.start_seq = start_seq
        self.cutoff_seq: Optional[int] = None
        self.delivered_seqs: list[int] = []
        self.closed = False

    def _deliverable(self) -> Optional[Message]:
        msg = self.buffer[0] if self.buffer else None
        if msg is None:
            return None
        if self.cutoff_seq is not None and msg.seq > self.cutoff_seq:
            return None
        return msg

    def peek(self) -> Optional[Message]:
        return self._deliverable()

    def consume_next(self, consumer) -> Optional[Message]:
        if consumer is not self._consumer:
            raise BrokerError("consume_next by a consumer that is not attached")
        if self._deliverable() is None:
            return None
        msg = self.buffer.popleft()
        self.delivered_seqs.append(msg.seq)
        return msg

    def drained(self) -> bool:
        """True when nothing (more) can ever be delivered right now."""
        return self._deliverable() is None


class Broker:
    def __init__(self) -> None:
        self.queues: dict[str, PrimaryQueue] = {}

    def create_queue(self, name: str) -> PrimaryQueue:
        if name in self.queues:
            raise BrokerError(f"queue {name!r} already exists")
        q = PrimaryQueue(name)
        self.queues[name] = q
        return q

    def publish(self, queue: PrimaryQueue, time: float) -> Message:
        msg = Message(seq=queue.next_seq, publish_time=time)
        queue.next_seq += 1
        queue.buffer.append(msg)
        for sec in queue.secondaries:
            if not sec.closed and sec.cutoff_seq is None and msg.seq >= sec.start_seq:
                sec.buffer.append(msg)
                sec._notify()
        queue._notify()
        return msg

    def open_secondary(self, queue: PrimaryQueue, start_seq: int) -> SecondaryQueue:
        """Open a mirror of ``queue`` covering every seq >= start_seq.

        Pre-fills with messages already buffered in the primary and not yet
        consumed. start_seq must not lie beyond the stream (a checkpoint
        cannot be ahead of it) nor behind the oldest unconsumed message
        (those are gone and could never be mirrored).
        """
        if start_seq > queue.next_seq:
            raise BrokerError(
                f"start_seq {start_seq} beyond next_seq {queue.next_seq}"
            )
        head = queue.buffer[0].seq if queue.buffer else queue.next_seq
        if start_seq < head:
            raise BrokerError(
                f"messages from {start_seq} below queue head {head} were already consumed"
            )
        sec = SecondaryQueue(queue.name, start_seq)
        for msg in queue.buffer:
            if msg.seq >= start_seq:
                sec.buffer.append(msg)
        queue.secondaries.append(sec)
        return sec

    def set_cutoff(self, secondary: SecondaryQueue, cutoff_seq: int) -> None:
        if secondary.cutoff_seq is not None:
            raise BrokerError("cutoff already set; it is immutable")
        if cutoff_seq < secondary.start_seq - 1:
            raise BrokerError(
                f"cutoff_seq {cutoff_seq} below start_seq-1 ({secondary.start_seq - 1})"
            )
        if secondary.delivered_seqs and cutoff_seq < secondary.delivered_seqs[-1]:
            raise BrokerError(
                f"cutoff_seq {cutoff_seq} below already delivered "
                f"{secondary.delivered_seqs[-1]}"
            )
        secondary.cutoff_seq = cutoff_seq
        secondary._notify()

    def close_secondary(self, queue: PrimaryQueue, secondary: SecondaryQueue) -> None:
        secondary.closed = True
        if secondary in queue.secondaries:
            queue.secondaries.remove(secondary)
