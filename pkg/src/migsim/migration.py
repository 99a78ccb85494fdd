"""Migration coordinator: strategy state machines, cutoff math, handover.

Four strategies are modeled:

* stop-and-copy: pause the source at the migration request, run the full
  checkpoint/build/push/pod-delete/pod-create/pull/restore pipeline with no
  message processing anywhere, then hand the primary queue to the target.
  Downtime spans the whole window.
* ms2m-individual: checkpoint the source (pausing only if configured) and
  mirror every message after the snapshot into a secondary queue; the source
  keeps serving while the image moves through the registry; the restored
  target replays the secondary until it has drained it and matches the
  source's position, then an atomic handover stops the source and attaches
  the target to the primary.
* ms2m-cutoff: ms2m-individual plus a timer started when the secondary
  opens. If the accumulation threshold expires before natural convergence,
  the source is stopped immediately, the secondary is capped at the last
  message the source received, the target replays to that cap, and messages
  arriving in the meantime wait in the primary.
* ms2m-statefulset: stable pod identity forbids running source and target
  simultaneously. The source serves through checkpoint/build/push, then is
  stopped and the cutoff recorded; the source pod is deleted before the
  target pod is created; after pull/restore the target alone replays to the
  cutoff and takes over the primary.

The cutoff threshold comes from treating the service as an M/M/1 station:
messages accumulate for t_accum at rate lam, giving lam*t_accum messages
whose replay at rate mu_target takes lam*t_accum/mu_target. Bounding that by
t_replay_max yields t_cutoff = t_replay_max*mu_target/lam.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

from .broker import Broker, PrimaryQueue, SecondaryQueue
from .checkpoint import CheckpointArtifact, CheckpointService, PhaseLatencyModel
from .engine import Engine
from .metrics import (
    PHASE_BUILD,
    PHASE_CHECKPOINT,
    PHASE_HANDOVER,
    PHASE_POD_CREATE,
    PHASE_POD_DELETE,
    PHASE_PULL,
    PHASE_PUSH,
    PHASE_REPLAY,
    PHASE_RESTORE,
    PhaseEntry,
)
from .workload import Consumer, PAUSED, REPLAYING, SERVING, ServiceState, Producer

CONVERGED = "converged"
TIMED_OUT = "timed_out"
RUNNING = "running"

UNBOUNDED = math.inf


class MigrationError(Exception):
    pass


class MigrationStrategy(str, Enum):
    STOP_AND_COPY = "stop-and-copy"
    MS2M_INDIVIDUAL = "ms2m-individual"
    MS2M_CUTOFF = "ms2m-cutoff"
    MS2M_STATEFULSET = "ms2m-statefulset"


# -- queueing math -----------------------------------------------------------

def cutoff_threshold(t_replay_max: float, mu_target: float, lam: float) -> float:
    """Maximum accumulation duration keeping replay within t_replay_max.

    t_cutoff = t_replay_max * mu_target / lam; unbounded when lam == 0.
    """
    if t_replay_max <= 0:
        raise ValueError("t_replay_max must be > 0")
    if mu_target <= 0:
        raise ValueError("mu_target must be > 0")
    if lam < 0:
        raise ValueError("lam must be >= 0")
    if lam == 0:
        return UNBOUNDED
    return t_replay_max * mu_target / lam


def expected_accumulated(lam: float, t_accum: float) -> float:
    """Expected message count after accumulating for t_accum at rate lam."""
    if lam < 0 or t_accum < 0:
        raise ValueError("lam and t_accum must be >= 0")
    return lam * t_accum


def expected_replay_time(lam: float, t_accum: float, mu_target: float) -> float:
    """Expected time to replay the accumulated messages at rate mu_target."""
    if mu_target <= 0:
        raise ValueError("mu_target must be > 0")
    return expected_accumulated(lam, t_accum) / mu_target


@dataclass
class CutoffParams:
    t_replay_max: float
    lam: float
    mu_target: float
    t_cutoff: float = field(init=False)
    t_accum: Optional[float] = None  # measured per run

    def __post_init__(self):
        self.t_cutoff = cutoff_threshold(self.t_replay_max, self.mu_target, self.lam)


# -- run record ---------------------------------------------------------------

@dataclass
class MigrationRun:
    strategy: MigrationStrategy
    request_time: float
    source: Consumer
    target: Optional[Consumer] = None
    phases: list[PhaseEntry] = field(default_factory=list)
    status: str = RUNNING
    end_time: Optional[float] = None
    secondary: Optional[SecondaryQueue] = None
    snapshot_seq: Optional[int] = None
    replay_backlog_at_start: int = 0
    replay_count: int = 0
    cutoff_params: Optional[CutoffParams] = None
    cutoff_fired: bool = False
    cutoff_seq: Optional[int] = None
    t_accum: Optional[float] = None
    _open_phase: Optional[tuple[str, float]] = None

    @property
    def finished(self) -> bool:
        return self.status != RUNNING

    @property
    def total_time(self) -> float:
        if self.end_time is None:
            raise MigrationError("run not finished")
        return self.end_time - self.request_time

    def begin_phase(self, name: str, time: float) -> None:
        if self._open_phase is not None:
            raise MigrationError(f"phase {self._open_phase[0]} still open")
        self._open_phase = (name, time)

    def end_phase(self, time: float) -> None:
        if self._open_phase is None:
            raise MigrationError("no open phase")
        name, start = self._open_phase
        self.phases.append(PhaseEntry(name, start, time))
        self._open_phase = None

    def finish(self, status: str, time: float) -> None:
        if self._open_phase is not None:
            self.end_phase(time)
        self.status = status
        self.end_time = time


# -- scenario plumbing ---------------------------------------------------------

@dataclass
class MigrationWorld:
    """Everything a coordinator drives: built by the scenario runner."""

    engine: Engine
    broker: Broker
    queue: PrimaryQueue
    producer: Producer
    source: Consumer
    make_target: Callable[[ServiceState], Consumer]
    ckpt: CheckpointService

    @property
    def latencies(self) -> PhaseLatencyModel:
        return self.ckpt.latencies


@dataclass(frozen=True)
class ExecutionParams:
    lam: float
    mu_target: float
    horizon: float  # timeout, seconds after the migration request
    t_replay_max: Optional[float] = None


# -- strategy machines ---------------------------------------------------------

class _StrategyBase:
    strategy: MigrationStrategy

    def __init__(self, world: MigrationWorld, params: ExecutionParams):
        self.world = world
        self.params = params
        self.engine = world.engine
        self.run = MigrationRun(
            strategy=self.strategy,
            request_time=world.engine.now,
            source=world.source,
        )
        self._image_key = f"ckpt:{world.queue.name}"

    def start(self) -> None:
        raise NotImplementedError

    def _begin(self, name: str) -> None:
        self.run.begin_phase(name, self.engine.now)

    def _end(self) -> None:
        self.run.end_phase(self.engine.now)

    def _finish_converged(self) -> None:
        self.run.finish(CONVERGED, self.engine.now)
        self.world.producer.stop()


class StopAndCopyMigration(_StrategyBase):
    """Cold migration: downtime equals the migration time by construction."""

    strategy = MigrationStrategy.STOP_AND_COPY

    def start(self) -> None:
        world = self.world
        world.source.pause()
        self._begin(PHASE_CHECKPOINT)
        world.ckpt.create_checkpoint(world.source, self._checkpoint_done)

    def _checkpoint_done(self, artifact: CheckpointArtifact) -> None:
        self.run.snapshot_seq = artifact.snapshot.last_seq
        self._end()
        self._begin(PHASE_BUILD)
        self.world.ckpt.build_and_push(
            artifact, self._image_key,
            on_built=self._built, on_complete=self._pushed,
        )

    def _built(self) -> None:
        self._end()
        self._begin(PHASE_PUSH)

    def _pushed(self, image) -> None:
        self._end()
        self._begin(PHASE_POD_DELETE)
        self.engine.schedule_in(self.world.latencies.t_pod_delete, self._pod_deleted)

    def _pod_deleted(self) -> None:
        self.world.source.stop()
        self._end()
        self._begin(PHASE_POD_CREATE)
        self.engine.schedule_in(self.world.latencies.t_pod_create, self._pod_created)

    def _pod_created(self) -> None:
        self._end()
        self._begin(PHASE_PULL)
        self.world.ckpt.pull_and_restore(
            self._image_key, self.world.make_target,
            on_pulled=self._pulled, on_complete=self._restored,
        )

    def _pulled(self) -> None:
        self._end()
        self._begin(PHASE_RESTORE)

    def _restored(self, target: Consumer) -> None:
        self._end()
        self.run.target = target
        self._begin(PHASE_HANDOVER)
        target.attach(self.world.queue, SERVING)
        self._end()
        self._finish_converged()


class Ms2mIndividualMigration(_StrategyBase):
    """Live migration with a secondary replay queue (Fig. 2-style flow)."""

    strategy = MigrationStrategy.MS2M_INDIVIDUAL

    def __init__(self, world: MigrationWorld, params: ExecutionParams):
        super().__init__(world, params)
        self.secondary: Optional[SecondaryQueue] = None
        self.artifact: Optional[CheckpointArtifact] = None
        self.accum_start: Optional[float] = None

    def start(self) -> None:
        world = self.world
        self._begin(PHASE_CHECKPOINT)
        # capture is atomic at the phase start; the secondary opens at the
        # same instant so every message past the snapshot gets mirrored
        self.artifact = world.ckpt.create_checkpoint(world.source, self._checkpoint_done)
        self.run.snapshot_seq = self.artifact.snapshot.last_seq
        self.secondary = world.broker.open_secondary(
            world.queue, self.artifact.snapshot.last_seq + 1
        )
        self.run.secondary = self.secondary
        self.accum_start = self.engine.now
        self._secondary_opened()

    def _secondary_opened(self) -> None:
        """Hook: the cutoff variant arms its timer here."""

    def _checkpoint_done(self, artifact: CheckpointArtifact) -> None:
        self._end()
        if self.world.latencies.pause_during_checkpoint and self.world.source.mode == PAUSED:
            self.world.source.resume()
        self._begin(PHASE_BUILD)
        self.world.ckpt.build_and_push(
            artifact, self._image_key,
            on_built=self._built, on_complete=self._pushed,
        )

    def _built(self) -> None:
        self._end()
        self._begin(PHASE_PUSH)

    def _pushed(self, image) -> None:
        self._end()
        self._transfer_done()

    def _transfer_done(self) -> None:
        """Hook: individual pulls right away; statefulset stops the source
        and cycles the pod first."""
        self._start_pull()

    def _start_pull(self) -> None:
        self._begin(PHASE_PULL)
        self.world.ckpt.pull_and_restore(
            self._image_key, self.world.make_target,
            on_pulled=self._pulled, on_complete=self._restored,
        )

    def _pulled(self) -> None:
        self._end()
        self._begin(PHASE_RESTORE)

    def _restored(self, target: Consumer) -> None:
        self._end()
        self.run.target = target
        self._begin(PHASE_REPLAY)
        self.run.replay_backlog_at_start = len(self.secondary.buffer)
        target.on_apply = self._on_apply
        if self.world.source.mode != "stopped":
            self.world.source.on_apply = self._on_apply
        target.attach(self.secondary, REPLAYING)
        self._check_convergence()

    def _on_apply(self, consumer: Consumer, msg) -> None:
        self._check_convergence()

    def _converged(self) -> bool:
        """Natural convergence: secondary drained and positions aligned."""
        return (
            len(self.secondary.buffer) == 0
            and self.run.target.state.last_seq == self.world.source.state.last_seq
        )

    def _check_convergence(self) -> None:
        if self.run.finished or self.run.target is None:
            return
        if self._converged():
            self._handover()

    def _handover(self) -> None:
        """Atomic at one virtual instant: source out, target serving."""
        if not self._converged():
            raise MigrationError("handover criterion unmet")
        run = self.run
        world = self.world
        if run.t_accum is None:
            run.t_accum = self.engine.now - self.accum_start
        self._end()  # replay
        self._begin(PHASE_HANDOVER)
        if world.source.mode != "stopped":
            world.source.stop()
        run.target.detach()
        world.broker.close_secondary(world.queue, self.secondary)
        run.target.attach(world.queue, SERVING)
        self._end()
        run.replay_count = len(self.secondary.delivered_seqs)
        self._finish_converged()


class Ms2mCutoffMigration(Ms2mIndividualMigration):
    """ms2m-individual plus the threshold-based cutoff (Fig. 3-style flow)."""

    strategy = MigrationStrategy.MS2M_CUTOFF

    def __init__(self, world: MigrationWorld, params: ExecutionParams):
        if params.t_replay_max is None:
            raise MigrationError("ms2m-cutoff requires t_replay_max")
        super().__init__(world, params)
        self._cutoff_handle = None

    def _secondary_opened(self) -> None:
        params = CutoffParams(
            t_replay_max=self.params.t_replay_max,
            lam=self.params.lam,
            mu_target=self.params.mu_target,
        )
        self.run.cutoff_params = params
        if math.isfinite(params.t_cutoff):
            self._cutoff_handle = self.engine.schedule(
                self.engine.now + params.t_cutoff, self._fire_cutoff
            )

    def _fire_cutoff(self) -> None:
        if self.run.finished:
            return
        run = self.run
        world = self.world
        run.cutoff_fired = True
        run.t_accum = self.engine.now - self.accum_start
        cutoff_seq = world.queue.last_published
        world.source.stop()
        # the stopped source abandons its received-but-unprocessed head run;
        # the target replays those from the secondary instead
        world.queue.discard_through(cutoff_seq)
        world.broker.set_cutoff(self.secondary, cutoff_seq)
        run.cutoff_seq = cutoff_seq
        self._check_convergence()

    def _converged(self) -> bool:
        if self.run.cutoff_fired:
            return self.run.target.state.last_seq == self.run.cutoff_seq
        return super()._converged()

    def _handover(self) -> None:
        if self._cutoff_handle is not None:
            self._cutoff_handle.cancel()
        super()._handover()


class Ms2mStatefulSetMigration(Ms2mCutoffMigration):
    """Stable-identity pods: source is stopped after the transfer phase and
    deleted before the target pod exists (Fig. 4-style flow)."""

    strategy = MigrationStrategy.MS2M_STATEFULSET

    def __init__(self, world: MigrationWorld, params: ExecutionParams):
        # no timer: the stop instant is structural (end of checkpoint transfer)
        _StrategyBase.__init__(self, world, params)
        self.secondary = None
        self.artifact = None
        self.accum_start = None
        self._cutoff_handle = None

    def _secondary_opened(self) -> None:
        pass

    def _transfer_done(self) -> None:
        run = self.run
        world = self.world
        run.cutoff_fired = True
        run.t_accum = self.engine.now - self.accum_start
        cutoff_seq = world.queue.last_published
        world.source.stop()
        world.queue.discard_through(cutoff_seq)
        world.broker.set_cutoff(self.secondary, cutoff_seq)
        run.cutoff_seq = cutoff_seq
        self._begin(PHASE_POD_DELETE)
        self.engine.schedule_in(world.latencies.t_pod_delete, self._pod_deleted)

    def _pod_deleted(self) -> None:
        self._end()
        self._begin(PHASE_POD_CREATE)
        self.engine.schedule_in(self.world.latencies.t_pod_create, self._pod_created)

    def _pod_created(self) -> None:
        self._end()
        self._start_pull()


_COORDINATORS = {
    MigrationStrategy.STOP_AND_COPY: StopAndCopyMigration,
    MigrationStrategy.MS2M_INDIVIDUAL: Ms2mIndividualMigration,
    MigrationStrategy.MS2M_CUTOFF: Ms2mCutoffMigration,
    MigrationStrategy.MS2M_STATEFULSET: Ms2mStatefulSetMigration,
}


def execute(strategy: MigrationStrategy, world: MigrationWorld,
            params: ExecutionParams) -> MigrationRun:
    """Run one migration to convergence or the timeout horizon.

    A blown horizon yields status timed_out (not an exception); after
    convergence the producer is stopped and the target drains the primary so
    the final state is quiescent.
    """
    coordinator = _COORDINATORS[MigrationStrategy(strategy)](world, params)
    coordinator.start()
    run = coordinator.run
    deadline = run.request_time + params.horizon
    world.engine.run_until(horizon=deadline, predicate=lambda: run.finished)
    if not run.finished:
        world.producer.stop()
        if run.secondary is not None:
            run.replay_count = len(run.secondary.delivered_seqs)
        run.finish(TIMED_OUT, deadline)
        return run
    if run.status == CONVERGED and run.target is not None:
        world.engine.run_until(
            predicate=lambda: len(world.queue.buffer) == 0 and not run.target.busy
        )
    return run
