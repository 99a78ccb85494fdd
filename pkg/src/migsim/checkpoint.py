"""Checkpoint, image build/push/pull through a registry, and restore.

All modeled as state capture plus configured scalar latencies: capture is
atomic at a single virtual instant, and each phase completes exactly its
configured duration after it starts. The `paper-like` profile calibrates the
end-to-end cold-migration pipeline to 49.055 s total; the split across
build/push/pull/restore/pod phases is a documented calibration choice, not
measured data.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

from .engine import Engine
from .workload import Consumer, SERVING, ServiceState


class RegistryError(Exception):
    pass


@dataclass(frozen=True)
class PhaseLatencyModel:
    t_checkpoint: float
    t_build: float
    t_push: float
    t_pull: float
    t_restore: float
    t_pod_delete: float
    t_pod_create: float
    pause_during_checkpoint: bool = True

    def __post_init__(self):
        for name in (
            "t_checkpoint", "t_build", "t_push", "t_pull",
            "t_restore", "t_pod_delete", "t_pod_create",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @property
    def stop_and_copy_total(self) -> float:
        return (
            self.t_checkpoint + self.t_build + self.t_push + self.t_pull
            + self.t_restore + self.t_pod_delete + self.t_pod_create
        )

    def with_pause(self, pause: bool) -> "PhaseLatencyModel":
        return replace(self, pause_during_checkpoint=pause)


# Named calibration profiles. `paper-like` reproduces a 49.055 s cold
# migration (checkpoint 1.5 + 47.555 across the remaining phases); `fast` is
# the same shape scaled by 1/10 for quick experiments and tests.
PROFILES: dict[str, PhaseLatencyModel] = {
    "paper-like": PhaseLatencyModel(
        t_checkpoint=1.5, t_build=10.0, t_push=12.0, t_pull=12.0,
        t_restore=11.0, t_pod_delete=1.5, t_pod_create=1.055,
    ),
    "fast": PhaseLatencyModel(
        t_checkpoint=0.15, t_build=1.0, t_push=1.2, t_pull=1.2,
        t_restore=1.1, t_pod_delete=0.15, t_pod_create=0.1055,
    ),
}


def profile(name: str) -> PhaseLatencyModel:
    try:
        return PROFILES[name]
    except KeyError:
        raise KeyError(
            f"unknown latency profile {name!r}; available: {sorted(PROFILES)}"
        ) from None


@dataclass(frozen=True)
class CheckpointArtifact:
    snapshot: ServiceState  # immutable; frozen at the capture instant
    created_at: float


class CheckpointImage:
    def __init__(self, artifact: CheckpointArtifact):
        self.artifact = artifact
        self.pushed = False


class RegistryModel:
    """Stores images by key; a pull returns exactly what was pushed."""

    def __init__(self) -> None:
        self._images: dict[str, CheckpointImage] = {}
        self._waiters: dict[str, list[Callable[[], None]]] = {}

    def store(self, key: str, image: CheckpointImage) -> None:
        self._images[key] = image

    def mark_pushed(self, key: str) -> None:
        self._images[key].pushed = True
        for waiter in self._waiters.pop(key, []):
            waiter()

    def get(self, key: str) -> CheckpointImage:
        if key not in self._images:
            raise RegistryError(f"no image {key!r} in registry")
        return self._images[key]

    def when_pushed(self, key: str, action: Callable[[], None]) -> None:
        """Run ``action`` once the image is pushed (immediately if it is)."""
        image = self.get(key)
        if image.pushed:
            action()
        else:
            self._waiters.setdefault(key, []).append(action)


class CheckpointService:
    """Engine-scheduled checkpoint/build/push/pull/restore operations."""

    def __init__(self, engine: Engine, latencies: PhaseLatencyModel,
                 registry: Optional[RegistryModel] = None):
        self.engine = engine
        self.latencies = latencies
        self.registry = registry if registry is not None else RegistryModel()

    def create_checkpoint(
        self, source: Consumer,
        on_complete: Callable[[CheckpointArtifact], None],
    ) -> CheckpointArtifact:
        """Capture the source state now; complete after t_checkpoint.

        With pause_during_checkpoint the source is paused at the capture
        instant; resuming (or not) is the caller's strategy decision.
        """
        artifact = CheckpointArtifact(snapshot=source.state, created_at=self.engine.now)
        if self.latencies.pause_during_checkpoint and source.mode == SERVING:
            source.pause()
        self.engine.schedule_in(self.latencies.t_checkpoint, lambda: on_complete(artifact))
        return artifact

    def build_and_push(
        self, artifact: CheckpointArtifact, key: str,
        on_complete: Callable[[CheckpointImage], None],
        on_built: Optional[Callable[[], None]] = None,
    ) -> None:
        """Build then push; the image is pullable t_build + t_push from now."""
        image = CheckpointImage(artifact)
        self.registry.store(key, image)

        def _built():
            if on_built is not None:
                on_built()
            self.engine.schedule_in(self.latencies.t_push, _pushed)

        def _pushed():
            self.registry.mark_pushed(key)
            on_complete(image)

        self.engine.schedule_in(self.latencies.t_build, _built)

    def pull_and_restore(
        self, key: str,
        make_instance: Callable[[ServiceState], Consumer],
        on_complete: Callable[[Consumer], None],
        on_pulled: Optional[Callable[[], None]] = None,
    ) -> None:
        """Pull the image (blocking until pushed) and restore an instance.

        The restored instance carries exactly the snapshot state; it is
        handed to ``on_complete`` t_pull + t_restore after the pull starts.
        """
        image = self.registry.get(key)

        def _start_pull():
            self.engine.schedule_in(self.latencies.t_pull, _pulled)

        def _pulled():
            if on_pulled is not None:
                on_pulled()
            self.engine.schedule_in(self.latencies.t_restore, _restored)

        def _restored():
            on_complete(make_instance(image.artifact.snapshot))

        self.registry.when_pushed(key, _start_pull)
