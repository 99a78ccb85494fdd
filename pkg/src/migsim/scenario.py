"""Scenario configuration and the per-run wiring of the simulator.

A scenario is one producer, one primary queue, one serving source instance,
and a migration request at t=0. Repetitions run with seeds seed, seed+1, ...
so runs are reproducible yet distinct.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .broker import Broker
from .checkpoint import CheckpointService, PhaseLatencyModel, profile
from .engine import DistributionSpec, Engine, RandomSource
from .metrics import MigrationReport, build_report
from .migration import (
    ExecutionParams,
    MigrationRun,
    MigrationStrategy,
    MigrationWorld,
    execute,
)
from .workload import Consumer, ConsumerModel, Producer, ProducerModel, SERVING, ServiceState


class ConfigError(ValueError):
    def __init__(self, fieldname: str, message: str):
        self.fieldname = fieldname
        super().__init__(f"{fieldname}: {message}")


@dataclass(frozen=True)
class ScenarioConfig:
    strategy: str = MigrationStrategy.MS2M_INDIVIDUAL.value
    rate: float = 10.0
    arrival_kind: str = "deterministic"
    service_time: float = 0.05
    service_kind: str = "deterministic"
    t_replay_max: float = 10.0
    profile: str = "paper-like"
    latencies: Optional[PhaseLatencyModel] = None  # inline values beat the name
    pause_during_checkpoint: Optional[bool] = None  # None: profile default
    seed: int = 1
    repetitions: int = 1
    timeout_multiplier: float = 10.0
    duration: float = math.inf

    def __post_init__(self):
        try:
            MigrationStrategy(self.strategy)
        except ValueError:
            raise ConfigError("strategy", f"unknown strategy {self.strategy!r}") from None
        if self.rate < 0:
            raise ConfigError("rate", "must be >= 0")
        if self.arrival_kind not in ("deterministic", "exponential"):
            raise ConfigError("arrival_kind", f"unknown kind {self.arrival_kind!r}")
        if self.service_kind not in ("deterministic", "exponential"):
            raise ConfigError("service_kind", f"unknown kind {self.service_kind!r}")
        if self.service_time <= 0:
            raise ConfigError("service_time", "must be > 0")
        if self.t_replay_max <= 0:
            raise ConfigError("t_replay_max", "must be > 0")
        if self.repetitions < 1:
            raise ConfigError("repetitions", "must be >= 1")
        if self.timeout_multiplier <= 0:
            raise ConfigError("timeout_multiplier", "must be > 0")
        if self.latencies is None:
            try:
                profile(self.profile)
            except KeyError as exc:
                raise ConfigError("profile", str(exc)) from None

    @property
    def mu(self) -> float:
        return 1.0 / self.service_time

    def resolve_latencies(self) -> PhaseLatencyModel:
        lat = self.latencies if self.latencies is not None else profile(self.profile)
        if self.pause_during_checkpoint is not None:
            lat = lat.with_pause(self.pause_during_checkpoint)
        return lat

    def service_spec(self) -> DistributionSpec:
        if self.service_kind == "deterministic":
            return DistributionSpec.deterministic(self.service_time)
        return DistributionSpec.exponential(1.0 / self.service_time)

    def resolved(self) -> dict:
        lat = self.resolve_latencies()
        return {
            "strategy": MigrationStrategy(self.strategy).value,
            "rate": self.rate,
            "arrival_kind": self.arrival_kind,
            "service_time": self.service_time,
            "service_kind": self.service_kind,
            "t_replay_max": self.t_replay_max,
            "latencies": {
                "t_checkpoint": lat.t_checkpoint,
                "t_build": lat.t_build,
                "t_push": lat.t_push,
                "t_pull": lat.t_pull,
                "t_restore": lat.t_restore,
                "t_pod_delete": lat.t_pod_delete,
                "t_pod_create": lat.t_pod_create,
                "pause_during_checkpoint": lat.pause_during_checkpoint,
            },
            "seed": self.seed,
            "repetitions": self.repetitions,
            "timeout_multiplier": self.timeout_multiplier,
            "duration": self.duration,
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.resolved(), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()

    def with_(self, **kwargs) -> "ScenarioConfig":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class SweepConfig:
    base: ScenarioConfig
    parameter: str  # "rate" or "t_replay_max"
    values: tuple[float, ...]
    strategies: tuple[str, ...] = ()

    def __post_init__(self):
        if self.parameter not in ("rate", "t_replay_max"):
            raise ConfigError("parameter", f"cannot sweep {self.parameter!r}")
        if not self.values:
            raise ConfigError("values", "must be non-empty")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ConfigError("values", "must be strictly increasing")

    def configs(self) -> list[ScenarioConfig]:
        strategies = self.strategies or (self.base.strategy,)
        return [
            self.base.with_(strategy=s, **{self.parameter: v})
            for s in strategies
            for v in self.values
        ]


@dataclass
class SimulationResult:
    run: MigrationRun
    report: MigrationReport
    world: MigrationWorld


def simulate(config: ScenarioConfig, seed: Optional[int] = None) -> SimulationResult:
    """Build the world, run one migration, and report on it."""
    seed = config.seed if seed is None else seed
    engine = Engine()
    rng = RandomSource(seed)
    broker = Broker()
    queue = broker.create_queue("orders")
    latencies = config.resolve_latencies()

    consumer_model = ConsumerModel(config.service_spec())
    producer_model = ProducerModel(config.rate, config.arrival_kind)
    producer = Producer(engine, broker, queue, producer_model, rng,
                        end_time=config.duration)
    source = Consumer(engine, "source", "source", consumer_model, rng)
    source.attach(queue, SERVING)
    producer.start()

    def make_target(state: ServiceState) -> Consumer:
        return Consumer(engine, "target", "target", consumer_model, rng, state=state)

    world = MigrationWorld(
        engine=engine,
        broker=broker,
        queue=queue,
        producer=producer,
        source=source,
        make_target=make_target,
        ckpt=CheckpointService(engine, latencies),
    )
    params = ExecutionParams(
        lam=config.rate,
        mu_target=consumer_model.mu,
        horizon=config.timeout_multiplier * latencies.stop_and_copy_total,
        t_replay_max=config.t_replay_max,
    )
    run = execute(MigrationStrategy(config.strategy), world, params)
    report = build_report(
        run, lam=config.rate, mu=consumer_model.mu, seed=seed,
        config_hash=config.config_hash(),
    )
    return SimulationResult(run=run, report=report, world=world)


def run_scenario(config: ScenarioConfig, seed: Optional[int] = None) -> MigrationReport:
    return simulate(config, seed).report


def run_repetitions(config: ScenarioConfig) -> list[MigrationReport]:
    """Repetitions use seeds seed, seed+1, ..."""
    return [run_scenario(config, config.seed + i) for i in range(config.repetitions)]
