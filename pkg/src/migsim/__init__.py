"""Discrete-event simulator for message-replay based stateful service migration."""

from .broker import Broker, BrokerError, Message, PrimaryQueue, SecondaryQueue
from .checkpoint import (
    CheckpointArtifact,
    CheckpointImage,
    CheckpointService,
    PhaseLatencyModel,
    PROFILES,
    RegistryModel,
    profile,
)
from .engine import DistributionSpec, Engine, RandomSource, SchedulingError, sample
from .metrics import (
    AggregateRow,
    MigrationReport,
    PhaseEntry,
    aggregate,
    build_report,
    compute_downtime,
    phase_durations,
    phase_shares,
)
from .migration import (
    CONVERGED,
    CutoffParams,
    ExecutionParams,
    MigrationError,
    MigrationRun,
    MigrationStrategy,
    MigrationWorld,
    TIMED_OUT,
    cutoff_threshold,
    execute,
    expected_accumulated,
    expected_replay_time,
)
from .scenario import (
    ConfigError,
    ScenarioConfig,
    SimulationResult,
    SweepConfig,
    run_repetitions,
    run_scenario,
    simulate,
)
from .workload import (
    Consumer,
    ConsumerModel,
    Producer,
    ProducerModel,
    ServiceState,
    StateError,
)

__version__ = "0.1.0"
