"""Migration metrics: downtime, total time, per-phase distribution, aggregates.

Total migration time runs from the migration request to handover completion.
Downtime is the measure of instants inside that window during which zero
instances are in serving mode, which makes the definition identical across
strategies. Phase entries partition the window exactly; `wait` exists as an
explicit phase for any coordinator idle gap so the partition invariant holds
to 1e-9 s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

PHASE_CHECKPOINT = "checkpoint"
PHASE_BUILD = "build"
PHASE_PUSH = "push"
PHASE_PULL = "pull"
PHASE_RESTORE = "restore"
PHASE_POD_DELETE = "pod_delete"
PHASE_POD_CREATE = "pod_create"
PHASE_REPLAY = "replay"
PHASE_HANDOVER = "handover"
PHASE_WAIT = "wait"

PHASE_ORDER = (
    PHASE_REPLAY, PHASE_CHECKPOINT, PHASE_BUILD, PHASE_PUSH, PHASE_PULL,
    PHASE_RESTORE, PHASE_POD_DELETE, PHASE_POD_CREATE, PHASE_HANDOVER,
    PHASE_WAIT,
)


class MetricsError(Exception):
    pass


@dataclass(frozen=True)
class PhaseEntry:
    phase: str
    start: float
    end: float

    def __post_init__(self):
        if self.end < self.start:
            raise MetricsError(f"phase {self.phase}: end {self.end} < start {self.start}")

    @property
    def duration(self) -> float:
        return self.end - self.start


def validate_timeline(entries: list[PhaseEntry], start: float, end: float,
                      tol: float = 1e-9) -> None:
    """Check the entries tile [start, end]: contiguous, non-overlapping."""
    if not entries:
        raise MetricsError("empty phase timeline")
    cursor = start
    for entry in entries:
        if abs(entry.start - cursor) > tol:
            raise MetricsError(
                f"phase {entry.phase} starts at {entry.start}, expected {cursor}"
            )
        cursor = entry.end
    if abs(cursor - end) > tol:
        raise MetricsError(f"timeline ends at {cursor}, window ends at {end}")


def phase_durations(run) -> dict[str, float]:
    """Total duration per phase name over the run's timeline."""
    out: dict[str, float] = {}
    for entry in run.phases:
        out[entry.phase] = out.get(entry.phase, 0.0) + entry.duration
    return out


def compute_downtime(run) -> float:
    """Time within [request, end] during which no instance was serving."""
    if run.end_time is None:
        raise MetricsError("run not finished")
    lo, hi = run.request_time, run.end_time
    spans = []
    for inst in (run.source, run.target):
        if inst is None:
            continue
        for s, e in inst.serving_intervals:
            s, e = max(s, lo), min(e, hi)
            if e > s:
                spans.append((s, e))
    spans.sort()
    covered = 0.0
    cur_s, cur_e = None, None
    for s, e in spans:
        if cur_e is None or s > cur_e:
            if cur_e is not None:
                covered += cur_e - cur_s
            cur_s, cur_e = s, e
        else:
            cur_e = max(cur_e, e)
    if cur_e is not None:
        covered += cur_e - cur_s
    return (hi - lo) - covered


def phase_shares(run) -> dict[str, float]:
    """Each phase's fraction of the total migration time; sums to 1."""
    if run.end_time is None:
        raise MetricsError("run not finished")
    total = run.end_time - run.request_time
    if total <= 0:
        raise MetricsError("zero-length migration window")
    return {name: dur / total for name, dur in phase_durations(run).items()}


@dataclass(frozen=True)
class MigrationReport:
    strategy: str
    lam: float
    mu: float
    seed: int
    status: str
    total_s: float
    downtime_s: float
    replay_count: int
    replay_s: float
    replay_backlog: int
    phase_durations: dict[str, float]
    phase_shares: dict[str, float]
    t_accum: float | None = None
    cutoff_seq: int | None = None
    config_hash: str = ""


def build_report(run, *, lam: float, mu: float, seed: int,
                 config_hash: str = "") -> MigrationReport:
    durations = phase_durations(run)
    total = run.end_time - run.request_time
    validate_timeline(run.phases, run.request_time, run.end_time)
    return MigrationReport(
        strategy=run.strategy.value,
        lam=lam,
        mu=mu,
        seed=seed,
        status=run.status,
        total_s=total,
        downtime_s=compute_downtime(run),
        replay_count=run.replay_count,
        replay_s=durations.get(PHASE_REPLAY, 0.0),
        replay_backlog=run.replay_backlog_at_start,
        phase_durations=durations,
        phase_shares=phase_shares(run),
        t_accum=run.t_accum,
        cutoff_seq=run.cutoff_seq,
        config_hash=config_hash,
    )


@dataclass(frozen=True)
class AggregateRow:
    strategy: str
    lam: float
    n_runs: int
    total_mean_s: float
    total_std_s: float
    downtime_mean_s: float
    downtime_std_s: float
    phase_shares: dict[str, float] = field(default_factory=dict)


def _std(values: list[float]) -> float:
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1))


def aggregate(reports: list[MigrationReport]) -> list[AggregateRow]:
    """Group by (strategy, lam); unbiased std; deterministic row order."""
    if not reports:
        raise MetricsError("no reports to aggregate")
    groups: dict[tuple[str, float], list[MigrationReport]] = {}
    for rep in reports:
        groups.setdefault((rep.strategy, rep.lam), []).append(rep)
    rows = []
    for (strategy, lam) in sorted(groups):
        members = groups[(strategy, lam)]
        totals = [r.total_s for r in members]
        downs = [r.downtime_s for r in members]
        shares = {
            name: float(np.mean([r.phase_shares.get(name, 0.0) for r in members]))
            for name in PHASE_ORDER
        }
        rows.append(AggregateRow(
            strategy=strategy,
            lam=lam,
            n_runs=len(members),
            total_mean_s=float(np.mean(totals)),
            total_std_s=_std(totals),
            downtime_mean_s=float(np.mean(downs)),
            downtime_std_s=_std(downs),
            phase_shares=shares,
        ))
    return rows
