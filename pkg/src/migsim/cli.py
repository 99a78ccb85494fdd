"""Command-line entry point: run, sweep, profiles list.

Exit codes: 0 ok, 1 usage error, 2 invariant breach. Output directory is
--outdir, else $MIGSIM_OUTPUT_DIR, else ./results. A fixed config and seed
produce byte-identical CSV files on every run.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import yaml

from .broker import BrokerError
from .checkpoint import PROFILES, PhaseLatencyModel
from .metrics import (
    AggregateRow,
    MetricsError,
    MigrationReport,
    PHASE_ORDER,
    aggregate,
)
from .migration import MigrationError, MigrationStrategy
from .scenario import ConfigError, ScenarioConfig, SweepConfig, run_repetitions
from .workload import StateError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVARIANT = 2

RUN_COLUMNS = [
    "strategy", "lambda", "mu", "seed", "status", "total_s", "downtime_s",
    "replay_count", "replay_s", "checkpoint_s", "build_s", "push_s", "pull_s",
    "restore_s", "pod_delete_s", "pod_create_s", "handover_s", "wait_s",
    "config_hash",
]

AGG_COLUMNS = [
    "strategy", "lambda", "n", "total_mean_s", "total_std_s",
    "downtime_mean_s", "downtime_std_s",
] + [f"{name}_share" for name in PHASE_ORDER]

_RUN_PHASES = ("checkpoint", "build", "push", "pull", "restore",
               "pod_delete", "pod_create", "handover", "wait")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _run_row(report: MigrationReport) -> list[str]:
    durations = report.phase_durations
    row = [
        report.strategy, str(report.lam), str(report.mu), str(report.seed),
        report.status, str(report.total_s), str(report.downtime_s),
        str(report.replay_count), str(report.replay_s),
    ]
    row += [str(durations.get(name, 0.0)) for name in _RUN_PHASES]
    row.append(report.config_hash)
    return row


def _agg_row(row: AggregateRow) -> list[str]:
    cells = [
        row.strategy, str(row.lam), str(row.n_runs), str(row.total_mean_s),
        str(row.total_std_s), str(row.downtime_mean_s), str(row.downtime_std_s),
    ]
    cells += [str(row.phase_shares.get(name, 0.0)) for name in PHASE_ORDER]
    return cells


def write_run_csv(reports: list[MigrationReport], path: Path) -> None:
    reports = sorted(reports, key=lambda r: (r.strategy, r.lam, r.seed))
    lines = [",".join(RUN_COLUMNS)]
    lines += [",".join(_run_row(r)) for r in reports]
    path.write_text("\n".join(lines) + "\n")


def write_aggregate_csv(rows: list[AggregateRow], path: Path) -> None:
    lines = [",".join(AGG_COLUMNS)]
    lines += [",".join(_agg_row(r)) for r in rows]
    path.write_text("\n".join(lines) + "\n")


def _load_config_file(path: str) -> dict:
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise _UsageError(f"config file {path}: expected a mapping")
    return data


_CONFIG_FIELDS = {
    "strategy": str, "rate": float, "arrival_kind": str, "service_time": float,
    "service_kind": str, "t_replay_max": float, "profile": str,
    "pause_during_checkpoint": bool, "seed": int, "repetitions": int,
    "timeout_multiplier": float, "duration": float,
}

_LATENCY_FIELDS = ("t_checkpoint", "t_build", "t_push", "t_pull", "t_restore",
                   "t_pod_delete", "t_pod_create")


def _build_scenario(args) -> ScenarioConfig:
    values: dict = {}
    if args.config:
        raw = _load_config_file(args.config)
        latency_values = {}
        for key, val in raw.items():
            if key in _LATENCY_FIELDS:
                latency_values[key] = float(val)
            elif key in _CONFIG_FIELDS:
                values[key] = _CONFIG_FIELDS[key](val)
            else:
                raise _UsageError(f"config file: unknown field {key!r}")
        if latency_values:
            missing = [f for f in _LATENCY_FIELDS if f not in latency_values]
            if missing:
                raise _UsageError(f"config file: inline latencies missing {missing}")
            values["latencies"] = PhaseLatencyModel(
                **latency_values,
                pause_during_checkpoint=values.get("pause_during_checkpoint", True),
            )
    # flags override the file
    for flag, key in (
        ("strategy", "strategy"), ("rate", "rate"), ("arrival", "arrival_kind"),
        ("service_time", "service_time"), ("service_kind", "service_kind"),
        ("t_replay_max", "t_replay_max"), ("profile", "profile"),
        ("seed", "seed"), ("reps", "repetitions"),
        ("timeout_multiplier", "timeout_multiplier"), ("duration", "duration"),
    ):
        val = getattr(args, flag, None)
        if val is not None:
            values[key] = val
    if getattr(args, "pause", None) is not None:
        values["pause_during_checkpoint"] = args.pause
    try:
        return ScenarioConfig(**values)
    except ConfigError as exc:
        raise _UsageError(str(exc)) from None


def _outdir(args) -> Path:
    if args.outdir:
        out = Path(args.outdir)
    else:
        out = Path(os.environ.get("MIGSIM_OUTPUT_DIR", "results"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _add_scenario_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML scenario file; flags override it")
    p.add_argument("--strategy", choices=[s.value for s in MigrationStrategy])
    p.add_argument("--rate", type=float, help="message rate (messages/s)")
    p.add_argument("--arrival", choices=["deterministic", "exponential"])
    p.add_argument("--service-time", dest="service_time", type=float)
    p.add_argument("--service-kind", dest="service_kind",
                   choices=["deterministic", "exponential"])
    p.add_argument("--t-replay-max", dest="t_replay_max", type=float)
    p.add_argument("--profile")
    p.add_argument("--pause", dest="pause", action="store_true", default=None)
    p.add_argument("--no-pause", dest="pause", action="store_false", default=None)
    p.add_argument("--seed", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--timeout-multiplier", dest="timeout_multiplier", type=float)
    p.add_argument("--duration", type=float)
    p.add_argument("--outdir")
    p.add_argument("--json", action="store_true", help="also write runs.json")


def build_parser() -> _Parser:
    parser = _Parser(prog="migsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario (with repetitions)")
    _add_scenario_flags(p_run)

    p_sweep = sub.add_parser("sweep", help="sweep a parameter across strategies")
    _add_scenario_flags(p_sweep)
    p_sweep.add_argument("--param", choices=["rate", "t_replay_max"], default="rate")
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated, strictly increasing")
    p_sweep.add_argument("--strategies",
                         help="comma-separated strategies, or 'all' (default)")

    p_prof = sub.add_parser("profiles", help="latency profile utilities")
    p_prof.add_argument("action", choices=["list"])
    return parser


def _write_outputs(reports: list[MigrationReport], rows: list[AggregateRow],
                   outdir: Path, with_json: bool) -> None:
    write_run_csv(reports, outdir / "runs.csv")
    write_aggregate_csv(rows, outdir / "aggregate.csv")
    if with_json:
        payload = [
            {
                "strategy": r.strategy, "lambda": r.lam, "mu": r.mu,
                "seed": r.seed, "status": r.status, "total_s": r.total_s,
                "downtime_s": r.downtime_s, "replay_count": r.replay_count,
                "replay_s": r.replay_s, "replay_backlog": r.replay_backlog,
                "phase_durations": r.phase_durations,
                "config_hash": r.config_hash,
            }
            for r in reports
        ]
        (outdir / "runs.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _cmd_run(args) -> int:
    config = _build_scenario(args)
    reports = run_repetitions(config)
    outdir = _outdir(args)
    _write_outputs(reports, aggregate(reports), outdir, args.json)
    for rep in reports:
        print(f"{rep.strategy} lambda={rep.lam} seed={rep.seed} "
              f"status={rep.status} total={rep.total_s:.3f}s downtime={rep.downtime_s:.3f}s")
    print(f"wrote {outdir / 'runs.csv'} and {outdir / 'aggregate.csv'}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    base = _build_scenario(args)
    try:
        values = tuple(float(v) for v in args.values.split(","))
    except ValueError:
        raise _UsageError(f"--values: not a number list: {args.values!r}") from None
    if args.strategies in (None, "all"):
        strategies = tuple(s.value for s in MigrationStrategy)
    else:
        strategies = tuple(args.strategies.split(","))
        for s in strategies:
            if s not in [m.value for m in MigrationStrategy]:
                raise _UsageError(f"--strategies: unknown strategy {s!r}")
    try:
        sweep = SweepConfig(base=base, parameter=args.param, values=values,
                            strategies=strategies)
    except ConfigError as exc:
        raise _UsageError(str(exc)) from None
    # one aggregate row per (strategy, swept value): aggregate per config so
    # non-lambda sweeps keep distinct rows
    reports: list[MigrationReport] = []
    rows: list[AggregateRow] = []
    for config in sweep.configs():
        config_reports = run_repetitions(config)
        reports.extend(config_reports)
        rows.extend(aggregate(config_reports))
    outdir = _outdir(args)
    _write_outputs(reports, rows, outdir, args.json)
    for row in rows:
        print(f"{row.strategy} lambda={row.lam} n={row.n_runs} "
              f"total={row.total_mean_s:.3f}s downtime={row.downtime_mean_s:.3f}s")
    print(f"wrote {outdir / 'runs.csv'} and {outdir / 'aggregate.csv'}")
    return EXIT_OK


def _cmd_profiles(args) -> int:
    for name in sorted(PROFILES):
        lat = PROFILES[name]
        print(f"{name}: checkpoint={lat.t_checkpoint} build={lat.t_build} "
              f"push={lat.t_push} pull={lat.t_pull} restore={lat.t_restore} "
              f"pod_delete={lat.t_pod_delete} pod_create={lat.t_pod_create} "
              f"pause_during_checkpoint={lat.pause_during_checkpoint} "
              f"(stop-and-copy total {lat.stop_and_copy_total})")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        return _cmd_profiles(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StateError, BrokerError, MigrationError, MetricsError) as exc:
        print(f"invariant breach: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
