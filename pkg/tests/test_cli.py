import pytest

from migsim import cli
from migsim.cli import AGG_COLUMNS, RUN_COLUMNS, main


def read_rows(path):
    lines = path.read_text().strip().split("\n")
    header = lines[0].split(",")
    return header, [dict(zip(header, line.split(","))) for line in lines[1:]]


def test_run_column_order_matches_contract():
    assert RUN_COLUMNS == [
        "strategy", "lambda", "mu", "seed", "status", "total_s", "downtime_s",
        "replay_count", "replay_s", "checkpoint_s", "build_s", "push_s",
        "pull_s", "restore_s", "pod_delete_s", "pod_create_s", "handover_s",
        "wait_s", "config_hash",
    ]


def test_run_stop_and_copy_writes_flat_downtime(tmp_path):
    rc = main(["run", "--strategy", "stop-and-copy", "--rate", "10",
               "--profile", "paper-like", "--reps", "3",
               "--outdir", str(tmp_path)])
    assert rc == 0
    header, rows = read_rows(tmp_path / "runs.csv")
    assert header == RUN_COLUMNS
    assert len(rows) == 3
    for row in rows:
        assert row["status"] == "converged"
        assert row["total_s"] == row["downtime_s"]
        assert abs(float(row["total_s"]) - 49.055) < 1e-3
        assert len(row["config_hash"]) == 64
    seeds = [int(r["seed"]) for r in rows]
    assert seeds == [1, 2, 3]  # base seed plus run index

    agg_header, agg_rows = read_rows(tmp_path / "aggregate.csv")
    assert agg_header == AGG_COLUMNS
    assert len(agg_rows) == 1
    assert agg_rows[0]["n"] == "3"
    assert float(agg_rows[0]["total_std_s"]) == 0.0


def test_zero_rate_rows_have_no_replay(tmp_path):
    rc = main(["run", "--strategy", "ms2m-individual", "--rate", "0",
               "--reps", "2", "--outdir", str(tmp_path)])
    assert rc == 0
    _, rows = read_rows(tmp_path / "runs.csv")
    assert all(row["replay_count"] == "0" for row in rows)


def test_same_config_same_bytes(tmp_path):
    args = ["run", "--strategy", "ms2m-cutoff", "--rate", "12",
            "--arrival", "exponential", "--seed", "7", "--reps", "2"]
    main(args + ["--outdir", str(tmp_path / "a")])
    main(args + ["--outdir", str(tmp_path / "b")])
    assert (tmp_path / "a/runs.csv").read_bytes() == (tmp_path / "b/runs.csv").read_bytes()
    assert (tmp_path / "a/aggregate.csv").read_bytes() == (tmp_path / "b/aggregate.csv").read_bytes()


def test_sweep_rows_per_strategy_and_value(tmp_path):
    rc = main(["sweep", "--values", "4,10", "--strategies", "all",
               "--rate", "10", "--profile", "fast",
               "--outdir", str(tmp_path)])
    assert rc == 0
    _, rows = read_rows(tmp_path / "aggregate.csv")
    assert len(rows) == 8  # 4 strategies x 2 rates
    keys = [(r["strategy"], float(r["lambda"])) for r in rows]
    # strategy blocks in selection order, swept values ascending within each
    assert keys == [
        ("stop-and-copy", 4.0), ("stop-and-copy", 10.0),
        ("ms2m-individual", 4.0), ("ms2m-individual", 10.0),
        ("ms2m-cutoff", 4.0), ("ms2m-cutoff", 10.0),
        ("ms2m-statefulset", 4.0), ("ms2m-statefulset", 10.0),
    ]


def test_sweep_detects_saturation_without_cutoff(tmp_path):
    rc = main(["sweep", "--values", "19", "--strategies", "ms2m-individual",
               "--profile", "fast", "--outdir", str(tmp_path)])
    assert rc == 0
    _, rows = read_rows(tmp_path / "runs.csv")
    # lam=19 near mu=20: catch-up 19*W/(mu-lam) blows the 10x horizon
    assert rows[0]["status"] == "timed_out"


def test_sweep_t_replay_max_parameter(tmp_path):
    rc = main(["sweep", "--param", "t_replay_max", "--values", "2,5",
               "--strategies", "ms2m-cutoff", "--rate", "16",
               "--profile", "fast", "--outdir", str(tmp_path)])
    assert rc == 0
    _, rows = read_rows(tmp_path / "aggregate.csv")
    assert len(rows) == 2


def test_usage_errors_exit_one(tmp_path, capsys):
    assert main(["run", "--strategy", "warp-drive"]) == 1
    assert main(["sweep", "--strategies", "all"]) == 1  # missing --values
    assert main(["run", "--profile", "nope", "--outdir", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "profile" in err


def test_decreasing_sweep_values_rejected(tmp_path):
    assert main(["sweep", "--values", "10,4", "--outdir", str(tmp_path)]) == 1


def test_invariant_breach_exits_two(monkeypatch, tmp_path):
    from migsim.workload import StateError

    def boom(config):
        raise StateError("seq gap")

    monkeypatch.setattr(cli, "run_repetitions", boom)
    rc = main(["run", "--strategy", "ms2m-individual", "--rate", "4",
               "--outdir", str(tmp_path)])
    assert rc == 2


def test_profiles_list(capsys):
    assert main(["profiles", "list"]) == 0
    out = capsys.readouterr().out
    assert "paper-like" in out
    assert "49.055" in out


def test_env_var_sets_output_dir(monkeypatch, tmp_path):
    monkeypatch.setenv("MIGSIM_OUTPUT_DIR", str(tmp_path / "from-env"))
    rc = main(["run", "--strategy", "stop-and-copy", "--rate", "4",
               "--profile", "fast"])
    assert rc == 0
    assert (tmp_path / "from-env" / "runs.csv").exists()


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "scenario.yaml"
    cfg.write_text(
        "strategy: ms2m-individual\n"
        "rate: 4\n"
        "profile: fast\n"
        "seed: 3\n"
    )
    rc = main(["run", "--config", str(cfg), "--rate", "8",
               "--outdir", str(tmp_path)])
    assert rc == 0
    _, rows = read_rows(tmp_path / "runs.csv")
    assert rows[0]["lambda"] == "8.0"
    assert rows[0]["seed"] == "3"


def test_config_file_inline_latencies(tmp_path):
    cfg = tmp_path / "scenario.yaml"
    cfg.write_text(
        "strategy: stop-and-copy\n"
        "rate: 4\n"
        "t_checkpoint: 0.1\nt_build: 0.1\nt_push: 0.1\nt_pull: 0.1\n"
        "t_restore: 0.1\nt_pod_delete: 0.1\nt_pod_create: 0.1\n"
    )
    rc = main(["run", "--config", str(cfg), "--outdir", str(tmp_path)])
    assert rc == 0
    _, rows = read_rows(tmp_path / "runs.csv")
    assert float(rows[0]["total_s"]) == pytest.approx(0.7)


def test_config_file_unknown_field_is_usage_error(tmp_path):
    cfg = tmp_path / "scenario.yaml"
    cfg.write_text("warp_factor: 9\n")
    assert main(["run", "--config", str(cfg), "--outdir", str(tmp_path)]) == 1


def test_json_output(tmp_path):
    rc = main(["run", "--strategy", "stop-and-copy", "--rate", "4",
               "--profile", "fast", "--json", "--outdir", str(tmp_path)])
    assert rc == 0
    import json

    payload = json.loads((tmp_path / "runs.json").read_text())
    assert payload[0]["strategy"] == "stop-and-copy"
