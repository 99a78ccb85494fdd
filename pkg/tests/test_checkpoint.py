import pytest

from migsim.broker import Broker
from migsim.checkpoint import (
    CheckpointService,
    PhaseLatencyModel,
    PROFILES,
    RegistryError,
    RegistryModel,
    profile,
)
from migsim.engine import DistributionSpec, Engine, RandomSource
from migsim.workload import Consumer, ConsumerModel, Producer, ProducerModel, SERVING


def make_latencies(**overrides):
    base = dict(t_checkpoint=1.5, t_build=5.0, t_push=10.0, t_pull=2.0,
                t_restore=3.0, t_pod_delete=1.0, t_pod_create=1.0)
    base.update(overrides)
    return PhaseLatencyModel(**base)


def make_world(latencies, rate=10.0, seed=2):
    engine = Engine()
    broker = Broker()
    queue = broker.create_queue("q")
    rng = RandomSource(seed)
    model = ConsumerModel(DistributionSpec.deterministic(0.05))
    producer = Producer(engine, broker, queue, ProducerModel(rate, "deterministic"), rng)
    source = Consumer(engine, "src", "source", model, rng)
    source.attach(queue, SERVING)
    producer.start()
    svc = CheckpointService(engine, latencies)
    return engine, broker, queue, producer, source, model, rng, svc


def test_snapshot_captures_last_applied_seq():
    engine, broker, queue, producer, source, model, rng, svc = make_world(
        make_latencies(pause_during_checkpoint=False))
    engine.run_until(horizon=4.26)  # msg 42 arrives at 4.2, applied ~4.25
    assert source.state.last_seq == 42
    artifact = svc.create_checkpoint(source, lambda a: None)
    assert artifact.snapshot.last_seq == 42
    assert artifact.created_at == engine.now


def test_pause_flag_freezes_source_for_exact_checkpoint_window():
    engine, broker, queue, producer, source, model, rng, svc = make_world(
        make_latencies(pause_during_checkpoint=True))
    engine.run_until(horizon=1.0)
    count_at_capture = source.state.applied_count
    done_at = []

    def finished(artifact):
        done_at.append(engine.now)
        source.resume()

    svc.create_checkpoint(source, finished)
    start = engine.now
    engine.run_until(horizon=start + 1.5 - 1e-9)
    assert source.state.applied_count == count_at_capture  # nothing in the window
    engine.run_until(horizon=start + 5.0)
    assert done_at == [pytest.approx(start + 1.5)]
    assert source.state.applied_count > count_at_capture


def test_no_pause_keeps_source_applying_during_checkpoint():
    engine, broker, queue, producer, source, model, rng, svc = make_world(
        make_latencies(pause_during_checkpoint=False))
    engine.run_until(horizon=1.0)
    count = source.state.applied_count
    svc.create_checkpoint(source, lambda a: None)
    engine.run_until(horizon=2.4)
    assert source.state.applied_count > count


def test_image_available_exactly_build_plus_push_after_start():
    engine, *_rest, svc = make_world(make_latencies(t_build=5.0, t_push=10.0))
    source = _rest[3]
    artifact = svc.create_checkpoint(source, lambda a: None)
    pushed_at = []
    svc.build_and_push(artifact, "img", lambda image: pushed_at.append(engine.now))
    engine.run_until(horizon=100.0)
    assert pushed_at == [pytest.approx(15.0)]
    assert svc.registry.get("img").pushed


def test_pull_before_push_completes_blocks_until_push_done():
    lat = make_latencies(t_build=5.0, t_push=10.0, t_pull=2.0, t_restore=3.0,
                         pause_during_checkpoint=False)
    engine, broker, queue, producer, source, model, rng, svc = make_world(lat)
    artifact = svc.create_checkpoint(source, lambda a: None)
    svc.build_and_push(artifact, "img", lambda image: None)

    restored_at = []

    def make_instance(state):
        return Consumer(engine, "tgt", "target", model, rng, state=state)

    # requested immediately: must wait for the push at t=15, then pull+restore
    svc.pull_and_restore("img", make_instance, lambda c: restored_at.append(engine.now))
    engine.run_until(horizon=100.0)
    assert restored_at == [pytest.approx(15.0 + 2.0 + 3.0)]


def test_restore_fidelity_digest_and_seq():
    lat = make_latencies(pause_during_checkpoint=False)
    engine, broker, queue, producer, source, model, rng, svc = make_world(lat)
    engine.run_until(horizon=3.0)
    artifact = svc.create_checkpoint(source, lambda a: None)
    svc.build_and_push(artifact, "img", lambda image: None)
    restored = []

    def make_instance(state):
        return Consumer(engine, "tgt", "target", model, rng, state=state)

    svc.pull_and_restore("img", make_instance, restored.append)
    engine.run_until(horizon=60.0)
    (target,) = restored
    assert target.state.digest == artifact.snapshot.digest
    assert target.state.last_seq == artifact.snapshot.last_seq


def test_missing_image_key_errors():
    registry = RegistryModel()
    with pytest.raises(RegistryError):
        registry.get("nope")


def test_latency_validation_and_profiles():
    with pytest.raises(ValueError):
        make_latencies(t_build=-1.0)
    paper = profile("paper-like")
    assert paper.stop_and_copy_total == pytest.approx(49.055)
    assert paper.pause_during_checkpoint
    with pytest.raises(KeyError):
        profile("nope")
    assert set(PROFILES) >= {"paper-like", "fast"}
    assert paper.with_pause(False).pause_during_checkpoint is False
