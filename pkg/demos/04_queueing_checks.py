"""
Checking the accumulation and replay laws by Monte-Carlo
========================================================

Messages arrive in a Poisson stream at rate lambda and pile up in a
secondary queue for t_accum seconds; a consumer then replays them at rate
mu. Two laws to verify against simulation:

    N = lambda * t_accum          (accumulated count)
    T_replay = N / mu             (replay duration)
"""

import numpy as np

from migsim import (
    Broker,
    Consumer,
    ConsumerModel,
    DistributionSpec,
    Engine,
    Producer,
    ProducerModel,
    RandomSource,
    expected_accumulated,
    expected_replay_time,
)
from migsim.workload import REPLAYING

LAM, T_ACCUM, MU = 10.0, 20.0, 20.0
SEEDS = 100


def one_experiment(seed):
    engine = Engine()
    broker = Broker()
    queue = broker.create_queue("q")
    rng = RandomSource(seed)
    producer = Producer(engine, broker, queue, ProducerModel(LAM, "exponential"),
                        rng, end_time=T_ACCUM)
    secondary = broker.open_secondary(queue, 1)
    target = Consumer(engine, "tgt", "target",
                      ConsumerModel(DistributionSpec.deterministic(1 / MU)), rng)
    started = []

    def start_replay():
        started.append(queue.last_published)
        broker.set_cutoff(secondary, queue.last_published)
        target.attach(secondary, REPLAYING)

    producer.start()
    engine.schedule(T_ACCUM, start_replay)
    engine.run_until(predicate=lambda: started and secondary.drained())
    return started[0], engine.now - T_ACCUM


counts, durations = zip(*(one_experiment(s) for s in range(SEEDS)))

print(f"lambda={LAM}/s, t_accum={T_ACCUM}s, mu={MU}/s over {SEEDS} seeds")
print(f"  accumulated count: mean {np.mean(counts):7.2f}   "
      f"formula {expected_accumulated(LAM, T_ACCUM):7.2f}")
print(f"  replay duration:   mean {np.mean(durations):6.3f}s   "
      f"formula {expected_replay_time(LAM, T_ACCUM, MU):6.3f}s")
print(f"  count spread (std {np.std(counts):.1f}) is the Poisson noise the "
      f"cutoff threshold has to absorb.")
