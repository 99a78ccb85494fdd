"""
Sweeping the message rate across all strategies
===============================================

Reproduces the shape of the evaluation: rates 4..16 msg/s against a fixed
20 msg/s processing capacity, 3 repetitions each. Writes the same runs.csv
and aggregate.csv the CLI produces (the aggregate feeds the chart package in
plots/).

Equivalent CLI:
    migsim sweep --values 4,8,10,12,16 --strategies all --reps 3 --outdir results/sweep
"""

from migsim.cli import main

OUTDIR = "results/sweep"

rc = main([
    "sweep",
    "--values", "4,8,10,12,16",
    "--strategies", "all",
    "--rate", "10",
    "--reps", "3",
    "--profile", "paper-like",
    "--outdir", OUTDIR,
])
assert rc == 0

print()
print(f"Aggregate rows above; files in {OUTDIR}/.")
print("Expected trends: stop-and-copy flat; ms2m-individual total grows like")
print("B/(mu - lambda); cutoff and statefulset grow more slowly but give up")
print("downtime as the rate climbs.")
