#!/usr/bin/env python3
"""The train-render-evaluate-pick loop on the 100-view fixture.

Each round acquires a few new views; acquired views join the reference set
before the next round.  Candidate features are refreshed per round (in a
real pipeline they come from renders of the partially trained model).
"""

import dataclasses
import math
from pathlib import Path

from viewplan import RayModel, RoundSchedule, run_active_loop
from viewplan.io import parse_embeddings, parse_transforms

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

doc = parse_transforms(FIXTURES / "transforms_100.json")
base = parse_embeddings(FIXTURES / "embeddings_100.csv")
rounds = [parse_embeddings(FIXTURES / f"embeddings_100_round{r}.csv") for r in range(1, 5)]

initial_ids = ["r_000", "r_001", "r_002", "r_003"]
initial = [
    dataclasses.replace(v, feature=base[v.id], status="training")
    for v in doc.views
    if v.id in initial_ids
]
candidates = [
    dataclasses.replace(v, feature=base[v.id]) for v in doc.views if v.id not in initial_ids
]
model = RayModel(theta_low=0.0, theta_high=math.pi / 3, t1_len=1.0, t2_len=1.0)
schedule = RoundSchedule(initial_count=4, per_round=4, rounds=4)

print(f"pool: {len(doc.views)} views, schedule {schedule.initial_count}+"
      f"{schedule.per_round}x{schedule.rounds} -> {schedule.total} observations")
print()

for strategy, lam in [("random", 1.0), ("fvs", 1.0), ("greedy-semantic", 1.0),
                      ("s-then-p", 1.0), ("p-then-s", 1.0), ("weighted", 0.1)]:
    loop = run_active_loop(
        schedule, strategy, initial, candidates, model,
        features_per_round=rounds, lam=lam, seed=17,
    )
    label = f"{strategy} (lambda={lam})" if strategy == "weighted" else strategy
    print(f"== {label} ==")
    for i, r in enumerate(loop.rounds, start=1):
        print(f"  round {i}: picked {' '.join(r.order)}  (delta~ {r.delta_tilde:.4f})")
    print(f"  roster ({len(loop.roster)}): {' '.join(loop.roster)}")
    print()
