"""
Local-dominance dynamics always settle
======================================

A seeded batch of random games; every run should end in an equilibrium.
"""
import csv
import io

import numpy as np

from itervote.batch import BatchSpec, rows_csv, run_batch, summarize

spec = BatchSpec(300, seed=1, mode="nonatomic", schedulers=("group",))
rows = run_batch(spec)
print(summarize(rows))

steps = np.array([r["steps"] for r in rows])
print("steps: mean %.2f, max %d" % (steps.mean(), steps.max()))
print("histogram:", np.bincount(steps))

# the same rows as CSV, first few lines
text = rows_csv(rows)
for row in list(csv.reader(io.StringIO(text)))[:4]:
    print(",".join(row))

# atomic voters, one mover at a time
rows = run_batch(BatchSpec(300, seed=2, mode="atomic",
                           metrics=("linf", "multiplicative", "l1"),
                           schedulers=("round_robin", "random")))
print(summarize(rows))
