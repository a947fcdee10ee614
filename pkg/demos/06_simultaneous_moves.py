"""
Moving at the same time
=======================

Two voters who both react to the same poll keep swapping places; letting
them take turns ends the cycle.
"""
from itervote import scenarios as S
from itervote.dynamics import Scheduler

sc = S.builtin("simultaneous-swap")
for kind in ("all", "round_robin", "random"):
    _, trace = S.execute(sc, S.run_config(sc, seed=4), Scheduler(kind))
    prof = ["".join(sc.candidates[c] for c in p) for _, p in trace.states]
    print(f"{kind:12s} {trace.outcome.value:12s} period={trace.period} states={prof}")

# one move at a time is not always enough: two atomic weak-LD voters with
# r = 0 can keep leaving ties, and a strict-LD voter would not
sc = S.builtin("weak-ld-atomic-cycle")
_, trace = S.execute(sc)
print(sc.name, trace.outcome.value, "period", trace.period,
      [tuple(int(x) for x in s) for s in trace.scores])
