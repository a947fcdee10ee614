"""
Which candidates can tie?
=========================

Under l1 the budget of uncertainty is shared by all candidates, so two
possible winners need not be able to tie with each other.
"""
import itertools

from itervote import BeliefBall, Metric, feasible_tie_sets, possible_winners
from itervote.oracle import oracle_tie_sets

names = "abcd"
for center in [(10, 9, 7, 6), (10, 6, 6, 6)]:
    ball = BeliefBall(center, Metric.L1, 5)
    ties = feasible_tie_sets(ball)
    pairs = [names[x] + names[y] for x, y in itertools.combinations(range(4), 2)
             if not any({x, y} <= T for T in ties)]
    print(center, "W =", "".join(names[c] for c in sorted(possible_winners(ball))),
          "| pairs that never tie:", pairs or "none")

# the same question for integer scores, answered by brute force
ball = BeliefBall((10, 9, 7, 6), Metric.L1, 5, atomic=True)
print("atomic tie sets (oracle):", len(oracle_tie_sets(ball)),
      "closed form:", len(feasible_tie_sets(ball)))

# candidate-wise metrics: every pair of possible winners can tie
for metric in (Metric.LINF, Metric.MULTIPLICATIVE):
    ball = BeliefBall((10, 9, 7, 6), metric, 2)
    W = sorted(possible_winners(ball))
    print(metric.value, "W =", "".join(names[c] for c in W))
