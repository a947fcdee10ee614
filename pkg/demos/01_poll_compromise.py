"""
A poll at 45 / 40 / 15
======================

Supporters of c see a poll and are unsure how accurate it is.
"""
from fractions import Fraction as F

from itervote import BeliefBall, Metric, possible_winners, score_range
from itervote import scenarios as S

# belief ball around the poll, multiplicative radius 1/5
ball = BeliefBall((45, 40, 15), Metric.MULTIPLICATIVE, F(1, 5))
for c, name in enumerate("abc"):
    rg = score_range(ball, c)
    print(f"{name}: could be anywhere in [{rg.lo}, {rg.hi}]")
print("possible winners:", sorted("abc"[c] for c in possible_winners(ball)))

# c cannot win, so a vote for b dominates a vote for c
sc = S.builtin("intro-45-40-15")
game, trace = S.execute(sc)
for mv in trace.moves:
    print(f"step {mv.t}: block {mv.mover} moves {sc.candidates[mv.src]} -> "
          f"{sc.candidates[mv.dst]} ({mv.kind.value})")
print("outcome:", trace.outcome.value, "final scores:", [str(x) for x in trace.scores[-1]])
