"""
Worst-case regret
=================

Regret values for a voter with cardinal utilities, and what happens when
regret-minimizers play against each other.
"""
from fractions import Fraction as F

from itervote import BeliefBall, Metric, PreferenceOrder, UtilityScale, ViewPoint
from itervote import wcr_response, wcr_values
from itervote import scenarios as S
from itervote.oracle import SearchSpace, equilibrium_census

prefs = PreferenceOrder((2, 1, 0, 3))  # c > b > a > d
for center, ud in [((10, 6, 6, 6), 0), ((10, 9, 7, 6), 0), ((10, 9, 7, 6), F(5, 2))]:
    view = ViewPoint(BeliefBall(center, Metric.L1, 5), prefs, 2, UtilityScale((3, 4, 5, ud)))
    vals = wcr_values(view)
    print(center, "u(d) =", ud, "wcr:", [str(v) for v in vals],
          "-> vote", "abcd"[wcr_response(view)])

# two atomic regret-minimizers
sc = S.builtin("wcr-noeq-atomic")
game, trace = S.execute(sc)
print("scores along the run:", [tuple(int(x) for x in s) for s in trace.scores])
eqs = equilibrium_census(game, SearchSpace.full(game.population))
print("stable profiles:", [[sc.candidates[c] for c in p] for p in eqs])

# a nonatomic game with no stable profile at all
sc = S.builtin("wcr-noeq-nonatomic")
print(sc.name, "equilibria in the reduced space:", len(equilibrium_census(sc.game(), sc.space())))
