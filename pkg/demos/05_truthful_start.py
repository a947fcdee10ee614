"""
Starting from the truth
=======================

From a truthful profile with a shared radius, moves are compromises, the
winner's score never drops and each block moves at most once. From other
starts this can fail.
"""
from itervote import scenarios as S
from itervote.dynamics import check_truthful_invariants

sc = S.builtin("truthful-uniform-r")
game, trace = S.execute(sc)
for mv in trace.moves:
    print(f"  {mv.mover}: {sc.candidates[mv.src]} -> {sc.candidates[mv.dst]} ({mv.kind.value})")
print("winner score:", [str(x) for x in trace.winner_scores])
print(check_truthful_invariants(trace, game))

sc = S.builtin("flaw-example")
game, trace = S.execute(sc)
labels = [lab for _, lab in sc.units()]
for mv in trace.moves:
    print(f"  {labels[mv.mover]}: {sc.candidates[mv.src]} -> {sc.candidates[mv.dst]} "
          f"({mv.kind.value})")
print("winner score:", [int(x) for x in trace.winner_scores])
print(check_truthful_invariants(trace, game, force=True))
