"""Voter decisions: outcome semantics, local dominance and worst-case regret.

Everything is driven by *outcome pairs*. For two votes ``x`` and ``y`` the
pair set holds every ``(f(s', x), f(s', y))`` a voter considers possible,
over all states ``s'`` in her belief ball and all tie-breakers (the same
tie-breaker applies to both votes). Beating, domination and regret are
all simple reductions of this set.

Nonatomic voters break ties among the top candidates with their own vote;
atomic voters add one vote and the tie-breaker resolves the new top set.
Atomic pair sets are computed from the possible (level, top set) shapes of
a state rather than by listing states; :mod:`itervote.oracle` provides the
brute-force enumeration used to cross-check them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from .model import (Behavior, PreferenceOrder, ScoreVector, StructureError,
                    UtilityScale, VoterType)
from .uncertainty import (INF, BeliefBall, Metric, feasible_tie_sets,
                          level_costs)

PairTable = dict  # (x, y) -> frozenset of (outcome voting x, outcome voting y)


class ConfigurationError(ValueError):
    pass


def top_set_after_vote(state: Sequence, c: int, atomic: bool) -> frozenset[int]:
    """Candidates tied for the win after a vote for ``c`` is added."""
    if atomic:
        bumped = list(state)
        bumped[c] += 1
        top = max(bumped)
        return frozenset(a for a, x in enumerate(bumped) if x == top)
    top = max(state)
    tied = frozenset(a for a, x in enumerate(state) if x == top)
    return frozenset({c}) if c in tied else tied


def modified_outcome(s, c: int, atomic: bool, tiebreak_choice=None) -> int:
    """Winner of ``s`` when the voter votes ``c``.

    ``tiebreak_choice`` is an order over candidates (best first) used for
    whatever ties remain; it defaults to the tie-breaker carried by ``s``.
    """
    if isinstance(s, ScoreVector):
        order = s.tiebreak if tiebreak_choice is None else tiebreak_choice
        s = s.s
    else:
        order = tuple(range(len(s))) if tiebreak_choice is None else tiebreak_choice
    tied = top_set_after_vote(s, c, atomic)
    return next(a for a in order if a in tied)


def _first(order, cands):
    return next(a for a in order if a in cands)


def pairs_for(Ax: frozenset, Ay: frozenset, known_tiebreak=None) -> frozenset:
    """Achievable (winner voting x, winner voting y) under one shared tie-breaker."""
    if known_tiebreak is not None:
        return frozenset({(_first(known_tiebreak, Ax), _first(known_tiebreak, Ay))})
    # p heads Ax and q heads Ay unless each would have to precede the other
    return frozenset(
        (p, q) for p in Ax for q in Ay
        if p == q or not (q in Ax and p in Ay)
    )


def _nonatomic_table(ball: BeliefBall, tb) -> PairTable:
    m = ball.m
    table = {(x, y): set() for x in range(m) for y in range(m) if x != y}
    for T in feasible_tie_sets(ball):
        A = [frozenset({c}) if c in T else T for c in range(m)]
        for (x, y), acc in table.items():
            acc |= pairs_for(A[x], A[y], tb)
    return {k: frozenset(v) for k, v in table.items()}


def _atomic_table(ball: BeliefBall, tb) -> PairTable:
    m, r = ball.m, ball.radius
    table = {(x, y): set() for x in range(m) for y in range(m) if x != y}
    seen: set = set()
    for lc in level_costs(ball):
        cands = [c for c in range(m) if lc.top[c] != INF]
        for k in range(1, len(cands) + 1):
            for combo in combinations(cands, k):
                T = frozenset(combo)
                base = sum(lc.top[c] for c in T) + sum(
                    lc.below[a] for a in range(m) if a not in T)
                if base > r:
                    continue
                # (vote category, extra cost) for a candidate outside T
                opts = {}
                for c in range(m):
                    if c in T:
                        opts[c] = [(frozenset({c}), 0)]
                    else:
                        opts[c] = [(A, lc_cost - lc.below[c])
                                   for A, lc_cost in ((T | {c}, lc.near[c]), (T, lc.low[c]))
                                   if lc_cost != INF]
                for (x, y), acc in table.items():
                    for Ax, dx in opts[x]:
                        for Ay, dy in opts[y]:
                            key = (x, y, Ax, Ay)
                            if key in seen:
                                continue
                            if base + dx + dy <= r:
                                seen.add(key)
                                acc |= pairs_for(Ax, Ay, tb)
    return {k: frozenset(v) for k, v in table.items()}


@lru_cache(maxsize=65536)
def pair_table(ball: BeliefBall, known_tiebreak: tuple | None = None) -> PairTable:
    """Outcome pairs for every ordered pair of distinct votes.

    With ``known_tiebreak`` the voter assumes that fixed tie-breaker rather
    than quantifying over all of them.
    """
    if ball.atomic:
        return _atomic_table(ball, known_tiebreak)
    return _nonatomic_table(ball, known_tiebreak)


@dataclass(frozen=True)
class ViewPoint:
    """What one voter (or block) sees: a belief ball plus her own type."""

    ball: BeliefBall
    prefs: PreferenceOrder
    current: int
    utilities: UtilityScale | None = None
    known_tiebreak: tuple | None = None

    @property
    def m(self) -> int:
        return self.ball.m

    def pairs(self, x: int, y: int) -> frozenset:
        if x == y:
            raise StructureError("x and y must differ")
        return pair_table(self.ball, self.known_tiebreak)[(x, y)]


def make_view(scores: Sequence, vote: int, vtype: VoterType, metric: Metric,
              atomic: bool, t: int = 0, known_tiebreak=None) -> ViewPoint:
    """Build the voter's view from the full score vector.

    Atomic voters remove their own vote from the center of the ball.
    """
    center = list(scores.s if isinstance(scores, ScoreVector) else scores)
    if atomic:
        center[vote] -= 1
    ball = BeliefBall(tuple(center), metric, vtype.radius_at(t), atomic)
    return ViewPoint(ball, vtype.prefs, vote, vtype.utilities, known_tiebreak)


def s_beats(view: ViewPoint, x: int, y: int) -> bool:
    prefers = view.prefs.prefers
    return any(prefers(p, q) for p, q in view.pairs(x, y))


@lru_cache(maxsize=65536)
def _beats_matrix(ball, prefs, tb) -> frozenset:
    table = pair_table(ball, tb)
    return frozenset(
        key for key, pairs in table.items()
        if any(prefs.prefers(p, q) for p, q in pairs)
    )


def s_dominates(view: ViewPoint, x: int, y: int) -> bool:
    if x == y:
        raise StructureError("x and y must differ")
    beats = _beats_matrix(view.ball, view.prefs, view.known_tiebreak)
    return (x, y) in beats and (y, x) not in beats


def dominating_set(view: ViewPoint, current: int | None = None,
                   filter_dominated: bool = True) -> frozenset[int]:
    """Candidates dominating the current vote and (by default) undominated."""
    cur = view.current if current is None else current
    beats = _beats_matrix(view.ball, view.prefs, view.known_tiebreak)

    def dom(a, b):
        return (a, b) in beats and (b, a) not in beats

    out = set()
    for d in range(view.m):
        if d == cur or not dom(d, cur):
            continue
        if filter_dominated and any(dom(e, d) for e in range(view.m) if e != d):
            continue
        out.add(d)
    return frozenset(out)


def ld_response(view: ViewPoint, behavior: Behavior = Behavior.STRICT_LD,
                current: int | None = None, filter_dominated: bool = True) -> frozenset[int]:
    """Response set under local dominance.

    ``filter_dominated=False`` drops the requirement that targets are
    themselves undominated (the older, more permissive variant).
    """
    if not behavior.is_ld:
        raise ConfigurationError(f"{behavior} is not a local-dominance behavior")
    cur = view.current if current is None else current
    D = dominating_set(view, cur, filter_dominated)
    if not D:
        return frozenset({cur})
    if behavior is Behavior.STRICT_LD:
        return frozenset({view.prefs.best_of(D)})
    return D


def _utilities(view: ViewPoint, utilities: UtilityScale | None) -> UtilityScale:
    if utilities is not None:
        return utilities
    if view.utilities is not None:
        return view.utilities
    return UtilityScale.default_for(view.prefs)


def regret(vtype: VoterType, s_prime, tie_set: Iterable[int], tb_top: int, b: int) -> Fraction:
    """Regret of voting ``b`` in a state whose top set is ``tie_set``.

    Uses the nonatomic outcome: a vote for a tied candidate makes it win,
    any other vote leaves the win to ``tb_top``.
    """
    if vtype.utilities is None:
        raise ConfigurationError("regret needs a utility scale")
    u = vtype.utilities
    T = frozenset(tie_set)
    if tb_top not in T:
        raise StructureError("tie-break top must belong to the tie set")
    m = s_prime.m if isinstance(s_prime, ScoreVector) else len(s_prime)

    def out(c):
        return c if c in T else tb_top

    return max(u[out(c)] for c in range(m)) - u[out(b)]


def wcr(view: ViewPoint, b: int, utilities: UtilityScale | None = None) -> Fraction:
    """Worst-case regret of voting ``b`` over the voter's belief ball."""
    u = _utilities(view, utilities)
    table = pair_table(view.ball, view.known_tiebreak)
    worst = Fraction(0)
    for c in range(view.m):
        if c == b:
            continue
        for p, q in table[(c, b)]:
            worst = max(worst, u[p] - u[q])
    return worst


def wcr_values(view: ViewPoint, utilities: UtilityScale | None = None) -> tuple[Fraction, ...]:
    u = _utilities(view, utilities)
    return tuple(wcr(view, b, u) for b in range(view.m))


def wcr_response(view: ViewPoint, utilities: UtilityScale | None = None,
                 current: int | None = None) -> int:
    """Vote minimizing worst-case regret.

    When every regret is zero the voter is never pivotal and keeps her
    vote; remaining ties go to the preferred candidate, then lower index.
    """
    cur = view.current if current is None else current
    vals = wcr_values(view, utilities)
    if all(v == 0 for v in vals):
        return cur
    return min(range(view.m), key=lambda c: (vals[c], view.prefs.rank(c), c))


def response(view: ViewPoint, behavior: Behavior, utilities=None,
             filter_dominated: bool = True) -> frozenset[int]:
    """Response set of a voter of the given behavior."""
    if behavior is Behavior.WCR:
        return frozenset({wcr_response(view, utilities)})
    return ld_response(view, behavior, filter_dominated=filter_dominated)
