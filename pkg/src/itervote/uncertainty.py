"""Distance-based beliefs: metrics, belief balls, score ranges, tie sets.

A voter with radius ``r`` considers possible every score vector within
distance ``r`` of the scores she observes. Atomic voters observe the
scores without their own vote and only integer states are possible;
nonatomic voters observe the full vector and states are real-valued.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator

from .model import ScoreVector, StructureError, as_rat

INF = math.inf


class Metric(enum.Enum):
    MULTIPLICATIVE = "multiplicative"
    LINF = "linf"
    L1 = "l1"

    @property
    def candidate_wise(self) -> bool:
        return self is not Metric.L1


class UnsupportedMetric(StructureError):
    pass


@dataclass(frozen=True)
class ScoreRange:
    lo: Fraction
    hi: Fraction


@dataclass(frozen=True)
class BeliefBall:
    center: tuple[Fraction, ...]
    metric: Metric
    radius: Fraction
    atomic: bool = False

    def __post_init__(self):
        center = self.center.s if isinstance(self.center, ScoreVector) else self.center
        center = tuple(as_rat(x) for x in center)
        if any(x < 0 for x in center):
            raise StructureError("ball center has a negative score")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", as_rat(self.radius))
        if self.radius < 0:
            raise StructureError("radius must be nonnegative")
        if self.atomic and any(x.denominator != 1 for x in center):
            raise StructureError("atomic balls need integer centers")

    @property
    def m(self) -> int:
        return len(self.center)


def distance(metric: Metric, s, t) -> Fraction | float:
    """Distance between two score vectors (multiplicative may be infinite)."""
    s = [as_rat(x) for x in s]
    t = [as_rat(x) for x in t]
    if metric is Metric.L1:
        return sum((abs(a - b) for a, b in zip(s, t)), Fraction(0))
    if metric is Metric.LINF:
        return max(abs(a - b) for a, b in zip(s, t))
    worst: Fraction | float = Fraction(0)
    for a, b in zip(s, t):
        if a == b:
            continue
        if a == 0 or b == 0:
            return INF
        worst = max(worst, max(a / b, b / a) - 1)
    return worst


def score_range(ball: BeliefBall, c: int) -> ScoreRange:
    """Range of scores candidate ``c`` may take in the ball."""
    if not ball.metric.candidate_wise:
        raise UnsupportedMetric("l1 has no per-candidate score range")
    s, r = ball.center[c], ball.radius
    if ball.metric is Metric.MULTIPLICATIVE:
        lo, hi = s / (1 + r), s * (1 + r)
        if ball.atomic:
            lo, hi = Fraction(math.floor(lo)), Fraction(math.ceil(hi))
    else:
        lo, hi = max(Fraction(0), s - r), s + r
        if ball.atomic:
            lo, hi = Fraction(math.ceil(lo)), Fraction(math.floor(hi))
    return ScoreRange(lo, hi)


def _ranges(ball: BeliefBall) -> tuple[ScoreRange, ...]:
    return tuple(score_range(ball, c) for c in range(ball.m))


def _check_tie_set(ball: BeliefBall, T) -> frozenset[int]:
    T = frozenset(T)
    if not T:
        raise StructureError("tie set must be nonempty")
    if any(not 0 <= c < ball.m for c in T):
        raise StructureError("tie set names an unknown candidate")
    return T


# -- nonatomic (real-valued) states ------------------------------------------

def _l1_levels(center) -> list[Fraction]:
    pts = sorted(set(center) | {Fraction(0)})
    levels = list(pts)
    levels += [(a + b) / 2 for a, b in zip(pts, pts[1:])]
    levels.append(pts[-1] + 1)
    return levels


def _l1_tie_feasible(center, r, T) -> bool:
    # Cost is piecewise linear in the tie level with breakpoints at the
    # center scores; endpoints plus interval midpoints cover every optimum
    # (midpoints catch flat pieces where strictness differs at the ends).
    outside = [x for c, x in enumerate(center) if c not in T]
    for t in _l1_levels(center):
        if outside and t == 0:
            continue
        cost = sum((abs(center[c] - t) for c in T), Fraction(0))
        cost += sum((max(Fraction(0), x - t) for x in outside), Fraction(0))
        strict = any(x >= t for x in outside)
        if cost < r or (cost == r and not strict):
            return True
    return False


def _cw_tie_feasible(ranges, T, atomic: bool) -> bool:
    lo_t = max(ranges[c].lo for c in T)
    hi_t = min(ranges[c].hi for c in T)
    out = [ranges[a].lo for a in range(len(ranges)) if a not in T]
    if not out:
        return lo_t <= hi_t
    if atomic:
        return max(lo_t, max(out) + 1) <= hi_t
    return lo_t <= hi_t and hi_t > max(out)


# -- atomic (integer) states -------------------------------------------------

def interval_cost(ball: BeliefBall, c: int, a: int, b: int | None):
    """Cost of moving candidate ``c`` into the integer interval ``[a, b]``.

    For candidate-wise metrics the cost is 0 or infinite (reachable or
    not); for l1 it is the distance, so costs add up across candidates.
    """
    if b is not None and b < a:
        return INF
    if ball.metric.candidate_wise:
        rng = score_range(ball, c)
        top = rng.hi if b is None else min(rng.hi, b)
        return 0 if max(rng.lo, a) <= top else INF
    s = ball.center[c]
    if s < a:
        return a - s
    if b is not None and s > b:
        return s - b
    return 0


def atomic_levels(ball: BeliefBall) -> range:
    """Integer levels the maximum score can take in an atomic ball."""
    if ball.metric.candidate_wise:
        rs = _ranges(ball)
        return range(int(min(r.lo for r in rs)), int(max(r.hi for r in rs)) + 1)
    return range(0, math.floor(max(ball.center) + ball.radius) + 1)


@dataclass(frozen=True)
class LevelCosts:
    """Per-candidate costs of sitting at, just below, or under a level."""

    level: int
    top: tuple      # exactly at level
    below: tuple    # anywhere in [0, level-1]
    near: tuple     # exactly level-1
    low: tuple      # anywhere in [0, level-2]


@lru_cache(maxsize=65536)
def level_costs(ball: BeliefBall) -> tuple[LevelCosts, ...]:
    out = []
    for M in atomic_levels(ball):
        cs = range(ball.m)
        out.append(LevelCosts(
            M,
            tuple(interval_cost(ball, c, M, M) for c in cs),
            tuple(interval_cost(ball, c, 0, M - 1) for c in cs),
            tuple(interval_cost(ball, c, M - 1, M - 1) if M >= 1 else INF for c in cs),
            tuple(interval_cost(ball, c, 0, M - 2) for c in cs),
        ))
    return tuple(out)


def _atomic_tie_feasible(ball: BeliefBall, T) -> bool:
    r = ball.radius
    for lc in level_costs(ball):
        cost = sum(lc.top[c] for c in T) + sum(
            lc.below[a] for a in range(ball.m) if a not in T)
        if cost <= r:
            return True
    return False


def _atomic_possible_winner(ball: BeliefBall, c: int) -> bool:
    # c wins for some tie-breaker once it receives the voter's own vote:
    # either it already shares the maximum, or it sits one vote below it.
    r = ball.radius
    others = [a for a in range(ball.m) if a != c]
    for lc in level_costs(ball):
        rest = [min(lc.top[a], lc.below[a]) for a in others]
        base = sum(rest)
        if lc.top[c] + base <= r:
            return True
        bumps = [lc.top[a] - x for a, x in zip(others, rest) if lc.top[a] != INF]
        if bumps and lc.near[c] + base + min(bumps) <= r:
            return True
    return False


# -- public operations -------------------------------------------------------

def tie_set_feasible(ball: BeliefBall, T: Iterable[int]) -> bool:
    """Whether some state in the ball has argmax set exactly ``T``."""
    T = _check_tie_set(ball, T)
    if ball.atomic:
        return _atomic_tie_feasible(ball, T)
    if ball.metric.candidate_wise:
        return _cw_tie_feasible(_ranges(ball), T, atomic=False)
    return _l1_tie_feasible(ball.center, ball.radius, T)


def all_subsets(m: int) -> Iterator[frozenset[int]]:
    for k in range(1, m + 1):
        for combo in itertools.combinations(range(m), k):
            yield frozenset(combo)


@lru_cache(maxsize=65536)
def feasible_tie_sets(ball: BeliefBall) -> tuple[frozenset[int], ...]:
    if not ball.atomic and ball.metric.candidate_wise:
        ranges = _ranges(ball)
        return tuple(T for T in all_subsets(ball.m) if _cw_tie_feasible(ranges, T, False))
    return tuple(T for T in all_subsets(ball.m) if tie_set_feasible(ball, T))


def possible_winners(ball: BeliefBall) -> frozenset[int]:
    if ball.atomic:
        return frozenset(c for c in range(ball.m) if _atomic_possible_winner(ball, c))
    return frozenset().union(*feasible_tie_sets(ball))


def threshold_winners(ball: BeliefBall) -> frozenset[int]:
    """Possible winners by closed-form score thresholds.

    Nonatomic: ``s(c) >= s_max / (1+r)^2`` (multiplicative) or
    ``s(c) >= s_max - 2r`` (l-infinity). Atomic l-infinity: ``c`` is within
    ``2*floor(r) + 1`` votes of the strongest rival. Atomic multiplicative
    uses the unrounded threshold, which can disagree with the rounded
    ranges that define the ball.
    """
    s, r, m = ball.center, ball.radius, ball.m
    if not ball.metric.candidate_wise:
        raise UnsupportedMetric("no closed-form threshold for l1")
    top = max(s)
    if not ball.atomic:
        if ball.metric is Metric.MULTIPLICATIVE:
            return frozenset(c for c in range(m) if s[c] * (1 + r) ** 2 >= top)
        return frozenset(c for c in range(m) if s[c] >= top - 2 * r)
    if ball.metric is Metric.LINF:
        k = math.floor(r)
        out = set()
        for c in range(m):
            rival = max((s[a] for a in range(m) if a != c), default=Fraction(0))
            if s[c] + 2 * k + 1 >= rival:
                out.add(c)
        return frozenset(out)
    return frozenset(c for c in range(m) if s[c] * (1 + r) ** 2 >= top)


def ball_enumerate(ball: BeliefBall) -> Iterator[tuple[int, ...]]:
    """Yield every integer state of an atomic ball exactly once."""
    if not ball.atomic:
        raise UnsupportedMetric("only atomic (integer) balls can be enumerated")
    if ball.metric.candidate_wise:
        axes = [range(int(rg.lo), int(rg.hi) + 1) for rg in _ranges(ball)]
        yield from itertools.product(*axes)
        return
    center = [int(x) for x in ball.center]
    budget = math.floor(ball.radius)

    def rec(k, left):
        if k == len(center):
            yield ()
            return
        s = center[k]
        for v in range(max(0, s - left), s + left + 1):
            for rest in rec(k + 1, left - abs(v - s)):
                yield (v,) + rest

    yield from rec(0, budget)


def ball_size(ball: BeliefBall) -> int:
    """Number of integer states in an atomic ball (without listing them)."""
    if ball.metric.candidate_wise:
        return math.prod(int(rg.hi - rg.lo) + 1 for rg in _ranges(ball))
    return sum(1 for _ in ball_enumerate(ball))
