"""Brute-force ground truth for atomic instances.

Belief balls are listed state by state with numpy, and each state is
reduced to its *signature*: the argmax set of the state itself plus the
argmax set after one extra vote for each candidate. Tie-breakers are then
applied by trying every permutation, so nothing here relies on the
closed-form reasoning in :mod:`itervote.strategy` or
:mod:`itervote.uncertainty`.
"""

from __future__ import annotations

import enum
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .dynamics import Game, is_equilibrium
from .model import (Population, PreferenceOrder, StructureError,
                    UtilityScale)
from .strategy import (ViewPoint, pair_table, s_beats, s_dominates, wcr)
from .uncertainty import (BeliefBall, Metric, all_subsets, feasible_tie_sets,
                          possible_winners, score_range, threshold_winners)

DEFAULT_BOUND = 10**6


class BoundExceeded(StructureError):
    """Raised when an enumeration would exceed its configured size bound."""


class Relation(enum.Enum):
    BEATS = "beats"
    DOMINATES = "dominates"


# -- ball enumeration ----------------------------------------------------------

def _axes(ball: BeliefBall) -> list[np.ndarray]:
    s = [int(x) for x in ball.center]
    if ball.metric is Metric.MULTIPLICATIVE:
        # the rounded per-candidate range is the definition of the atomic ball
        return [np.arange(int(score_range(ball, c).lo), int(score_range(ball, c).hi) + 1)
                for c in range(ball.m)]
    k = math.floor(ball.radius)
    return [np.arange(max(0, x - k), x + k + 1) for x in s]


def oracle_ball(ball: BeliefBall, bound: int = DEFAULT_BOUND) -> np.ndarray:
    """All integer states of an atomic ball as an ``(N, m)`` array."""
    if not ball.atomic:
        raise StructureError("the oracle handles atomic (integer) balls only")
    axes = _axes(ball)
    box = math.prod(len(a) for a in axes)
    if box > bound:
        raise BoundExceeded(f"ball box has {box} states, bound is {bound}")
    grid = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    if ball.metric is Metric.L1:
        center = np.array([int(x) for x in ball.center])
        # radius may be fractional; integer distances compare exactly
        grid = grid[np.abs(grid - center).sum(axis=1) <= math.floor(ball.radius)]
    return grid


def _top_codes(states: np.ndarray) -> np.ndarray:
    weights = 1 << np.arange(states.shape[1], dtype=np.int64)
    top = states.max(axis=1, keepdims=True)
    return ((states == top) * weights).sum(axis=1)


def _decode(code: int, m: int) -> frozenset[int]:
    return frozenset(c for c in range(m) if code >> c & 1)


@lru_cache(maxsize=4096)
def signatures(ball: BeliefBall, bound: int = DEFAULT_BOUND):
    """Distinct ``(argmax, (argmax after +1 for c, ...))`` over the ball."""
    states = oracle_ball(ball, bound)
    m = ball.m
    if len(states) == 0:
        return frozenset()
    cols = [_top_codes(states)]
    for c in range(m):
        bumped = states.copy()
        bumped[:, c] += 1
        cols.append(_top_codes(bumped))
    rows = np.unique(np.stack(cols, axis=1), axis=0)
    return frozenset(
        (_decode(int(r[0]), m), tuple(_decode(int(x), m) for x in r[1:]))
        for r in rows
    )


def oracle_tie_sets(ball: BeliefBall, bound: int = DEFAULT_BOUND) -> frozenset:
    return frozenset(tie for tie, _ in signatures(ball, bound))


def oracle_possible_winners(ball: BeliefBall, bound: int = DEFAULT_BOUND) -> frozenset[int]:
    return frozenset(c for _, A in signatures(ball, bound) for c in range(ball.m) if c in A[c])


@lru_cache(maxsize=4096)
def oracle_pair_table(ball: BeliefBall, known_tiebreak: tuple | None = None,
                      bound: int = DEFAULT_BOUND) -> dict:
    m = ball.m
    orders = [known_tiebreak] if known_tiebreak else list(itertools.permutations(range(m)))
    table = {(x, y): set() for x in range(m) for y in range(m) if x != y}
    for _, A in signatures(ball, bound):
        for order in orders:
            out = [next(a for a in order if a in A[c]) for c in range(m)]
            for (x, y), acc in table.items():
                acc.add((out[x], out[y]))
    return {k: frozenset(v) for k, v in table.items()}


def oracle_relation(view: ViewPoint, x: int, y: int, relation: Relation | str,
                    bound: int = DEFAULT_BOUND) -> bool:
    """Evaluate beats or dominates by enumerating the voter's belief ball."""
    if x == y:
        raise StructureError("x and y must differ")
    relation = Relation(relation)
    table = oracle_pair_table(view.ball, view.known_tiebreak, bound)
    pref = view.prefs.prefers

    def beats(a, b):
        return any(pref(p, q) for p, q in table[(a, b)])

    if relation is Relation.BEATS:
        return beats(x, y)
    return beats(x, y) and not beats(y, x)


def oracle_wcr(view: ViewPoint, b: int, utilities: UtilityScale | None = None,
               bound: int = DEFAULT_BOUND) -> Fraction:
    u = utilities or view.utilities or UtilityScale.default_for(view.prefs)
    table = oracle_pair_table(view.ball, view.known_tiebreak, bound)
    worst = Fraction(0)
    for c in range(view.m):
        if c != b:
            for p, q in table[(c, b)]:
                worst = max(worst, u[p] - u[q])
    return worst


# -- equilibrium census --------------------------------------------------------

@dataclass(frozen=True)
class SearchSpace:
    """Allowed votes per voter (atomic) or per block (nonatomic)."""

    allowed: tuple[frozenset[int], ...]

    def __post_init__(self):
        allowed = tuple(frozenset(a) for a in self.allowed)
        if any(not a for a in allowed):
            raise StructureError("every voter needs at least one allowed vote")
        object.__setattr__(self, "allowed", allowed)

    @classmethod
    def full(cls, population: Population) -> "SearchSpace":
        return cls(tuple(frozenset(range(population.m)) for _ in range(population.n_units)))

    @classmethod
    def by_type(cls, population: Population, per_type: Sequence[Iterable[int]]) -> "SearchSpace":
        sets = [frozenset(s) for s in per_type]
        if len(sets) != len(population.types):
            raise StructureError("need one allowed set per type")
        return cls(tuple(sets[k] for k in population.unit_type))

    def contains(self, profile: Sequence[int]) -> bool:
        return all(c in a for c, a in zip(profile, self.allowed))


def _type_groups(pop: Population, space: SearchSpace):
    groups: dict[int, list[int]] = {}
    for u, k in enumerate(pop.unit_type):
        groups.setdefault(k, []).append(u)
    for k, units in groups.items():
        if len({space.allowed[u] for u in units}) != 1:
            raise StructureError(f"blocks of type {k} must share one allowed set")
    return groups


def census_size(game: Game, space: SearchSpace) -> int:
    pop = game.population
    if len(space.allowed) != pop.n_units:
        raise StructureError("search space does not match the population")
    if pop.is_atomic:
        return math.prod(len(a) for a in space.allowed)
    total = 1
    for k, units in _type_groups(pop, space).items():
        n, j = len(units), len(space.allowed[units[0]])
        total *= math.comb(n + j - 1, j - 1)
    return total


def iter_space(game: Game, space: SearchSpace):
    """Profiles of the space; nonatomic blocks of one type are interchangeable."""
    pop = game.population
    if pop.is_atomic:
        yield from itertools.product(*(sorted(a) for a in space.allowed))
        return
    groups = _type_groups(pop, space)
    keys = sorted(groups)
    per_type = [
        list(itertools.combinations_with_replacement(sorted(space.allowed[groups[k][0]]),
                                                     len(groups[k])))
        for k in keys
    ]
    for combo in itertools.product(*per_type):
        prof = [0] * pop.n_units
        for k, votes in zip(keys, combo):
            for u, c in zip(groups[k], votes):
                prof[u] = c
        yield tuple(prof)


def _census_shard(args):
    game, profiles = args
    return [p for p in profiles if is_equilibrium(p, game)[0]]


def equilibrium_census(game: Game, space: SearchSpace | None = None,
                       limit: int = 10**6, jobs: int = 1) -> list[tuple[int, ...]]:
    """Every profile of the space that is a voting equilibrium, sorted."""
    space = space or SearchSpace.full(game.population)
    size = census_size(game, space)
    if size > limit:
        raise BoundExceeded(f"search space has {size} profiles, limit is {limit}")
    if jobs > 1:
        profiles = list(iter_space(game, space))
        shards = [(game, profiles[k::jobs]) for k in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return sorted(p for part in pool.map(_census_shard, shards) for p in part)
    return sorted(p for p in iter_space(game, space) if is_equilibrium(p, game)[0])


@dataclass(frozen=True)
class ReductionReport:
    samples: int
    outside: int
    failures: tuple[tuple[int, ...], ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def validate_reduction(game: Game, space: SearchSpace, samples: int = 10**4,
                       seed: int = 0) -> ReductionReport:
    """Sample unrestricted profiles; at each one outside the space, some voter
    whose vote is excluded must have a move."""
    pop = game.population
    rng = np.random.default_rng(seed)
    draws = rng.integers(pop.m, size=(samples, pop.n_units))
    outside = 0
    failures = []
    for row in draws:
        prof = tuple(int(c) for c in row)
        if space.contains(prof):
            continue
        outside += 1
        excluded = [u for u, c in enumerate(prof) if c not in space.allowed[u]]
        seen = set()
        moved = False
        for u in excluded:
            key = (pop.unit_type[u], prof[u])
            if key in seen:
                continue
            seen.add(key)
            if game.response(prof, u) != frozenset({prof[u]}):
                moved = True
                break
        if not moved:
            failures.append(prof)
    return ReductionReport(samples, outside, tuple(failures))


# -- cross validation ----------------------------------------------------------

@dataclass(frozen=True)
class Family:
    """Exhaustive family of atomic balls: every center with scores in
    ``[0, max_score]`` for each ``m``, radius and metric.

    ``canonical`` keeps only sorted centers; every compared quantity is
    equivariant under relabeling candidates, and relabeled preferences are
    still covered because all preference orders are checked.
    """

    ms: tuple[int, ...] = (2, 3, 4)
    max_score: int = 8
    radii: tuple = (0, 1, 2, 3)
    metrics: tuple[Metric, ...] = (Metric.LINF, Metric.MULTIPLICATIVE, Metric.L1)
    canonical: bool = True
    all_prefs: bool = True
    bound: int = DEFAULT_BOUND

    def centers(self, m: int):
        rng = range(self.max_score + 1)
        if self.canonical:
            return itertools.combinations_with_replacement(rng, m)
        return itertools.product(rng, repeat=m)

    def balls(self):
        for m in self.ms:
            for metric in self.metrics:
                for r in self.radii:
                    for center in self.centers(m):
                        yield BeliefBall(tuple(center), metric, r, atomic=True)


@dataclass(frozen=True)
class Mismatch:
    check: str
    center: tuple
    metric: str
    radius: str
    detail: str

    def reproducer(self) -> str:
        return (f"BeliefBall({self.center!r}, Metric.{Metric(self.metric).name}, "
                f"Fraction('{self.radius}'), atomic=True)  # {self.check}: {self.detail}")


@dataclass
class CrossReport:
    balls: int = 0
    checks: int = 0
    mismatches: list[Mismatch] = field(default_factory=list)
    notes: list[Mismatch] = field(default_factory=list)

    def merge(self, other: "CrossReport") -> None:
        self.balls += other.balls
        self.checks += other.checks
        self.mismatches.extend(other.mismatches)
        self.notes.extend(other.notes)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _ordered(m: int, all_prefs: bool):
    if all_prefs:
        return [PreferenceOrder(p) for p in itertools.permutations(range(m))]
    return [PreferenceOrder(tuple(range(m)))]


def check_ball(ball: BeliefBall, all_prefs: bool = True,
               bound: int = DEFAULT_BOUND) -> CrossReport:
    rep = CrossReport(balls=1)
    m = ball.m
    key = (tuple(int(x) for x in ball.center), ball.metric.value, str(ball.radius))

    def bad(check, detail, notes=False):
        (rep.notes if notes else rep.mismatches).append(Mismatch(check, *key, detail))

    ties = oracle_tie_sets(ball, bound)
    for T in all_subsets(m):
        rep.checks += 1
        closed = T in set(feasible_tie_sets(ball))
        if closed != (T in ties):
            bad("tie_set_feasible", f"T={sorted(T)} closed={closed}")
    pw = oracle_possible_winners(ball, bound)
    rep.checks += 1
    if possible_winners(ball) != pw:
        bad("possible_winners", f"closed={sorted(possible_winners(ball))} oracle={sorted(pw)}")
    if ball.metric.candidate_wise:
        thr = threshold_winners(ball)
        if thr != pw:
            bad("threshold_winners", f"threshold={sorted(thr)} oracle={sorted(pw)}",
                notes=ball.metric is Metric.MULTIPLICATIVE)
    if m < 2:
        return rep
    o_table = oracle_pair_table(ball, None, bound)
    c_table = pair_table(ball, None)
    for k in o_table:
        rep.checks += 1
        if o_table[k] != c_table[k]:
            bad("pairs", f"{k}: closed={sorted(c_table[k])} oracle={sorted(o_table[k])}")
    for prefs in _ordered(m, all_prefs):
        view = ViewPoint(ball, prefs, 0)
        for x, y in o_table:
            rep.checks += 2
            if s_beats(view, x, y) != oracle_relation(view, x, y, Relation.BEATS, bound):
                bad("s_beats", f"prefs={prefs.order} x={x} y={y}")
            if s_dominates(view, x, y) != oracle_relation(view, x, y, Relation.DOMINATES, bound):
                bad("s_dominates", f"prefs={prefs.order} x={x} y={y}")
        u = UtilityScale.default_for(prefs)
        for b in range(m):
            rep.checks += 1
            cw, ow = wcr(view, b, u), oracle_wcr(view, b, u, bound)
            if cw != ow:
                bad("wcr", f"prefs={prefs.order} b={b} closed={cw} oracle={ow}")
    return rep


def _check_chunk(args) -> CrossReport:
    balls, all_prefs, bound = args
    rep = CrossReport()
    for ball in balls:
        rep.merge(check_ball(ball, all_prefs, bound))
    return rep


def cross_validate(family: Family | Iterable[BeliefBall], jobs: int = 1,
                   chunk: int = 64) -> CrossReport:
    """Compare closed forms with the oracle over every ball of a family.

    Multiplicative disagreements between the unrounded threshold and the
    rounded ranges are reported in ``notes``, not as mismatches.
    """
    if isinstance(family, Family):
        balls, all_prefs, bound = list(family.balls()), family.all_prefs, family.bound
    else:
        balls, all_prefs, bound = list(family), True, DEFAULT_BOUND
    chunks = [(balls[i:i + chunk], all_prefs, bound) for i in range(0, len(balls), chunk)]
    report = CrossReport()
    if jobs > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_check_chunk, chunks))
    else:
        parts = [_check_chunk(c) for c in chunks]
    for part in parts:  # input order, so the report is deterministic
        report.merge(part)
    return report
